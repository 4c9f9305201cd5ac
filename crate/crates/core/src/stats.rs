//! Small statistics helpers: means, standard errors, jackknife, quantiles.

/// Sample mean and standard error of the mean. A single sample has zero error.
pub fn mean_and_stderr(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut mean, mut m2) = (0usize, 0.0f64, 0.0f64);
    for x in values {
        n += 1;
        let delta = x - mean;
        mean += delta / n as f64;
        m2 += delta * (x - mean);
    }
    if n < 2 {
        return (mean, 0.0);
    }
    let var = m2 / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Delete-one jackknife estimate and standard error of `estimator` over `data`.
pub fn jackknife<T, F>(data: &[T], estimator: F) -> (f64, f64)
where
    F: Fn(&mut dyn Iterator<Item = &T>) -> f64,
{
    let n = data.len();
    let full = estimator(&mut data.iter());
    if n < 2 {
        return (full, 0.0);
    }
    let leave_out: Vec<f64> = (0..n)
        .map(|i| {
            let mut it = data.iter().enumerate().filter(move |&(j, _)| j != i).map(|(_, x)| x);
            estimator(&mut it)
        })
        .collect();
    let mean = leave_out.iter().sum::<f64>() / n as f64;
    let var = leave_out.iter().map(|x| (x - mean).powi(2)).sum::<f64>() * (n - 1) as f64 / n as f64;
    (full, var.sqrt())
}

/// Delete-one jackknife of the sample mean in linear time. The
/// leave-one-out means are `(S - x_i) / (n - 1)`.
pub fn jackknife_mean(data: &[f64]) -> (f64, f64) {
    let n = data.len();
    let total: f64 = data.iter().sum();
    let full = total / n as f64;
    if n < 2 {
        return (full, 0.0);
    }
    let loo = |x: f64| (total - x) / (n - 1) as f64;
    let mean = data.iter().map(|&x| loo(x)).sum::<f64>() / n as f64;
    let var = data.iter().map(|&x| (loo(x) - mean).powi(2)).sum::<f64>() * (n - 1) as f64 / n as f64;
    (full, var.sqrt())
}

/// Linear-interpolated quantile of already sorted data, `prob` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = prob.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Half-width of the central `level` percentile interval.
pub fn percentile_halfwidth(values: &[f64], level: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let tail = (1.0 - level) / 2.0;
    (quantile_sorted(&sorted, 1.0 - tail) - quantile_sorted(&sorted, tail)) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_error() {
        let (m, se) = mean_and_stderr([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_stderr([3.0]), (3.0, 0.0));
    }

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let data = [1.0, 4.0, 2.0, 8.0, 5.0];
        let (est, se) = jackknife(&data, |it| {
            let v: Vec<f64> = it.copied().collect();
            v.iter().sum::<f64>() / v.len() as f64
        });
        let (m, se_direct) = mean_and_stderr(data);
        assert!((est - m).abs() < 1e-15);
        assert!((se - se_direct).abs() < 1e-12);
        let (m2, se2) = jackknife_mean(&data);
        assert!((m2 - m).abs() < 1e-15 && (se2 - se).abs() < 1e-12);
    }

    #[test]
    fn quantiles() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.5), 2.0);
        assert_eq!(quantile_sorted(&v, 0.125), 0.5);
        assert_eq!(percentile_halfwidth(&[4.0, 0.0, 2.0, 1.0, 3.0], 1.0), 2.0);
    }
}
