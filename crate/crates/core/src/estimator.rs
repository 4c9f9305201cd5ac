//! Critical-curve estimation and crossover-exponent fits.
//!
//! `q̂_c(p)` is the crossing of the wrapping-probability curves `R_L(q)` and
//! `R_2L(q)` on a ladder of tori. Below the critical point the smaller torus
//! wraps more often, above it the larger one does, and the crossing
//! converges to q_c as L grows. The curves come from the canonical
//! convolution of microcanonical sweeps and are interpolated by monotone
//! cubics; the confidence interval is a percentile bootstrap over replicates.
//!
//! Exponents are fitted by weighted least squares in log-log coordinates.
//! A finite window of `|p - p_c|` gives an effective exponent, which is what
//! every fit here reports.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::constants::ConstantsTable;
use crate::error::{Error, Result};
use crate::forest::ClusterForest;
use crate::interp::{bisect, Pchip};
use crate::lattice::{Boundary, Lattice, LatticeSpec};
use crate::rng;
use crate::sampler::{ChiMode, Params};
use crate::stats;
use crate::sweep::{linear_grid, sweep_on, CanonicalSamples, SweepOptions};

/// Susceptibility exponent of two-dimensional percolation, 43/18.
pub const GAMMA_2D: f64 = 43.0 / 18.0;

/// Susceptibility exponent in one dimension: `chi_1 ~ 2 / (1 - p)`.
pub const GAMMA_1D: f64 = 1.0;

/// Reference threshold p_c(d) of the p-sublattice.
pub fn reference_pc(d: usize, constants: &ConstantsTable) -> Result<f64> {
    if d == 1 {
        Ok(1.0)
    } else {
        constants.bond_pc(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum QcMethod {
    /// Crossing of R_L and R_2L.
    #[default]
    WrapCrossing,
    /// q at which R on the largest lattice reaches a target value.
    BinarySearchR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QcFlag {
    /// `p >= p_c(d)`: q_c is zero and nothing was simulated.
    AtOrAboveThreshold,
    /// p = 0 with s = 1: the S-sublattice is one-dimensional and q_c = 1.
    DegenerateOneDimensional,
    /// Some bootstrap resamples had no crossing.
    BootstrapFailures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub small: (usize, usize),
    pub large: (usize, usize),
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcEstimate {
    pub p: f64,
    pub qc_hat: f64,
    pub ci_halfwidth: f64,
    pub sizes_used: Vec<LatticeSpec>,
    pub method: QcMethod,
    pub replicates: usize,
    pub seed: u64,
    pub flags: Vec<QcFlag>,
    /// Crossing of each consecutive ladder pair; the estimate uses the last.
    pub pair_crossings: Vec<PairCrossing>,
    pub bootstrap_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcOptions {
    pub q_lo: f64,
    pub q_hi: f64,
    pub q_points: usize,
    pub replicates: usize,
    pub seed: u64,
    pub bootstrap: usize,
    /// Central coverage of the bootstrap percentile interval.
    pub ci_level: f64,
    pub method: QcMethod,
    /// Target R for [`QcMethod::BinarySearchR`].
    pub r_target: f64,
}

impl QcOptions {
    pub fn new(q_lo: f64, q_hi: f64, replicates: usize, seed: u64) -> Self {
        QcOptions {
            q_lo,
            q_hi,
            q_points: 200,
            replicates,
            seed,
            bootstrap: 200,
            ci_level: 0.95,
            method: QcMethod::WrapCrossing,
            r_target: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0 <= self.q_lo && self.q_lo < self.q_hi && self.q_hi <= 1.0) {
            return Err(Error::config(
                "estimate.q_lo/q_hi",
                format!("need 0 <= q_lo < q_hi <= 1, got [{}, {}]", self.q_lo, self.q_hi),
            ));
        }
        if self.q_points < 4 {
            return Err(Error::config("estimate.q_points", "need at least 4 grid points"));
        }
        if self.replicates < 2 {
            return Err(Error::config("replicates", "need at least 2 replicates"));
        }
        Ok(())
    }
}

/// Wrapping-probability crossing of two mean curves on a shared q-grid.
///
/// Looks for a `+ -> -` sign change of `R_small - R_large`, ignoring exact
/// ties where both curves saturate, and returns the bisected root of the
/// interpolated difference. With several candidates, the steepest drop wins.
pub fn find_crossing(q: &[f64], small: &[f64], large: &[f64]) -> Option<f64> {
    let diff: Vec<f64> = small.iter().zip(large).map(|(a, b)| a - b).collect();
    let nonzero: Vec<usize> = (0..diff.len()).filter(|&i| diff[i].abs() > 1e-12).collect();
    let (i, j) = nonzero
        .windows(2)
        .filter(|w| diff[w[0]] > 0.0 && diff[w[1]] < 0.0)
        .map(|w| (w[0], w[1]))
        .max_by(|a, b| {
            let da = diff[a.0] - diff[a.1];
            let db = diff[b.0] - diff[b.1];
            da.total_cmp(&db)
        })?;
    let fs = Pchip::new(q, small);
    let fl = Pchip::new(q, large);
    Some(bisect(|t| fs.eval(t) - fl.eval(t), q[i], q[j], 1e-12))
}

/// q at which an increasing curve first reaches `target`.
pub fn find_level(q: &[f64], r: &[f64], target: f64) -> Option<f64> {
    let i = (0..r.len() - 1).find(|&i| r[i] < target && r[i + 1] >= target)?;
    let f = Pchip::new(q, r);
    Some(bisect(|t| f.eval(t) - target, q[i], q[i + 1], 1e-12))
}

/// Canonical wrap samples on one lattice.
pub fn wrap_samples(spec: &LatticeSpec, p: f64, q_grid: &[f64], replicates: usize, seed: u64) -> Result<CanonicalSamples> {
    let lattice = Lattice::new(*spec)?;
    let options = SweepOptions::new(replicates, seed).with_grid(q_grid.to_vec(), true);
    let out = sweep_on(&lattice, p, &options)?;
    Ok(out.canonical.expect("grid was supplied"))
}

/// Estimate q_c(p) on a ladder of lattices (each twice the previous in every
/// side, smallest first).
pub fn estimate_qc(
    ladder: &[LatticeSpec],
    p: f64,
    options: &QcOptions,
    constants: &ConstantsTable,
) -> Result<QcEstimate> {
    options.validate()?;
    let first = ladder
        .first()
        .ok_or_else(|| Error::config("ladder", "ladder is empty"))?;
    if options.method == QcMethod::WrapCrossing && ladder.len() < 2 {
        return Err(Error::config("ladder", "wrap crossing needs at least two sizes"));
    }
    if ladder.iter().any(|s| s.boundary != Boundary::Periodic) {
        return Err(Error::config("lattice.boundary", "critical-point estimation runs on tori"));
    }
    let (d, s) = (first.d, first.s);
    if ladder.iter().any(|spec| spec.d != d || spec.s != s) {
        return Err(Error::config("ladder", "all sizes must share d and s"));
    }
    let pc = reference_pc(d, constants)?;
    let mut estimate = QcEstimate {
        p,
        qc_hat: 0.0,
        ci_halfwidth: 0.0,
        sizes_used: ladder.to_vec(),
        method: options.method,
        replicates: options.replicates,
        seed: options.seed,
        flags: Vec::new(),
        pair_crossings: Vec::new(),
        bootstrap_failures: 0,
    };
    if p >= pc {
        estimate.flags.push(QcFlag::AtOrAboveThreshold);
        return Ok(estimate);
    }
    if p == 0.0 && s == 1 {
        estimate.qc_hat = 1.0;
        estimate.flags.push(QcFlag::DegenerateOneDimensional);
        return Ok(estimate);
    }

    let grid = linear_grid(options.q_lo, options.q_hi, options.q_points);
    let samples = ladder
        .iter()
        .enumerate()
        .map(|(k, spec)| wrap_samples(spec, p, &grid, options.replicates, rng::derive_seed(options.seed, k as u64)))
        .collect::<Result<Vec<_>>>()?;
    qc_from_samples(&mut estimate, &grid, &samples, options)?;
    Ok(estimate)
}

fn qc_from_samples(
    estimate: &mut QcEstimate,
    grid: &[f64],
    samples: &[CanonicalSamples],
    options: &QcOptions,
) -> Result<()> {
    let all: Vec<Vec<usize>> = samples.iter().map(|s| (0..s.replicates()).collect()).collect();
    let means: Vec<Vec<f64>> = samples.iter().zip(&all).map(|(s, idx)| s.wrap_mean(idx)).collect();
    let sides = |spec: &LatticeSpec| (spec.side_d, spec.side_s);
    let no_crossing = |diagnostics: String| Error::NoCrossing {
        p: estimate.p,
        lo: options.q_lo,
        hi: options.q_hi,
        diagnostics,
    };

    let point = match options.method {
        QcMethod::WrapCrossing => {
            for k in 0..samples.len() - 1 {
                estimate.pair_crossings.push(PairCrossing {
                    small: sides(&estimate.sizes_used[k]),
                    large: sides(&estimate.sizes_used[k + 1]),
                    q: find_crossing(grid, &means[k], &means[k + 1]),
                });
            }
            let last = estimate.pair_crossings.last().expect("at least one pair");
            last.q.ok_or_else(|| {
                let n = means.len();
                no_crossing(format!(
                    "R_small ranges {:.3}..{:.3}, R_large ranges {:.3}..{:.3}",
                    means[n - 2][0],
                    means[n - 2][grid.len() - 1],
                    means[n - 1][0],
                    means[n - 1][grid.len() - 1]
                ))
            })?
        }
        QcMethod::BinarySearchR => {
            let r = means.last().expect("nonempty ladder");
            find_level(grid, r, options.r_target).ok_or_else(|| {
                no_crossing(format!("R ranges {:.3}..{:.3}", r[0], r[grid.len() - 1]))
            })?
        }
    };

    let mut rng = rng::stream(options.seed, rng::BOOTSTRAP_STREAM);
    let mut draws = Vec::with_capacity(options.bootstrap);
    let mut failures = 0;
    let used = match options.method {
        QcMethod::WrapCrossing => samples.len() - 2..samples.len(),
        QcMethod::BinarySearchR => samples.len() - 1..samples.len(),
    };
    for _ in 0..options.bootstrap {
        let curves: Vec<Vec<f64>> = samples[used.clone()]
            .iter()
            .map(|s| {
                let n = s.replicates();
                let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                s.wrap_mean(&idx)
            })
            .collect();
        let q = match options.method {
            QcMethod::WrapCrossing => find_crossing(grid, &curves[0], &curves[1]),
            QcMethod::BinarySearchR => find_level(grid, &curves[0], options.r_target),
        };
        match q {
            Some(q) => draws.push(q),
            None => failures += 1,
        }
    }
    estimate.qc_hat = point;
    estimate.ci_halfwidth = if draws.len() >= 2 {
        stats::percentile_halfwidth(&draws, options.ci_level)
    } else {
        0.0
    };
    estimate.bootstrap_failures = failures;
    if failures > 0 {
        estimate.flags.push(QcFlag::BootstrapFailures);
    }
    Ok(())
}

/// Sizes for one critical-point estimate.
///
/// The S-sides are `side_s`; the D-side of the smallest lattice is
/// `aspect * side_s[0] * chi^chi_power` (at least `min_side_d`), and larger
/// lattices scale it by the same factor as their S-side. With
/// `chi_power = 1` and d = 1 the D-side follows the mean run length, which
/// keeps the effective aspect ratio fixed as p approaches 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub side_s: Vec<usize>,
    #[serde(default = "one")]
    pub aspect: f64,
    #[serde(default)]
    pub chi_power: f64,
    #[serde(default = "two")]
    pub min_side_d: usize,
}

fn one() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

impl Ladder {
    pub fn square(sides: &[usize]) -> Self {
        Ladder {
            side_s: sides.to_vec(),
            aspect: 1.0,
            chi_power: 0.0,
            min_side_d: 2,
        }
    }

    pub fn specs(&self, d: usize, s: usize, chi_d: f64) -> Result<Vec<LatticeSpec>> {
        let base_s = *self
            .side_s
            .first()
            .ok_or_else(|| Error::config("ladder.side_s", "empty ladder"))?;
        if !(self.aspect > 0.0) || !chi_d.is_finite() {
            return Err(Error::config("ladder.aspect", "aspect and chi must be positive and finite"));
        }
        let base_d = (self.aspect * base_s as f64 * chi_d.powf(self.chi_power)).round() as usize;
        let base_d = base_d.max(self.min_side_d).max(2);
        Ok(self
            .side_s
            .iter()
            .map(|&side_s| {
                let side_d = (base_d as f64 * side_s as f64 / base_s as f64).round() as usize;
                LatticeSpec::periodic(d, s, side_d.max(2), side_s)
            })
            .collect())
    }
}

/// Mean cluster size estimate with jackknife standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiEstimate {
    pub spec: LatticeSpec,
    pub params: Params,
    pub replicates: usize,
    pub seed: u64,
    pub mode: ChiMode,
    /// Box average of the cluster size over all vertices.
    pub mean: f64,
    pub stderr: f64,
    /// Average size of the cluster of vertex 0.
    pub origin_mean: f64,
    pub origin_stderr: f64,
    /// Fraction of replicates that wrapped (or spanned, on free boxes).
    pub percolating_fraction: f64,
    /// More than 1% of replicates percolated; the estimate is not a
    /// subcritical susceptibility.
    pub supercritical: bool,
}

/// Per-replicate observables of independent Bernoulli configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateSample {
    pub mean_cluster: f64,
    pub origin: f64,
    pub largest: u32,
    pub percolates: bool,
}

/// Draw `replicates` configurations at `params` (replicate `r` from stream
/// `r` of `seed`) and summarise each one.
pub fn direct_samples(spec: &LatticeSpec, params: Params, replicates: usize, seed: u64, mode: ChiMode) -> Result<Vec<ReplicateSample>> {
    use rayon::prelude::*;
    params.validate()?;
    let lattice = Lattice::new(*spec)?;
    let run = |forest: &mut ClusterForest, r: usize| {
        forest.reset();
        let mut rng = rng::stream(seed, r as u64);
        for e in lattice.edges() {
            if rng.gen::<f64>() < params.for_class(e.class) {
                forest.link(e.a, e.b, e.dir as usize);
            }
        }
        let percolates = forest.wrapped_mask() != 0 || forest.spanned_mask() != 0;
        ReplicateSample {
            mean_cluster: mode.apply(forest.sum_sq(), forest.largest(), lattice.vertex_count(), percolates),
            origin: forest.cluster_size(lattice.origin()) as f64,
            largest: forest.largest(),
            percolates,
        }
    };
    Ok((0..replicates)
        .into_par_iter()
        .map_init(|| ClusterForest::for_lattice(&lattice), run)
        .collect())
}

pub fn estimate_chi(spec: &LatticeSpec, params: Params, replicates: usize, seed: u64, mode: ChiMode) -> Result<ChiEstimate> {
    if replicates == 0 {
        return Err(Error::config("replicates", "must be at least 1"));
    }
    let samples = direct_samples(spec, params, replicates, seed, mode)?;
    let box_values: Vec<f64> = samples.iter().map(|s| s.mean_cluster).collect();
    let origin_values: Vec<f64> = samples.iter().map(|s| s.origin).collect();
    let (mean, stderr) = stats::jackknife_mean(&box_values);
    let (origin_mean, origin_stderr) = stats::jackknife_mean(&origin_values);
    let percolating_fraction = samples.iter().filter(|s| s.percolates).count() as f64 / replicates as f64;
    Ok(ChiEstimate {
        spec: *spec,
        params,
        replicates,
        seed,
        mode,
        mean,
        stderr,
        origin_mean,
        origin_stderr,
        percolating_fraction,
        supercritical: percolating_fraction > 0.01,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub amplitude: f64,
    /// Residual-scaled standard error of the exponent.
    pub stderr: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Weighted least squares of `ln y = ln A + k ln x`; `y ~ A x^k`.
pub fn fit_power_law(points: &[(f64, f64)], weights: Option<&[f64]>) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::domain("a power-law fit needs at least three points"));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(Error::domain("power-law fit needs positive finite x and y"));
    }
    let w: Vec<f64> = match weights {
        Some(w) if w.len() == points.len() => w.to_vec(),
        Some(_) => return Err(Error::domain("one weight per point")),
        None => vec![1.0; points.len()],
    };
    if w.iter().any(|&wi| !(wi > 0.0) || !wi.is_finite()) {
        return Err(Error::domain("weights must be positive"));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let sw: f64 = w.iter().sum();
    let mx = w.iter().zip(&lx).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = w.iter().zip(&ly).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..points.len() {
        let (dx, dy) = (lx[i] - mx, ly[i] - my);
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * dy;
        syy += w[i] * dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::domain("all x values coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = (0..points.len())
        .map(|i| w[i] * (ly[i] - intercept - slope * lx[i]).powi(2))
        .sum();
    let dof = (points.len() - 2) as f64;
    let stderr = (rss / dof / sxx).sqrt();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - rss / syy };
    Ok(PowerLawFit {
        exponent: slope,
        amplitude: intercept.exp(),
        stderr,
        r_squared,
        points: points.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub p: f64,
    pub value: f64,
    pub weight: f64,
}

/// Fit of `q_c(p) ~ A |p - p_c(d)|^psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiFit {
    pub d: usize,
    pub s: usize,
    pub pc_d: f64,
    pub points: Vec<FitPoint>,
    pub psi_hat: f64,
    pub amplitude_hat: f64,
    pub stderr: f64,
    pub r_squared: f64,
    /// Slopes between neighbouring points, nearest to p_c last; a drift
    /// shows how much the exponent depends on the fit window.
    pub local_exponents: Vec<f64>,
}

/// Fit of `chi_d(p) ~ A |p - p_c(d)|^-gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiFit {
    pub d: usize,
    pub pc_d: f64,
    pub points: Vec<FitPoint>,
    pub gamma_hat: f64,
    pub amplitude_hat: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub local_exponents: Vec<f64>,
}

/// Log-log slopes between consecutive points sorted by decreasing `x`.
fn local_exponents(xy: &[(f64, f64)]) -> Vec<f64> {
    let mut sorted = xy.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    sorted
        .windows(2)
        .map(|w| (w[1].1.ln() - w[0].1.ln()) / (w[1].0.ln() - w[0].0.ln()))
        .collect()
}

fn inverse_variance(value: f64, halfwidth: f64) -> f64 {
    if halfwidth > 0.0 {
        (value / halfwidth).powi(2)
    } else {
        1.0
    }
}

/// Fit psi from q_c estimates below `pc_d`, weighted by inverse relative
/// variance of each estimate.
pub fn fit_psi(d: usize, s: usize, pc_d: f64, estimates: &[QcEstimate]) -> Result<PsiFit> {
    let points: Vec<FitPoint> = estimates
        .iter()
        .map(|e| FitPoint {
            p: e.p,
            value: e.qc_hat,
            weight: inverse_variance(e.qc_hat, e.ci_halfwidth),
        })
        .collect();
    if points.iter().any(|pt| pt.p >= pc_d) {
        return Err(Error::domain("psi fit needs every p below p_c(d)"));
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|pt| (pc_d - pt.p, pt.value)).collect();
    let w: Vec<f64> = points.iter().map(|pt| pt.weight).collect();
    let fit = fit_power_law(&xy, Some(&w))?;
    Ok(PsiFit {
        d,
        s,
        pc_d,
        points,
        psi_hat: fit.exponent,
        amplitude_hat: fit.amplitude,
        stderr: fit.stderr,
        r_squared: fit.r_squared,
        local_exponents: local_exponents(&xy),
    })
}

/// Fit gamma from `(p, chi, stderr)` triples below `pc_d`.
pub fn fit_gamma(d: usize, pc_d: f64, chi: &[(f64, f64, f64)]) -> Result<ChiFit> {
    if chi.iter().any(|c| c.0 >= pc_d) {
        return Err(Error::domain("gamma fit needs every p below p_c(d)"));
    }
    let points: Vec<FitPoint> = chi
        .iter()
        .map(|&(p, value, se)| FitPoint {
            p,
            value,
            weight: inverse_variance(value, se),
        })
        .collect();
    let xy: Vec<(f64, f64)> = points.iter().map(|pt| (pc_d - pt.p, pt.value)).collect();
    let w: Vec<f64> = points.iter().map(|pt| pt.weight).collect();
    let fit = fit_power_law(&xy, Some(&w))?;
    Ok(ChiFit {
        d,
        pc_d,
        points,
        gamma_hat: -fit.exponent,
        amplitude_hat: fit.amplitude,
        stderr: fit.stderr,
        r_squared: fit.r_squared,
        local_exponents: local_exponents(&xy).into_iter().map(|k| -k).collect(),
    })
}

/// Gamma fit for d = 1 from the exact `chi_1`.
pub fn exact_gamma_1(ps: &[f64]) -> Result<ChiFit> {
    let chi = ps
        .iter()
        .map(|&p| Ok((p, bounds::chi_1_exact(p)?, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    fit_gamma(1, 1.0, &chi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiGammaReport {
    pub d: usize,
    pub psi_hat: f64,
    pub psi_stderr: f64,
    pub gamma_hat: f64,
    pub gamma_stderr: f64,
    pub difference: f64,
    pub pooled_stderr: f64,
    /// `|psi - gamma| <= 2 sigma`.
    pub consistent_with_equal: bool,
    /// `psi - gamma <= 2 sigma`.
    pub consistent_with_le: bool,
    /// Literature value of gamma(d) where one exists (1 for d = 1, 43/18 for d = 2).
    pub reference_gamma: Option<f64>,
}

pub fn psi_gamma_report(psi: &PsiFit, gamma: &ChiFit) -> Result<PsiGammaReport> {
    if psi.d != gamma.d {
        return Err(Error::domain("psi and gamma fits must share d"));
    }
    let difference = psi.psi_hat - gamma.gamma_hat;
    let pooled_stderr = psi.stderr.hypot(gamma.stderr);
    Ok(PsiGammaReport {
        d: psi.d,
        psi_hat: psi.psi_hat,
        psi_stderr: psi.stderr,
        gamma_hat: gamma.gamma_hat,
        gamma_stderr: gamma.stderr,
        difference,
        pooled_stderr,
        consistent_with_equal: difference.abs() <= 2.0 * pooled_stderr,
        consistent_with_le: difference <= 2.0 * pooled_stderr,
        reference_gamma: match psi.d {
            1 => Some(GAMMA_1D),
            2 => Some(GAMMA_2D),
            _ => None,
        },
    })
}
