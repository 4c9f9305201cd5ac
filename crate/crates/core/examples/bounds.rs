//! Closed-form bounds at d = 1: the q_c lower bound 1/(2 s chi_1) and the
//! series bound on chi(p, q) at half the lower bound.

use crossover::bounds::{chi_1_exact, kesten_line, qc_lower_bound, series_chi_bound, BoundInputs};

fn main() -> crossover::Result<()> {
    let s = 2;
    println!("{:>5} {:>8} {:>10} {:>10} {:>10}", "p", "chi_1", "q_lower", "kesten", "chi bound");
    for p in [0.1, 0.3, 0.5, 0.7, 0.9, 0.95] {
        let chi = chi_1_exact(p)?;
        let lower = qc_lower_bound(&BoundInputs::exact_d1(p, 0.0, s)?)?;
        let series = series_chi_bound(&BoundInputs::exact_d1(p, lower / 2.0, s)?)?;
        println!(
            "{p:>5} {chi:>8.3} {lower:>10.5} {:>10.3} {:>10.3}",
            kesten_line(p)?,
            series.finite().unwrap_or(f64::INFINITY)
        );
    }
    Ok(())
}
