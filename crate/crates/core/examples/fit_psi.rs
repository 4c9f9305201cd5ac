//! Crossover exponent at d = 1: q_c(p) ~ (1 - p)^psi with psi = gamma(1) = 1,
//! for s = 1 and s = 2 (the exponent should not depend on s).
//!
//! The ladder scales the D-side with chi_1(p) so the boxes stay larger
//! than the D-correlation length as p -> 1.

use crossover::bounds::chi_1_exact;
use crossover::constants::ConstantsTable;
use crossover::estimator::{estimate_qc, exact_gamma_1, fit_psi, psi_gamma_report, Ladder, PsiFit, QcOptions};

fn psi_for(s: usize, ps: &[f64]) -> crossover::Result<PsiFit> {
    let ladder = Ladder { side_s: vec![8, 16], aspect: 0.5, chi_power: 1.0, min_side_d: 2 };
    let mut estimates = Vec::new();
    for (k, &p) in ps.iter().enumerate() {
        let chi = chi_1_exact(p)?;
        let specs = ladder.specs(1, s, chi)?;
        let opts = QcOptions::new(1.0 / (4.0 * s as f64 * chi), (8.0 / chi).min(1.0), 100, k as u64);
        let e = estimate_qc(&specs, p, &opts, &ConstantsTable::default())?;
        println!("s = {s}, p = {p}: q_c = {:.5} ± {:.5}, q_c chi_1 = {:.3}", e.qc_hat, e.ci_halfwidth, e.qc_hat * chi);
        estimates.push(e);
    }
    fit_psi(1, s, 1.0, &estimates)
}

fn main() -> crossover::Result<()> {
    let ps = [0.70, 0.80, 0.88, 0.93];
    let gamma = exact_gamma_1(&ps)?;
    let mut fits = Vec::new();
    for s in [1, 2] {
        let psi = psi_for(s, &ps)?;
        let report = psi_gamma_report(&psi, &gamma)?;
        println!(
            "s = {s}: psi = {:.3} ± {:.3}, local slopes {:.3?}, consistent with gamma(1) = 1: {}",
            psi.psi_hat, psi.stderr, psi.local_exponents, report.consistent_with_equal
        );
        fits.push(psi);
    }
    let diff = fits[1].psi_hat - fits[0].psi_hat;
    let se = fits[0].stderr.hypot(fits[1].stderr);
    println!("psi(s=2) - psi(s=1) = {diff:.3} ± {se:.3}");
    Ok(())
}
