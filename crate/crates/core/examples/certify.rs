//! Renormalization certificates: when (1 - 3 eps)(1 - e^{-alpha eps})^s
//! beats the site threshold of Z^s, (p, q) provably percolates.

use crossover::bounds::{renorm_certifies_percolation, RenormInputs};
use crossover::constants::ConstantsTable;

fn main() -> crossover::Result<()> {
    let constants = ConstantsTable::default();
    for (p, q, s) in [(0.99, 0.5, 2), (0.99, 0.2, 2), (0.999, 0.1, 3), (0.5, 0.9, 2), (0.01, 0.9, 2)] {
        let inputs = RenormInputs {
            p,
            q,
            s,
            epsilon: 0.1,
            alpha: 50.0,
            site_threshold_s: Some(constants.site_pc(s)?),
        };
        let c = renorm_certifies_percolation(&inputs)?;
        println!(
            "p = {p:<5} q = {q:<4} s = {s}: {:?} (q threshold {:.4}, margin {:?})",
            c.status, c.q_threshold, c.margin
        );
    }
    Ok(())
}
