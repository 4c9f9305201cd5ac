//! Newman-Ziff sweep over the S-edges at fixed p, convolved to canonical
//! wrapping probabilities.

use crossover::lattice::LatticeSpec;
use crossover::sweep::{linear_grid, sweep_q, SweepOptions};

fn main() -> crossover::Result<()> {
    let p = 0.6;
    let grid = linear_grid(0.2, 0.6, 9);
    for side in [32, 64] {
        let spec = LatticeSpec::periodic(1, 1, side, side);
        let out = sweep_q(&spec, p, &SweepOptions::new(200, 3).with_grid(grid.clone(), true))?;
        let canonical = out.canonical.expect("grid given");
        let wrap = canonical.mean_and_stderr(|o| o.wrap);
        println!("L = {side} (swept {} of {} S-edges)", out.curve.m_max, out.curve.total_s_edges);
        for (q, (m, se)) in grid.iter().zip(wrap) {
            println!("  q = {q:.2}  R = {m:.3} ± {se:.3}");
        }
    }
    // The curves cross near the Kesten line q = 1 - p = 0.4.
    Ok(())
}
