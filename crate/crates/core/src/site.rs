//! Site percolation on the hypercubic torus Z^s, used to check the
//! site-threshold constants the renormalization certificate depends on.
//!
//! Sites are occupied in a uniformly random order; each replicate records
//! the first occupation count at which some cluster wraps. The canonical
//! wrap probability at density `phi` is then the binomial tail from that
//! count, and the threshold estimate is the crossing of two torus sizes.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::find_crossing;
use crate::forest::ClusterForest;
use crate::lattice::{Lattice, LatticeSpec};
use crate::rng;
use crate::stats;
use crate::sweep::{linear_grid, BinomialWindow};

/// Periodic Z^s with side `side`, as a lattice spec (the D/S split is
/// irrelevant for site percolation).
pub fn site_torus(s: usize, side: usize) -> Result<LatticeSpec> {
    if s < 2 {
        return Err(Error::config("s", "site tori need s >= 2"));
    }
    Ok(LatticeSpec::periodic(1, s - 1, side, side))
}

/// First occupation count at which some cluster wraps, one per replicate.
pub fn site_wrap_times(spec: &LatticeSpec, replicates: usize, seed: u64) -> Result<Vec<usize>> {
    let lattice = Lattice::new(*spec)?;
    let n = lattice.vertex_count();
    let mut adjacency: Vec<Vec<(u32, usize, bool)>> = vec![Vec::new(); n];
    for e in lattice.edges() {
        adjacency[e.a as usize].push((e.b, e.dir as usize, true));
        adjacency[e.b as usize].push((e.a, e.dir as usize, false));
    }
    let ndim = lattice.ndim();
    let run = |(forest, order, occupied): &mut (ClusterForest, Vec<u32>, Vec<bool>), r: usize| {
        forest.reset();
        occupied.fill(false);
        order.clear();
        order.extend(0..n as u32);
        let mut rng = rng::stream(seed, r as u64);
        for i in 0..n {
            let j = rng.gen_range(i..n);
            order.swap(i, j);
            let v = order[i];
            occupied[v as usize] = true;
            for &(u, dir, forward) in &adjacency[v as usize] {
                if occupied[u as usize] {
                    if forward {
                        forest.link(v, u, dir);
                    } else {
                        forest.link(u, v, dir);
                    }
                }
            }
            if forest.wrapped_mask() != 0 {
                return i + 1;
            }
        }
        n + 1
    };
    Ok((0..replicates)
        .into_par_iter()
        .map_init(
            || (ClusterForest::with_wrap(n, ndim), Vec::with_capacity(n), vec![false; n]),
            run,
        )
        .collect())
}

fn wrap_curve(times: &[usize], idx: &[usize], windows: &[BinomialWindow]) -> Vec<f64> {
    windows
        .iter()
        .map(|w| idx.iter().map(|&i| w.tail_from(times[i])).sum::<f64>() / idx.len() as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteThreshold {
    pub s: usize,
    pub sides: (usize, usize),
    pub replicates: usize,
    pub seed: u64,
    pub estimate: f64,
    pub ci_halfwidth: f64,
}

/// Crossing of the wrap curves of tori with sides `side` and `2 * side`,
/// searched on `[lo, hi]`, with a percentile-bootstrap half-width.
pub fn estimate_site_threshold(
    s: usize,
    side: usize,
    lo: f64,
    hi: f64,
    replicates: usize,
    seed: u64,
) -> Result<SiteThreshold> {
    let small = site_torus(s, side)?;
    let large = site_torus(s, 2 * side)?;
    let grid = linear_grid(lo, hi, 200);
    let windows = |spec: &LatticeSpec| -> Result<Vec<BinomialWindow>> {
        let n = spec.vertex_count()?;
        grid.iter().map(|&phi| BinomialWindow::new(n, phi)).collect()
    };
    let (ws, wl) = (windows(&small)?, windows(&large)?);
    let ts = site_wrap_times(&small, replicates, rng::derive_seed(seed, 0))?;
    let tl = site_wrap_times(&large, replicates, rng::derive_seed(seed, 1))?;
    let all: Vec<usize> = (0..replicates).collect();
    let estimate = find_crossing(&grid, &wrap_curve(&ts, &all, &ws), &wrap_curve(&tl, &all, &wl)).ok_or_else(|| {
        Error::NoCrossing {
            p: f64::NAN,
            lo,
            hi,
            diagnostics: format!("site wrap curves of sides {side} and {} do not cross", 2 * side),
        }
    })?;
    let mut rng = rng::stream(seed, rng::BOOTSTRAP_STREAM);
    let mut draws = Vec::new();
    for _ in 0..200 {
        let a: Vec<usize> = (0..replicates).map(|_| rng.gen_range(0..replicates)).collect();
        let b: Vec<usize> = (0..replicates).map(|_| rng.gen_range(0..replicates)).collect();
        if let Some(x) = find_crossing(&grid, &wrap_curve(&ts, &a, &ws), &wrap_curve(&tl, &b, &wl)) {
            draws.push(x);
        }
    }
    Ok(SiteThreshold {
        s,
        sides: (side, 2 * side),
        replicates,
        seed,
        estimate,
        ci_halfwidth: if draws.len() >= 2 {
            stats::percentile_halfwidth(&draws, 0.95)
        } else {
            0.0
        },
    })
}
