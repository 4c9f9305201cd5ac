//! Microcanonical sweeps in q at fixed p, and their binomial convolution to
//! fixed q.
//!
//! A replicate draws the D-edges once as Bernoulli(p), then inserts S-edges
//! one at a time in a uniformly random order. After `m` insertions the
//! configuration is a uniform sample with exactly `m` open S-edges, so the
//! observable at fixed q is the Binomial(M_s, q) mixture over `m`.
//!
//! When only a q-grid is needed, the sweep can stop at the last `m` carrying
//! non-negligible binomial weight for any grid point.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::ClusterForest;
use crate::lattice::{Lattice, LatticeSpec};
use crate::rng;
use crate::sampler::ChiMode;

/// Log-weight below the mode at which binomial terms are dropped
/// (e^-50 ~ 2e-22, about ten standard deviations out).
const LOG_WEIGHT_CUTOFF: f64 = -50.0;

/// Binomial(n, q) probabilities restricted to `[lo, lo + weights.len())`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialWindow {
    pub n: usize,
    pub q: f64,
    pub lo: usize,
    pub weights: Vec<f64>,
    /// `tail[i]` is the weight of `m >= lo + i`.
    tail: Vec<f64>,
}

impl BinomialWindow {
    pub fn new(n: usize, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("q = {q} is not a probability")));
        }
        let (lo, weights) = if q == 0.0 {
            (0, vec![1.0])
        } else if q == 1.0 {
            (n, vec![1.0])
        } else {
            let mode = (((n + 1) as f64 * q).floor() as usize).min(n);
            let odds = (q / (1.0 - q)).ln();
            let mut up = Vec::new();
            let mut lw = 0.0;
            let mut m = mode;
            while m < n {
                lw += ((n - m) as f64).ln() - ((m + 1) as f64).ln() + odds;
                if lw < LOG_WEIGHT_CUTOFF {
                    break;
                }
                up.push(lw);
                m += 1;
            }
            let mut down = Vec::new();
            let mut lw = 0.0;
            let mut m = mode;
            while m > 0 {
                // w(m-1)/w(m) = m / (n - m + 1) * (1 - q) / q
                lw += (m as f64).ln() - ((n - m + 1) as f64).ln() - odds;
                if lw < LOG_WEIGHT_CUTOFF {
                    break;
                }
                down.push(lw);
                m -= 1;
            }
            let lo = mode - down.len();
            let logs: Vec<f64> = down.iter().rev().copied().chain(std::iter::once(0.0)).chain(up).collect();
            let mut weights: Vec<f64> = logs.iter().map(|&l| l.exp()).collect();
            let total = kahan_sum(weights.iter().copied());
            for w in &mut weights {
                *w /= total;
            }
            (lo, weights)
        };
        let mut tail = vec![0.0; weights.len()];
        let mut acc = 0.0;
        for i in (0..weights.len()).rev() {
            acc += weights[i];
            tail[i] = acc;
        }
        Ok(BinomialWindow {
            n,
            q,
            lo,
            weights,
            tail,
        })
    }

    /// Last `m` carrying weight.
    pub fn hi(&self) -> usize {
        self.lo + self.weights.len() - 1
    }

    /// `sum_m w(m) values[m]`; `values` must cover the window.
    pub fn apply(&self, values: &[f64]) -> f64 {
        kahan_sum(
            self.weights
                .iter()
                .zip(&values[self.lo..=self.hi()])
                .map(|(w, v)| w * v),
        )
    }

    /// Probability that `m >= threshold`.
    pub fn tail_from(&self, threshold: usize) -> f64 {
        if threshold <= self.lo {
            1.0
        } else if threshold > self.hi() {
            0.0
        } else {
            self.tail[threshold - self.lo]
        }
    }
}

pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Observables at one value of m or q.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Observables {
    /// Wrap (periodic) or span (free) indicator frequency.
    pub wrap: f64,
    /// Finite-volume mean cluster size under the sweep's [`ChiMode`].
    pub mean_cluster: f64,
    /// Largest cluster as a fraction of all vertices.
    pub largest_frac: f64,
}

/// Replicate-averaged microcanonical curve at fixed p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub spec: LatticeSpec,
    pub p: f64,
    pub seed: u64,
    pub replicate_count: usize,
    pub chi_mode: ChiMode,
    /// Total number of S-edges, M_s.
    pub total_s_edges: usize,
    /// Index of the last recorded m; equals `total_s_edges` for a full sweep.
    pub m_max: usize,
    /// Entry `m` holds the averages after `m` S-edge insertions.
    pub micro: Vec<Observables>,
}

impl SweepCurve {
    pub fn is_truncated(&self) -> bool {
        self.m_max < self.total_s_edges
    }
}

/// Per-replicate canonical observables on a q-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSamples {
    pub q: Vec<f64>,
    /// `rows[r][i]` is replicate `r` at `q[i]`.
    pub rows: Vec<Vec<Observables>>,
}

impl CanonicalSamples {
    pub fn replicates(&self) -> usize {
        self.rows.len()
    }

    /// Mean and standard error over replicates of one observable at every grid point.
    pub fn mean_and_stderr(&self, f: impl Fn(&Observables) -> f64) -> Vec<(f64, f64)> {
        (0..self.q.len())
            .map(|i| crate::stats::mean_and_stderr(self.rows.iter().map(|row| f(&row[i]))))
            .collect()
    }

    /// Mean wrap probability over the replicates selected by `idx`.
    pub fn wrap_mean(&self, idx: &[usize]) -> Vec<f64> {
        let mut acc = vec![0.0; self.q.len()];
        for &r in idx {
            for (a, o) in acc.iter_mut().zip(&self.rows[r]) {
                *a += o.wrap;
            }
        }
        let n = idx.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub curve: SweepCurve,
    pub canonical: Option<CanonicalSamples>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub replicates: usize,
    pub seed: u64,
    /// q values at which per-replicate canonical observables are produced.
    #[serde(default)]
    pub q_grid: Vec<f64>,
    /// Stop each replicate once every grid window is covered.
    #[serde(default)]
    pub truncate: bool,
    #[serde(default)]
    pub chi_mode: ChiMode,
}

impl SweepOptions {
    pub fn new(replicates: usize, seed: u64) -> Self {
        SweepOptions {
            replicates,
            seed,
            q_grid: Vec::new(),
            truncate: false,
            chi_mode: ChiMode::default(),
        }
    }

    pub fn with_grid(mut self, q_grid: Vec<f64>, truncate: bool) -> Self {
        self.q_grid = q_grid;
        self.truncate = truncate;
        self
    }

    pub fn with_chi_mode(mut self, mode: ChiMode) -> Self {
        self.chi_mode = mode;
        self
    }
}

/// Evenly spaced grid of `points` values on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

struct Workspace {
    forest: ClusterForest,
    perm: Vec<u32>,
}

struct ReplicateTrace {
    wrap_at: Option<usize>,
    mean_cluster: Vec<f64>,
    largest_frac: Vec<f64>,
    canonical: Vec<Observables>,
}

/// Read-only per-lattice state shared by all replicates.
struct SweepPlan<'a> {
    lattice: &'a Lattice,
    p: f64,
    /// S-edge slot ids (`v * s + k`) present on this lattice; `None` when
    /// every slot carries an edge.
    slots: Option<Vec<u32>>,
    total: usize,
    m_max: usize,
    windows: Vec<BinomialWindow>,
    chi_mode: ChiMode,
}

impl SweepPlan<'_> {
    fn run(&self, ws: &mut Workspace, seed: u64, replicate: usize) -> ReplicateTrace {
        let lattice = self.lattice;
        let spec = lattice.spec();
        let (d, s) = (spec.d, spec.s);
        let n = lattice.vertex_count();
        let mut rng = rng::stream(seed, replicate as u64);
        let forest = &mut ws.forest;
        forest.reset();

        for v in 0..n as u32 {
            for dir in 0..d {
                if let Some((b, _)) = lattice.forward(v, dir) {
                    if rng.gen::<f64>() < self.p {
                        forest.link(v, b, dir);
                    }
                }
            }
        }

        let mut mean_cluster = Vec::with_capacity(self.m_max + 1);
        let mut largest_frac = Vec::with_capacity(self.m_max + 1);
        let mut wrap_at = None;
        let mut record = |forest: &ClusterForest, m: usize| {
            let percolating = forest.wrapped_mask() != 0 || forest.spanned_mask() != 0;
            if percolating && wrap_at.is_none() {
                wrap_at = Some(m);
            }
            mean_cluster.push(self.chi_mode.apply(forest.sum_sq(), forest.largest(), n, percolating));
            largest_frac.push(forest.largest() as f64 / n as f64);
        };
        record(forest, 0);

        let perm = &mut ws.perm;
        perm.clear();
        match &self.slots {
            Some(slots) => perm.extend_from_slice(slots),
            None => perm.extend(0..self.total as u32),
        }
        for i in 0..self.m_max {
            let j = rng.gen_range(i..self.total);
            perm.swap(i, j);
            let slot = perm[i] as usize;
            let (v, dir) = ((slot / s) as u32, d + slot % s);
            let (b, _) = lattice.forward(v, dir).expect("slot carries an edge");
            forest.link(v, b, dir);
            record(forest, i + 1);
        }

        let canonical = self
            .windows
            .iter()
            .map(|w| Observables {
                wrap: wrap_at.map_or(0.0, |m| w.tail_from(m)),
                mean_cluster: w.apply(&mean_cluster),
                largest_frac: w.apply(&largest_frac),
            })
            .collect();
        ReplicateTrace {
            wrap_at,
            mean_cluster,
            largest_frac,
            canonical,
        }
    }
}

/// Run `options.replicates` independent sweeps at fixed `p`.
///
/// Replicate `r` reads random stream `r` of `options.seed`; averages are
/// accumulated in replicate order, so the output does not depend on the
/// size of the worker pool.
pub fn sweep_q(spec: &LatticeSpec, p: f64, options: &SweepOptions) -> Result<SweepOutput> {
    let lattice = Lattice::new(*spec)?;
    sweep_on(&lattice, p, options)
}

pub fn sweep_on(lattice: &Lattice, p: f64, options: &SweepOptions) -> Result<SweepOutput> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("p = {p} is not a probability")));
    }
    if options.replicates == 0 {
        return Err(Error::config("replicates", "must be at least 1"));
    }
    let spec = *lattice.spec();
    let total = lattice.s_edge_count();
    let windows = options
        .q_grid
        .iter()
        .map(|&q| BinomialWindow::new(total, q))
        .collect::<Result<Vec<_>>>()?;
    let m_max = if options.truncate && !windows.is_empty() {
        windows.iter().map(BinomialWindow::hi).max().unwrap_or(total)
    } else {
        total
    };
    let all_present = (spec.d..spec.ndim()).all(|k| spec.edges_in_dir(k) == lattice.vertex_count());
    let slots = if all_present {
        None
    } else {
        let s = spec.s;
        let slots: Vec<u32> = (0..lattice.vertex_count() * s)
            .filter(|&slot| lattice.forward((slot / s) as u32, spec.d + slot % s).is_some())
            .map(|slot| slot as u32)
            .collect();
        Some(slots)
    };
    let plan = SweepPlan {
        lattice,
        p,
        slots,
        total,
        m_max,
        windows,
        chi_mode: options.chi_mode,
    };

    let mut sums = vec![Observables::default(); m_max + 1];
    let mut rows = Vec::with_capacity(options.replicates);
    let chunk = (rayon::current_num_threads() * 2).max(1);
    let new_workspace = || Workspace {
        forest: ClusterForest::for_lattice(lattice),
        perm: Vec::with_capacity(total),
    };
    for start in (0..options.replicates).step_by(chunk) {
        let end = (start + chunk).min(options.replicates);
        let traces: Vec<ReplicateTrace> = (start..end)
            .into_par_iter()
            .map_init(new_workspace, |ws, r| plan.run(ws, options.seed, r))
            .collect();
        for trace in traces {
            let wrap_at = trace.wrap_at.unwrap_or(usize::MAX);
            for (m, acc) in sums.iter_mut().enumerate() {
                acc.mean_cluster += trace.mean_cluster[m];
                acc.largest_frac += trace.largest_frac[m];
                if m >= wrap_at {
                    acc.wrap += 1.0;
                }
            }
            rows.push(trace.canonical);
        }
    }
    let reps = options.replicates as f64;
    for acc in &mut sums {
        acc.wrap /= reps;
        acc.mean_cluster /= reps;
        acc.largest_frac /= reps;
    }
    let curve = SweepCurve {
        spec,
        p,
        seed: options.seed,
        replicate_count: options.replicates,
        chi_mode: options.chi_mode,
        total_s_edges: total,
        m_max,
        micro: sums,
    };
    let canonical = (!options.q_grid.is_empty()).then(|| CanonicalSamples {
        q: options.q_grid.clone(),
        rows,
    });
    Ok(SweepOutput { curve, canonical })
}

/// Canonical observables of a microcanonical curve at `q`.
pub fn convolve_canonical(curve: &SweepCurve, q: f64) -> Result<Observables> {
    let window = BinomialWindow::new(curve.total_s_edges, q)?;
    if window.hi() > curve.m_max {
        return Err(Error::domain(format!(
            "q = {q} needs m up to {} but the sweep stopped at {}",
            window.hi(),
            curve.m_max
        )));
    }
    let pick = |f: fn(&Observables) -> f64| -> Vec<f64> { curve.micro.iter().map(f).collect() };
    Ok(Observables {
        wrap: window.apply(&pick(|o| o.wrap)),
        mean_cluster: window.apply(&pick(|o| o.mean_cluster)),
        largest_frac: window.apply(&pick(|o| o.largest_frac)),
    })
}
