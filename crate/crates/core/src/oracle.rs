//! Exact results on tiny graphs, used as ground truth for the Monte Carlo
//! estimators.
//!
//! [`enumerate_counts`] visits all `2^E` configurations once and tabulates
//! integer counts by the number of open D- and S-edges. Any parameter point
//! is then a short weighted sum over that table. [`exact_by_deletion_contraction`]
//! is an independent method: it conditions on one edge at a time, contracting
//! it when open and deleting it when closed, and memoizes on the vertex
//! partition reached so far.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{face_masks, ClusterForest};
use crate::lattice::{Boundary, EdgeClass, Lattice, LatticeSpec};
use crate::rng;
use crate::sampler::Params;
use crate::stats;
use crate::sweep::kahan_sum;

pub const MAX_VERTICES: usize = 16;
pub const MAX_EDGES: usize = 24;
pub const MAX_DC_EDGES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TinyEdge {
    pub a: u32,
    pub b: u32,
    pub class: EdgeClass,
    /// Lattice direction from `a` to `b`, used for wrap detection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinyGraph {
    pub name: String,
    pub vertex_count: usize,
    pub edges: Vec<TinyEdge>,
    /// Number of tracked directions; zero for graphs without geometry.
    #[serde(default)]
    pub ndim: usize,
    /// Track winding around the torus (needs `dir` on every edge).
    #[serde(default)]
    pub periodic: bool,
    /// Per-vertex face masks for the spanning event (bit `2k` lower face in
    /// direction `k`, bit `2k + 1` upper face).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<LatticeSpec>,
}

impl TinyGraph {
    /// Graph without geometry from `(a, b, class)` triples.
    pub fn from_edges(name: &str, vertex_count: usize, edges: &[(u32, u32, EdgeClass)]) -> Result<Self> {
        let g = TinyGraph {
            name: name.to_string(),
            vertex_count,
            edges: edges
                .iter()
                .map(|&(a, b, class)| TinyEdge { a, b, class, dir: None })
                .collect(),
            ndim: 0,
            periodic: false,
            faces: None,
            spec: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// Ring of `n` D-edges, each step in direction 0; winding it is the wrap event.
    pub fn ring(name: &str, n: usize) -> Result<Self> {
        let g = TinyGraph {
            name: name.to_string(),
            vertex_count: n,
            edges: (0..n as u32)
                .map(|v| TinyEdge {
                    a: v,
                    b: (v + 1) % n as u32,
                    class: EdgeClass::DEdge,
                    dir: Some(0),
                })
                .collect(),
            ndim: 1,
            periodic: true,
            faces: None,
            spec: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_lattice(name: &str, spec: &LatticeSpec) -> Result<Self> {
        let lattice = Lattice::new(*spec)?;
        let edges = lattice
            .edges()
            .map(|e| TinyEdge {
                a: e.a,
                b: e.b,
                class: e.class,
                dir: Some(e.dir),
            })
            .collect();
        let periodic = spec.boundary == Boundary::Periodic;
        let g = TinyGraph {
            name: name.to_string(),
            vertex_count: lattice.vertex_count(),
            edges,
            ndim: lattice.ndim(),
            periodic,
            faces: (!periodic).then(|| face_masks(&lattice)),
            spec: Some(*spec),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertex_count == 0 || self.vertex_count > MAX_VERTICES {
            return Err(Error::Capacity(format!(
                "tiny graphs hold 1..={MAX_VERTICES} vertices, got {}",
                self.vertex_count
            )));
        }
        if self.edges.len() > MAX_EDGES {
            return Err(Error::Capacity(format!(
                "enumeration budget is {MAX_EDGES} edges, got {}",
                self.edges.len()
            )));
        }
        for e in &self.edges {
            if e.a as usize >= self.vertex_count || e.b as usize >= self.vertex_count {
                return Err(Error::config("graph.edges", format!("endpoint out of range in {:?}", e)));
            }
            if self.periodic && e.dir.is_none_or(|d| d as usize >= self.ndim) {
                return Err(Error::config("graph.edges", "periodic graphs need a direction on every edge"));
            }
        }
        if let Some(f) = &self.faces {
            if f.len() != self.vertex_count {
                return Err(Error::config("graph.faces", "one face mask per vertex"));
            }
        }
        Ok(())
    }

    pub fn count_class(&self, class: EdgeClass) -> usize {
        self.edges.iter().filter(|e| e.class == class).count()
    }

    fn forest(&self) -> ClusterForest {
        if self.periodic {
            ClusterForest::with_wrap(self.vertex_count, self.ndim)
        } else if let Some(f) = &self.faces {
            ClusterForest::with_faces(f.clone(), self.ndim)
        } else {
            ClusterForest::plain(self.vertex_count)
        }
    }

    fn add(&self, forest: &mut ClusterForest, e: &TinyEdge) {
        match e.dir {
            Some(dir) if self.periodic => {
                forest.link(e.a, e.b, dir as usize);
            }
            _ => {
                forest.union(e.a, e.b);
            }
        }
    }
}

/// Integer tables indexed by `(open D-edges, open S-edges)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTable {
    n_d: usize,
    n_s: usize,
    vertex_count: usize,
    configs: Vec<u64>,
    origin_size: Vec<u64>,
    origin_size_sq: Vec<u64>,
    sum_sq: Vec<u64>,
    sum_sq_sq: Vec<u64>,
    span: Option<Vec<u64>>,
    wrap: Option<Vec<u64>>,
    /// Row-major over ordered pairs `u < v`.
    pairs: Vec<Vec<u64>>,
}

impl ExactTable {
    fn zero(g: &TinyGraph) -> Self {
        let n_d = g.count_class(EdgeClass::DEdge);
        let n_s = g.count_class(EdgeClass::SEdge);
        let cells = (n_d + 1) * (n_s + 1);
        let n = g.vertex_count;
        ExactTable {
            n_d,
            n_s,
            vertex_count: n,
            configs: vec![0; cells],
            origin_size: vec![0; cells],
            origin_size_sq: vec![0; cells],
            sum_sq: vec![0; cells],
            sum_sq_sq: vec![0; cells],
            span: g.faces.as_ref().map(|_| vec![0; cells]),
            wrap: g.periodic.then(|| vec![0; cells]),
            pairs: vec![vec![0; cells]; n * (n - 1) / 2],
        }
    }

    fn add(&mut self, other: &ExactTable) {
        fn acc(a: &mut [u64], b: &[u64]) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        acc(&mut self.configs, &other.configs);
        acc(&mut self.origin_size, &other.origin_size);
        acc(&mut self.sum_sq, &other.sum_sq);
        acc(&mut self.origin_size_sq, &other.origin_size_sq);
        acc(&mut self.sum_sq_sq, &other.sum_sq_sq);
        if let (Some(a), Some(b)) = (&mut self.span, &other.span) {
            acc(a, b);
        }
        if let (Some(a), Some(b)) = (&mut self.wrap, &other.wrap) {
            acc(a, b);
        }
        for (a, b) in self.pairs.iter_mut().zip(&other.pairs) {
            acc(a, b);
        }
    }

    fn pair_index(&self, u: usize, v: usize) -> usize {
        let n = self.vertex_count;
        u * (2 * n - u - 1) / 2 + (v - u - 1)
    }

    fn weights(&self, params: Params) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.configs.len());
        for i in 0..=self.n_d {
            let wd = params.p.powi(i as i32) * (1.0 - params.p).powi((self.n_d - i) as i32);
            for j in 0..=self.n_s {
                w.push(wd * params.q.powi(j as i32) * (1.0 - params.q).powi((self.n_s - j) as i32));
            }
        }
        w
    }

    fn expect(weights: &[f64], counts: &[u64]) -> f64 {
        kahan_sum(weights.iter().zip(counts).map(|(w, &c)| w * c as f64))
    }

    pub fn evaluate(&self, params: Params) -> Result<ExactResult> {
        params.validate()?;
        let w = self.weights(params);
        let n = self.vertex_count;
        let mut connectivity = vec![vec![0.0; n]; n];
        for u in 0..n {
            connectivity[u][u] = 1.0;
            for v in u + 1..n {
                let pr = Self::expect(&w, &self.pairs[self.pair_index(u, v)]);
                connectivity[u][v] = pr;
                connectivity[v][u] = pr;
            }
        }
        let mut event_probs = BTreeMap::new();
        if let Some(c) = &self.span {
            event_probs.insert("span".to_string(), Self::expect(&w, c));
        }
        if let Some(c) = &self.wrap {
            event_probs.insert("wrap".to_string(), Self::expect(&w, c));
        }
        Ok(ExactResult {
            params,
            connectivity,
            chi_origin: Self::expect(&w, &self.origin_size),
            mean_cluster: Self::expect(&w, &self.sum_sq) / n as f64,
            moments: Some(SecondMoments {
                origin_size_sq: Self::expect(&w, &self.origin_size_sq),
                mean_cluster_sq: Self::expect(&w, &self.sum_sq_sq) / (n * n) as f64,
            }),
            event_probs,
        })
    }

    /// Number of configurations with `i` open D-edges and `j` open S-edges.
    pub fn config_count(&self, i: usize, j: usize) -> u64 {
        self.configs[i * (self.n_s + 1) + j]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub params: Params,
    /// `P(u <-> v)`.
    pub connectivity: Vec<Vec<f64>>,
    /// Expected size of the cluster of vertex 0.
    pub chi_origin: f64,
    /// Expected cluster size of a uniformly chosen vertex, `E[sum |C|^2] / N`.
    pub mean_cluster: f64,
    /// Second moments of the per-configuration observables behind
    /// `chi_origin` and `mean_cluster`; enumeration only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<SecondMoments>,
    /// `span`: some cluster touches opposite faces; `wrap`: some cluster
    /// winds around the torus.
    pub event_probs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMoments {
    /// `E[|C(0)|^2]`.
    pub origin_size_sq: f64,
    /// `E[(sum |C|^2 / N)^2]`.
    pub mean_cluster_sq: f64,
}

impl ExactResult {
    /// Standard deviation of one configuration's origin-cluster size.
    pub fn chi_origin_sd(&self) -> Option<f64> {
        self.moments.map(|m| (m.origin_size_sq - self.chi_origin.powi(2)).max(0.0).sqrt())
    }

    /// Standard deviation of one configuration's mean cluster size.
    pub fn mean_cluster_sd(&self) -> Option<f64> {
        self.moments.map(|m| (m.mean_cluster_sq - self.mean_cluster.powi(2)).max(0.0).sqrt())
    }

    /// Standard deviation of the indicator of a named event.
    pub fn event_sd(&self, name: &str) -> Option<f64> {
        self.event_probs.get(name).map(|&pr| (pr * (1.0 - pr)).max(0.0).sqrt())
    }
}

const CHUNK_BITS: u32 = 12;

/// Tabulate every configuration of `g`.
pub fn enumerate_counts(g: &TinyGraph) -> Result<ExactTable> {
    g.validate()?;
    let e = g.edges.len();
    let d_mask: u32 = g
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.class == EdgeClass::DEdge)
        .fold(0, |m, (i, _)| m | 1 << i);
    let total: u64 = 1 << e;
    let chunk = 1u64 << CHUNK_BITS.min(e as u32);
    let n_chunks = total / chunk;
    let zero = ExactTable::zero(g);
    let n = g.vertex_count;
    let table = (0..n_chunks)
        .into_par_iter()
        .fold(
            || (zero.clone(), g.forest(), vec![0u32; n]),
            |(mut t, mut forest, mut roots), c| {
                for mask in c * chunk..(c + 1) * chunk {
                    let mask = mask as u32;
                    forest.reset();
                    for (k, edge) in g.edges.iter().enumerate() {
                        if mask >> k & 1 == 1 {
                            g.add(&mut forest, edge);
                        }
                    }
                    let i = (mask & d_mask).count_ones() as usize;
                    let j = (mask & !d_mask).count_ones() as usize;
                    let cell = i * (t.n_s + 1) + j;
                    t.configs[cell] += 1;
                    let origin = forest.cluster_size(0) as u64;
                    t.origin_size[cell] += origin;
                    t.origin_size_sq[cell] += origin * origin;
                    t.sum_sq[cell] += forest.sum_sq();
                    t.sum_sq_sq[cell] += forest.sum_sq() * forest.sum_sq();
                    if let Some(s) = &mut t.span {
                        s[cell] += (forest.spanned_mask() != 0) as u64;
                    }
                    if let Some(w) = &mut t.wrap {
                        w[cell] += (forest.wrapped_mask() != 0) as u64;
                    }
                    for (v, r) in roots.iter_mut().enumerate() {
                        *r = forest.find(v as u32);
                    }
                    let mut idx = 0;
                    for u in 0..n {
                        for v in u + 1..n {
                            if roots[u] == roots[v] {
                                t.pairs[idx][cell] += 1;
                            }
                            idx += 1;
                        }
                    }
                }
                (t, forest, roots)
            },
        )
        .map(|(t, _, _)| t)
        .reduce(
            || zero.clone(),
            |mut a, b| {
                a.add(&b);
                a
            },
        );
    Ok(table)
}

pub fn exact_enumerate(g: &TinyGraph, params: Params) -> Result<ExactResult> {
    enumerate_counts(g)?.evaluate(params)
}

/// Increasing events handled by deletion-contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Connected(u32, u32),
    /// Some cluster touches both faces in some direction.
    Span,
}

struct Contraction<'a> {
    g: &'a TinyGraph,
    target: Target,
    probs: Vec<f64>,
    /// Index of the last edge touching each vertex.
    last_use: Vec<usize>,
    memo: HashMap<(usize, Vec<u8>), f64>,
}

impl Contraction<'_> {
    fn holds(&self, block: &[u8]) -> bool {
        match self.target {
            Target::Connected(u, v) => block[u as usize] == block[v as usize],
            Target::Span => {
                let faces = self.g.faces.as_ref().expect("span needs faces");
                let mut merged: HashMap<u8, u32> = HashMap::new();
                for (v, &b) in block.iter().enumerate() {
                    *merged.entry(b).or_default() |= faces[v];
                }
                merged
                    .values()
                    .any(|m| (0..self.g.ndim).any(|k| (m >> (2 * k)) & 0b11 == 0b11))
            }
        }
    }

    /// For two-terminal targets, vertices with no remaining edges cannot
    /// create new connections; forgetting their labels merges equivalent
    /// states.
    fn prune(&self, k: usize, block: Vec<u8>) -> Vec<u8> {
        let Target::Connected(u, v) = self.target else {
            return block;
        };
        let dead = |w: usize| w != u as usize && w != v as usize && self.last_use[w] < k;
        canonical(block.iter().enumerate().map(|(w, &b)| if dead(w) { DEAD } else { b }))
    }

    fn solve(&mut self, k: usize, block: Vec<u8>) -> f64 {
        if self.holds(&block) {
            return 1.0;
        }
        if k == self.g.edges.len() {
            return 0.0;
        }
        let key = (k, self.prune(k, block));
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let block = key.1.clone();
        let e = self.g.edges[k];
        let (ba, bb) = (block[e.a as usize], block[e.b as usize]);
        let value = if ba == bb {
            self.solve(k + 1, block)
        } else {
            let contracted = canonical(block.iter().map(|&x| if x == bb { ba } else { x }));
            let pe = self.probs[k];
            pe * self.solve(k + 1, contracted) + (1.0 - pe) * self.solve(k + 1, block)
        };
        self.memo.insert(key, value);
        value
    }
}

const DEAD: u8 = u8::MAX;

fn canonical(labels: impl Iterator<Item = u8>) -> Vec<u8> {
    let mut map = [DEAD; 256];
    let mut next = 0u8;
    labels
        .map(|l| {
            if l == DEAD {
                return DEAD;
            }
            if map[l as usize] == DEAD {
                map[l as usize] = next;
                next += 1;
            }
            map[l as usize]
        })
        .collect()
}

/// Probability of `target` by recursive deletion-contraction.
pub fn exact_by_deletion_contraction(g: &TinyGraph, params: Params, target: Target) -> Result<f64> {
    g.validate()?;
    params.validate()?;
    if g.edges.len() > MAX_DC_EDGES {
        return Err(Error::Capacity(format!(
            "deletion-contraction budget is {MAX_DC_EDGES} edges, got {}",
            g.edges.len()
        )));
    }
    match target {
        Target::Connected(u, v) if u as usize >= g.vertex_count || v as usize >= g.vertex_count => {
            return Err(Error::config("target", "vertex out of range"));
        }
        Target::Span if g.faces.is_none() => {
            return Err(Error::config("target", "graph has no faces to span"));
        }
        _ => {}
    }
    let mut dc = Contraction {
        g,
        target,
        probs: g.edges.iter().map(|e| params.for_class(e.class)).collect(),
        last_use: (0..g.vertex_count as u32)
            .map(|w| g.edges.iter().rposition(|e| e.a == w || e.b == w).unwrap_or(0))
            .collect(),
        memo: HashMap::new(),
    };
    Ok(dc.solve(0, (0..g.vertex_count as u8).collect()))
}

/// Connectivity matrix, chi and span probability by deletion-contraction.
pub fn deletion_contraction_result(g: &TinyGraph, params: Params) -> Result<ExactResult> {
    let n = g.vertex_count;
    let mut connectivity = vec![vec![0.0; n]; n];
    for u in 0..n {
        connectivity[u][u] = 1.0;
        for v in u + 1..n {
            let pr = exact_by_deletion_contraction(g, params, Target::Connected(u as u32, v as u32))?;
            connectivity[u][v] = pr;
            connectivity[v][u] = pr;
        }
    }
    let mut event_probs = BTreeMap::new();
    if g.faces.is_some() {
        event_probs.insert("span".into(), exact_by_deletion_contraction(g, params, Target::Span)?);
    }
    let chi_origin = kahan_sum(connectivity[0].iter().copied());
    let rows: Vec<f64> = connectivity.iter().map(|r| kahan_sum(r.iter().copied())).collect();
    Ok(ExactResult {
        params,
        chi_origin,
        mean_cluster: kahan_sum(rows.iter().copied()) / n as f64,
        moments: None,
        connectivity,
        event_probs,
    })
}

/// Largest absolute difference between two results over every shared field.
pub fn max_abs_difference(a: &ExactResult, b: &ExactResult) -> f64 {
    let mut worst = (a.chi_origin - b.chi_origin)
        .abs()
        .max((a.mean_cluster - b.mean_cluster).abs());
    for (ra, rb) in a.connectivity.iter().zip(&b.connectivity) {
        for (x, y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).abs());
        }
    }
    for (k, x) in &a.event_probs {
        if let Some(y) = b.event_probs.get(k) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

pub const MONOTONE_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Every `P(0 <-> v)` and every tracked event is nondecreasing in p and in q
/// on the 5x5 grid.
pub fn exact_monotonicity_check(g: &TinyGraph) -> Result<bool> {
    Ok(monotonicity_violations(g)?.is_empty())
}

/// Grid points `(p, q, axis, observable)` where an increase was not seen.
pub fn monotonicity_violations(g: &TinyGraph) -> Result<Vec<(f64, f64, char, String)>> {
    let table = enumerate_counts(g)?;
    let grid: Vec<Vec<ExactResult>> = MONOTONE_GRID
        .iter()
        .map(|&p| {
            MONOTONE_GRID
                .iter()
                .map(|&q| table.evaluate(Params { p, q }))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let observables = |r: &ExactResult| -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = r.connectivity[0]
            .iter()
            .enumerate()
            .map(|(v, &x)| (format!("P(0<->{v})"), x))
            .collect();
        out.extend(r.event_probs.iter().map(|(k, &x)| (k.clone(), x)));
        out
    };
    let mut bad = Vec::new();
    let n = MONOTONE_GRID.len();
    for i in 0..n {
        for j in 0..n {
            let here = observables(&grid[i][j]);
            let mut compare = |next: &ExactResult, axis: char| {
                for ((name, a), (_, b)) in here.iter().zip(observables(next)) {
                    if b < a - 1e-12 {
                        bad.push((MONOTONE_GRID[i], MONOTONE_GRID[j], axis, name.clone()));
                    }
                }
            };
            if i + 1 < n {
                compare(&grid[i + 1][j], 'p');
            }
            if j + 1 < n {
                compare(&grid[i][j + 1], 'q');
            }
        }
    }
    Ok(bad)
}

/// Monte Carlo estimate on a tiny graph: `(mean, standard error)` of each
/// quantity in [`ExactResult`] except the full connectivity matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinyMonteCarlo {
    pub replicates: usize,
    pub chi_origin: (f64, f64),
    pub mean_cluster: (f64, f64),
    pub event_freqs: BTreeMap<String, (f64, f64)>,
}

pub fn monte_carlo(g: &TinyGraph, params: Params, replicates: usize, seed: u64) -> Result<TinyMonteCarlo> {
    g.validate()?;
    params.validate()?;
    let rows: Vec<[f64; 4]> = (0..replicates)
        .into_par_iter()
        .map_init(
            || g.forest(),
            |forest, r| {
                forest.reset();
                let mut rng = rng::stream(seed, r as u64);
                for e in &g.edges {
                    if rng.gen::<f64>() < params.for_class(e.class) {
                        g.add(forest, e);
                    }
                }
                [
                    forest.cluster_size(0) as f64,
                    forest.sum_sq() as f64 / g.vertex_count as f64,
                    (forest.spanned_mask() != 0) as u8 as f64,
                    (forest.wrapped_mask() != 0) as u8 as f64,
                ]
            },
        )
        .collect();
    let column = |k: usize| stats::mean_and_stderr(rows.iter().map(|r| r[k]));
    let mut event_freqs = BTreeMap::new();
    if g.faces.is_some() {
        event_freqs.insert("span".to_string(), column(2));
    }
    if g.periodic {
        event_freqs.insert("wrap".to_string(), column(3));
    }
    Ok(TinyMonteCarlo {
        replicates,
        chi_origin: column(0),
        mean_cluster: column(1),
        event_freqs,
    })
}

/// Parameter points of the golden suite.
pub const GOLDEN_PARAMS: [(f64, f64); 3] = [(0.3, 0.6), (0.5, 0.5), (0.8, 0.2)];

/// Tiny instances of the golden suite.
pub fn golden_graphs() -> Result<Vec<TinyGraph>> {
    use EdgeClass::{DEdge as D, SEdge as S};
    let lat = |name: &str, d, s, ld, ls, b| TinyGraph::from_lattice(name, &LatticeSpec::new(d, s, ld, ls, b));
    let path: Vec<(u32, u32, EdgeClass)> = (0..4).map(|v| (v, v + 1, D)).collect();
    Ok(vec![
        TinyGraph::from_edges("single-d-edge", 2, &[(0, 1, D)])?,
        TinyGraph::from_edges("parallel-pair", 2, &[(0, 1, D), (0, 1, S)])?,
        TinyGraph::from_edges("d-path-4", 5, &path)?,
        TinyGraph::from_edges(
            "bridge",
            4,
            &[(0, 1, D), (0, 2, S), (1, 2, D), (1, 3, S), (2, 3, D)],
        )?,
        TinyGraph::ring("d-ring-5", 5)?,
        lat("free-2x2", 1, 1, 2, 2, Boundary::Free)?,
        lat("free-3x3", 1, 1, 3, 3, Boundary::Free)?,
        lat("free-4x3", 1, 1, 4, 3, Boundary::Free)?,
        lat("torus-3x3", 1, 1, 3, 3, Boundary::Periodic)?,
        lat("torus-4x2", 1, 1, 4, 2, Boundary::Periodic)?,
        lat("free-2x2x2-d1s2", 1, 2, 2, 2, Boundary::Free)?,
        lat("free-2x2x2-d2s1", 2, 1, 2, 2, Boundary::Free)?,
        lat("free-3x2x2-d1s2", 1, 2, 3, 2, Boundary::Free)?,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub graph: TinyGraph,
    pub result: ExactResult,
}

/// Exact results for every golden graph at every golden parameter point.
pub fn golden_suite() -> Result<Vec<GoldenRecord>> {
    let mut out = Vec::new();
    for graph in golden_graphs()? {
        let table = enumerate_counts(&graph)?;
        for &(p, q) in &GOLDEN_PARAMS {
            out.push(GoldenRecord {
                result: table.evaluate(Params::new(p, q)?)?,
                graph: graph.clone(),
            });
        }
    }
    Ok(out)
}

pub fn golden_to_jsonl(records: &[GoldenRecord]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

pub fn golden_from_jsonl(text: &str) -> Result<Vec<GoldenRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// The golden file shipped with the crate.
pub const SHIPPED_GOLDEN: &str = include_str!("../golden/oracle_suite.jsonl");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleDiff {
    pub graph: String,
    pub params: Params,
    pub field: String,
    pub stored: Option<f64>,
    pub computed: Option<f64>,
}

/// Bit-level differences between stored and recomputed records.
pub fn diff_golden(stored: &[GoldenRecord], computed: &[GoldenRecord]) -> Vec<OracleDiff> {
    let mut diffs = Vec::new();
    let key = |r: &GoldenRecord| (r.graph.name.clone(), r.result.params.p.to_bits(), r.result.params.q.to_bits());
    let index: BTreeMap<_, &GoldenRecord> = computed.iter().map(|r| (key(r), r)).collect();
    let stored_keys: BTreeMap<_, &GoldenRecord> = stored.iter().map(|r| (key(r), r)).collect();
    let mut push = |r: &GoldenRecord, field: String, a: Option<f64>, b: Option<f64>| {
        if a.map(f64::to_bits) != b.map(f64::to_bits) {
            diffs.push(OracleDiff {
                graph: r.graph.name.clone(),
                params: r.result.params,
                field,
                stored: a,
                computed: b,
            });
        }
    };
    for s in stored {
        let Some(c) = index.get(&key(s)) else {
            push(s, "record".into(), Some(0.0), None);
            continue;
        };
        if s.graph != c.graph {
            push(s, "graph".into(), Some(0.0), Some(1.0));
        }
        push(s, "chi_origin".into(), Some(s.result.chi_origin), Some(c.result.chi_origin));
        push(s, "mean_cluster".into(), Some(s.result.mean_cluster), Some(c.result.mean_cluster));
        let (sm, cm) = (s.result.moments, c.result.moments);
        push(s, "moments.origin_size_sq".into(), sm.map(|m| m.origin_size_sq), cm.map(|m| m.origin_size_sq));
        push(s, "moments.mean_cluster_sq".into(), sm.map(|m| m.mean_cluster_sq), cm.map(|m| m.mean_cluster_sq));
        let n = s.result.connectivity.len().max(c.result.connectivity.len());
        for u in 0..n {
            for v in 0..n {
                let get = |r: &ExactResult| r.connectivity.get(u).and_then(|row| row.get(v)).copied();
                push(s, format!("connectivity[{u}][{v}]"), get(&s.result), get(&c.result));
            }
        }
        let names: std::collections::BTreeSet<&String> =
            s.result.event_probs.keys().chain(c.result.event_probs.keys()).collect();
        for name in names {
            push(
                s,
                format!("event.{name}"),
                s.result.event_probs.get(name).copied(),
                c.result.event_probs.get(name).copied(),
            );
        }
    }
    for c in computed {
        if !stored_keys.contains_key(&key(c)) {
            push(c, "record".into(), None, Some(0.0));
        }
    }
    diffs
}
