//! Seeded bond configurations, the monotone coupling, and cluster
//! decomposition.

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::ClusterForest;
use crate::lattice::{Boundary, EdgeClass, Lattice, LatticeSpec};
use crate::rng;

/// Open probabilities: `p` on D-edges, `q` on S-edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub p: f64,
    pub q: f64,
}

impl Params {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let params = Params { p, q };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::domain(format!("p = {} is not a probability", self.p)));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::domain(format!("q = {} is not a probability", self.q)));
        }
        Ok(())
    }

    pub fn for_class(&self, class: EdgeClass) -> f64 {
        match class {
            EdgeClass::DEdge => self.p,
            EdgeClass::SEdge => self.q,
        }
    }
}

/// One open/closed assignment of every edge, indexed in canonical edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct BondConfig {
    pub spec: LatticeSpec,
    pub params: Params,
    pub seed: u64,
    pub open: FixedBitSet,
}

impl BondConfig {
    pub fn open_count(&self) -> usize {
        self.open.count_ones(..)
    }

    pub fn is_open(&self, edge: usize) -> bool {
        self.open.contains(edge)
    }
}

/// Draw a configuration: edge `e` (canonical order) is open iff the `e`-th
/// uniform of stream 0 falls below its class probability. This is exactly
/// [`sample_config_coupled`] thresholded at `params`.
pub fn sample_config(spec: &LatticeSpec, params: Params, seed: u64) -> Result<BondConfig> {
    params.validate()?;
    let lattice = Lattice::new(*spec)?;
    let mut rng = rng::stream(seed, 0);
    let mut open = FixedBitSet::with_capacity(lattice.edge_count());
    for e in lattice.edges() {
        let u: f64 = rng.gen();
        if u < params.for_class(e.class) {
            open.insert(e.index);
        }
    }
    Ok(BondConfig {
        spec: *spec,
        params,
        seed,
        open,
    })
}

/// One uniform label in `[0, 1)` per edge. Thresholding at `(p, q)` opens an
/// edge iff its label is below its class probability, so raising either
/// parameter can only add open edges.
#[derive(Debug, Clone)]
pub struct CoupledLabels {
    pub spec: LatticeSpec,
    pub seed: u64,
    pub labels: Vec<f64>,
    pub classes: Vec<EdgeClass>,
}

pub fn sample_config_coupled(spec: &LatticeSpec, seed: u64) -> Result<CoupledLabels> {
    let lattice = Lattice::new(*spec)?;
    let mut rng = rng::stream(seed, 0);
    let mut labels = Vec::with_capacity(lattice.edge_count());
    let mut classes = Vec::with_capacity(lattice.edge_count());
    for e in lattice.edges() {
        labels.push(rng.gen::<f64>());
        classes.push(e.class);
    }
    Ok(CoupledLabels {
        spec: *spec,
        seed,
        labels,
        classes,
    })
}

impl CoupledLabels {
    pub fn threshold(&self, params: Params) -> Result<BondConfig> {
        params.validate()?;
        let mut open = FixedBitSet::with_capacity(self.labels.len());
        for (i, (&u, &class)) in self.labels.iter().zip(&self.classes).enumerate() {
            if u < params.for_class(class) {
                open.insert(i);
            }
        }
        Ok(BondConfig {
            spec: self.spec,
            params,
            seed: self.seed,
            open,
        })
    }
}

/// How the finite-volume mean cluster size treats the largest cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ChiMode {
    /// Mean over vertices of the size of their cluster.
    All,
    /// Drop the largest cluster from the pair count.
    ExcludeLargest,
    /// Drop the largest cluster only when it wraps (or spans, on free boxes).
    #[default]
    ExcludeLargestWhenWrapped,
}

impl ChiMode {
    /// `sum_sq / n`, less `largest^2 / n` when the mode asks for it.
    pub fn apply(self, sum_sq: u64, largest: u32, n: usize, percolating: bool) -> f64 {
        let drop = match self {
            ChiMode::All => false,
            ChiMode::ExcludeLargest => true,
            ChiMode::ExcludeLargestWhenWrapped => percolating,
        };
        let pairs = if drop {
            sum_sq - largest as u64 * largest as u64
        } else {
            sum_sq
        };
        pairs as f64 / n as f64
    }
}

/// Cluster decomposition summary of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats {
    /// All cluster sizes, largest first.
    pub cluster_sizes: Vec<u32>,
    pub largest: u32,
    pub origin_cluster_size: u32,
    pub vertex_count: usize,
    /// Sum of squared cluster sizes.
    pub sum_sq: u64,
    /// Per-direction wrap flags; present on periodic lattices only.
    pub wraps: Option<Vec<bool>>,
    /// Per-direction face-to-face spanning flags; present on free lattices only.
    pub spans: Option<Vec<bool>>,
}

impl ClusterStats {
    /// Wraps (periodic) or spans (free) in at least one direction.
    pub fn percolates(&self) -> bool {
        self.wraps
            .as_deref()
            .or(self.spans.as_deref())
            .is_some_and(|f| f.iter().any(|&b| b))
    }

    pub fn mean_cluster_size(&self, mode: ChiMode) -> f64 {
        mode.apply(self.sum_sq, self.largest, self.vertex_count, self.percolates())
    }
}

pub fn cluster_stats(config: &BondConfig) -> Result<ClusterStats> {
    let lattice = Lattice::new(config.spec)?;
    Ok(cluster_stats_on(&lattice, &config.open))
}

pub(crate) fn mask_to_flags(mask: u32, ndim: usize) -> Vec<bool> {
    (0..ndim).map(|k| mask >> k & 1 == 1).collect()
}

/// Cluster decomposition of `lattice` with the edges in `open` present.
pub fn cluster_stats_on(lattice: &Lattice, open: &FixedBitSet) -> ClusterStats {
    let mut forest = ClusterForest::for_lattice(lattice);
    for e in lattice.edges() {
        if open.contains(e.index) {
            forest.link(e.a, e.b, e.dir as usize);
        }
    }
    stats_from_forest(lattice, &mut forest)
}

pub(crate) fn stats_from_forest(lattice: &Lattice, forest: &mut ClusterForest) -> ClusterStats {
    let mut cluster_sizes = forest.cluster_sizes();
    cluster_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let ndim = lattice.ndim();
    let (wraps, spans) = match lattice.spec().boundary {
        Boundary::Periodic => (Some(mask_to_flags(forest.wrapped_mask(), ndim)), None),
        Boundary::Free => (None, Some(mask_to_flags(forest.spanned_mask(), ndim))),
    };
    ClusterStats {
        largest: forest.largest(),
        origin_cluster_size: forest.cluster_size(lattice.origin()),
        vertex_count: lattice.vertex_count(),
        sum_sq: forest.sum_sq(),
        cluster_sizes,
        wraps,
        spans,
    }
}
