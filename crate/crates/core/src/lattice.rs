//! Finite boxes and tori of Z^d x Z^s.
//!
//! Vertices are indexed row-major with the `d` coordinates of the
//! p-sublattice varying fastest, so a D-edge run along direction 0 is a
//! contiguous block of indices. Coordinates `0..d` belong to Z^d and
//! coordinates `d..d+s` to Z^s.
//!
//! Edges are enumerated once each, as the forward edge of a vertex in one
//! direction, in (vertex, direction) order. A periodic direction of side 2
//! would produce two parallel edges between the same pair of vertices; they
//! are collapsed into one, so such a direction carries the same edges as a
//! free one and never registers a wrap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Free,
    #[default]
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub d: usize,
    pub s: usize,
    pub side_d: usize,
    pub side_s: usize,
    #[serde(default)]
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(d: usize, s: usize, side_d: usize, side_s: usize, boundary: Boundary) -> Self {
        LatticeSpec {
            d,
            s,
            side_d,
            side_s,
            boundary,
        }
    }

    pub fn periodic(d: usize, s: usize, side_d: usize, side_s: usize) -> Self {
        Self::new(d, s, side_d, side_s, Boundary::Periodic)
    }

    pub fn free(d: usize, s: usize, side_d: usize, side_s: usize) -> Self {
        Self::new(d, s, side_d, side_s, Boundary::Free)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::config("lattice.d", "must be at least 1"));
        }
        if self.s < 1 {
            return Err(Error::config("lattice.s", "must be at least 1"));
        }
        if self.side_d < 2 {
            return Err(Error::config("lattice.side_d", "must be at least 2"));
        }
        if self.side_s < 2 {
            return Err(Error::config("lattice.side_s", "must be at least 2"));
        }
        if self.d + self.s > 16 {
            return Err(Error::Capacity(format!(
                "{} dimensions exceed the supported maximum of 16",
                self.d + self.s
            )));
        }
        self.vertex_count().map(|_| ())
    }

    pub fn ndim(&self) -> usize {
        self.d + self.s
    }

    /// Side length along coordinate `dir`.
    pub fn side(&self, dir: usize) -> usize {
        if dir < self.d {
            self.side_d
        } else {
            self.side_s
        }
    }

    pub fn class_of_dir(&self, dir: usize) -> EdgeClass {
        if dir < self.d {
            EdgeClass::DEdge
        } else {
            EdgeClass::SEdge
        }
    }

    /// Whether direction `dir` has a wrap-around seam.
    pub fn wraps_in(&self, dir: usize) -> bool {
        self.boundary == Boundary::Periodic && self.side(dir) > 2
    }

    /// `side_d^d * side_s^s`, or a capacity error when it does not fit in a
    /// 32-bit vertex index.
    pub fn vertex_count(&self) -> Result<usize> {
        let mut n: u64 = 1;
        for dir in 0..self.ndim() {
            n = n
                .checked_mul(self.side(dir) as u64)
                .filter(|&n| n <= u32::MAX as u64)
                .ok_or_else(|| {
                    Error::Capacity(format!(
                        "lattice {}x{} (d={}, s={}) has more than {} vertices",
                        self.side_d,
                        self.side_s,
                        self.d,
                        self.s,
                        u32::MAX
                    ))
                })?;
        }
        Ok(n as usize)
    }

    /// Number of edges along direction `dir`.
    pub fn edges_in_dir(&self, dir: usize) -> usize {
        let n = self.vertex_count().unwrap_or(0);
        let side = self.side(dir);
        if self.wraps_in(dir) {
            n
        } else {
            n / side * (side - 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    DEdge,
    SEdge,
}

/// One lattice edge. `b` is the forward neighbour of `a` along `dir`; the
/// unwrapped displacement from `a` to `b` is always +1 along `dir`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub index: usize,
    pub class: EdgeClass,
    pub dir: u8,
    pub a: u32,
    pub b: u32,
    /// True when the edge crosses the periodic seam.
    pub seam: bool,
}

impl Edge {
    pub fn endpoints(&self) -> (u32, u32) {
        (self.a, self.b)
    }
}

/// A validated lattice with precomputed strides.
#[derive(Debug, Clone)]
pub struct Lattice {
    spec: LatticeSpec,
    strides: Vec<usize>,
    vertices: usize,
    d_edges: usize,
    s_edges: usize,
}

impl Lattice {
    pub fn new(spec: LatticeSpec) -> Result<Self> {
        spec.validate()?;
        let vertices = spec.vertex_count()?;
        let mut strides = Vec::with_capacity(spec.ndim());
        let mut stride = 1usize;
        for dir in 0..spec.ndim() {
            strides.push(stride);
            stride *= spec.side(dir);
        }
        let d_edges: usize = (0..spec.d).map(|k| spec.edges_in_dir(k)).sum();
        let s_edges: usize = (spec.d..spec.ndim()).map(|k| spec.edges_in_dir(k)).sum();
        if d_edges + s_edges > u32::MAX as usize {
            return Err(Error::Capacity(format!(
                "{} edges exceed 32-bit edge indexing",
                d_edges + s_edges
            )));
        }
        Ok(Lattice {
            spec,
            strides,
            vertices,
            d_edges,
            s_edges,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn ndim(&self) -> usize {
        self.spec.ndim()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn d_edge_count(&self) -> usize {
        self.d_edges
    }

    pub fn s_edge_count(&self) -> usize {
        self.s_edges
    }

    pub fn edge_count(&self) -> usize {
        self.d_edges + self.s_edges
    }

    pub fn stride(&self, dir: usize) -> usize {
        self.strides[dir]
    }

    #[inline]
    pub fn coord(&self, v: u32, dir: usize) -> usize {
        (v as usize / self.strides[dir]) % self.spec.side(dir)
    }

    pub fn coords(&self, v: u32) -> Vec<usize> {
        (0..self.ndim()).map(|k| self.coord(v, k)).collect()
    }

    /// Inverse of [`Lattice::coords`]; `None` when a coordinate is out of range.
    pub fn index(&self, coords: &[usize]) -> Option<u32> {
        if coords.len() != self.ndim() {
            return None;
        }
        let mut v = 0usize;
        for (dir, &c) in coords.iter().enumerate() {
            if c >= self.spec.side(dir) {
                return None;
            }
            v += c * self.strides[dir];
        }
        Some(v as u32)
    }

    /// Forward neighbour of `v` along `dir` and whether the step crosses the
    /// periodic seam.
    #[inline]
    pub fn forward(&self, v: u32, dir: usize) -> Option<(u32, bool)> {
        let side = self.spec.side(dir);
        let stride = self.strides[dir];
        let c = (v as usize / stride) % side;
        if c + 1 < side {
            Some((v + stride as u32, false))
        } else if self.spec.wraps_in(dir) {
            Some((v - ((side - 1) * stride) as u32, true))
        } else {
            None
        }
    }

    /// All edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let ndim = self.ndim();
        let mut index = 0usize;
        (0..self.vertices as u32).flat_map(move |v| (0..ndim).map(move |dir| (v, dir))).filter_map(
            move |(v, dir)| {
                self.forward(v, dir).map(|(b, seam)| {
                    let e = Edge {
                        index,
                        class: self.spec.class_of_dir(dir),
                        dir: dir as u8,
                        a: v,
                        b,
                        seam,
                    };
                    index += 1;
                    e
                })
            },
        )
    }

    /// Class of the edge joining `a` and `b`, or `None` if they are not
    /// nearest neighbours. Adjacency is L1 distance one, taken modulo the side
    /// in periodic directions.
    pub fn classify_pair(&self, a: u32, b: u32) -> Option<EdgeClass> {
        let mut differing = None;
        for dir in 0..self.ndim() {
            let (ca, cb) = (self.coord(a, dir), self.coord(b, dir));
            if ca == cb {
                continue;
            }
            if differing.is_some() {
                return None;
            }
            let side = self.spec.side(dir);
            let gap = ca.abs_diff(cb);
            let adjacent = gap == 1 || (self.spec.boundary == Boundary::Periodic && gap == side - 1);
            if !adjacent {
                return None;
            }
            differing = Some(dir);
        }
        differing.map(|dir| self.spec.class_of_dir(dir))
    }

    /// Vertex 0, the finite-volume stand-in for the origin.
    pub fn origin(&self) -> u32 {
        0
    }
}

/// The complete ordered edge list of `spec`.
pub fn build_lattice(spec: &LatticeSpec) -> Result<Vec<Edge>> {
    let lattice = Lattice::new(*spec)?;
    Ok(lattice.edges().collect())
}

/// Class of an edge recomputed from its endpoints.
pub fn classify_edge(lattice: &Lattice, edge: &Edge) -> EdgeClass {
    lattice
        .classify_pair(edge.a, edge.b)
        .expect("edge endpoints are adjacent")
}
