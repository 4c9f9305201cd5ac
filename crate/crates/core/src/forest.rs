//! Union-find over lattice vertices with union-by-size, path compression and
//! optional geometric tracking.
//!
//! With [`Tracking::Wrap`] every node stores its unwrapped displacement from
//! its root. Closing a cycle whose net displacement is nonzero means the
//! cluster winds around the torus in each direction where the displacement
//! differs. With [`Tracking::Span`] each root carries a bitmask of the box
//! faces its cluster touches.

use crate::lattice::{Boundary, Lattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracking {
    Plain,
    Wrap,
    Span,
}

#[derive(Debug, Clone)]
pub struct ClusterForest {
    parent: Vec<u32>,
    size: Vec<u32>,
    tracking: Tracking,
    ndim: usize,
    offset: Vec<i32>,
    faces: Vec<u32>,
    initial_faces: Vec<u32>,
    wrapped: u32,
    spanned: u32,
    sum_sq: u64,
    largest: u32,
    stack: Vec<u32>,
}

impl ClusterForest {
    pub fn plain(n: usize) -> Self {
        Self::build(n, 0, Tracking::Plain, Vec::new())
    }

    /// Displacement-tracking forest for `n` nodes in `ndim` dimensions.
    pub fn with_wrap(n: usize, ndim: usize) -> Self {
        Self::build(n, ndim, Tracking::Wrap, Vec::new())
    }

    /// Face-tracking forest; `faces[v]` has bit `2k` set when `v` lies on the
    /// lower face in direction `k` and bit `2k + 1` for the upper face.
    pub fn with_faces(faces: Vec<u32>, ndim: usize) -> Self {
        let n = faces.len();
        Self::build(n, ndim, Tracking::Span, faces)
    }

    /// Wrap tracking on periodic lattices, face tracking on free ones.
    pub fn for_lattice(lattice: &Lattice) -> Self {
        let ndim = lattice.ndim();
        match lattice.spec().boundary {
            Boundary::Periodic => Self::with_wrap(lattice.vertex_count(), ndim),
            Boundary::Free => Self::with_faces(face_masks(lattice), ndim),
        }
    }

    fn build(n: usize, ndim: usize, tracking: Tracking, faces: Vec<u32>) -> Self {
        assert!(ndim <= 16, "at most 16 tracked dimensions");
        let offset = if tracking == Tracking::Wrap {
            vec![0; n * ndim]
        } else {
            Vec::new()
        };
        ClusterForest {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            tracking,
            ndim,
            offset,
            initial_faces: faces.clone(),
            faces,
            wrapped: 0,
            spanned: 0,
            sum_sq: n as u64,
            largest: if n > 0 { 1 } else { 0 },
            stack: Vec::new(),
        }
    }

    /// Return every node to a singleton.
    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.size.fill(1);
        self.offset.fill(0);
        self.faces.copy_from_slice(&self.initial_faces);
        self.wrapped = 0;
        self.spanned = 0;
        self.sum_sq = self.parent.len() as u64;
        self.largest = if self.parent.is_empty() { 0 } else { 1 };
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn tracking(&self) -> Tracking {
        self.tracking
    }

    pub fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            self.stack.push(root);
            root = self.parent[root as usize];
        }
        let ndim = self.ndim;
        let track = self.tracking == Tracking::Wrap;
        // Nodes nearest the root come last on the stack and are fixed first,
        // so each parent's offset is already relative to the root.
        while let Some(node) = self.stack.pop() {
            let par = self.parent[node as usize];
            if track && par != root {
                let (n, p) = (node as usize * ndim, par as usize * ndim);
                for k in 0..ndim {
                    self.offset[n + k] += self.offset[p + k];
                }
            }
            self.parent[node as usize] = root;
        }
        root
    }

    /// Join the clusters of `a` and `b` without geometric bookkeeping.
    /// Returns true when two distinct clusters merged.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.merge_roots(ra, rb, None);
        true
    }

    /// Add the edge from `a` to its forward neighbour `b` along `dir`.
    /// Returns true when two distinct clusters merged.
    pub fn link(&mut self, a: u32, b: u32, dir: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if self.tracking != Tracking::Wrap {
            if ra == rb {
                return false;
            }
            self.merge_roots(ra, rb, None);
            return true;
        }
        let ndim = self.ndim;
        let mut delta = [0i32; 16];
        let (oa, ob) = (a as usize * ndim, b as usize * ndim);
        for k in 0..ndim {
            delta[k] = self.offset[oa + k] - self.offset[ob + k];
        }
        delta[dir] += 1;
        if ra == rb {
            for (k, &dk) in delta.iter().enumerate().take(ndim) {
                if dk != 0 {
                    self.wrapped |= 1 << k;
                }
            }
            return false;
        }
        self.merge_roots(ra, rb, Some(&delta[..ndim]));
        true
    }

    /// `delta` is the displacement of `rb` relative to `ra`.
    fn merge_roots(&mut self, ra: u32, rb: u32, delta: Option<&[i32]>) {
        let (sa, sb) = (self.size[ra as usize], self.size[rb as usize]);
        let (big, small, sign) = if sa >= sb { (ra, rb, 1) } else { (rb, ra, -1) };
        self.parent[small as usize] = big;
        if let Some(delta) = delta {
            let o = small as usize * self.ndim;
            for (k, &dk) in delta.iter().enumerate() {
                self.offset[o + k] = sign * dk;
            }
        }
        let merged = sa + sb;
        self.size[big as usize] = merged;
        self.sum_sq += 2 * sa as u64 * sb as u64;
        self.largest = self.largest.max(merged);
        if self.tracking == Tracking::Span {
            let mask = self.faces[big as usize] | self.faces[small as usize];
            self.faces[big as usize] = mask;
            for k in 0..self.ndim {
                if (mask >> (2 * k)) & 0b11 == 0b11 {
                    self.spanned |= 1 << k;
                }
            }
        }
    }

    pub fn connected(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn cluster_size(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }

    /// Sum over clusters of size squared, i.e. the number of ordered pairs
    /// of connected vertices.
    pub fn sum_sq(&self) -> u64 {
        self.sum_sq
    }

    pub fn largest(&self) -> u32 {
        self.largest
    }

    /// Bitmask of directions in which some cluster wraps.
    pub fn wrapped_mask(&self) -> u32 {
        self.wrapped
    }

    /// Bitmask of directions in which some cluster touches both faces.
    pub fn spanned_mask(&self) -> u32 {
        self.spanned
    }

    /// Sizes of all clusters, in root order.
    pub fn cluster_sizes(&self) -> Vec<u32> {
        self.parent
            .iter()
            .enumerate()
            .filter(|&(i, &p)| p as usize == i)
            .map(|(i, _)| self.size[i])
            .collect()
    }
}

/// Face-membership masks for the vertices of a lattice.
pub fn face_masks(lattice: &Lattice) -> Vec<u32> {
    let ndim = lattice.ndim();
    (0..lattice.vertex_count() as u32)
        .map(|v| {
            let mut mask = 0u32;
            for k in 0..ndim {
                let c = lattice.coord(v, k);
                if c == 0 {
                    mask |= 1 << (2 * k);
                }
                if c + 1 == lattice.spec().side(k) {
                    mask |= 1 << (2 * k + 1);
                }
            }
            mask
        })
        .collect()
}
