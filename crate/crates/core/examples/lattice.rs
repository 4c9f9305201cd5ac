//! Build Z^d x Z^s boxes and look at their edge classes.

use crossover::lattice::{EdgeClass, Lattice, LatticeSpec};

fn main() -> crossover::Result<()> {
    for spec in [LatticeSpec::periodic(1, 2, 6, 4), LatticeSpec::free(2, 1, 5, 3)] {
        let lattice = Lattice::new(spec)?;
        println!(
            "{spec:?}\n  {} vertices, {} D-edges, {} S-edges",
            lattice.vertex_count(),
            lattice.d_edge_count(),
            lattice.s_edge_count()
        );
        let origin = lattice.origin();
        for dir in 0..lattice.ndim() {
            if let Some((v, seam)) = lattice.forward(origin, dir) {
                let class = lattice.classify_pair(origin, v).unwrap();
                let tag = if class == EdgeClass::DEdge { "D" } else { "S" };
                println!("  origin -> {:?} along dir {dir}: {tag}-edge{}", lattice.coords(v), if seam { " (seam)" } else { "" });
            }
        }
    }
    Ok(())
}
