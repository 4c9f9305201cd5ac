//! Sample one configuration, label its clusters, and watch them grow
//! under the monotone coupling.

use crossover::lattice::LatticeSpec;
use crossover::sampler::{cluster_stats, sample_config, sample_config_coupled, Params};

fn main() -> crossover::Result<()> {
    let spec = LatticeSpec::periodic(1, 1, 64, 64);
    let config = sample_config(&spec, Params::new(0.5, 0.5)?, 7)?;
    let stats = cluster_stats(&config)?;
    println!(
        "{} open edges, {} clusters, largest {}, origin cluster {}, wraps {:?}",
        config.open_count(),
        stats.cluster_sizes.len(),
        stats.largest,
        stats.origin_cluster_size,
        stats.wraps
    );

    // One set of uniform labels, thresholded at increasing q.
    let labels = sample_config_coupled(&spec, 7)?;
    for q in [0.2, 0.4, 0.5, 0.6, 0.8] {
        let stats = cluster_stats(&labels.threshold(Params::new(0.5, q)?)?)?;
        println!("q = {q}: largest {:5}  percolates {}", stats.largest, stats.percolates());
    }
    Ok(())
}
