//! Exact answers on tiny graphs by enumeration and deletion-contraction,
//! compared with Monte Carlo.

use crossover::lattice::LatticeSpec;
use crossover::oracle::{self, Target, TinyGraph};
use crossover::sampler::Params;

fn main() -> crossover::Result<()> {
    let g = TinyGraph::from_lattice("free-3x3", &LatticeSpec::free(1, 1, 3, 3))?;
    let params = Params::new(0.6, 0.4)?;
    let exact = oracle::exact_enumerate(&g, params)?;
    let corner = oracle::exact_by_deletion_contraction(&g, params, Target::Connected(0, 8))?;
    println!("P(0 <-> 8): enumeration {:.12}, deletion-contraction {corner:.12}", exact.connectivity[0][8]);

    let mc = oracle::monte_carlo(&g, params, 100_000, 1)?;
    println!("chi: exact {:.5}, Monte Carlo {:.5} ± {:.5}", exact.chi_origin, mc.chi_origin.0, mc.chi_origin.1);
    println!("span: exact {:.5}, Monte Carlo {:.5}", exact.event_probs["span"], mc.event_freqs["span"].0);

    let stored = oracle::golden_from_jsonl(oracle::SHIPPED_GOLDEN)?;
    let diffs = oracle::diff_golden(&stored, &oracle::golden_suite()?);
    println!("golden suite: {} records, {} diffs", stored.len(), diffs.len());
    Ok(())
}
