//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.
//!
//! Tolerances, grids, sizes and seeds are pinned below. Run with
//! `cargo test --release -p crossover --test acceptance`; the test profile
//! is optimized, so the plain workspace run takes a few minutes as well.
//! `CROSSOVER_ACCEPTANCE=7,8` runs a subset (criterion 2 brings in 1, 3, 4).

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use crossover::bounds::{self, RenormInputs, SeriesBound};
use crossover::constants::ConstantsTable;
use crossover::estimator::{self, direct_samples, estimate_chi, estimate_qc, Ladder, QcEstimate, QcOptions};
use crossover::experiment::{self, chi_d, ChiSection, Experiment, Grid, RunConfig};
use crossover::lattice::LatticeSpec;
use crossover::oracle;
use crossover::rng::derive_seed;
use crossover::sampler::{cluster_stats, sample_config_coupled, ChiMode, Params};

const SEED: u64 = 20_240_601;

// Criterion 1
const KESTEN_P: [f64; 3] = [0.2, 0.5, 0.8];
const KESTEN_SIDES: [usize; 2] = [256, 512];
const KESTEN_REPLICATES: usize = 400;
const KESTEN_TOL: f64 = 0.02;

// Criterion 3
const D1_P: [f64; 5] = [0.70, 0.78, 0.85, 0.90, 0.94];
const D1_S: usize = 2;
const D1_SIDES: [usize; 2] = [16, 32];
const D1_REPLICATES: usize = 200;
const PSI1_RANGE: (f64, f64) = (0.85, 1.15);
const SANDWICH: (f64, f64) = (0.2, 5.0);

// Criterion 4
const D2_P: [f64; 5] = [0.35, 0.38, 0.41, 0.44, 0.47];
const D2_SIDES: [usize; 2] = [8, 16];
const D2_REPLICATES: usize = 200;
const D2_CHI_SIDE: usize = 256;
const D2_CHI_REPLICATES: usize = 200;
const PSI_GAP: f64 = 0.5;
const RATIO_SPREAD: f64 = 10.0;

// Criterion 5
const SERIES_P: [f64; 2] = [0.3, 0.6];
const SERIES_BOXES: [usize; 3] = [8, 16, 32];
const SERIES_REPLICATES: usize = 2000;

// Criterion 6
const CERT_P: [f64; 4] = [0.98, 0.99, 0.995, 0.999];
const CERT_Q: [f64; 3] = [0.3, 0.6, 0.9];
const CERT_EPSILON: f64 = 0.1;
const CERT_ALPHA: f64 = 50.0;
const CERT_SAMPLE: usize = 20;
const CERT_SIDES: [(usize, usize); 2] = [(2, 64), (3, 24)];
const CERT_REPLICATES: usize = 100;
const CERT_MIN_FREQ: f64 = 0.99;

// Criterion 7
const ORACLE_REPLICATES: usize = 20_000;
const ORACLE_Z: f64 = 3.0;
const ORACLE_EXACT_TOL: f64 = 1e-12;

// Criterion 9
const COUPLING_SEEDS: u64 = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, started: Instant, o: &Outcome) {
    println!(
        "criterion {id} {:<4} {name} ({:.0}s): {}",
        if o.pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
        o.detail
    );
}

/// Default bracket of the q_c search: a factor 2 below the rigorous lower
/// bound up to `8 / chi` (capped at 1).
fn bracket(s: usize, chi: f64) -> (f64, f64) {
    (1.0 / (4.0 * s as f64 * chi), (8.0 / chi).min(1.0))
}

fn qc(specs: &[LatticeSpec], p: f64, chi: f64, replicates: usize, seed: u64) -> QcEstimate {
    let (lo, hi) = bracket(specs[0].s, chi);
    estimate_qc(specs, p, &QcOptions::new(lo, hi, replicates, seed), &ConstantsTable::default())
        .unwrap_or_else(|e| panic!("q_c at p = {p}: {e}"))
}

/// A q_c estimate with the chi_d value used for the lower-bound check.
struct Point {
    label: &'static str,
    s: usize,
    estimate: QcEstimate,
    chi: f64,
    chi_stderr: f64,
}

fn criterion_1() -> (Outcome, Vec<Point>) {
    let mut points = Vec::new();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (i, &p) in KESTEN_P.iter().enumerate() {
        let specs: Vec<LatticeSpec> = KESTEN_SIDES.iter().map(|&l| LatticeSpec::periodic(1, 1, l, l)).collect();
        let chi = bounds::chi_1_exact(p).unwrap();
        let e = qc(&specs, p, chi, KESTEN_REPLICATES, derive_seed(SEED, 100 + i as u64));
        let err = (e.qc_hat - (1.0 - p)).abs();
        worst = worst.max(err);
        parts.push(format!("p={p}: {:.4}±{:.4}", e.qc_hat, e.ci_halfwidth));
        points.push(Point { label: "kesten", s: 1, estimate: e, chi, chi_stderr: 0.0 });
    }
    let outcome = Outcome {
        pass: worst <= KESTEN_TOL,
        detail: format!("{}; max |q_c - (1-p)| = {worst:.4} (tol {KESTEN_TOL})", parts.join(", ")),
    };
    (outcome, points)
}

fn criterion_3() -> (Outcome, Vec<Point>, f64) {
    let ladder = Ladder { side_s: D1_SIDES.to_vec(), aspect: 0.5, chi_power: 1.0, min_side_d: 2 };
    let mut points = Vec::new();
    for (i, &p) in D1_P.iter().enumerate() {
        let chi = bounds::chi_1_exact(p).unwrap();
        let specs = ladder.specs(1, D1_S, chi).unwrap();
        let e = qc(&specs, p, chi, D1_REPLICATES, derive_seed(SEED, 300 + i as u64));
        points.push(Point { label: "d1", s: D1_S, estimate: e, chi, chi_stderr: 0.0 });
    }
    let estimates: Vec<QcEstimate> = points.iter().map(|pt| pt.estimate.clone()).collect();
    let fit = estimator::fit_psi(1, D1_S, 1.0, &estimates).unwrap();
    let products: Vec<f64> = points.iter().map(|pt| pt.estimate.qc_hat * pt.chi).collect();
    let (lo, hi) = min_max(&products);
    let psi_ok = (PSI1_RANGE.0..=PSI1_RANGE.1).contains(&fit.psi_hat);
    let sandwich_ok = lo >= SANDWICH.0 && hi <= SANDWICH.1;
    let outcome = Outcome {
        pass: psi_ok && sandwich_ok,
        detail: format!(
            "psi(1) = {:.3} ± {:.3} (need {:?}); q_c·chi_1 in [{lo:.3}, {hi:.3}] (need within {SANDWICH:?})",
            fit.psi_hat, fit.stderr, PSI1_RANGE
        ),
    };
    (outcome, points, fit.psi_hat)
}

fn criterion_4(psi1: f64) -> (Outcome, Vec<Point>) {
    let ladder = Ladder { side_s: D2_SIDES.to_vec(), aspect: 0.5, chi_power: 0.56, min_side_d: 2 };
    let section = ChiSection { side: D2_CHI_SIDE, replicates: D2_CHI_REPLICATES, mode: ChiMode::All };
    let mut points = Vec::new();
    for (i, &p) in D2_P.iter().enumerate() {
        let chi = chi_d(2, p, &section, derive_seed(SEED, 400 + i as u64)).unwrap();
        let specs = ladder.specs(2, 1, chi.value).unwrap();
        let e = qc(&specs, p, chi.value, D2_REPLICATES, derive_seed(SEED, 450 + i as u64));
        points.push(Point { label: "d2", s: 1, estimate: e, chi: chi.value, chi_stderr: chi.stderr });
    }
    let estimates: Vec<QcEstimate> = points.iter().map(|pt| pt.estimate.clone()).collect();
    let fit = estimator::fit_psi(2, 1, 0.5, &estimates).unwrap();
    let ratios: Vec<f64> = points.iter().map(|pt| pt.estimate.qc_hat * pt.chi).collect();
    let (lo, hi) = min_max(&ratios);
    let spread = hi / lo;
    let outcome = Outcome {
        pass: fit.psi_hat > 0.0 && fit.psi_hat - psi1 >= PSI_GAP && spread <= RATIO_SPREAD,
        detail: format!(
            "psi(2) = {:.3} ± {:.3} (reference gamma(2) = 43/18 = {:.3}, no tolerance); psi(2) - psi(1) = {:.3} (need >= {PSI_GAP}); q_c·chi_2 max/min = {spread:.2} (need <= {RATIO_SPREAD})",
            fit.psi_hat,
            fit.stderr,
            estimator::GAMMA_2D,
            fit.psi_hat - psi1
        ),
    };
    (outcome, points)
}

fn criterion_2(points: &[Point]) -> Outcome {
    let mut violations = Vec::new();
    let mut tightest = f64::INFINITY;
    for pt in points {
        // Worst case over the chi band: the smallest chi gives the largest bound.
        let chi = (pt.chi - 3.0 * pt.chi_stderr).max(f64::MIN_POSITIVE);
        let bound = 1.0 / (2.0 * pt.s as f64 * chi);
        let upper = pt.estimate.qc_hat + pt.estimate.ci_halfwidth;
        tightest = tightest.min(upper / bound);
        if upper < bound {
            violations.push(format!("{} p={}: {upper:.5} < {bound:.5}", pt.label, pt.estimate.p));
        }
    }
    Outcome {
        pass: violations.is_empty(),
        detail: format!(
            "{} estimates, {} violations, smallest (q_c + CI) / bound = {tightest:.3}{}",
            points.len(),
            violations.len(),
            if violations.is_empty() { String::new() } else { format!(" [{}]", violations.join("; ")) }
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for s in [1usize, 2] {
        for (i, &p) in SERIES_P.iter().enumerate() {
            let chi1 = bounds::chi_1_exact(p).unwrap();
            let q = 0.5 / (2.0 * s as f64 * chi1);
            let bound = match bounds::series_chi_bound(&bounds::BoundInputs::exact_d1(p, q, s).unwrap()).unwrap() {
                SeriesBound::Finite(b) => b,
                SeriesBound::Divergent => panic!("series diverges at p = {p}, q = {q}"),
            };
            let params = Params::new(p, q).unwrap();
            let mut prev: Option<(f64, f64)> = None;
            let mut values = Vec::new();
            for (k, &l) in SERIES_BOXES.iter().enumerate() {
                let seed = derive_seed(SEED, 500 + 10 * (2 * s as u64 + i as u64) + k as u64);
                let e = estimate_chi(&LatticeSpec::free(1, s, l, l), params, SERIES_REPLICATES, seed, ChiMode::All).unwrap();
                if e.mean > bound + 3.0 * e.stderr {
                    failures.push(format!("s={s} p={p} L={l}: {:.3} above bound {bound:.3}", e.mean));
                }
                if let Some((m, se)) = prev {
                    if e.mean < m - 3.0 * (se * se + e.stderr * e.stderr).sqrt() {
                        failures.push(format!("s={s} p={p} L={l}: {:.3} below previous {m:.3}", e.mean));
                    }
                }
                prev = Some((e.mean, e.stderr));
                values.push(format!("{:.3}", e.mean));
            }
            parts.push(format!("s={s} p={p}: [{}] <= {bound:.3}", values.join(", ")));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{}{}", parts.join("; "), if failures.is_empty() { String::new() } else { format!(" [{}]", failures.join("; ")) }),
    }
}

fn criterion_6() -> Outcome {
    let constants = ConstantsTable::default();
    let mut sample = Vec::new();
    for &(s, side) in &CERT_SIDES {
        for &p in &CERT_P {
            for &q in &CERT_Q {
                let inputs = RenormInputs {
                    p,
                    q,
                    s,
                    epsilon: CERT_EPSILON,
                    alpha: CERT_ALPHA,
                    site_threshold_s: Some(constants.site_pc(s).unwrap()),
                };
                if bounds::renorm_certifies_percolation(&inputs).unwrap().certified {
                    sample.push((inputs, side));
                }
            }
        }
    }
    if sample.len() < CERT_SAMPLE {
        return Outcome {
            pass: false,
            detail: format!("only {} certified points in the candidate grid, need {CERT_SAMPLE}", sample.len()),
        };
    }
    sample.truncate(CERT_SAMPLE);
    let mut counterexamples = Vec::new();
    let mut lowest: f64 = 1.0;
    for (k, (inputs, side)) in sample.iter().enumerate() {
        let spec = LatticeSpec::periodic(1, inputs.s, *side, *side);
        let params = Params::new(inputs.p, inputs.q).unwrap();
        let runs = direct_samples(&spec, params, CERT_REPLICATES, derive_seed(SEED, 600 + k as u64), ChiMode::All).unwrap();
        let freq = runs.iter().filter(|r| r.percolates).count() as f64 / CERT_REPLICATES as f64;
        lowest = lowest.min(freq);
        if freq < CERT_MIN_FREQ {
            counterexamples.push(format!("s={} p={} q={}: {freq:.3}", inputs.s, inputs.p, inputs.q));
        }
    }
    Outcome {
        pass: counterexamples.is_empty(),
        detail: format!(
            "{CERT_SAMPLE} certified points (eps {CERT_EPSILON}, alpha {CERT_ALPHA}), lowest wrap frequency {lowest:.3} (need >= {CERT_MIN_FREQ}), {} counterexamples{}",
            counterexamples.len(),
            if counterexamples.is_empty() { String::new() } else { format!(" [{}]", counterexamples.join("; ")) }
        ),
    }
}

fn criterion_7() -> Outcome {
    let computed = oracle::golden_suite().unwrap();
    let stored = oracle::golden_from_jsonl(oracle::SHIPPED_GOLDEN).unwrap();
    let golden_diffs = oracle::diff_golden(&stored, &computed).len();
    let graphs: std::collections::BTreeSet<&str> = computed.iter().map(|r| r.graph.name.as_str()).collect();

    let mut dc_worst: f64 = 0.0;
    let mut dc_checked = 0;
    for rec in computed.iter().filter(|r| r.graph.edges.len() <= oracle::MAX_DC_EDGES) {
        let dc = oracle::deletion_contraction_result(&rec.graph, rec.result.params).unwrap();
        dc_worst = dc_worst.max(oracle::max_abs_difference(&dc, &rec.result));
        dc_checked += 1;
    }
    // The ring has a closed-form wrap probability, p^n.
    let ring = oracle::TinyGraph::ring("ring-7", 7).unwrap();
    for &(p, q) in &oracle::GOLDEN_PARAMS {
        let r = oracle::exact_enumerate(&ring, Params::new(p, q).unwrap()).unwrap();
        dc_worst = dc_worst.max((r.event_probs["wrap"] - p.powi(7)).abs());
    }

    // z-scores against the exact standard deviation of one sample.
    let mut checks = 0;
    let mut exceed = Vec::new();
    let mut worst_z: f64 = 0.0;
    let n = ORACLE_REPLICATES as f64;
    let mut check = |what: String, mean: f64, exact: f64, sd: f64| {
        let se = sd / n.sqrt();
        let z = if se > 0.0 {
            (mean - exact).abs() / se
        } else if mean == exact {
            0.0
        } else {
            f64::INFINITY
        };
        checks += 1;
        worst_z = worst_z.max(z);
        if z > ORACLE_Z {
            exceed.push(format!("{what} z={z:.2}"));
        }
    };
    for (i, rec) in computed.iter().enumerate() {
        let (g, ex) = (&rec.graph, &rec.result);
        let tag = |f: &str| format!("{} ({}, {}) {f}", g.name, ex.params.p, ex.params.q);
        let mc = oracle::monte_carlo(g, ex.params, ORACLE_REPLICATES, 100 + i as u64).unwrap();
        check(tag("chi"), mc.chi_origin.0, ex.chi_origin, ex.chi_origin_sd().unwrap());
        check(tag("mean-cluster"), mc.mean_cluster.0, ex.mean_cluster, ex.mean_cluster_sd().unwrap());
        for (name, freq) in &mc.event_freqs {
            check(tag(name), freq.0, ex.event_probs[name], ex.event_sd(name).unwrap());
        }
        // The lattice sampler used by the experiments, on the same instance.
        if let Some(spec) = g.spec {
            let e = estimate_chi(&spec, ex.params, ORACLE_REPLICATES, 500 + i as u64, ChiMode::All).unwrap();
            check(tag("lattice mean-cluster"), e.mean, ex.mean_cluster, ex.mean_cluster_sd().unwrap());
            check(tag("lattice chi"), e.origin_mean, ex.chi_origin, ex.chi_origin_sd().unwrap());
        }
    }
    let pass = golden_diffs == 0 && graphs.len() >= 10 && dc_worst <= ORACLE_EXACT_TOL && exceed.is_empty();
    Outcome {
        pass,
        detail: format!(
            "{} graphs x {} parameter points; golden diffs {golden_diffs}; exact methods max diff {dc_worst:.1e} over {dc_checked}/{} records (tol {ORACLE_EXACT_TOL:.0e}); {}/{checks} Monte Carlo checks beyond {ORACLE_Z} sigma, worst z {worst_z:.2}{}",
            graphs.len(),
            oracle::GOLDEN_PARAMS.len(),
            computed.len(),
            exceed.len(),
            if exceed.is_empty() { String::new() } else { format!(" [{}]", exceed.join("; ")) }
        ),
    }
}

fn determinism_configs() -> Vec<RunConfig> {
    let base = |e: Experiment| {
        let mut c = RunConfig::new(e);
        c.master_seed = Some(SEED);
        c.replicates = 40;
        c
    };
    let mut sweep = base(Experiment::Sweep);
    sweep.lattice = LatticeSpec::periodic(1, 1, 32, 32);
    sweep.p = Grid::Values(vec![0.3, 0.6]);
    sweep.q = Grid::Range { lo: 0.0, hi: 1.0, points: 21 };

    let mut qc = base(Experiment::EstimateQc);
    qc.lattice = LatticeSpec::periodic(1, 1, 16, 16);
    qc.p = Grid::Values(vec![0.5]);
    qc.estimate.bootstrap = 20;

    let mut psi = base(Experiment::FitPsi);
    psi.lattice = LatticeSpec::periodic(1, 2, 16, 8);
    psi.p = Grid::Values(vec![0.6, 0.7, 0.8]);
    psi.estimate.bootstrap = 20;
    psi.estimate.ladder = Some(Ladder { side_s: vec![6, 12], aspect: 0.5, chi_power: 1.0, min_side_d: 2 });

    let mut table = base(Experiment::BoundsTable);
    table.lattice = LatticeSpec::periodic(2, 2, 32, 8);
    table.p = Grid::Values(vec![0.25, 0.3]);
    table.q = Grid::Values(vec![0.01, 0.05]);
    table.chi.side = 64;

    let mut oracle_check = base(Experiment::OracleCheck);
    oracle_check.replicates = 1;

    let mut certify = base(Experiment::Certify);
    certify.lattice = LatticeSpec::periodic(1, 2, 8, 8);
    certify.p = Grid::Values(vec![0.5, 0.99]);
    certify.q = Grid::Values(vec![0.3, 0.9]);

    vec![sweep, qc, psi, table, oracle_check, certify]
}

fn criterion_8() -> Outcome {
    let mut mismatches = Vec::new();
    let mut files = 0;
    for config in determinism_configs() {
        let name = config.experiment.name();
        // Two identical reruns, plus one on a single worker thread.
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for (k, dir) in dirs.iter().enumerate() {
            let mut c = config.clone();
            c.threads = if k == 2 { 1 } else { 0 };
            experiment::run(c, Some(dir.path().to_path_buf())).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        for file in ["records.jsonl", "table.csv", "micro.csv"] {
            let read = |d: &Path| fs::read(d.join(file)).ok();
            let [a, b, c] = [0, 1, 2].map(|k| read(dirs[k].path()));
            if a.is_none() && b.is_none() && c.is_none() {
                continue;
            }
            files += 1;
            if a != b {
                mismatches.push(format!("{name}/{file}"));
            }
            // The config echo on the first records line names the thread count.
            let body = |x: &Option<Vec<u8>>| {
                let x = x.clone().unwrap_or_default();
                match (file, x.iter().position(|&c| c == b'\n')) {
                    ("records.jsonl", Some(i)) => x[i + 1..].to_vec(),
                    _ => x,
                }
            };
            if body(&a) != body(&c) {
                mismatches.push(format!("{name}/{file} (1 thread)"));
            }
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "6 experiments, {files} output files byte-compared across identical reruns and a single-thread rerun, {} differ{}",
            mismatches.len(),
            if mismatches.is_empty() { String::new() } else { format!(" [{}]", mismatches.join(", ")) }
        ),
    }
}

fn criterion_9() -> Outcome {
    let specs = [
        LatticeSpec::periodic(1, 1, 24, 24),
        LatticeSpec::periodic(1, 2, 12, 8),
        LatticeSpec::periodic(2, 1, 10, 6),
        LatticeSpec::free(1, 2, 10, 6),
    ];
    let levels: Vec<Params> = [(0.1, 0.05), (0.3, 0.2), (0.5, 0.35), (0.5, 0.6), (0.8, 0.6), (0.95, 0.9)]
        .iter()
        .map(|&(p, q)| Params::new(p, q).unwrap())
        .collect();
    let mut violations = 0;
    let mut comparisons = 0;
    for seed in 0..COUPLING_SEEDS {
        for spec in &specs {
            let labels = sample_config_coupled(spec, derive_seed(SEED, 900 + seed)).unwrap();
            let configs: Vec<_> = levels.iter().map(|&l| labels.threshold(l).unwrap()).collect();
            let stats: Vec<_> = configs.iter().map(|c| cluster_stats(c).unwrap()).collect();
            for k in 1..levels.len() {
                comparisons += 1;
                let (a, b) = (&stats[k - 1], &stats[k]);
                let ok = configs[k - 1].open.is_subset(&configs[k].open)
                    && a.largest <= b.largest
                    && a.origin_cluster_size <= b.origin_cluster_size
                    && a.sum_sq <= b.sum_sq
                    && a.cluster_sizes.len() >= b.cluster_sizes.len()
                    && (!a.percolates() || b.percolates());
                if !ok {
                    violations += 1;
                }
            }
        }
    }
    let graphs = oracle::golden_graphs().unwrap();
    let not_monotone: Vec<String> = graphs
        .iter()
        .filter(|g| !oracle::exact_monotonicity_check(g).unwrap())
        .map(|g| g.name.clone())
        .collect();
    Outcome {
        pass: violations == 0 && not_monotone.is_empty(),
        detail: format!(
            "{COUPLING_SEEDS} seeds x {} lattices, {comparisons} nested comparisons, {violations} violations; exact grid monotone on {}/{} oracle graphs",
            specs.len(),
            graphs.len() - not_monotone.len(),
            graphs.len()
        ),
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters come through here too.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let selected: Vec<usize> = match std::env::var("CROSSOVER_ACCEPTANCE") {
        Ok(v) => v.split(',').filter_map(|x| x.trim().parse().ok()).collect(),
        Err(_) => (1..=9).collect(),
    };
    let want = |id: usize| selected.contains(&id) || (selected.contains(&2) && [1, 3, 4].contains(&id));
    let mut results = Vec::new();
    let mut record = |id: usize, name: &str, t: Instant, o: Outcome| {
        report(id, name, t, &o);
        results.push((id, o.pass));
    };

    let mut points = Vec::new();
    let mut psi1 = None;
    if want(1) {
        let t = Instant::now();
        let (o, pts) = criterion_1();
        record(1, "Kesten-line calibration", t, o);
        points.extend(pts);
    }
    if want(3) || want(4) {
        let t = Instant::now();
        let (o, pts, psi) = criterion_3();
        if want(3) {
            record(3, "crossover exponent at d=1", t, o);
            points.extend(pts);
        }
        psi1 = Some(psi);
    }
    if want(4) {
        let t = Instant::now();
        let (o, pts) = criterion_4(psi1.expect("criterion 3 ran"));
        record(4, "d=2 crossover probe", t, o);
        points.extend(pts);
    }
    let criteria: [(usize, &str, &dyn Fn() -> Outcome); 6] = [
        (2, "q_c lower bound 1/(2s chi_d)", &|| criterion_2(&points)),
        (5, "series bound", &criterion_5),
        (6, "renormalization certificate", &criterion_6),
        (7, "oracle equivalence", &criterion_7),
        (8, "determinism", &criterion_8),
        (9, "monotone coupling", &criterion_9),
    ];
    for (id, name, f) in criteria {
        if want(id) {
            let t = Instant::now();
            record(id, name, t, f());
        }
    }

    results.sort_by_key(|r| r.0);
    let failed: Vec<String> = results.iter().filter(|r| !r.1).map(|r| r.0.to_string()).collect();
    if failed.is_empty() {
        println!("acceptance: PASS on all {} criteria run", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAIL on criteria {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
