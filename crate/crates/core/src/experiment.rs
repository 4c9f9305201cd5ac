//! Reproducible experiments: run configuration, dispatch and result files.
//!
//! A run reads one TOML file (or none), applies command-line overrides and
//! writes a directory
//!
//! ```text
//! <output_dir>/<experiment>/<UTC timestamp>-<seed>/
//!     records.jsonl   one JSON record per result, config echoed in the first
//!     table.csv       plot-ready table; first header field is the schema
//!     micro.csv       microcanonical curves (sweep only)
//!     manifest.json   file list, wall time, timestamp
//! ```
//!
//! Everything except `manifest.json` is a pure function of the resolved
//! configuration, so a rerun with the same config and seed reproduces those
//! files byte for byte regardless of the worker count.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::{self, BoundInputs, RenormInputs, SeriesBound};
use crate::constants::ConstantsTable;
use crate::error::{Error, Result};
use crate::estimator::{self, ChiEstimate, Ladder, QcEstimate, QcMethod, QcOptions};
use crate::lattice::{Boundary, LatticeSpec};
use crate::oracle;
use crate::rng;
use crate::sampler::{ChiMode, Params};
use crate::sweep::{linear_grid, sweep_q, SweepOptions};

/// Environment variable consulted for the master seed when neither the
/// config file nor the command line sets one.
pub const SEED_ENV: &str = "CROSSOVER_SEED";

pub const REVISION: &str = concat!("crossover ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Sweep,
    EstimateQc,
    FitPsi,
    BoundsTable,
    OracleCheck,
    Certify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sweep => "sweep",
            Experiment::EstimateQc => "estimate-qc",
            Experiment::FitPsi => "fit-psi",
            Experiment::BoundsTable => "bounds-table",
            Experiment::OracleCheck => "oracle-check",
            Experiment::Certify => "certify",
        }
    }
}

/// Explicit values or `points` evenly spaced values on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { lo: f64, hi: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Range { lo, hi, points } => linear_grid(*lo, *hi, *points),
        }
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::Values(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateSection {
    /// Defaults to sides `side_s` and `2 side_s` of `[lattice]`, square.
    pub ladder: Option<Ladder>,
    /// Bracket; by default `[1/(4 s chi), min(1, bracket_factor / chi)]`.
    pub q_lo: Option<f64>,
    pub q_hi: Option<f64>,
    pub bracket_factor: f64,
    pub q_points: usize,
    pub bootstrap: usize,
    pub method: QcMethod,
}

impl Default for EstimateSection {
    fn default() -> Self {
        EstimateSection {
            ladder: None,
            q_lo: None,
            q_hi: None,
            bracket_factor: 8.0,
            q_points: 200,
            bootstrap: 200,
            method: QcMethod::WrapCrossing,
        }
    }
}

/// Simulation of `chi_d` for d >= 2 on a periodic box of side `side`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChiSection {
    pub side: usize,
    pub replicates: usize,
    pub mode: ChiMode,
}

impl Default for ChiSection {
    fn default() -> Self {
        ChiSection {
            side: 256,
            replicates: 100,
            mode: ChiMode::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifySection {
    pub epsilon: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl Default for CertifySection {
    fn default() -> Self {
        CertifySection {
            epsilon: vec![0.1],
            alpha: vec![50.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    /// Golden file to compare against; the shipped suite when absent.
    pub golden: Option<PathBuf>,
    /// Write the recomputed suite to `golden` instead of comparing.
    pub regenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub master_seed: Option<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Worker threads; 0 uses every logical core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_lattice")]
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub p: Grid,
    #[serde(default)]
    pub q: Grid,
    #[serde(default)]
    pub estimate: EstimateSection,
    #[serde(default)]
    pub chi: ChiSection,
    #[serde(default)]
    pub certify: CertifySection,
    #[serde(default)]
    pub oracle: OracleSection,
    /// Constant overrides by key, e.g. `"site_pc.2" = 0.5927`.
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

fn default_replicates() -> usize {
    100
}

fn default_lattice() -> LatticeSpec {
    LatticeSpec::periodic(1, 1, 64, 64)
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        RunConfig {
            experiment,
            master_seed: None,
            output_dir: default_output_dir(),
            replicates: default_replicates(),
            threads: 0,
            lattice: default_lattice(),
            p: Grid::default(),
            q: Grid::default(),
            estimate: EstimateSection::default(),
            chi: ChiSection::default(),
            certify: CertifySection::default(),
            oracle: OracleSection::default(),
            constants: BTreeMap::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e.span().map_or_else(|| "config".to_string(), |s| format!("config[{}..{}]", s.start, s.end));
            Error::config(field, e.message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// The seed from the config, else from [`SEED_ENV`]. Experiments that
    /// draw no random numbers fall back to 0.
    pub fn resolve_seed(&mut self) -> Result<u64> {
        if let Some(seed) = self.master_seed {
            return Ok(seed);
        }
        let deterministic = matches!(self.experiment, Experiment::OracleCheck | Experiment::Certify);
        let seed = match std::env::var(SEED_ENV) {
            Err(_) if deterministic => 0,
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::config(SEED_ENV, format!("`{v}` is not an unsigned integer")))?,
            Err(_) => {
                return Err(Error::config(
                    "master_seed",
                    format!("no seed given: set master_seed, pass --seed or export {SEED_ENV}"),
                ))
            }
        };
        self.master_seed = Some(seed);
        Ok(seed)
    }

    pub fn validate(&self) -> Result<()> {
        self.lattice.validate().map_err(|e| match e {
            Error::Capacity(_) => e,
            e => Error::config("lattice", e.to_string()),
        })?;
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        let needs_p = matches!(
            self.experiment,
            Experiment::Sweep | Experiment::EstimateQc | Experiment::FitPsi | Experiment::BoundsTable | Experiment::Certify
        );
        let ps = self.p.values();
        if needs_p && ps.is_empty() {
            return Err(Error::config("p", "grid is empty"));
        }
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::config("p", "values must lie in [0, 1]"));
        }
        let qs = self.q.values();
        let needs_q = matches!(self.experiment, Experiment::Sweep | Experiment::BoundsTable | Experiment::Certify);
        if needs_q && qs.is_empty() {
            return Err(Error::config("q", "grid is empty"));
        }
        if qs.iter().any(|q| !(0.0..=1.0).contains(q)) {
            return Err(Error::config("q", "values must lie in [0, 1]"));
        }
        if self.experiment == Experiment::Certify && (self.certify.epsilon.is_empty() || self.certify.alpha.is_empty()) {
            return Err(Error::config("certify", "epsilon and alpha grids must be nonempty"));
        }
        if self.experiment == Experiment::OracleCheck && self.oracle.regenerate && self.oracle.golden.is_none() {
            return Err(Error::config("oracle.golden", "regenerating needs a target path"));
        }
        Ok(())
    }

    fn constants_table(&self) -> ConstantsTable {
        ConstantsTable::default().with_overrides(&self.constants)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub d: Option<usize>,
    pub s: Option<usize>,
    pub side_d: Option<usize>,
    pub side_s: Option<usize>,
    pub boundary: Option<Boundary>,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub epsilon: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub golden: Option<PathBuf>,
    pub regenerate: bool,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
            if let Some(v) = value {
                *slot = v.clone();
            }
        }
        if self.seed.is_some() {
            config.master_seed = self.seed;
        }
        set(&mut config.replicates, &self.replicates);
        set(&mut config.output_dir, &self.output_dir);
        set(&mut config.threads, &self.threads);
        set(&mut config.lattice.d, &self.d);
        set(&mut config.lattice.s, &self.s);
        set(&mut config.lattice.side_d, &self.side_d);
        set(&mut config.lattice.side_s, &self.side_s);
        set(&mut config.lattice.boundary, &self.boundary);
        if let Some(p) = &self.p {
            config.p = Grid::Values(p.clone());
        }
        if let Some(q) = &self.q {
            config.q = Grid::Values(q.clone());
        }
        set(&mut config.certify.epsilon, &self.epsilon);
        set(&mut config.certify.alpha, &self.alpha);
        if self.golden.is_some() {
            config.oracle.golden = self.golden.clone();
        }
        config.oracle.regenerate |= self.regenerate;
    }
}

/// A CSV table whose first header field is the schema string and whose rows
/// start with their ordinal.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(schema: &str, columns: &[&str]) -> Self {
        Table {
            schema: schema.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.schema.clone()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.iter().cloned());
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| Error::Serialization(e.to_string()))
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

/// Results of one experiment before they are written.
#[derive(Debug)]
pub struct RunOutput {
    pub records: Vec<serde_json::Value>,
    pub table: Table,
    pub micro: Option<Table>,
    /// Error to report after the files are written (typed exit status).
    pub deferred_error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: Experiment,
    pub master_seed: u64,
    pub revision: String,
    pub started_utc: String,
    pub wall_seconds: f64,
    pub threads: usize,
    pub files: Vec<String>,
    pub complete: bool,
    pub status: String,
}

#[derive(Debug)]
pub struct RunSummary {
    pub run_dir: PathBuf,
    pub manifest: Manifest,
    pub output: RunOutput,
}

/// Resolve the seed, run the experiment and write its directory. With
/// `run_dir` the files go there instead of the timestamped location.
pub fn run(mut config: RunConfig, run_dir: Option<PathBuf>) -> Result<RunSummary> {
    let seed = config.resolve_seed()?;
    config.validate()?;
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    let threads = pool.current_num_threads();
    let output = pool.install(|| execute(&config, seed))?;
    let dir = run_dir.unwrap_or_else(|| {
        config
            .output_dir
            .join(config.experiment.name())
            .join(format!("{}-{seed}", started.format("%Y%m%dT%H%M%SZ")))
    });
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let mut files = Vec::new();
    let mut records = String::new();
    let echo = json!({
        "kind": "config",
        "revision": REVISION,
        "master_seed": seed,
        "config": config,
    });
    records.push_str(&serde_json::to_string(&echo)?);
    records.push('\n');
    for r in &output.records {
        records.push_str(&serde_json::to_string(r)?);
        records.push('\n');
    }
    write_atomic(&dir.join("records.jsonl"), records.as_bytes())?;
    files.push("records.jsonl".to_string());
    write_atomic(&dir.join("table.csv"), &output.table.to_csv()?)?;
    files.push("table.csv".to_string());
    if let Some(micro) = &output.micro {
        write_atomic(&dir.join("micro.csv"), &micro.to_csv()?)?;
        files.push("micro.csv".to_string());
    }
    let manifest = Manifest {
        experiment: config.experiment,
        master_seed: seed,
        revision: REVISION.to_string(),
        started_utc: started.to_rfc3339(),
        wall_seconds: clock.elapsed().as_secs_f64(),
        threads,
        files,
        complete: true,
        status: output
            .deferred_error
            .as_ref()
            .map_or_else(|| "ok".to_string(), |e| e.to_string()),
    };
    write_atomic(&dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(RunSummary {
        run_dir: dir,
        manifest,
        output,
    })
}

/// Write through a temporary sibling and rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::config("output", format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.partial", name.to_string_lossy()));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Compute the outputs of a validated config without touching the disk.
pub fn execute(config: &RunConfig, seed: u64) -> Result<RunOutput> {
    match config.experiment {
        Experiment::Sweep => cmd_sweep(config, seed),
        Experiment::EstimateQc => cmd_estimate_qc(config, seed),
        Experiment::FitPsi => cmd_fit_psi(config, seed),
        Experiment::BoundsTable => cmd_bounds_table(config, seed),
        Experiment::OracleCheck => cmd_oracle_check(config),
        Experiment::Certify => cmd_certify(config),
    }
}

fn sizes(spec: &LatticeSpec) -> String {
    format!("{}^{}x{}^{}", spec.side_d, spec.d, spec.side_s, spec.s)
}

pub fn cmd_sweep(config: &RunConfig, seed: u64) -> Result<RunOutput> {
    let spec = config.lattice;
    let qs = config.q.values();
    let mut table = Table::new(
        "crossover.sweep.v1",
        &[
            "p", "q", "R_L", "R_L_stderr", "chi_est", "chi_stderr", "largest_frac", "largest_frac_stderr", "seed",
            "sizes", "replicates",
        ],
    );
    let mut micro = Table::new(
        "crossover.sweep-micro.v1",
        &["p", "m", "wrap", "chi_est", "largest_frac", "seed", "sizes", "replicates"],
    );
    let mut records = Vec::new();
    for (k, p) in config.p.values().into_iter().enumerate() {
        let p_seed = rng::derive_seed(seed, k as u64);
        let options = SweepOptions::new(config.replicates, p_seed).with_grid(qs.clone(), false);
        let out = sweep_q(&spec, p, &options)?;
        let canonical = out.canonical.expect("grid is nonempty");
        let wrap = canonical.mean_and_stderr(|o| o.wrap);
        let chi = canonical.mean_and_stderr(|o| o.mean_cluster);
        let big = canonical.mean_and_stderr(|o| o.largest_frac);
        for (i, &q) in qs.iter().enumerate() {
            table.push(vec![
                num(p),
                num(q),
                num(wrap[i].0),
                num(wrap[i].1),
                num(chi[i].0),
                num(chi[i].1),
                num(big[i].0),
                num(big[i].1),
                p_seed.to_string(),
                sizes(&spec),
                config.replicates.to_string(),
            ]);
        }
        for (m, o) in out.curve.micro.iter().enumerate() {
            micro.push(vec![
                num(p),
                m.to_string(),
                num(o.wrap),
                num(o.mean_cluster),
                num(o.largest_frac),
                p_seed.to_string(),
                sizes(&spec),
                config.replicates.to_string(),
            ]);
        }
        records.push(json!({
            "kind": "sweep",
            "p": p,
            "seed": p_seed,
            "replicates": config.replicates,
            "replicate_block": [0, config.replicates],
            "curve": out.curve,
            "canonical": qs.iter().enumerate().map(|(i, &q)| json!({
                "q": q,
                "wrap": wrap[i],
                "mean_cluster": chi[i],
                "largest_frac": big[i],
            })).collect::<Vec<_>>(),
        }));
    }
    Ok(RunOutput {
        records,
        table,
        micro: Some(micro),
        deferred_error: None,
    })
}

/// `chi_d(p)`: exact for d = 1, simulated otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiValue {
    pub p: f64,
    pub value: f64,
    pub stderr: f64,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<ChiEstimate>,
}

pub fn chi_d(d: usize, p: f64, section: &ChiSection, seed: u64) -> Result<ChiValue> {
    if d == 1 {
        return Ok(ChiValue {
            p,
            value: bounds::chi_1_exact(p)?,
            stderr: 0.0,
            exact: true,
            simulation: None,
        });
    }
    let spec = LatticeSpec::periodic(d, 1, section.side, 2);
    let est = estimator::estimate_chi(&spec, Params::new(p, 0.0)?, section.replicates, seed, section.mode)?;
    if est.supercritical {
        return Err(Error::domain(format!(
            "chi_{d}({p}) simulation percolated in {:.1}% of replicates",
            100.0 * est.percolating_fraction
        )));
    }
    Ok(ChiValue {
        p,
        value: est.mean,
        stderr: est.stderr,
        exact: false,
        simulation: Some(est),
    })
}

/// q_c estimate at one p with the ladder and bracket the config describes.
pub fn qc_point(config: &RunConfig, p: f64, seed: u64, chi: Option<&ChiValue>) -> Result<QcEstimate> {
    let spec = config.lattice;
    let (d, s) = (spec.d, spec.s);
    let constants = config.constants_table();
    let pc = estimator::reference_pc(d, &constants)?;
    let chi_value = match chi {
        Some(c) => c.value,
        None if p < pc => chi_d(d, p, &config.chi, rng::derive_seed(seed, 1))?.value,
        None => 1.0,
    };
    let ladder = config
        .estimate
        .ladder
        .clone()
        .unwrap_or_else(|| Ladder::square(&[spec.side_s, 2 * spec.side_s]));
    let ladder_specs = ladder.specs(d, s, if p < pc { chi_value } else { 1.0 })?;
    let lo = config
        .estimate
        .q_lo
        .unwrap_or_else(|| 1.0 / (4.0 * s as f64 * chi_value));
    let hi = config
        .estimate
        .q_hi
        .unwrap_or_else(|| (config.estimate.bracket_factor / chi_value).min(1.0));
    let mut options = QcOptions::new(lo, hi, config.replicates, rng::derive_seed(seed, 0));
    options.q_points = config.estimate.q_points;
    options.bootstrap = config.estimate.bootstrap;
    options.method = config.estimate.method;
    estimator::estimate_qc(&ladder_specs, p, &options, &constants)
}

fn qc_row(e: &QcEstimate, chi: &ChiValue, s: usize, kesten: Option<f64>) -> Result<Vec<String>> {
    let lower = bounds::qc_lower_bound(&BoundInputs {
        p: e.p,
        q: 0.0,
        d: 1,
        s,
        chi_d: chi.value,
    })?;
    let flags: Vec<String> = e
        .flags
        .iter()
        .map(|f| serde_json::to_value(f).map(|v| v.as_str().unwrap_or_default().to_string()))
        .collect::<std::result::Result<_, _>>()?;
    Ok(vec![
        num(e.p),
        num(e.qc_hat),
        num(e.ci_halfwidth),
        num(chi.value),
        num(chi.stderr),
        num(lower),
        opt(kesten),
        num(e.qc_hat * chi.value),
        e.seed.to_string(),
        e.sizes_used.iter().map(sizes).collect::<Vec<_>>().join(" "),
        e.replicates.to_string(),
        flags.join(" "),
    ])
}

const QC_COLUMNS: [&str; 12] = [
    "p",
    "qc_hat",
    "ci_halfwidth",
    "chi_d",
    "chi_d_stderr",
    "qc_lower_bound",
    "kesten_line",
    "qc_times_chi",
    "seed",
    "sizes",
    "replicates",
    "flags",
];

type QcGrid = (Vec<QcEstimate>, Vec<ChiValue>, Table, Vec<serde_json::Value>);

fn qc_grid(config: &RunConfig, seed: u64) -> Result<QcGrid> {
    let spec = config.lattice;
    let constants = config.constants_table();
    let pc = estimator::reference_pc(spec.d, &constants)?;
    let mut table = Table::new("crossover.qc.v1", &QC_COLUMNS);
    let mut records = Vec::new();
    let (mut estimates, mut chis) = (Vec::new(), Vec::new());
    for (k, p) in config.p.values().into_iter().enumerate() {
        let p_seed = rng::derive_seed(seed, k as u64);
        let chi = if p < pc {
            chi_d(spec.d, p, &config.chi, rng::derive_seed(p_seed, 1))?
        } else {
            ChiValue {
                p,
                value: f64::INFINITY,
                stderr: 0.0,
                exact: spec.d == 1,
                simulation: None,
            }
        };
        let e = qc_point(config, p, p_seed, p.lt(&pc).then_some(&chi))?;
        let kesten = (spec.d == 1 && spec.s == 1).then(|| bounds::kesten_line(p)).transpose()?;
        if p < pc {
            table.push(qc_row(&e, &chi, spec.s, kesten)?);
        } else {
            let mut row = vec![String::new(); QC_COLUMNS.len()];
            row[0] = num(p);
            row[1] = num(e.qc_hat);
            row[2] = num(e.ci_halfwidth);
            row[6] = opt(kesten);
            row[8] = e.seed.to_string();
            row[9] = e.sizes_used.iter().map(sizes).collect::<Vec<_>>().join(" ");
            row[10] = e.replicates.to_string();
            row[11] = "at-or-above-threshold".into();
            table.push(row);
        }
        records.push(json!({ "kind": "qc-estimate", "estimate": e, "chi_d": chi }));
        estimates.push(e);
        chis.push(chi);
    }
    Ok((estimates, chis, table, records))
}

pub fn cmd_estimate_qc(config: &RunConfig, seed: u64) -> Result<RunOutput> {
    let (_, _, table, records) = qc_grid(config, seed)?;
    Ok(RunOutput {
        records,
        table,
        micro: None,
        deferred_error: None,
    })
}

pub fn cmd_fit_psi(config: &RunConfig, seed: u64) -> Result<RunOutput> {
    let spec = config.lattice;
    let constants = config.constants_table();
    let pc = estimator::reference_pc(spec.d, &constants)?;
    if config.p.values().iter().any(|&p| p >= pc) {
        return Err(Error::config("p", format!("fit-psi needs every p below p_c({}) = {pc}", spec.d)));
    }
    let (estimates, chis, table, mut records) = qc_grid(config, seed)?;
    let psi = estimator::fit_psi(spec.d, spec.s, pc, &estimates)?;
    let gamma = if spec.d == 1 {
        estimator::exact_gamma_1(&config.p.values())?
    } else {
        let triples: Vec<(f64, f64, f64)> = chis.iter().map(|c| (c.p, c.value, c.stderr)).collect();
        estimator::fit_gamma(spec.d, pc, &triples)?
    };
    let report = estimator::psi_gamma_report(&psi, &gamma)?;
    records.push(json!({ "kind": "psi-fit", "fit": psi }));
    records.push(json!({ "kind": "chi-fit", "fit": gamma }));
    records.push(json!({ "kind": "psi-gamma-report", "report": report }));
    Ok(RunOutput {
        records,
        table,
        micro: None,
        deferred_error: None,
    })
}

pub fn cmd_bounds_table(config: &RunConfig, seed: u64) -> Result<RunOutput> {
    let spec = config.lattice;
    let (d, s) = (spec.d, spec.s);
    let constants = config.constants_table();
    let pc = estimator::reference_pc(d, &constants)?;
    let site = if s >= 2 { Some(constants.site_pc(s)?) } else { None };
    let mut table = Table::new(
        "crossover.bounds.v1",
        &[
            "p",
            "q",
            "chi_d",
            "chi_d_stderr",
            "chi_exact",
            "qc_lower_bound",
            "series_bound",
            "kesten_line",
            "epsilon",
            "alpha",
            "certification_margin",
            "certified",
            "seed",
            "d",
            "s",
        ],
    );
    let mut records = Vec::new();
    for (k, p) in config.p.values().into_iter().enumerate() {
        if p >= pc {
            return Err(Error::config("p", format!("bounds need p below p_c({d}) = {pc}, got {p}")));
        }
        let p_seed = rng::derive_seed(seed, k as u64);
        let chi = chi_d(d, p, &config.chi, p_seed)?;
        let kesten = (d == 1 && s == 1).then(|| bounds::kesten_line(p)).transpose()?;
        for q in config.q.values() {
            let inputs = BoundInputs { p, q, d, s, chi_d: chi.value };
            let lower = bounds::qc_lower_bound(&inputs)?;
            let series = bounds::series_chi_bound(&inputs)?;
            let mut certs = Vec::new();
            if let Some(site) = site {
                for &epsilon in &config.certify.epsilon {
                    for &alpha in &config.certify.alpha {
                        let cert = bounds::renorm_certifies_percolation(&RenormInputs {
                            p,
                            q,
                            s,
                            epsilon,
                            alpha,
                            site_threshold_s: Some(site),
                        })?;
                        certs.push((Some(epsilon), Some(alpha), Some(cert)));
                    }
                }
            } else {
                certs.push((None, None, None));
            }
            for (epsilon, alpha, cert) in &certs {
                table.push(vec![
                    num(p),
                    num(q),
                    num(chi.value),
                    num(chi.stderr),
                    chi.exact.to_string(),
                    num(lower),
                    match series {
                        SeriesBound::Finite(x) => num(x),
                        SeriesBound::Divergent => "divergent".into(),
                    },
                    opt(kesten),
                    opt(*epsilon),
                    opt(*alpha),
                    opt(cert.and_then(|c| c.margin)),
                    cert.map_or_else(String::new, |c| c.certified.to_string()),
                    p_seed.to_string(),
                    d.to_string(),
                    s.to_string(),
                ]);
            }
            records.push(json!({
                "kind": "bounds",
                "p": p,
                "q": q,
                "chi_d": chi,
                "qc_lower_bound": lower,
                "series_bound": series,
                "kesten_line": kesten,
                "certificates": certs.iter().map(|(e, a, c)| json!({"epsilon": e, "alpha": a, "certificate": c})).collect::<Vec<_>>(),
            }));
        }
    }
    Ok(RunOutput {
        records,
        table,
        micro: None,
        deferred_error: None,
    })
}

pub fn cmd_oracle_check(config: &RunConfig) -> Result<RunOutput> {
    let computed = oracle::golden_suite()?;
    let mut table = Table::new(
        "crossover.oracle.v1",
        &[
            "graph",
            "vertices",
            "edges",
            "p",
            "q",
            "chi_origin",
            "mean_cluster",
            "span",
            "wrap",
            "deletion_contraction_max_diff",
            "monotone",
            "golden_diffs",
        ],
    );
    let mut records = Vec::new();
    let mut deferred_error = None;
    let diffs = if config.oracle.regenerate {
        let path = config.oracle.golden.as_ref().expect("validated");
        write_atomic(path, oracle::golden_to_jsonl(&computed)?.as_bytes())?;
        records.push(json!({ "kind": "golden-written", "path": path, "records": computed.len() }));
        Vec::new()
    } else {
        let stored = match &config.oracle.golden {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                oracle::golden_from_jsonl(&text)?
            }
            None => oracle::golden_from_jsonl(oracle::SHIPPED_GOLDEN)?,
        };
        oracle::diff_golden(&stored, &computed)
    };
    let mut monotone = BTreeMap::new();
    for rec in &computed {
        let name = rec.graph.name.clone();
        if !monotone.contains_key(&name) {
            monotone.insert(name.clone(), oracle::exact_monotonicity_check(&rec.graph)?);
        }
        let dc = if rec.graph.edges.len() <= oracle::MAX_DC_EDGES {
            let r = oracle::deletion_contraction_result(&rec.graph, rec.result.params)?;
            Some(oracle::max_abs_difference(&r, &rec.result))
        } else {
            None
        };
        let n_diffs = diffs
            .iter()
            .filter(|d| d.graph == name && d.params == rec.result.params)
            .count();
        table.push(vec![
            name.clone(),
            rec.graph.vertex_count.to_string(),
            rec.graph.edges.len().to_string(),
            num(rec.result.params.p),
            num(rec.result.params.q),
            num(rec.result.chi_origin),
            num(rec.result.mean_cluster),
            opt(rec.result.event_probs.get("span").copied()),
            opt(rec.result.event_probs.get("wrap").copied()),
            opt(dc),
            monotone[&name].to_string(),
            n_diffs.to_string(),
        ]);
    }
    for d in &diffs {
        records.push(json!({ "kind": "golden-diff", "diff": d }));
    }
    records.push(json!({
        "kind": "oracle-summary",
        "records": computed.len(),
        "diffs": diffs.len(),
        "all_monotone": monotone.values().all(|&m| m),
    }));
    if !diffs.is_empty() {
        deferred_error = Some(Error::Mismatch { count: diffs.len() });
    }
    Ok(RunOutput {
        records,
        table,
        micro: None,
        deferred_error,
    })
}

pub fn cmd_certify(config: &RunConfig) -> Result<RunOutput> {
    let s = config.lattice.s;
    let constants = config.constants_table();
    let site = constants.site_pc(s)?;
    let mut table = Table::new(
        "crossover.certify.v1",
        &[
            "p",
            "q",
            "s",
            "epsilon",
            "alpha",
            "status",
            "certified",
            "p_bar_lower",
            "site_threshold",
            "margin",
            "q_threshold",
        ],
    );
    let mut records = Vec::new();
    let (mut total, mut invalid) = (0usize, 0usize);
    for p in config.p.values() {
        for q in config.q.values() {
            for &epsilon in &config.certify.epsilon {
                for &alpha in &config.certify.alpha {
                    let inputs = RenormInputs {
                        p,
                        q,
                        s,
                        epsilon,
                        alpha,
                        site_threshold_s: Some(site),
                    };
                    let cert = bounds::renorm_certifies_percolation(&inputs)?;
                    total += 1;
                    if cert.status == bounds::CertificateStatus::InvalidRegime {
                        invalid += 1;
                    }
                    let status = serde_json::to_value(cert.status)?;
                    table.push(vec![
                        num(p),
                        num(q),
                        s.to_string(),
                        num(epsilon),
                        num(alpha),
                        status.as_str().unwrap_or_default().to_string(),
                        cert.certified.to_string(),
                        opt(cert.p_bar_lower),
                        num(cert.site_threshold),
                        opt(cert.margin),
                        num(cert.q_threshold),
                    ]);
                    records.push(json!({ "kind": "certificate", "inputs": inputs, "certificate": cert }));
                }
            }
        }
    }
    let deferred_error = (total > 0 && invalid == total).then(|| {
        Error::InvalidRegime(format!(
            "every requested point fails p^((1+p)/(1-p) eps) >= 1 - 3 eps ({invalid} of {total})"
        ))
    });
    Ok(RunOutput {
        records,
        table,
        micro: None,
        deferred_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrip_and_defaults() {
        let c = RunConfig::from_toml(
            r#"
            experiment = "estimate-qc"
            master_seed = 9
            p = { lo = 0.2, hi = 0.8, points = 3 }
            [lattice]
            d = 1
            s = 2
            side_d = 32
            side_s = 16
            boundary = "periodic"
            "#,
        )
        .unwrap();
        assert_eq!(c.p.values(), vec![0.2, 0.5, 0.8]);
        assert_eq!(c.replicates, 100);
        let back = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_field_is_config_error() {
        let e = RunConfig::from_toml("experiment = \"sweep\"\nreplicate = 3\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::new(Experiment::Sweep);
        c.master_seed = Some(1);
        Overrides {
            seed: Some(5),
            side_s: Some(8),
            p: Some(vec![0.4]),
            ..Default::default()
        }
        .apply(&mut c);
        assert_eq!((c.master_seed, c.lattice.side_s, c.p.values()), (Some(5), 8, vec![0.4]));
    }

    #[test]
    fn csv_schema_header() {
        let mut t = Table::new("x.v1", &["a", "b"]);
        t.push(vec!["1".into(), "with,comma".into()]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "x.v1,a,b\n0,1,\"with,comma\"\n");
    }

    #[test]
    fn worked_certificate() {
        let mut c = RunConfig::new(Experiment::Certify);
        c.lattice = LatticeSpec::periodic(1, 2, 8, 8);
        c.p = Grid::Values(vec![0.999]);
        c.q = Grid::Values(vec![0.05]);
        let out = cmd_certify(&c).unwrap();
        let cert = &out.records[0]["certificate"];
        assert_eq!(cert["certified"], true);
        assert!((cert["margin"].as_f64().unwrap() - 0.098).abs() < 1e-3);
        // 0.01^(0.1 * 1.01 / 0.99) = 0.62 < 0.7.
        c.p = Grid::Values(vec![0.01]);
        assert_eq!(cmd_certify(&c).unwrap().deferred_error.unwrap().exit_code(), 5);
    }
}
