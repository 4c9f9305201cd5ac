use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn crossover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossover"))
        .args(args)
        .env_remove("CROSSOVER_SEED")
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--run-dir", dir.to_str().unwrap()]);
    crossover(&all)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["sweep", "--p", "0.5", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("seed"));
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_crossover"))
        .args(["sweep", "--p", "0.5", "--q", "0.5", "--side-d", "8", "--side-s", "8", "--replicates", "4"])
        .args(["--run-dir", dir.path().to_str().unwrap()])
        .env("CROSSOVER_SEED", "17")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"master_seed\": 17"), "{manifest}");
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "experiment = \"sweep\"\nmaster_seed = 1\nreplicate = 3\n").unwrap();
    let o = run_in(&dir.path().join("out"), &["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn oversized_lattice_is_a_capacity_error() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--seed", "1", "--d", "3", "--s", "3", "--side-d", "4096", "--side-s", "4096", "--p", "0.5", "--q", "0.5"];
    let o = run_in(dir.path(), &args);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn empty_bracket_is_no_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    // At p = 0.5 the crossing sits near q = 0.5, far outside [0.9, 1].
    fs::write(
        &config,
        "experiment = \"estimate-qc\"\nmaster_seed = 3\nreplicates = 20\np = [0.5]\n\
         [lattice]\nd = 1\ns = 1\nside_d = 16\nside_s = 16\nboundary = \"periodic\"\n\
         [estimate]\nq_lo = 0.9\nq_hi = 1.0\nbootstrap = 10\n",
    )
    .unwrap();
    let o = run_in(&dir.path().join("out"), &["estimate-qc", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn certify_worked_example_and_invalid_regime() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["certify", "--s", "2", "--epsilon", "0.1", "--alpha", "50"];
    let o = run_in(&dir.path().join("ok"), &[&base[..], &["--p", "0.99", "--q", "0.5"]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("ok/table.csv")).unwrap();
    assert!(table.contains(",certified,true,"), "{table}");

    // p^((1+p) eps/(1-p)) >= 1 - 3 eps fails at p = 0.01.
    let o = run_in(&dir.path().join("bad"), &[&base[..], &["--p", "0.01", "--q", "0.5"]].concat());
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
    assert!(dir.path().join("bad/table.csv").exists());
}

#[test]
fn oracle_check_matches_shipped_suite() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["oracle-check"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let mut lines = table.lines();
    assert!(lines.next().unwrap().starts_with("crossover.oracle.v1,graph,"));
    assert_eq!(lines.count(), 39);
    assert!(!table.contains(",false,"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["bounds-table", "--seed", "5", "--d", "1", "--s", "2", "--p", "0.3,0.6", "--q", "0.01,0.05"];
    for name in ["a", "b"] {
        let o = run_in(&dir.path().join(name), &args);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for file in ["records.jsonl", "table.csv"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(file)).unwrap(),
            fs::read(dir.path().join("b").join(file)).unwrap(),
            "{file}"
        );
    }
    let manifest = fs::read_to_string(dir.path().join("a/manifest.json")).unwrap();
    assert!(manifest.contains("\"complete\": true"));
}

#[test]
fn sweep_writes_microcanonical_and_canonical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--seed", "9", "--side-d", "8", "--side-s", "8", "--replicates", "8", "--p", "0.5", "--q", "0,0.5,1"];
    let o = run_in(dir.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), dir.path().to_str().unwrap());
    let table = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert_eq!(table.lines().count(), 4, "{table}");
    assert!(dir.path().join("micro.csv").exists());
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let config = crossover::experiment::RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        config.validate().unwrap();
        n += 1;
    }
    assert!(n >= 4);
    let out = tempfile::tempdir().unwrap();
    let o = run_in(out.path(), &["certify", "--config", dir.join("certify.toml").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
}
