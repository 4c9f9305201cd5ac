//! A full experiment from a TOML config, written to a run directory the
//! same way the command-line runner does it.

use crossover::experiment::{run, RunConfig};

const CONFIG: &str = r#"
experiment = "estimate-qc"
master_seed = 42
replicates = 100
p = [0.3, 0.6]

[lattice]
d = 1
s = 1
side_d = 32
side_s = 32
boundary = "periodic"
"#;

fn main() -> crossover::Result<()> {
    let dir = std::env::temp_dir().join("crossover-example-run");
    let summary = run(RunConfig::from_toml(CONFIG)?, Some(dir.clone()))?;
    println!("wrote {} in {:.1}s", summary.manifest.files.join(", "), summary.manifest.wall_seconds);
    print!("{}", std::fs::read_to_string(dir.join("table.csv")).map_err(|e| crossover::Error::io(&dir, e))?);
    Ok(())
}
