//! Loads a TOML experiment, runs one pipeline and writes its artifacts,
//! the library-level equivalent of `tdlab <mode> --config <path>`.
//!
//! cargo run --release --example config_run -- configs/barrier.toml smatrix /tmp/out

use std::path::PathBuf;

use tdlab::config::ExperimentConfig;
use tdlab::run::{run, write_artifacts, Mode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "configs/barrier.toml".into());
    let mode: Mode = args.next().unwrap_or_else(|| "kappa".into()).parse()?;
    let out = args.next().map_or_else(|| std::env::temp_dir().join("tdlab-example"), PathBuf::from);

    let text = std::fs::read_to_string(&path)?;
    let config = ExperimentConfig::from_toml_str(&text)?;
    let output = run(mode, &config, &text);
    for c in &output.report.checks {
        println!("{} {} = {:e} ({} {:e})", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value, c.relation, c.tolerance);
    }
    for p in write_artifacts(&config, &output, &out)? {
        println!("wrote {}", p.display());
    }
    println!("config sha256 {}", output.report.config_sha256);
    Ok(())
}
