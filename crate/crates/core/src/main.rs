use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tdlab::config::ExperimentConfig;
use tdlab::run::{run, write_artifacts, Mode};

/// Numerical time-delay lab for one-dimensional scattering.
#[derive(Parser, Debug)]
#[command(name = "tdlab", version)]
struct Cli {
    /// checks | smatrix | kappa | delay
    mode: Mode,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to TDLAB_OUT, then [output] dir.
    #[arg(long, env = "TDLAB_OUT")]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let config = match ExperimentConfig::from_toml_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error in {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };

    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot size worker pool: {e}");
            return ExitCode::from(2);
        }
    }

    let dir = cli
        .out
        .unwrap_or_else(|| PathBuf::from(&config.output.dir));

    let output = run(cli.mode, &config, &text);
    for c in &output.report.checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        match &c.detail {
            Some(d) => println!("{status} {}: {:e} {} {:e} ({d})", c.name, c.value, c.relation, c.tolerance),
            None => println!("{status} {}: {:e} {} {:e}", c.name, c.value, c.relation, c.tolerance),
        }
    }
    match write_artifacts(&config, &output, &dir) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("cannot write outputs to {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    }
    if output.report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
