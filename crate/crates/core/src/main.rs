//! `blockade` command line: sweeps, feature overlays, drive-series fits and
//! verification suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use blockade::atlas::{
    run_expand, run_features, run_sweep, verify, write_expansion, write_features, write_sweep,
    Suite, SweepConfig, Written,
};
use blockade::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "blockade", version, about = "Photon statistics of driven-dissipative emitters")]
#[command(after_help = "The worker thread count is read from BLOCKADE_THREADS.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate observables on a parameter grid and write <name>.csv and <name>.meta.json.
    Sweep {
        config: PathBuf,
        /// Write outputs here instead of the configured directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Write the CA/CB/UA/UB curves of the [window] to <name>.features.csv.
    Features {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run a verification suite and print a JSON report.
    Verify {
        /// identities, oracles or landmarks.
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance override for the identities and oracles suites.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Fit the [expand] drive series and write <name>.expand.csv.
    Expand {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn load(path: &Path, output_dir: Option<PathBuf>) -> Result<SweepConfig, Error> {
    let mut cfg = SweepConfig::load(path)?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    Ok(cfg)
}

fn report(w: &Written) {
    println!("{}", w.csv.display());
    println!("{}", w.meta.display());
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Sweep { config, output_dir } => {
            let cfg = load(&config, output_dir)?;
            log::info!("sweep `{}` with the {} engine", cfg.name, cfg.engine.kind.name());
            let result = run_sweep(&cfg)?;
            for (status, count) in result.status_counts() {
                log::info!("{count} cells {status}");
            }
            report(&write_sweep(&result, &cfg.output_dir)?);
            Ok(0)
        }
        Command::Features { config, output_dir } => {
            let cfg = load(&config, output_dir)?;
            let features = run_features(&cfg)?;
            let window = cfg.window.expect("checked by run_features");
            report(&write_features(&cfg, &window, &features, &cfg.output_dir)?);
            Ok(0)
        }
        Command::Verify { suite, seed, tol } => {
            let suite: Suite = suite.parse()?;
            if tol.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
                return Err(Error::Config("--tol must be positive".into()));
            }
            if tol.is_some() && suite == Suite::Landmarks {
                log::warn!("landmark tolerances are fixed; --tol is ignored");
            }
            let report = verify(suite, seed, tol);
            for c in report.checks.iter().filter(|c| !c.passed) {
                log::warn!("FAIL {}: deviation {:e} > {:e} ({})", c.name, c.max_deviation, c.tolerance, c.note);
            }
            let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
            println!("{text}");
            Ok(if report.passed { 0 } else { EXIT_FAILURE })
        }
        Command::Expand { config, output_dir } => {
            let cfg = load(&config, output_dir)?;
            let fit = run_expand(&cfg)?;
            let request = cfg.expand.clone().expect("checked by run_expand");
            report(&write_expansion(&cfg, &request, &fit, &cfg.output_dir)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
