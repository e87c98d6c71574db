use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use rigidlab_cli::run::verify_default_cocycles;
use rigidlab_cli::{load_manifest, parse_manifest, run_experiment, CliError, ExperimentManifest, OracleMode, Report};

#[derive(Parser)]
#[command(
    name = "rigidlab",
    version,
    about = "Rigidity experiments on odometers, extensions and rank-one maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Full,
    Sample,
    Off,
}

impl From<Oracle> for OracleMode {
    fn from(o: Oracle) -> Self {
        match o {
            Oracle::Full => OracleMode::Full,
            Oracle::Sample => OracleMode::Sample,
            Oracle::Off => OracleMode::Off,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis in a manifest.
    Run {
        manifest: PathBuf,
        /// Output directory; overrides [output] dir.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "sample")]
        oracle: Oracle,
    },
    /// Check the Morse and Rudin-Shapiro cocycles against their digit sequences.
    VerifyCocycles {
        #[arg(long, default_value_t = 65536)]
        k_max: u64,
    },
    /// Built-in pipelines.
    Demo {
        #[arg(value_enum)]
        name: Demo,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    /// Dyadic odometer with the Rudin-Shapiro extension.
    #[value(name = "dyadic-rs", alias = "remark-1-4")]
    DyadicRs,
}

fn header() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    format!("rigidlab {} run at unix time {secs}", env!("CARGO_PKG_VERSION"))
}

fn set_threads(threads: Option<usize>) -> Result<(), String> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn execute(m: &ExperimentManifest, out: Option<&Path>, oracle: OracleMode) -> ExitCode {
    let report: Report = run_experiment(m, oracle);
    let header = header();
    print!("{}", report.summary(&header));
    if let Some(dir) = out.or(m.output.as_deref()) {
        if let Err(e) = report.write_to(dir, &header) {
            eprintln!("error: writing {}: {e}", dir.display());
            return ExitCode::from(3);
        }
        println!("wrote {}", dir.display());
    }
    ExitCode::from(report.exit_code() as u8)
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            manifest,
            out,
            threads,
            oracle,
        } => {
            if let Err(e) = set_threads(threads) {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            match load_manifest(&manifest) {
                Ok(m) => execute(&m, out.as_deref(), oracle.into()),
                Err(e) => fail(e),
            }
        }
        Command::VerifyCocycles { k_max } => match verify_default_cocycles(k_max) {
            Ok(outcome) => {
                for h in &outcome.headlines {
                    println!("{h}");
                }
                println!("{}", outcome.status);
                ExitCode::from(if outcome.status == rigidlab_cli::Status::Pass {
                    0
                } else {
                    2
                })
            }
            Err(e) => fail(e.into()),
        },
        Command::Demo { name, out, threads } => {
            if let Err(e) = set_threads(threads) {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            let text = match name {
                Demo::DyadicRs => rigidlab_cli::DEMO_MANIFEST,
            };
            match parse_manifest(text) {
                Ok(m) => execute(&m, out.as_deref(), OracleMode::Sample),
                Err(errs) => fail(CliError::Manifest(errs)),
            }
        }
    }
}
