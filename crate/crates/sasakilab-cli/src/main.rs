//! Command-line front end for the sasakilab verification workbench.
//!
//! Exit codes: 0 = all verdicts pass, 1 = a scientific check failed,
//! 2 = operational/configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sasakilab::fixtures::fixture_catalog;
use sasakilab::identities::registry;
use sasakilab::report::{classify_run, verify_run, InputSource, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "sasakilab",
    version,
    about = "Numerical verification workbench for Sasakian geometry and shrinking Sasaki-Ricci solitons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List shipped fixtures or registered identities.
    List {
        /// What to list: `fixtures` or `identities`.
        what: String,
    },
    /// Run the full verification pipeline: axioms, identities, spectrum,
    /// classification.
    Verify(RunArgs),
    /// Run only the spectral classification.
    Classify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Shipped fixture name (see `sasakilab list fixtures`).
    #[arg(long, conflicts_with = "manifold")]
    fixture: Option<String>,
    /// Path to a manifold file.
    #[arg(long)]
    manifold: Option<PathBuf>,
    /// Number of sample points (>= 10).
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// RNG seed for sampling and frames.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Axiom residual tolerance.
    #[arg(long = "tol-axiom", default_value_t = 1e-8)]
    tol_axiom: f64,
    /// Identity residual tolerance.
    #[arg(long = "tol-identity", default_value_t = 1e-6)]
    tol_identity: f64,
    /// Eigenvalue clustering tolerance.
    #[arg(long = "cluster-tol", default_value_t = 1e-5)]
    cluster_tol: f64,
    /// Relative stddev threshold for constant scalar curvature.
    #[arg(long = "constancy-tol", default_value_t = 1e-6)]
    constancy_tol: f64,
    /// Finite-difference step for the jet-vs-FD crosscheck.
    #[arg(long = "fd-step", default_value_t = 1e-4)]
    fd_step: f64,
    /// Output format.
    #[arg(long, default_value = "json", value_parser = ["json", "md"])]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated identity ids to run (default: whole registry).
    #[arg(long)]
    identities: Option<String>,
}

impl RunArgs {
    fn into_config(self) -> Result<(RunConfig, Option<PathBuf>), String> {
        let source = match (self.fixture, self.manifold) {
            (Some(name), None) => InputSource::Fixture { name },
            (None, Some(path)) => InputSource::Manifold {
                path: path.display().to_string(),
            },
            (None, None) => return Err("one of --fixture or --manifold is required".into()),
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
        };
        let format = match self.format.as_str() {
            "json" => OutputFormat::Json,
            "md" => OutputFormat::Md,
            other => return Err(format!("unknown format `{other}`")),
        };
        let identities = self
            .identities
            .map(|s| s.split(',').map(|t| t.trim().to_string()).collect());
        Ok((
            RunConfig {
                source,
                samples: self.samples,
                seed: self.seed,
                tol_axiom: self.tol_axiom,
                tol_identity: self.tol_identity,
                cluster_tol: self.cluster_tol,
                constancy_tol: self.constancy_tol,
                fd_step: self.fd_step,
                identities,
                format,
            },
            self.out,
        ))
    }
}

fn init_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("SASAKILAB_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            if threads >= 1 {
                // ignore failure if a pool was already installed
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn cmd_list(what: &str) -> Result<(), String> {
    match what {
        "fixtures" => {
            for (name, desc) in fixture_catalog() {
                println!("{name:24} {desc}");
            }
            Ok(())
        }
        "identities" => {
            for spec in registry() {
                println!("{:26} -> {:24} {}", spec.id, spec.tag, spec.description);
            }
            Ok(())
        }
        other => Err(format!("unknown list target `{other}`; use `fixtures` or `identities`")),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run() -> Result<ExitCode, String> {
    init_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::List { what } => {
            cmd_list(&what)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let (config, out) = args.into_config()?;
            let report = verify_run(&config).map_err(|e| e.to_string())?;
            emit(&report.render(), out.as_ref()).map_err(|e| e.to_string())?;
            if report.scientific_pass() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Classify(args) => {
            let (config, out) = args.into_config()?;
            let (classification, table) = classify_run(&config).map_err(|e| e.to_string())?;
            emit(&table, out.as_ref()).map_err(|e| e.to_string())?;
            use sasakilab::spectral::ClassificationVerdict as V;
            match classification.verdict {
                V::ViolatesPositivity | V::NonexistentByTheory => Ok(ExitCode::from(1)),
                _ => Ok(ExitCode::SUCCESS),
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
