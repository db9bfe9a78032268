use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cfi_core::retrieval::RetrievalOptions;
use cfi_tools::commands::{self, AnalysisSettings, Report, RetrieveSettings};
use cfi_tools::{Result, RunConfig};
use clap::{Parser, Subcommand};

/// Conjugate-Franson interferometry: visibilities, simulation, analysis and
/// phase retrieval.
#[derive(Debug, Parser)]
#[command(name = "cfi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Visibility of the configured state; optionally sweep the flat-top phase.
    Visibility {
        #[arg(long)]
        config: PathBuf,
        /// Number of flat-top phases over [0, 2 pi].
        #[arg(long)]
        sweep: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coincidence probability against the phase sum.
    SweepPhi {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 73)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated time-tag stream and drift scan.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Also write the tags as CSV.
        #[arg(long)]
        tags_csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Histogram and peaks of a tag file, or fringe fit of a scan CSV.
    Analyze {
        input: PathBuf,
        /// Interferometer and detector settings; defaults to the demonstration setup.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral phase from JSI and JTI files.
    Retrieve {
        #[arg(long)]
        jsi: PathBuf,
        #[arg(long)]
        jti: PathBuf,
        #[arg(long, default_value_t = 2000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Report the recovered state's visibility at this shift (Hz).
        #[arg(long)]
        delta_omega_hz: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical self-checks.
    Selftest,
}

fn out_dir(out: Option<PathBuf>, cfg: Option<&RunConfig>) -> PathBuf {
    out.or_else(|| cfg.map(|c| c.output.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("cfi-out"))
}

fn load(path: &Path) -> Result<RunConfig> {
    RunConfig::load(path)
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::Visibility { config, sweep, out } => {
            let cfg = load(&config)?;
            commands::visibility(&cfg, sweep, &out_dir(out, Some(&cfg)))
        }
        Command::SweepPhi { config, points, out } => {
            let cfg = load(&config)?;
            commands::sweep_phi(&cfg, points, &out_dir(out, Some(&cfg)))
        }
        Command::Simulate { config, seed, tags_csv, out } => {
            let cfg = load(&config)?;
            commands::simulate(&cfg, seed, tags_csv, &out_dir(out, Some(&cfg)))
        }
        Command::Analyze { input, config, out } => {
            let cfg = config.as_deref().map(load).transpose()?;
            let settings = cfg.as_ref().map(AnalysisSettings::from).unwrap_or_default();
            commands::analyze(&input, &settings, &out_dir(out, cfg.as_ref()))
        }
        Command::Retrieve { jsi, jti, max_iter, tol, seed, restarts, delta_omega_hz, out } => {
            let settings = RetrieveSettings {
                options: RetrievalOptions {
                    max_iter,
                    tol,
                    seed,
                    restarts,
                    ..RetrievalOptions::default()
                },
                delta_omega_hz,
            };
            commands::retrieve(&jsi, &jti, &settings, &out_dir(out, None))
        }
        Command::Selftest => commands::selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if report.failed > 0 {
                eprintln!("error: {} checks failed", report.failed);
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
