use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qfoundations::experiment::{emit, run, Experiment, ExperimentConfig, Format};
use qfoundations::ontology::Resolution;
use qfoundations::phase_space::RrScale;

/// Numerical demonstrations from the foundations of quantum theory.
#[derive(Parser)]
#[command(name = "qfound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Toy-theory statistics, disturbance and the qubit correspondence table.
    Toy,
    /// CHSH game: enumerate | quantum | lhv-sweep | simulate.
    Chsh { mode: String },
    /// Kochen–Specker model: born-check (alias born) | overlap.
    Ks { mode: String },
    /// Gaussian phase space: uncertainty | no-cloning | epr.
    Gaussian { mode: String },
    /// Hardy's ontic-state counting bound.
    Hardy,
    /// PBR argument against overlapping preparations.
    Pbr,
    /// Mach–Zehnder interferometer detector statistics.
    MachZehnder,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,
    /// Random models or states in sweeps.
    #[arg(long, global = true, default_value_t = 1000)]
    trials: usize,
    /// Random (Ψ, Φ) pairs for `ks born-check`.
    #[arg(long, global = true, default_value_t = 100)]
    pairs: usize,
    #[arg(long, global = true, default_value = "400x800")]
    resolution: Resolution,
    /// Hardy family size; omitted sweeps 2, 4, 8, 16.
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long = "rr-scale", global = true, default_value_t = 0.5)]
    rr_scale: f64,
    #[arg(long, global = true, default_value_t = 1e-3)]
    squeeze: f64,
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    /// Model file (JSON) for `hardy` and `pbr`.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
}

fn experiment(command: &Command) -> qfoundations::Result<Experiment> {
    match command {
        Command::Toy => Experiment::parse("toy", None),
        Command::Chsh { mode } => Experiment::parse("chsh", Some(mode)),
        Command::Ks { mode } => Experiment::parse("ks", Some(mode)),
        Command::Gaussian { mode } => Experiment::parse("gaussian", Some(mode)),
        Command::Hardy => Experiment::parse("hardy", None),
        Command::Pbr => Experiment::parse("pbr", None),
        Command::MachZehnder => Experiment::parse("mach-zehnder", None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = experiment(&cli.command).and_then(|e| {
        let o = cli.opts;
        let config = ExperimentConfig {
            seed: o.seed,
            samples: o.samples,
            trials: o.trials,
            pairs: o.pairs,
            resolution: o.resolution,
            m: o.m,
            rr_scale: RrScale::new(o.rr_scale)?,
            squeeze: o.squeeze,
            format: o.format,
            model: o.model,
            ..ExperimentConfig::new(e)
        };
        let report = run(&config)?;
        Ok((emit(&report, config.format)?, report.exit_code()))
    });
    match result {
        Ok((text, code)) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("qfound: {e}");
            ExitCode::from(2)
        }
    }
}
