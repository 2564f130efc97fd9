//! Command-line driver for the experiment harness.
//!
//! Values from `--config` are loaded first; any flag given on the command
//! line replaces the corresponding config field.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ergodic_oprl::harness::{self, ExperimentConfig, ExperimentKind, EXIT_CONFIG};

#[derive(Parser, Debug)]
#[command(name = "ergodic-oprl", version, about = "Orthogonal polynomial experiments for ergodic Jacobi matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeros of p_n near x0 and their rescaled spacings.
    Zeros(Common),
    /// Diagonal kernel ratios K_n(x0+a/n, x0+a/n)/K_n(x0, x0).
    Kernel(Common),
    /// Scaled kernel ratios against the sinc kernel.
    Universality(Common),
    /// Counting and Kotani density of states.
    Dos(Common),
    /// Deift-Simon waves, their contracts and Cesàro averages.
    Wave(Common),
    /// Perturbed transfer-matrix bounds.
    Bounds(Common),
    /// Derivative identities for p_n and the diagonal kernel.
    Derivative(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// free, periodic, amo or anderson.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    n: Option<Vec<i64>>,
    /// Energies, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Imaginary parts for boundary values, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::Zeros(c) => (ExperimentKind::Zeros, c),
            Command::Kernel(c) => (ExperimentKind::Kernel, c),
            Command::Universality(c) => (ExperimentKind::Universality, c),
            Command::Dos(c) => (ExperimentKind::Dos, c),
            Command::Wave(c) => (ExperimentKind::Wave, c),
            Command::Bounds(c) => (ExperimentKind::Bounds, c),
            Command::Derivative(c) => (ExperimentKind::Derivative, c),
        }
    }
}

fn build_config(kind: ExperimentKind, flags: Common) -> Result<ExperimentConfig, String> {
    let mut cfg = match &flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.kind = Some(kind);
    if let Some(v) = flags.seed {
        cfg.seed = Some(v);
    }
    if let Some(v) = flags.out {
        cfg.out = v;
    }
    if let Some(v) = flags.threads {
        cfg.threads = Some(v);
    }
    if let Some(v) = flags.model {
        cfg.model.name = v;
    }
    if let Some(v) = flags.lambda {
        cfg.model.lambda = v;
    }
    if let Some(v) = flags.alpha {
        cfg.model.alpha = v;
    }
    if let Some(v) = flags.theta {
        cfg.model.theta = v;
    }
    if let Some(v) = flags.n {
        cfg.n = v;
    }
    if let Some(v) = flags.x0 {
        cfg.energies = Some(v);
        cfg.energy_range = None;
    }
    if let Some(v) = flags.eps {
        cfg.epsilon = v;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    // clap's own usage errors exit with 2, which is reserved for bound violations
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (kind, flags) = cli.command.split();
    let cfg = match build_config(kind, flags) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let outcome = harness::run(&cfg);
    eprint!("{}", harness::render_diagnostics(&outcome.diagnostics));
    for f in &outcome.files {
        println!("{}", f.display());
    }
    if outcome.violations > 0 {
        eprintln!("{} bound violation(s)", outcome.violations);
    }
    ExitCode::from(outcome.exit_code as u8)
}
