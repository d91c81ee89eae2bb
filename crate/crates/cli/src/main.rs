mod commands;
mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lowrank_scatter::contrast::ContrastSpec;
use lowrank_scatter::reconstruction::{CutoffMode, Overrides};

use commands::Failure;
use config::{CommandKind, RunConfig, Summary, SweepAxis, SweepConfig};

/// Low-rank inverse medium scattering with disk prolate spheroidal wave functions.
#[derive(Parser)]
#[command(name = "lrscatter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prolate eigenvalue table and decay curves.
    Eig {
        /// Bandwidth.
        #[arg(long)]
        c: f64,
        /// Basis truncation (largest 2n + m).
        #[arg(long)]
        max_order: Option<usize>,
        /// Angular orders in the decay table are multiples of this.
        #[arg(long, default_value_t = 5)]
        decay_step: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Born far-field data for an analytic contrast.
    Synth(RunArgs),
    /// Reconstruct the contrast from synthesized or stored far-field data.
    Reconstruct(RunArgs),
    /// Repeat `reconstruct` across values of one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        axis: SweepAxis,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        /// Noise realizations averaged per value.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Re-run a command from the configuration stored in its summary.
    Rerun {
        summary: PathBuf,
        /// Write into this directory instead of the recorded one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// e.g. `three-rectangles`, `disk:0.5`, `rect:0.5,0.3`, `pswf:3,2,2`, `osc:4`,
    /// `union:a1,a2,b1,b2[,re[,im]];...`
    #[arg(long)]
    contrast: Option<ContrastSpec>,
    /// Wave number; the bandwidth is c = 2k. Defaults to 15.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 100)]
    n1: usize,
    #[arg(long, default_value_t = 100)]
    n2: usize,
    /// Relative multiplicative noise level.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to noisy-born when delta > 0, else noiseless-born.
    #[arg(long)]
    mode: Option<CutoffMode>,
    /// Absolute spectral cutoff, replacing the mode's rule.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Radial quadrature nodes.
    #[arg(long = "T")]
    t: Option<usize>,
    /// Angular quadrature nodes.
    #[arg(long = "M")]
    m: Option<usize>,
    /// Basis truncation (largest 2n + m).
    #[arg(long)]
    max_order: Option<usize>,
    /// Side of the output image grid.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Far-field CSV to reconstruct from instead of synthesizing.
    #[arg(long)]
    input_farfield: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self, command: CommandKind) -> RunConfig {
        RunConfig {
            command,
            contrast: self.contrast,
            c: None,
            k: self.k,
            n1: self.n1,
            n2: self.n2,
            delta: self.delta,
            seed: self.seed,
            mode: self.mode,
            overrides: Overrides { t: self.t, m: self.m, epsilon: self.epsilon, max_order: self.max_order },
            grid: self.grid,
            decay_step: 5,
            out: self.out,
            input_farfield: self.input_farfield,
            sweep: None,
        }
    }
}

fn load_config(path: &PathBuf, out: Option<PathBuf>) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::argument(format!("{}: {e}", path.display())))?;
    let summary: Summary = serde_json::from_str(&text).map_err(|e| Failure {
        code: commands::EXIT_PARSE,
        message: format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()),
    })?;
    let mut config = summary.config;
    if let Some(out) = out {
        config.out = out;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.command {
        Command::Eig { c, max_order, decay_step, out } => Ok(RunConfig {
            command: CommandKind::Eig,
            contrast: None,
            c: Some(c),
            k: None,
            n1: 0,
            n2: 0,
            delta: 0.0,
            seed: 0,
            mode: None,
            overrides: Overrides { max_order, ..Default::default() },
            grid: 0,
            decay_step,
            out,
            input_farfield: None,
            sweep: None,
        }),
        Command::Synth(args) => Ok(args.into_config(CommandKind::Synth)),
        Command::Reconstruct(args) => Ok(args.into_config(CommandKind::Reconstruct)),
        Command::Sweep { run, axis, values, seeds } => {
            let mut config = run.into_config(CommandKind::Sweep);
            config.sweep = Some(SweepConfig { axis, values, seeds });
            Ok(config)
        }
        Command::Rerun { summary, out } => load_config(&summary, out),
    };
    match config.and_then(|c| commands::run(&c)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
