use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gleason_lab::cli::{self, exit, CliResult, Format, Outcome, RunConfig, SuiteParams};
use gleason_lab::marginality::DEFAULT_EXTENSION_DIM;

#[derive(Parser)]
#[command(name = "gleason-lab", version, about = "Frame functions, PVMs and marginality certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Seed for every random draw.
    #[arg(long, env = "GLEASON_LAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the command's artifact (or the report) here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Tolerance override, e.g. `--tol lin=1e-8`. Repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Random PVM with the given rank partition.
    GenPvm {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a frame function on every outcome of a PVM.
    Eval {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        pvm: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Certify whether a frame function is a marginal.
    CheckMarginal {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
        /// Dimension of the exhibited witness system.
        #[arg(long, default_value_t = DEFAULT_EXTENSION_DIM)]
        dim_b: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Least-squares density matrix behind a frame function.
    Reconstruct {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Deterministic qubit assignment that is a frame function but no marginal.
    DemoCounterexample {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Run the Born-backed control state instead.
        #[arg(long)]
        rho_backed: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Degree table of the two-qubit family sharing one projector.
    DemoIntertwine {
        #[arg(long, default_value_t = 10)]
        n_psi: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized invariant battery.
    VerifySuite {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Offset added to every Born value in the normalization check.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        dim_b: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        projectors: usize,
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn config(c: &Common) -> CliResult<RunConfig> {
    let format = match c.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    Ok(RunConfig::new(c.seed, &c.tol, format, c.out.clone())?)
}

fn run(command: Command) -> CliResult<(Outcome, RunConfig)> {
    let (outcome, cfg) = match command {
        Command::GenPvm { dim, ranks, common } => {
            let cfg = config(&common)?;
            (cli::gen_pvm(&cfg, dim, &ranks)?, cfg)
        }
        Command::Eval { frame, pvm, common } => {
            let cfg = config(&common)?;
            (cli::eval(&cfg, &frame, &pvm)?, cfg)
        }
        Command::CheckMarginal { frame, dim, dim_b, common } => {
            let cfg = config(&common)?;
            (cli::check_marginal(&cfg, &frame, dim, dim_b)?, cfg)
        }
        Command::Reconstruct { frame, dim, common } => {
            let cfg = config(&common)?;
            (cli::reconstruct(&cfg, &frame, dim)?, cfg)
        }
        Command::DemoCounterexample { trials, rho_backed, common } => {
            let cfg = config(&common)?;
            (cli::demo_counterexample(&cfg, trials, rho_backed)?, cfg)
        }
        Command::DemoIntertwine { n_psi, common } => {
            let cfg = config(&common)?;
            (cli::demo_intertwine(&cfg, n_psi)?, cfg)
        }
        Command::VerifySuite { dims, trials, perturb, dim_b, projectors, parallel, common } => {
            let cfg = config(&common)?;
            let params = SuiteParams { dims, trials, perturb, dim_b, projectors_per_instance: projectors, parallel };
            (cli::verify_suite(&cfg, &params)?, cfg)
        }
    };
    Ok((outcome, cfg))
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let code = match run(args.command).and_then(|(outcome, cfg)| Ok((cli::emit(&outcome, &cfg)?, outcome.exit_code))) {
        Ok((stdout, code)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(stdout.as_bytes()).and_then(|_| out.flush()).is_err() {
                exit::IO
            } else {
                code
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
