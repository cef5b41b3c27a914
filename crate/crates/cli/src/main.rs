//! `ggp`: batch driver for the verification sweeps.

mod cmd;
mod emit;

use clap::{Args, Parser, Subcommand, ValueEnum};
use emit::{Emitter, Format};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Algebra(#[from] ggp_algebra::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Algebra(ggp_algebra::Error::ConfigInvalid(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ggp", version, about = "Exact verification sweeps for the GGP pair (GL(n+1), GL(n))")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Jsonl, global = true)]
    format: Format,
    /// Seed for the ChaCha8 generator; instance i uses seed + i.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Enumeration budget per instance.
    #[arg(long, env = "GGP_BUDGET", default_value_t = ggp_algebra::ggp::DEFAULT_BUDGET, global = true)]
    budget: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stability of a matrix.
    Stability {
        #[command(subcommand)]
        action: StabilityCmd,
    },
    /// Points and tangency of X_{τ,a}.
    Xscheme {
        #[command(subcommand)]
        action: XschemeCmd,
    },
    /// Volume bound checks.
    Volume {
        #[command(subcommand)]
        action: VolumeCmd,
    },
    /// Tangency and transversality sweeps.
    Verify {
        #[command(subcommand)]
        action: VerifyCmd,
    },
    /// Bilinear form estimate.
    Bilinear {
        #[command(subcommand)]
        action: BilinearCmd,
    },
    /// Characteristic-2 searches.
    Search {
        #[command(subcommand)]
        action: SearchCmd,
    },
    /// Explicit witnesses.
    Witness {
        #[command(subcommand)]
        action: WitnessCmd,
    },
    /// Finite-group content of the representation-theoretic lemmas.
    Microlocal {
        #[command(subcommand)]
        action: MicrolocalCmd,
    },
    /// Exponent bookkeeping.
    Exponent {
        #[command(subcommand)]
        action: ExponentCmd,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RingArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Rows separated by `;`, entries by `,`.
    #[arg(long)]
    pub tau: String,
    #[arg(long)]
    pub a: String,
}

#[derive(Subcommand, Debug)]
enum StabilityCmd {
    Check {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        tau: String,
    },
}

#[derive(Subcommand, Debug)]
enum XschemeCmd {
    Enumerate(PairArgs),
    Tangency(PairArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Seeded,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    pub rank: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Subcommand, Debug)]
enum VolumeCmd {
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        /// Fail if count/bound exceeds this rational.
        #[arg(long)]
        max_ratio: Option<String>,
    },
    Sweep {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        m: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Tangential {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        ring: RingArgs,
    },
    Transversality {
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[command(flatten)]
        ring: RingArgs,
    },
}

#[derive(Subcommand, Debug)]
enum BilinearCmd {
    Check {
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[command(flatten)]
        ring: RingArgs,
        /// The constant C of the refined bound.
        #[arg(long, default_value = "4")]
        constant: String,
        /// Random right-invariant (u₁, u₂) per (τ, γ).
        #[arg(long, default_value_t = 2)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SearchCmd {
    Counterexample {
        #[arg(long, default_value_t = 3)]
        rank: usize,
        /// Fields `F<q>` with q = 2^k (k ≤ 8), a prime p, or p².
        #[arg(long, value_delimiter = ',', required = true)]
        field: Vec<String>,
        /// Only report pairs with X_{τ,a} = H_{τ_H}.
        #[arg(long)]
        require_full: bool,
        /// Range a over all of G instead of G_τ/Z.
        #[arg(long)]
        full_enumeration: bool,
    },
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    Gl6 {
        #[arg(long, default_value_t = 17)]
        p: u64,
        #[arg(long, default_value_t = 6)]
        alpha: u64,
    },
}

#[derive(Subcommand, Debug)]
enum MicrolocalCmd {
    Mackey {
        #[arg(long)]
        p: u64,
        /// Diagonal parameters of the principal series.
        #[arg(long, value_delimiter = ',', required = true)]
        xi: Vec<u64>,
        /// A single τ; all companion matrices of monic polynomials otherwise.
        #[arg(long)]
        tau: Option<String>,
    },
    Support {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        rank: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ExponentCmd {
    Table {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        n: Vec<u32>,
        /// Rationals such as `0` or `7/64`.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        theta: Vec<String>,
    },
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Stability { .. } => "stability check",
        Command::Xscheme { action: XschemeCmd::Enumerate(_) } => "xscheme enumerate",
        Command::Xscheme { action: XschemeCmd::Tangency(_) } => "xscheme tangency",
        Command::Volume { action: VolumeCmd::Verify { .. } } => "volume verify",
        Command::Volume { action: VolumeCmd::Sweep { .. } } => "volume sweep",
        Command::Verify { action: VerifyCmd::Tangential { .. } } => "verify tangential",
        Command::Verify { action: VerifyCmd::Transversality { .. } } => "verify transversality",
        Command::Bilinear { .. } => "bilinear check",
        Command::Search { .. } => "search counterexample",
        Command::Witness { .. } => "witness gl6",
        Command::Microlocal { action: MicrolocalCmd::Mackey { .. } } => "microlocal mackey",
        Command::Microlocal { action: MicrolocalCmd::Support { .. } } => "microlocal support",
        Command::Exponent { .. } => "exponent table",
    }
}

/// Returns whether every check passed.
fn run(cli: Cli, out: &mut Emitter) -> Result<bool, CliError> {
    let budget = cli.budget;
    let seed = cli.seed;
    match cli.command {
        Command::Stability { action: StabilityCmd::Check { ring, tau } } => cmd::stability_check(out, &ring, &tau),
        Command::Xscheme { action: XschemeCmd::Enumerate(pair) } => cmd::xscheme_enumerate(out, &pair, budget),
        Command::Xscheme { action: XschemeCmd::Tangency(pair) } => cmd::xscheme_tangency(out, &pair, budget),
        Command::Volume { action: VolumeCmd::Verify { pair, max_ratio } } => {
            cmd::volume_verify(out, &pair, max_ratio.as_deref(), budget)
        }
        Command::Volume { action: VolumeCmd::Sweep { sweep, p, m } } => cmd::volume_sweep(out, &sweep, &p, &m, seed, budget),
        Command::Verify { action: VerifyCmd::Tangential { sweep, ring } } => {
            cmd::verify_tangential(out, &sweep, &ring, seed, budget)
        }
        Command::Verify { action: VerifyCmd::Transversality { rank, ring } } => {
            cmd::verify_transversality(out, rank, &ring, budget)
        }
        Command::Bilinear { action: BilinearCmd::Check { rank, ring, constant, samples } } => {
            cmd::bilinear_check(out, rank, &ring, &constant, samples, seed, budget)
        }
        Command::Search { action: SearchCmd::Counterexample { rank, field, require_full, full_enumeration } } => {
            cmd::search_counterexample(out, rank, &field, require_full, full_enumeration, budget)
        }
        Command::Witness { action: WitnessCmd::Gl6 { p, alpha } } => cmd::witness_gl6(out, p, alpha),
        Command::Microlocal { action: MicrolocalCmd::Mackey { p, xi, tau } } => {
            cmd::microlocal_mackey(out, p, &xi, tau.as_deref(), budget)
        }
        Command::Microlocal { action: MicrolocalCmd::Support { p, rank } } => cmd::microlocal_support(out, p, rank, budget),
        Command::Exponent { action: ExponentCmd::Table { n, theta } } => cmd::exponent_table(out, &n, &theta),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let sink: Box<dyn std::io::Write> = match &cli.output {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => Box::new(std::io::BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    };
    let mut out = Emitter::new(sink, cli.format);
    if let Err(e) = out.header(name(&cli.command), cli.seed) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(true), Ok(())) => ExitCode::SUCCESS,
        (Ok(false), Ok(())) => ExitCode::from(1),
        (Ok(_), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        (Err(e), _) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
