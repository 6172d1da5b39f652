mod commands;
mod descriptor;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

/// Exact q-series, Hecke operators, Shimura lifts and congruence checks for
/// half-integral weight forms with eta multiplier.
#[derive(Parser, Debug)]
#[command(name = "quadcong", version)]
pub struct Cli {
    /// Worker threads (0 = one per core, 1 = sequential).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed for every randomized component.
    #[arg(long, global = true, default_value_t = quadcong::selftest::DEFAULT_SEED)]
    pub seed: u64,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub summary: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Where the form comes from: a descriptor file or the `η^r` shorthand.
#[derive(Args, Debug, Clone)]
pub struct FormArgs {
    /// JSON form descriptor file.
    #[arg(long, conflicts_with = "eta_power")]
    pub form: Option<std::path::PathBuf>,
    /// Shorthand for `η(z)^r` on level 1 with trivial character.
    #[arg(long)]
    pub eta_power: Option<i64>,
    /// Prime ℓ (shorthand only; defaults to the least prime >= 5 off the level).
    #[arg(long)]
    pub ell: Option<u64>,
    /// Exponent m of the modulus ℓ^m (shorthand only).
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Theta-orthogonality attestation for weight 3/2 input (shorthand only).
    #[arg(long)]
    pub theta_attested: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Auto,
    Thm1,
    Thm2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Twisted,
    Independent,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expand an eta quotient to a 24-scaled precision.
    EtaExpand {
        /// Factors `d:r_d` separated by commas, e.g. `1:2,2:-1`.
        #[arg(long)]
        factors: String,
        #[arg(long, default_value_t = 1)]
        level: u64,
        #[arg(long)]
        prec: i64,
        /// Reduce modulo ℓ^m instead of computing exactly.
        #[arg(long)]
        ell: Option<u64>,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        allow_poles: bool,
    },
    /// The eta multiplier of a matrix in SL2(Z), with a numerical automorphy check.
    EtaMultiplier {
        /// Entries `a,b,c,d`.
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        /// Test point `x,y` in the upper half-plane.
        #[arg(long, default_value = "0.1,1.3", allow_hyphen_values = true)]
        z: String,
    },
    /// Apply the half-integral weight Hecke operator T_{p^2}.
    HeckeApply {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        p: u64,
        /// Output precision (24-scaled).
        #[arg(long, default_value_t = 2400)]
        prec: i64,
        /// Work modulo ℓ^m instead of exactly.
        #[arg(long)]
        reduce: bool,
    },
    /// The Shimura lift S_t up to q^n.
    ShimuraLift {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 20)]
        n: i64,
    },
    /// The six suitability conditions for (k, ℓ, N, ψ).
    Suitability {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long = "N", default_value_t = 1)]
        level: u64,
        /// Character JSON; trivial modulo N when omitted.
        #[arg(long)]
        psi: Option<String>,
    },
    /// Least a with 2^a = -2 mod ℓ.
    Hasse {
        #[arg(long)]
        ell: u64,
    },
    /// Proportion of primes up to X satisfying the Hasse condition.
    HasseDensity {
        #[arg(long, default_value_t = 1_000_000)]
        x: u64,
    },
    /// Prime scan for quadratic congruences (JSON Lines).
    ScanCongruences {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[arg(long, default_value_t = 500)]
        p_max: u64,
    },
    /// Ramanujan congruences for the partition function.
    PartitionCheck {
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 10_000)]
        nmax: u64,
    },
    /// Brute-force search for Atkin-type partition congruences.
    AtkinSearch {
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 13)]
        q_max: u64,
        #[arg(long, default_value_t = 200)]
        n_max: u64,
        #[arg(long, default_value_t = quadcong::criteria::DEFAULT_PARTITION_LIMIT)]
        partition_limit: u64,
    },
    /// Search a simulated image in GL2(F_ℓ)^s for an element with all components ~ ±γ.
    Sl2Sim {
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Entries `a,b,c,d` of γ in SL2(F_ℓ).
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, value_enum, default_value_t = FamilyArg::Twisted)]
        family: FamilyArg,
        /// Random-walk length when not exhaustive.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    /// A check failed; the report has already been written.
    Verification(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Verification(_) => "verification",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Verification(m) => m,
        }
    }
}

fn report_error(e: &CliError) {
    let body = json!({ "error": { "kind": e.kind(), "message": e.message() } });
    let _ = writeln!(std::io::stderr(), "{body}");
}

fn run(args: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            report_error(&CliError::Usage(e.to_string().trim_end().to_string()));
            return 1;
        }
    };
    let threads = cli.threads;
    let outcome = if threads == 0 {
        commands::dispatch(&cli)
    } else {
        quadcong::par::with_threads(threads, || commands::dispatch(&cli))
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            report_error(&e);
            e.code()
        }
    }
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}
