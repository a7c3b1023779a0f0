//! Command-line front end: argument definitions and dispatch.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 pole, 3 infeasible
//! precision, 4 any other failure (certification, cache, convergence).

pub mod commands;
pub mod render;
pub mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "seczeta", version, about = "Secondary zeta function Z(s) over the Riemann zeros")]
pub struct Cli {
    /// Output format.
    #[arg(short, long, value_enum, default_value_t = Output::Text, global = true)]
    pub output: Output,
    /// Zero-table cache file, read if present and rewritten afterwards
    /// (eval, breakdown, zeros, selftest).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate Z(s).
    Eval(EvalArgs),
    /// Evaluate Z(s) and print the four terms A, P, E, S.
    Breakdown(EvalArgs),
    /// Print zeta zero ordinates.
    Zeros(ZerosArgs),
    /// Trace the curves Im Z = 0 and Re Z = 0 over a rectangle.
    Xray(XrayArgs),
    /// Locate a real zero or extremum of Z.
    Critical(CriticalArgs),
    /// Check the modular identity (or the Φ equality) at x.
    ModularCheck(ModularArgs),
    /// Finite part and residue at a pole.
    FinitePart(FinitePartArgs),
    /// Run a reduced acceptance suite.
    Selftest,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    /// Point s, as RE, RE+IMj or RE-IMj; read at full precision.
    #[arg(short, long, allow_hyphen_values = true)]
    pub s: String,
    /// Significant digits requested.
    #[arg(short, long, default_value_t = 15, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
    /// Splitting parameter in (0, 1), read as a binary64 value.
    #[arg(short)]
    pub a: Option<f64>,
    /// Also print the error estimate and the digits shared with a second a.
    #[arg(long)]
    pub error: bool,
    /// Also print A, P, E, S and the term counts.
    #[arg(long)]
    pub breakdown: bool,
}

#[derive(Args, Debug)]
pub struct ZerosArgs {
    /// Print γ₁ … γ_N.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub upto_index: u64,
    #[arg(short, long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
}

#[derive(Args, Debug)]
pub struct XrayArgs {
    /// σ range as MIN:MAX.
    #[arg(long, default_value = "-6:3", allow_hyphen_values = true)]
    pub sigma: String,
    /// t range as MIN:MAX.
    #[arg(long, default_value = "-10:10", allow_hyphen_values = true)]
    pub t: String,
    /// Grid as NXxNY.
    #[arg(long, default_value = "201x201")]
    pub grid: String,
    #[arg(short, long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriticalSearch {
    Zero,
    Extremum,
}

#[derive(Args, Debug)]
pub struct CriticalArgs {
    /// Starting point on the real axis.
    #[arg(long, allow_hyphen_values = true)]
    pub near: f64,
    #[arg(long, value_enum, default_value_t = CriticalSearch::Zero)]
    pub kind: CriticalSearch,
    #[arg(short, long, default_value_t = 18, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
}

#[derive(Args, Debug)]
pub struct ModularArgs {
    /// Point x in [0.01, 1].
    #[arg(short)]
    pub x: String,
    /// Target digits; 10 guard digits are added for the evaluation.
    #[arg(short, long, default_value_t = 40, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
    /// Number of zeros in the sum over zeros.
    #[arg(long, default_value_t = 200)]
    pub zeros: usize,
    /// Largest n in the sum over Λ(n).
    #[arg(long, default_value_t = 4_000_000)]
    pub prime_limit: u64,
    /// Check the two expressions for Φ(x) against each other instead.
    #[arg(long)]
    pub phi: bool,
}

#[derive(Args, Debug)]
pub struct FinitePartArgs {
    /// Pole location: 1 or a negative odd integer.
    #[arg(long, allow_hyphen_values = true)]
    pub pole: i64,
    #[arg(short, long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
}

/// Parse the process arguments, run the command and map the outcome to an
/// exit code.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.output;
    let cache = cli.cache.as_deref();
    let result = match &cli.command {
        Command::Eval(a) => commands::eval(a, out, cache),
        Command::Breakdown(a) => {
            let mut a = a.clone();
            a.breakdown = true;
            commands::eval(&a, out, cache)
        }
        Command::Zeros(a) => commands::zeros(a, out, cache),
        Command::Xray(a) => commands::xray(a, out),
        Command::Critical(a) => commands::critical(a, out),
        Command::ModularCheck(a) => commands::modular(a, out),
        Command::FinitePart(a) => commands::finite_part(a, out),
        Command::Selftest => selftest::run(cache),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
