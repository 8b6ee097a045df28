//! `tailbound`: signed log-likelihood tail bounds from the command line.
//!
//! Exit status is 0 on success, 1 when a theorem check fails and 2 on a
//! usage or domain error.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "tailbound",
    version,
    about = "Gaussian bounds on exponential family tail probabilities"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound a distribution function at one point and compare with the exact value.
    Bound(BoundArgs),
    /// Emit quantile-quantile series of the signed log-likelihood.
    Qq(QqArgs),
    /// Run the verification matrix or a single check.
    Check(CheckArgs),
    /// Information divergence between two members of a family.
    Divergence(DivergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Binomial,
    Poisson,
    Geometric,
    Negbin,
    Gamma,
    Exponential,
    Ig,
}

/// Family parameters. `--k` is the shape of the Gamma and negative binomial
/// families and the evaluation point of the binomial and Poisson families.
#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Count for the geometric and negative binomial families.
    #[arg(long)]
    pub m: Option<u64>,
    /// Point for the continuous families.
    #[arg(long)]
    pub x: Option<f64>,
}

#[derive(Debug, Args)]
pub struct QqArgs {
    /// Parameter set of one of the figures.
    #[arg(long, conflicts_with = "family")]
    pub preset: Option<String>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Number of probabilities `i / (N + 1)`.
    #[arg(long, default_value_t = tailbound::qq::DEFAULT_QUANTILES)]
    pub quantiles: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Run only this check.
    #[arg(long)]
    pub id: Option<String>,
    /// Grid of Poisson means as `lo:hi:count`, optionally `:linear` or `:log` (default log).
    #[arg(long)]
    pub lambda_grid: Option<String>,
    /// Largest count of the negative binomial counterexample search.
    #[arg(long)]
    pub m_max: Option<u64>,
    /// Lower every slack of a check by DELTA, as `ID:DELTA`.
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub mu1: f64,
    #[arg(long)]
    pub mu2: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bound(a) => commands::bound(a, cli.format),
        Command::Qq(a) => commands::qq(a, cli.format),
        Command::Check(a) => commands::check(a, cli.format),
        Command::Divergence(a) => commands::divergence(a, cli.format),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
