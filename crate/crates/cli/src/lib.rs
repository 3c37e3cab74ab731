//! Command-line recipes for null curves in AdS_3 whose bending evolves by
//! the KdV hierarchy.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod export;
pub mod recipes;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nullflow::lame::{FloquetRatio, LameMethod};
use num_rational::Rational64;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::recipes::{ConstantChoice, KkshArgs, MuChoice, Outcome, StationaryArgs};

#[derive(Debug, Parser)]
#[command(name = "ads-null-flows", version, about = "Null curves in AdS_3 evolving by the KdV hierarchy")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// key=value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one configuration key, e.g. --set tol=1e-10
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Output directory (same as --set out_dir=DIR)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Heun,
    Ode,
}

impl From<MethodArg> for LameMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Heun => LameMethod::Heun,
            MethodArg::Ode => LameMethod::Ode,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lenard polynomials, densities and LIEN coefficients up to n_max
    Hierarchy {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Also print r_n, q_n and the LIEN velocity
        #[arg(long)]
        lien: bool,
        /// Check the exact identities; exit 1 if one fails
        #[arg(long)]
        verify: bool,
    },
    /// Lame eigenvalues with tau(h) = cos(q pi)
    Floquet {
        #[arg(long)]
        mu: f64,
        /// Characteristic exponent as num/den
        #[arg(long, value_parser = parse_floquet_ratio)]
        q: FloquetRatio,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Stationary curve from two Floquet eigenvalues h+ < h-
    Stationary {
        #[arg(long)]
        mu: f64,
        #[arg(long, value_parser = parse_floquet_ratio)]
        q_plus: FloquetRatio,
        #[arg(long, value_parser = parse_floquet_ratio)]
        q_minus: FloquetRatio,
        /// 1-based eigenvalue indices i+,i-
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2])]
        indices: Vec<usize>,
        /// Snapshot times of the evolution
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Heun)]
        method: MethodArg,
    },
    /// Constant bending: a closed curve (m, n) or an arbitrary kappa
    Constant {
        #[arg(long, requires = "n", conflicts_with = "kappa")]
        m: Option<i64>,
        #[arg(long, requires = "m")]
        n: Option<i64>,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "m")]
        kappa: Option<f64>,
        /// Arc length to sample; defaults to the frame period when closed
        #[arg(long)]
        s_span: Option<f64>,
    },
    /// KKSH solutions of KdV with quantum numbers (m, n)
    Kksh {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        h: f64,
        #[arg(long, conflicts_with = "find_mu_star", required_unless_present = "find_mu_star")]
        mu: Option<f64>,
        /// Solve for mu from the phase condition of M-
        #[arg(long)]
        find_mu_star: bool,
        #[arg(long, value_parser = parse_rational, default_value = "2/3")]
        q: Rational64,
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        /// s-periods per snapshot
        #[arg(long, default_value_t = 1)]
        periods: u32,
    },
    /// Reference computations with tolerances; exit 1 if any fails
    Check,
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let a = a.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    Ok((a, b))
}

fn parse_floquet_ratio(s: &str) -> Result<FloquetRatio, String> {
    let (a, b) = parse_pair(s)?;
    FloquetRatio::new(a, b).map_err(|e| e.to_string())
}

fn parse_rational(s: &str) -> Result<Rational64, String> {
    let (a, b) = parse_pair(s)?;
    if b == 0 {
        return Err("zero denominator".into());
    }
    Ok(Rational64::new(a.into(), b.into()))
}

/// Loads the configuration and runs the command.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut overrides = cli.global.overrides;
    if let Some(dir) = &cli.global.out {
        overrides.push(format!("out_dir={}", dir.display()));
    }
    let cfg = RunConfig::load(cli.global.config.as_deref(), &overrides)?;
    match cli.command {
        Command::Hierarchy { n_max, lien, verify } => recipes::hierarchy(&cfg, n_max, lien, verify),
        Command::Floquet { mu, q, count } => recipes::floquet(&cfg, mu, q, count),
        Command::Stationary { mu, q_plus, q_minus, indices, t, method } => {
            let [ip, im] = indices[..] else {
                return Err(CliError::Usage("--indices takes two values i+,i-".into()));
            };
            recipes::stationary(&cfg, &StationaryArgs { mu, q_plus, q_minus, indices: (ip, im), times: t, method: method.into() })
        }
        Command::Constant { m, n, kappa, s_span } => {
            let choice = match (m, n, kappa) {
                (Some(m), Some(n), None) => ConstantChoice::Pair(m, n),
                (None, None, Some(k)) => ConstantChoice::Kappa(k),
                _ => return Err(CliError::Usage("give either --m and --n or --kappa".into())),
            };
            recipes::constant(&cfg, choice, s_span)
        }
        Command::Kksh { m, n, h, mu, find_mu_star, q, t, periods } => {
            let mu = match (mu, find_mu_star) {
                (Some(x), false) => MuChoice::Given(x),
                (None, true) => MuChoice::PhaseCondition(q),
                _ => return Err(CliError::Usage("give either --mu or --find-mu-star".into())),
            };
            recipes::kksh(&cfg, &KkshArgs { m, n, h, mu, times: t, periods })
        }
        Command::Check => check::check(&cfg),
    }
}
