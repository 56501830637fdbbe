//! Batch interface: load a structure or metric (catalog name or definition
//! file), run classification / invariants / curvature / verification, and
//! emit machine-readable reports.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input error, 3 numeric
//! failure.

mod input;
mod report;

use clap::{Args, Parser, Subcommand};
use oclab_core::catalog;
use std::collections::BTreeMap;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "oclab",
    version,
    about = "numerical laboratory for oriented congruences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// catalog entry name
    #[arg(long)]
    catalog: Option<String>,
    /// structure definition file (JSON)
    #[arg(long)]
    file: Option<String>,
    /// metric definition file (JSON)
    #[arg(long, value_name = "FILE")]
    metric_file: Option<String>,
    /// catalog parameters, e.g. --param beta=-1 --param t=0.25 or comma-joined
    #[arg(long, value_name = "K=V")]
    param: Vec<String>,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// number of sample points
    #[arg(long, default_value_t = 16)]
    points: usize,
    /// jet truncation order (1..=8)
    #[arg(long, default_value_t = 6)]
    order: usize,
    /// relative tolerance for verdicts
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// sampler seed override
    #[arg(long)]
    seed: Option<u64>,
    /// output format
    #[arg(long, default_value = "json")]
    format: report::Format,
}

#[derive(Subcommand)]
enum Command {
    /// Twist/shear branch of a structure with witness statistics
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Branch-appropriate Cartan invariants at sampled points
    Invariants {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Curvature suite of a metric: Weyl spinors, Petrov type, Ricci/Einstein
    Curvature {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flags: CommonFlags,
        /// also compute the Bach tensor (needs jet order >= 4)
        #[arg(long)]
        bach: bool,
        /// cosmological constant for the Einstein residual
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
    },
    /// Verify catalog entries against their expected invariants
    Verify {
        /// comma-separated subset of entries (default: all)
        #[arg(long)]
        only: Option<String>,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// List catalog entries and parameter schemas as JSON
    Catalog,
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for chunk in raw.iter().flat_map(|s| s.split(',')) {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (k, v) = chunk
            .split_once('=')
            .ok_or_else(|| format!("malformed --param '{chunk}', expected k=v"))?;
        let val: f64 = v
            .trim()
            .parse()
            .map_err(|_| format!("malformed value in --param '{chunk}'"))?;
        out.insert(k.trim().to_string(), val);
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    code
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Numeric(_) => ExitCode::from(3),
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Classify { input, flags } => {
            let c = input::load_congruence(&input, flags.seed)?;
            let cls = c
                .classify_branch(flags.points.max(8), flags.tol.min(1e-6))
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let rep = report::classify_report(&input, &flags, &cls);
            report::emit(&rep, flags.format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Invariants { input, flags } => {
            let c = input::load_congruence(&input, flags.seed)?;
            let rep = report::invariants_report(&c, &input, &flags)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            report::emit(&rep, flags.format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Curvature {
            input,
            flags,
            bach,
            lambda,
        } => {
            let g = input::load_metric(&input, flags.seed)?;
            let rep = report::curvature_report(&g, &input, &flags, bach, lambda)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            report::emit(&rep, flags.format);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { only, flags } => {
            let names: Vec<String> = match only {
                Some(subset) => subset.split(',').map(|s| s.trim().to_string()).collect(),
                None => catalog::entries()
                    .iter()
                    .map(|e| e.name.to_string())
                    .collect(),
            };
            for n in &names {
                catalog::entry(n).map_err(|e| CliError::Input(e.to_string()))?;
            }
            let reports = catalog::verify_all(&names, flags.points, flags.order);
            let mut all_pass = true;
            let mut rows = Vec::new();
            for r in reports {
                match r {
                    Ok(rep) => {
                        all_pass &= rep.pass;
                        rows.push(rep);
                    }
                    Err(e) => return Err(CliError::Numeric(e)),
                }
            }
            report::emit_verify(&rows, &flags);
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Catalog => {
            println!(
                "{}",
                serde_json::to_string_pretty(&catalog::entries_json()).unwrap()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
