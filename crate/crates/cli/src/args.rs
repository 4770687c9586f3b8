use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "kmittag",
    version,
    about = "k-Mittag-Leffler functions and fractional kinetic equations"
)]
pub struct Cli {
    /// Flat key=value file of flag values; flags on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate E_{α,β}(x).
    #[command(allow_negative_numbers = true, args_override_self = true)]
    EvalMl(EvalMlArgs),
    /// Evaluate the generalized k-Mittag-Leffler function at z.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    EvalKml(EvalKmlArgs),
    /// Tabulate a kinetic solution N(t) on a uniform grid as `t,N` CSV.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Solve(SolveArgs),
    /// Residual check of a kinetic solution under grid refinement (JSON).
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Verify(VerifyArgs),
    /// Stated and rederived solutions for the three reference parameter sets.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Table(TableArgs),
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("value must be finite".into())
    }
}

fn theorem_number(s: &str) -> Result<u32, String> {
    match s {
        "1" | "2" | "3" => Ok(s.parse().unwrap()),
        _ => Err("expected 1, 2 or 3".into()),
    }
}

#[derive(Debug, Args)]
pub struct EvalMlArgs {
    #[arg(long, value_parser = finite)]
    pub alpha: f64,
    #[arg(long, value_parser = finite)]
    pub beta: f64,
    #[arg(long, value_parser = finite)]
    pub x: f64,
    /// Relative truncation tolerance.
    #[arg(long, default_value_t = 1e-15, value_parser = finite)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct EvalKmlArgs {
    #[arg(long, value_parser = finite)]
    pub k: f64,
    #[arg(long, value_parser = finite)]
    pub alpha: f64,
    #[arg(long, value_parser = finite)]
    pub beta: f64,
    #[arg(long, value_parser = finite)]
    pub gamma: f64,
    #[arg(long, alias = "q", value_parser = finite)]
    pub tau: f64,
    #[arg(long, value_parser = finite)]
    pub z: f64,
    /// Relative truncation tolerance.
    #[arg(long, default_value_t = 1e-15, value_parser = finite)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Stated,
    Rederived,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long, value_parser = theorem_number)]
    pub theorem: u32,
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    #[arg(long = "N0", value_parser = finite)]
    pub n0: f64,
    #[arg(long, value_parser = finite)]
    pub gamma: f64,
    #[arg(long, alias = "q", value_parser = finite)]
    pub tau: f64,
    #[arg(long, value_parser = finite)]
    pub k: f64,
    #[arg(long, value_parser = finite)]
    pub alpha: f64,
    #[arg(long, value_parser = finite)]
    pub beta: f64,
    #[arg(long, value_parser = finite)]
    pub d: f64,
    /// Removal rate for theorem 3; must equal --d (or be omitted) otherwise.
    #[arg(long, value_parser = finite)]
    pub a: Option<f64>,
    #[arg(long, value_parser = finite)]
    pub nu: f64,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long, default_value_t = 1e-12, value_parser = finite)]
    pub outer_tol: f64,
    #[arg(long, default_value_t = 1e-14, value_parser = finite)]
    pub inner_tol: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, value_parser = finite)]
    pub t_max: f64,
    #[arg(long)]
    pub steps: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, value_parser = finite)]
    pub t_max: f64,
    /// Comma-separated step counts, each double the previous.
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    pub grids: Vec<usize>,
    #[arg(long, default_value_t = 1e-5, value_parser = finite)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, default_value_t = 0.5, value_parser = finite)]
    pub t_max: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Splices `--config` file entries into the argument list right after the
/// subcommand, so that later command-line flags override them.
pub fn expand_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        match arg.to_str() {
            Some("--config") => match it.next() {
                Some(p) => path = Some(PathBuf::from(p)),
                None => return Err(CliError::validation("config", "missing path")),
            },
            Some(s) if s.starts_with("--config=") => {
                path = Some(PathBuf::from(&s["--config=".len()..]))
            }
            _ => rest.push(arg),
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::validation("config", format!("{}: {e}", path.display())))?;
    let entries = parse_config(&text)?;
    let at = rest.len().min(2);
    let tail = rest.split_off(at);
    for (key, value) in entries {
        rest.push(format!("--{key}").into());
        rest.push(value.into());
    }
    rest.extend(tail);
    Ok(rest)
}

fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::validation(
                "config",
                format!("line {}: expected key=value", no + 1),
            ));
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(CliError::validation(
                "config",
                format!("line {}: invalid key", no + 1),
            ));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}
