//! Command-line front end for `warpgeom`.
//!
//! ```text
//! warpgeom classify --preset steady-state
//! warpgeom analyze  --preset gaussian --region "[0,2]" --samples 5
//! warpgeom check    --preset minkowski --graph "0.5*x_1" --domain "[-1,1]x[-1,1]"
//! warpgeom presets  --show gaussian
//! ```
//!
//! Every flag has a config-file key of the same name (`--param a=2` becomes
//! `param.a = 2`). Exit codes: 0 success, 2 invalid input, 3 evaluation
//! error, 4 a requested check failed.

pub mod commands;
pub mod error;
pub mod output;
pub mod settings;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use error::{CliError, EXIT_INPUT, EXIT_OK};
use settings::{param_flag, Settings, COMMON};

#[derive(Debug, Parser)]
#[command(name = "warpgeom", version, about = "Maximal hypersurfaces in Robertson-Walker spacetimes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a spacetime: energy conditions, criterion infimum, maximal slices, verdict.
    Classify(ClassifyArgs),
    /// Tabulate f, its derivatives, the criterion and the fluid variables over the region.
    Analyze(AnalyzeArgs),
    /// Verify curvature identities on a spacelike graph t = u(x).
    Check(CheckArgs),
    /// List the builtin presets.
    Presets(PresetsArgs),
}

#[derive(Debug, Args)]
struct SpacetimeArgs {
    /// File of `key = value` lines using the flag names as keys.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Builtin preset name.
    #[arg(long)]
    preset: Option<String>,
    /// Warping function f(t).
    #[arg(long = "f", value_name = "EXPR", allow_hyphen_values = true)]
    f: Option<String>,
    /// Interval of definition, e.g. "(0,inf)".
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
    /// Region to analyze, e.g. "[-10,10]".
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    /// Fiber dimension.
    #[arg(long)]
    n: Option<String>,
    /// Parameter binding, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    param: Vec<String>,
    #[arg(long)]
    format: Option<String>,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: SpacetimeArgs,
    /// Margin tolerance for conditions and infima.
    #[arg(long)]
    tol: Option<String>,
    /// Replace infinite region ends by ±T.
    #[arg(long, value_name = "T")]
    truncation: Option<String>,
    /// Initial sampling grid size.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: SpacetimeArgs,
    /// Number of sample times.
    #[arg(long)]
    samples: Option<String>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    common: SpacetimeArgs,
    /// Graph function u(x_1, …, x_n).
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    graph: Option<String>,
    /// Node-array file: a `dims r1 … rn` header, then row-major values of u.
    #[arg(long, value_name = "FILE")]
    nodes: Option<PathBuf>,
    /// Box in the fiber, e.g. "[-1,1]x[-1,1]".
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Nodes per axis, e.g. "65" or "33x65".
    #[arg(long)]
    res: Option<String>,
    /// Tolerance for residuals and slacks.
    #[arg(long)]
    tol: Option<String>,
    /// Largest max |H| accepted as maximal.
    #[arg(long = "maximality-tol")]
    maximality_tol: Option<String>,
    /// Count skipped maximality-dependent checks as failures.
    #[arg(long = "require-maximal")]
    require_maximal: bool,
    /// Comma-separated subset of the checks.
    #[arg(long)]
    checks: Option<String>,
}

#[derive(Debug, Args)]
struct PresetsArgs {
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
    /// Print one preset in full.
    #[arg(long, value_name = "NAME")]
    show: Option<String>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

type Pairs = Vec<(String, String)>;

fn push(p: &mut Pairs, key: &str, v: &Option<String>) {
    if let Some(v) = v {
        p.push((key.to_string(), v.clone()));
    }
}

fn push_path(p: &mut Pairs, key: &str, v: &Option<PathBuf>) {
    push(p, key, &v.as_ref().map(|x| x.display().to_string()));
}

impl SpacetimeArgs {
    fn pairs(&self) -> Result<Pairs, CliError> {
        let mut p = Vec::new();
        push(&mut p, "preset", &self.preset);
        push(&mut p, "f", &self.f);
        push(&mut p, "interval", &self.interval);
        push(&mut p, "region", &self.region);
        push(&mut p, "n", &self.n);
        push(&mut p, "format", &self.format);
        push_path(&mut p, "output", &self.output);
        for kv in &self.param {
            p.push(param_flag(kv)?);
        }
        Ok(p)
    }
}

fn keys(extra: &[&'static str]) -> Vec<&'static str> {
    COMMON.iter().chain(extra).copied().collect()
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Classify(a) => {
            let mut p = a.common.pairs()?;
            push(&mut p, "tol", &a.tol);
            push(&mut p, "truncation", &a.truncation);
            push(&mut p, "grid", &a.grid);
            let s = Settings::load(a.common.config.as_deref(), p, &keys(&commands::classify::KEYS))?;
            commands::classify::run(&s, out)
        }
        Command::Analyze(a) => {
            let mut p = a.common.pairs()?;
            push(&mut p, "samples", &a.samples);
            let s = Settings::load(a.common.config.as_deref(), p, &keys(&commands::analyze::KEYS))?;
            commands::analyze::run(&s, out)
        }
        Command::Check(a) => {
            let mut p = a.common.pairs()?;
            push(&mut p, "graph", &a.graph);
            push_path(&mut p, "nodes", &a.nodes);
            push(&mut p, "domain", &a.domain);
            push(&mut p, "res", &a.res);
            push(&mut p, "tol", &a.tol);
            push(&mut p, "maximality-tol", &a.maximality_tol);
            push(&mut p, "checks", &a.checks);
            if a.require_maximal {
                p.push(("require-maximal".into(), "true".into()));
            }
            let s = Settings::load(a.common.config.as_deref(), p, &keys(&commands::check::KEYS))?;
            commands::check::run(&s, out)
        }
        Command::Presets(a) => {
            let mut p = Vec::new();
            if a.json {
                p.push(("json".into(), "true".into()));
            }
            push(&mut p, "show", &a.show);
            push_path(&mut p, "output", &a.output);
            let s = Settings::load(a.config.as_deref(), p, &commands::presets::KEYS)?;
            commands::presets::run(&s, out)
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}
