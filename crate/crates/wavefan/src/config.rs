//! Command-line and config-file parsing.
//!
//! A config file holds flat `key=value` lines whose keys are the long flag
//! names (`flux=burgers`, `eps=0.1,0.05`, `tail-tol=1e-12`). Blank lines and
//! lines starting with `#` are ignored. Flags given on the command line win
//! over file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bvp::{check_decreasing, SolveOptions};
use crate::corner::{DEFAULT_XI_MAX, DEFAULT_XI_MIN};
use crate::error::{Result, WavefanError};
use crate::flux::FluxSpec;

/// Environment variable holding the default uniqueness-probe seed.
pub const SEED_ENV: &str = "WAVEFAN_SEED";
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "wavefan", version, about = "Viscous wave fan profiles for scalar conservation laws")]
struct Cli {
    /// Flat key=value file with default flag values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Solve one viscous profile and write it as CSV.
    Solve(Flags),
    /// Integrate the corner-layer profile.
    Corner(Flags),
    /// Print the exact Riemann solution.
    Riemann(Flags),
    /// Run one named check or the whole battery.
    Verify(Flags),
    /// Solve along a decreasing eps schedule and compare with the Riemann solution.
    Sweep(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// `burgers` or `poly:c0,c1,...`
    #[arg(long)]
    flux: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ul: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ur: Option<String>,
    /// Viscosity, or a strictly decreasing comma-separated schedule.
    #[arg(long)]
    eps: Option<String>,
    /// Newton residual tolerance.
    #[arg(long)]
    tol: Option<String>,
    /// Far-field truncation tolerance.
    #[arg(long = "tail-tol")]
    tail_tol: Option<String>,
    #[arg(long = "base-nodes")]
    base_nodes: Option<String>,
    #[arg(long = "nodes-per-layer")]
    nodes_per_layer: Option<String>,
    #[arg(long = "domain-pad")]
    domain_pad: Option<String>,
    #[arg(long = "xi-min", allow_hyphen_values = true)]
    xi_min: Option<String>,
    #[arg(long = "xi-max", allow_hyphen_values = true)]
    xi_max: Option<String>,
    /// Comparison window `a,b` for L1 errors.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Number of table rows printed by `riemann`.
    #[arg(long)]
    samples: Option<String>,
    /// Check name for `verify` (default: all).
    #[arg(long)]
    check: Option<String>,
    /// Seed of the uniqueness probe (default: $WAVEFAN_SEED).
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Multi-column CSV of all profiles and the exact solution.
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
    /// SVG chart of the same columns.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

const FILE_KEYS: &[&str] = &[
    "flux",
    "ul",
    "ur",
    "eps",
    "tol",
    "tail-tol",
    "base-nodes",
    "nodes-per-layer",
    "domain-pad",
    "xi-min",
    "xi-max",
    "window",
    "samples",
    "check",
    "seed",
    "out",
    "report",
    "plot",
    "svg",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Corner,
    Riemann,
    Verify,
    Sweep,
}

/// Validated settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub flux: FluxSpec,
    pub u_left: f64,
    pub u_right: f64,
    /// Strictly decreasing; a single entry for one solve.
    pub eps: Vec<f64>,
    pub solve: SolveOptions,
    pub xi_min: f64,
    pub xi_max: f64,
    pub window: Option<(f64, f64)>,
    pub samples: usize,
    pub check: Option<String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// What the command line asks for.
#[derive(Debug, Clone, PartialEq)]
pub enum Invocation {
    Run(Box<RunConfig>),
    /// `--help` or `--version` text.
    Info(String),
}

/// Parses `argv` (program name first), reading the seed default from
/// [`SEED_ENV`].
pub fn parse_config<I, T>(argv: I) -> Result<Invocation>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    parse_config_with_seed(argv, std::env::var(SEED_ENV).ok())
}

/// [`parse_config`] with the environment seed passed explicitly.
pub fn parse_config_with_seed<I, T>(argv: I, env_seed: Option<String>) -> Result<Invocation>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Invocation::Info(e.to_string())),
                _ => {
                    let text = e.to_string();
                    let text = text.trim_end();
                    Err(WavefanError::Parse(text.strip_prefix("error: ").unwrap_or(text).to_string()))
                }
            };
        }
    };
    let (command, flags) = match cli.command {
        CliCommand::Solve(f) => (Command::Solve, f),
        CliCommand::Corner(f) => (Command::Corner, f),
        CliCommand::Riemann(f) => (Command::Riemann, f),
        CliCommand::Verify(f) => (Command::Verify, f),
        CliCommand::Sweep(f) => (Command::Sweep, f),
    };
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let values = merge(flags, file);
    build(command, &values, env_seed).map(|c| Invocation::Run(Box::new(c)))
}

/// Parses a flat `key=value` file.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    parse_config_text(&text, &path.display().to_string())
}

pub fn parse_config_text(text: &str, origin: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |reason: String| WavefanError::MalformedFile {
            path: origin.to_string(),
            line: k as u64 + 1,
            reason,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| malformed(format!("expected key=value, found `{line}`")))?;
        let key = key.trim().trim_start_matches("--");
        if !FILE_KEYS.contains(&key) {
            return Err(malformed(format!("unknown key `{key}`")));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn merge(flags: Flags, mut file: BTreeMap<String, String>) -> BTreeMap<String, String> {
    let given = [
        ("flux", flags.flux),
        ("ul", flags.ul),
        ("ur", flags.ur),
        ("eps", flags.eps),
        ("tol", flags.tol),
        ("tail-tol", flags.tail_tol),
        ("base-nodes", flags.base_nodes),
        ("nodes-per-layer", flags.nodes_per_layer),
        ("domain-pad", flags.domain_pad),
        ("xi-min", flags.xi_min),
        ("xi-max", flags.xi_max),
        ("window", flags.window),
        ("samples", flags.samples),
        ("check", flags.check),
        ("seed", flags.seed),
        ("out", flags.out.map(|p| p.display().to_string())),
        ("report", flags.report.map(|p| p.display().to_string())),
        ("plot", flags.plot.map(|p| p.display().to_string())),
        ("svg", flags.svg.map(|p| p.display().to_string())),
    ];
    for (key, value) in given {
        if let Some(v) = value {
            file.insert(key.to_string(), v);
        }
    }
    file
}

fn number<T: std::str::FromStr>(values: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    values
        .get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| WavefanError::Parse(format!("invalid value `{v}` for --{key}")))
        })
        .transpose()
}

fn list(value: &str, key: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| WavefanError::Parse(format!("invalid number `{s}` in --{key} `{value}`")))
        })
        .collect()
}

fn build(command: Command, values: &BTreeMap<String, String>, env_seed: Option<String>) -> Result<RunConfig> {
    let flux = match values.get("flux") {
        Some(token) => token.parse::<FluxSpec>()?,
        None => FluxSpec::Burgers,
    };
    let eps = match values.get("eps") {
        Some(v) => {
            let eps = list(v, "eps")?;
            check_decreasing(&eps).map_err(|e| WavefanError::Parse(format!("--eps `{v}`: {e}")))?;
            eps
        }
        None if command == Command::Sweep => vec![0.1, 0.05, 0.025, 0.0125],
        None => vec![0.05],
    };
    if command == Command::Solve && eps.len() != 1 {
        return Err(WavefanError::Parse(format!(
            "solve takes a single --eps value, got {} (use sweep for a schedule)",
            eps.len()
        )));
    }
    let mut solve = SolveOptions::default();
    if let Some(v) = number(values, "tol")? {
        solve.newton_tol = v;
    }
    if let Some(v) = number(values, "tail-tol")? {
        solve.tail_tol = v;
    }
    if let Some(v) = number(values, "base-nodes")? {
        solve.base_nodes = v;
    }
    if let Some(v) = number(values, "nodes-per-layer")? {
        solve.nodes_per_layer = v;
    }
    if let Some(v) = number(values, "domain-pad")? {
        solve.domain_pad = v;
    }
    solve.validate().map_err(|e| WavefanError::Parse(e.to_string()))?;

    let window = match values.get("window") {
        Some(v) => {
            let w = list(v, "window")?;
            if w.len() != 2 || !(w[0] < w[1]) {
                return Err(WavefanError::Parse(format!("--window `{v}` must be `a,b` with a < b")));
            }
            Some((w[0], w[1]))
        }
        None => None,
    };
    let seed = match number::<u64>(values, "seed")? {
        Some(s) => s,
        None => match env_seed {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| WavefanError::Parse(format!("invalid {SEED_ENV} value `{s}`")))?,
            None => DEFAULT_SEED,
        },
    };
    let path = |key: &str| values.get(key).map(PathBuf::from);
    Ok(RunConfig {
        command,
        flux,
        u_left: number(values, "ul")?.unwrap_or(-1.0),
        u_right: number(values, "ur")?.unwrap_or(1.0),
        eps,
        solve,
        xi_min: number(values, "xi-min")?.unwrap_or(DEFAULT_XI_MIN),
        xi_max: number(values, "xi-max")?.unwrap_or(DEFAULT_XI_MAX),
        window,
        samples: number(values, "samples")?.unwrap_or(201),
        check: values.get("check").cloned(),
        seed,
        out: path("out"),
        report: path("report"),
        plot: path("plot"),
        svg: path("svg"),
    })
}
