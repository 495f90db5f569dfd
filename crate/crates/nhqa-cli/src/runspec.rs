//! Command-line flags, the key=value config file, and the resolved run.

use crate::error::CliError;
use crate::sweep::{parse_number, Axis};
use clap::{Parser, ValueEnum};
use nhqa_core::{ChainParams, Engine, IntegratorConfig};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    GapSurface,
    ModeProb,
    PgsTrajectory,
    KinksVsDelta,
    KinksSurface,
    MagnetizationVsTau,
    PgsVsDelta,
    PgsSurface,
    AnnealTime,
    OracleCheck,
    BlochCheck,
}

impl Command {
    pub fn name(&self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(Debug, Parser)]
#[command(name = "nhqa", version, about = "Non-Hermitian quantum annealing of the transverse-field Ising chain")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Ising coupling J
    #[arg(long = "J")]
    pub j: Option<f64>,
    /// Initial transverse field g
    #[arg(long)]
    pub g: Option<f64>,
    /// Decay rate δ
    #[arg(long)]
    pub delta: Option<f64>,
    /// Annealing time τ
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of spins N
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// tdse, tdse-ground, lz-exact, lz-ground or asympt
    #[arg(long)]
    pub engine: Option<String>,
    /// var:min:max:count:scale, repeatable; the first axis varies slowest
    #[arg(long)]
    pub sweep: Vec<String>,
    /// CSV path; a JSON sidecar is written next to it
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (falls back to NHQA_THREADS)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Mode indices p for the trajectory commands, comma separated
    #[arg(long, value_delimiter = ',')]
    pub modes: Vec<usize>,
    /// Time samples per trajectory
    #[arg(long)]
    pub samples: Option<usize>,
    /// Relative integrator tolerance
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Absolute integrator tolerance
    #[arg(long)]
    pub atol: Option<f64>,
    /// Target ground-state probability for anneal-time
    #[arg(long)]
    pub target: Option<f64>,
}

/// Fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub params: ChainParams,
    pub sweeps: Vec<Axis>,
    pub engine: Engine,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub modes: Option<Vec<usize>>,
    pub samples: usize,
    pub integrator: IntegratorConfig,
    pub target: f64,
}

/// Settings read from a config file, all optional.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct FileConfig {
    pub j: Option<f64>,
    pub g: Option<f64>,
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub n: Option<usize>,
    pub engine: Option<String>,
    pub sweep: Vec<String>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub modes: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub target: Option<f64>,
}

fn parse_usize(key: &str, v: &str) -> Result<usize, CliError> {
    v.trim().parse().map_err(|_| CliError::Usage(format!("{key}: '{v}' is not a non-negative integer")))
}

/// Parses `key = value` lines; `#` starts a comment and `sweep` may repeat.
pub fn parse_config(text: &str) -> Result<FileConfig, CliError> {
    let mut c = FileConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "J" => c.j = Some(parse_number(value)?),
            "g" => c.g = Some(parse_number(value)?),
            "delta" => c.delta = Some(parse_number(value)?),
            "tau" => c.tau = Some(parse_number(value)?),
            "N" => c.n = Some(parse_usize(key, value)?),
            "engine" => c.engine = Some(value.to_string()),
            "sweep" => c.sweep.push(value.to_string()),
            "out" => c.out = Some(PathBuf::from(value)),
            "threads" => c.threads = Some(parse_usize(key, value)?),
            "modes" => c.modes = Some(value.split(',').map(|m| parse_usize(key, m)).collect::<Result<_, _>>()?),
            "samples" => c.samples = Some(parse_usize(key, value)?),
            "rtol" => c.rtol = Some(parse_number(value)?),
            "atol" => c.atol = Some(parse_number(value)?),
            "target" => c.target = Some(parse_number(value)?),
            _ => return Err(CliError::Usage(format!("config line {}: unknown key '{key}'", lineno + 1))),
        }
    }
    Ok(c)
}

pub fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Tolerance used when neither flag nor config sets one.
fn default_tolerance(command: Command) -> f64 {
    match command {
        Command::OracleCheck => 1e-12,
        Command::BlochCheck => 1e-13,
        _ => IntegratorConfig::default().rel_tol,
    }
}

impl RunSpec {
    /// Merges flags over the config file over the defaults. `env_threads` is
    /// the value of NHQA_THREADS, if set.
    pub fn resolve(cli: Cli, env_threads: Option<String>) -> Result<RunSpec, CliError> {
        let file = match &cli.config {
            Some(p) => read_config(p)?,
            None => FileConfig::default(),
        };
        let d = ChainParams::default();
        let params = ChainParams {
            j: cli.j.or(file.j).unwrap_or(d.j),
            g: cli.g.or(file.g).unwrap_or(d.g),
            delta: cli.delta.or(file.delta).unwrap_or(d.delta),
            tau: cli.tau.or(file.tau).unwrap_or(d.tau),
            n: cli.n.or(file.n).unwrap_or(d.n),
        };
        let engine = match cli.engine.or(file.engine) {
            Some(s) => s.parse::<Engine>().map_err(|e| CliError::Usage(e.to_string()))?,
            None => Engine::Tdse,
        };
        let sweep_src = if cli.sweep.is_empty() { file.sweep } else { cli.sweep };
        let sweeps = sweep_src.iter().map(|s| s.parse()).collect::<Result<Vec<Axis>, _>>()?;
        for (i, a) in sweeps.iter().enumerate() {
            if sweeps[..i].iter().any(|b| b.var == a.var) {
                return Err(CliError::Usage(format!("variable {} is swept twice", a.var.name())));
            }
        }
        let threads = match cli.threads.or(file.threads) {
            Some(t) => Some(t),
            None => match env_threads {
                Some(s) if !s.trim().is_empty() => Some(parse_usize("NHQA_THREADS", &s)?),
                _ => None,
            },
        };
        if threads == Some(0) {
            return Err(CliError::Usage("thread count must be >= 1".into()));
        }
        let modes = if cli.modes.is_empty() { file.modes } else { Some(cli.modes) };
        let tol = default_tolerance(cli.command);
        let integrator = IntegratorConfig {
            rel_tol: cli.rtol.or(file.rtol).unwrap_or(tol),
            abs_tol: cli.atol.or(file.atol).unwrap_or(tol),
            ..Default::default()
        };
        integrator.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let samples = cli.samples.or(file.samples).unwrap_or(201);
        if samples < 2 {
            return Err(CliError::Usage("samples must be >= 2".into()));
        }
        let target = cli.target.or(file.target).unwrap_or(0.999);
        if !(target > 0.0 && target < 1.0) {
            return Err(CliError::Usage(format!("target must lie in (0, 1), got {target}")));
        }
        Ok(RunSpec {
            command: cli.command,
            params,
            sweeps,
            engine,
            out: cli.out.or(file.out),
            threads,
            modes,
            samples,
            integrator,
            target,
        })
    }
}
