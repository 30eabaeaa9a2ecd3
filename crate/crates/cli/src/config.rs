//! Command-line flags, scenario files and their merge into one validated config.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use cspace_core::io::{parse_channel, parse_resource};
use cspace_core::{Channel, Resource, Tolerance};

/// Default comparison tolerance. Angles typed to four decimals (1.5708 for
/// pi/2) leave branch defects of a few 1e-6, which this accepts.
pub const DEFAULT_TOL: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "cspace", version, about = "Correlation-space error analysis for MBQC resource states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check that every measurement branch is unitary up to a constant.
    Validate,
    /// Search the proof's error families for a non-TP conditional map.
    Witness,
    /// Byproduct-sector Gram analysis of the AKLT rotation protocol.
    AkltMixing,
    /// Classify a correlation-space map.
    Classify,
    /// Compare dense-state reconstructions with the analytic induced maps.
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Validate => "validate",
            Self::Witness => "witness",
            Self::AkltMixing => "aklt-mixing",
            Self::Classify => "classify",
            Self::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// aklt, cluster or file:PATH
    #[arg(long, global = true)]
    pub resource: Option<String>,
    /// f1, identity, swap12, file (with --error-file) or file:PATH
    #[arg(long, global = true)]
    pub error: Option<String>,
    #[arg(long, global = true)]
    pub error_file: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Number of measurements in the rotation protocol.
    #[arg(long, global = true)]
    pub r: Option<usize>,
    #[arg(long, global = true)]
    pub p: Option<u8>,
    #[arg(long, global = true)]
    pub q: Option<u8>,
    /// Witness grid as THETAxPHI point counts.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Chain length for the dense oracle.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Number of random triples for oracle-check.
    #[arg(long, global = true)]
    pub count: Option<usize>,
    /// mixed, outcome-S or outcome-S-renormalized
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    #[arg(long, global = true, env = "CSPACE_TOL")]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub scenario_file: Option<PathBuf>,
}

/// Scenario file; every field is optional and command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub resource: Option<String>,
    pub error: Option<String>,
    pub error_file: Option<PathBuf>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub r: Option<usize>,
    pub p: Option<u8>,
    pub q: Option<u8>,
    pub grid: Option<String>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub count: Option<usize>,
    pub scenario: Option<String>,
    pub tol: Option<f64>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassifyScenario {
    Mixed,
    Outcome { s: usize, renormalized: bool },
}

impl ClassifyScenario {
    fn parse(text: &str) -> Result<Self> {
        if text == "mixed" {
            return Ok(Self::Mixed);
        }
        let rest = text
            .strip_prefix("outcome-")
            .ok_or_else(|| anyhow!("unknown scenario `{text}` (expected mixed, outcome-S or outcome-S-renormalized)"))?;
        let (num, renormalized) = match rest.strip_suffix("-renormalized") {
            Some(n) => (n, true),
            None => (rest, false),
        };
        let s = num.parse().with_context(|| format!("bad outcome index in scenario `{text}`"))?;
        Ok(Self::Outcome { s, renormalized })
    }

    pub fn label(&self) -> String {
        match self {
            Self::Mixed => "mixed".into(),
            Self::Outcome { s, renormalized: false } => format!("outcome-{s}"),
            Self::Outcome { s, renormalized: true } => format!("outcome-{s}-renormalized"),
        }
    }
}

/// Fully resolved and validated parameters.
#[derive(Debug, Clone)]
pub struct Config {
    pub resource_name: String,
    pub resource: Resource,
    pub error_name: String,
    pub theta: f64,
    pub phi: f64,
    pub r: usize,
    pub p: u8,
    pub q: u8,
    pub grid: (usize, usize),
    pub seed: u64,
    pub n: usize,
    pub count: usize,
    pub scenario: ClassifyScenario,
    pub tol: Tolerance,
    pub output: Option<PathBuf>,
    error_file: Option<PathBuf>,
}

impl Config {
    pub fn resolve(flags: Flags) -> Result<Self> {
        let file = match &flags.scenario_file {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading scenario file {}", path.display()))?;
                serde_json::from_str::<ScenarioFile>(&text)
                    .with_context(|| format!("parsing scenario file {}", path.display()))?
            }
            None => ScenarioFile::default(),
        };
        let resource_name = flags.resource.or(file.resource).unwrap_or_else(|| "aklt".into());
        let resource = load_resource(&resource_name)?;
        let theta = flags.theta.or(file.theta).unwrap_or(FRAC_PI_2);
        let phi = flags.phi.or(file.phi).unwrap_or(FRAC_PI_2);
        if !theta.is_finite() || !phi.is_finite() {
            bail!("theta and phi must be finite");
        }
        let p = flags.p.or(file.p).unwrap_or(1);
        let q = flags.q.or(file.q).unwrap_or(0);
        if p > 1 || q > 1 {
            bail!("p and q must be 0 or 1");
        }
        let tol = flags.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        let tol = Tolerance::new(tol).map_err(|e| anyhow!("--tol: {e}"))?;
        let grid = parse_grid(&flags.grid.or(file.grid).unwrap_or_else(|| "8x16".into()))?;
        let scenario = ClassifyScenario::parse(&flags.scenario.or(file.scenario).unwrap_or_else(|| "mixed".into()))?;
        let r = flags.r.or(file.r).unwrap_or(3);
        let n = flags.n.or(file.n).unwrap_or(4);
        Ok(Self {
            resource_name,
            resource,
            error_name: flags.error.or(file.error).unwrap_or_else(|| "f1".into()),
            theta,
            phi,
            r,
            p,
            q,
            grid,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            n,
            count: flags.count.or(file.count).unwrap_or(25),
            scenario,
            tol,
            output: flags.output.or(file.output),
            error_file: flags.error_file.or(file.error_file),
        })
    }

    /// The physical error channel acting on site 1.
    pub fn channel(&self) -> Result<Channel> {
        let d = self.resource.d();
        let name = self.error_name.as_str();
        let ch = match name {
            "f1" => Channel::f1_error(self.theta, self.phi, d)?,
            "identity" => Channel::identity(d),
            "swap12" => Channel::swap_error(1, 2, d)?,
            "file" => {
                let path = self
                    .error_file
                    .as_deref()
                    .ok_or_else(|| anyhow!("--error file needs --error-file PATH"))?;
                load_channel(path)?
            }
            other => match other.strip_prefix("file:") {
                Some(path) => load_channel(Path::new(path))?,
                None => bail!("unknown error `{other}` (expected f1, identity, swap12, file or file:PATH)"),
            },
        };
        if ch.dim() != d {
            bail!("channel acts on dimension {} but the resource has d = {d}", ch.dim());
        }
        Ok(ch)
    }
}

fn load_resource(name: &str) -> Result<Resource> {
    match name {
        "aklt" => Ok(Resource::aklt()),
        "cluster" => Ok(Resource::cluster_1d()),
        other => {
            let path = other
                .strip_prefix("file:")
                .ok_or_else(|| anyhow!("unknown resource `{other}` (expected aklt, cluster or file:PATH)"))?;
            let text = fs::read_to_string(path).with_context(|| format!("reading resource file {path}"))?;
            parse_resource(&text).with_context(|| format!("loading resource file {path}"))
        }
    }
}

fn load_channel(path: &Path) -> Result<Channel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading channel file {}", path.display()))?;
    parse_channel(&text).with_context(|| format!("loading channel file {}", path.display()))
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once('x')
        .ok_or_else(|| anyhow!("invalid grid `{text}` (expected e.g. 8x16)"))?;
    let parse = |s: &str| -> Result<usize> {
        match s.trim().parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => bail!("invalid grid `{text}`: counts must be positive integers"),
        }
    };
    Ok((parse(a)?, parse(b)?))
}
