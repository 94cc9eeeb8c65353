//! Experiment configuration: the command-line mini-syntax for distributions
//! and grids, the serializable per-subcommand configs, and the run manifest
//! that makes every invocation replayable.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{QsoError, Result};
use crate::samplers::LogBase;

/// Parse `family:param1,param2`. Accepted families (with aliases):
/// `pointmass:v` (`point`, `const`), `normal:mean,variance`,
/// `exponential:rate` (`exp`), `cauchylike:mu,a,alpha` (`cauchy`),
/// `powerlaw:epsilon`, `stable:exponent`, `empirical:@path` (single-column
/// CSV of values).
pub fn parse_dist(text: &str) -> Result<DistributionSpec> {
    let bad = |msg: String| QsoError::InvalidSpec(msg);
    let (family, args) = match text.split_once(':') {
        Some((f, a)) => (f, a),
        None => (text, ""),
    };
    let nums = |expect: usize| -> Result<Vec<f64>> {
        let parts: Vec<&str> = if args.is_empty() {
            vec![]
        } else {
            args.split(',').collect()
        };
        if parts.len() != expect {
            return Err(bad(format!(
                "{family} takes {expect} parameter(s), got {} in {text:?}",
                parts.len()
            )));
        }
        parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad number {p:?} in {text:?}")))
            })
            .collect()
    };
    let spec = match family.to_ascii_lowercase().as_str() {
        "pointmass" | "point" | "const" => DistributionSpec::PointMass { value: nums(1)?[0] },
        "normal" => {
            let p = nums(2)?;
            DistributionSpec::Normal {
                mean: p[0],
                variance: p[1],
            }
        }
        "exponential" | "exp" => DistributionSpec::Exponential { rate: nums(1)?[0] },
        "cauchylike" | "cauchy" => {
            let p = nums(3)?;
            DistributionSpec::CauchyLike {
                mu: p[0],
                a: p[1],
                alpha: p[2],
            }
        }
        "powerlaw" => DistributionSpec::DiscretePowerLaw {
            epsilon: nums(1)?[0],
        },
        "stable" => DistributionSpec::SymmetricStable {
            exponent: nums(1)?[0],
        },
        "empirical" => {
            let path = args
                .strip_prefix('@')
                .ok_or_else(|| bad(format!("empirical takes @path, got {text:?}")))?;
            DistributionSpec::Empirical {
                values: read_samples_csv(Path::new(path))?,
            }
        }
        other => return Err(bad(format!("unknown distribution family {other:?}"))),
    };
    spec.validate()?;
    Ok(spec)
}

/// Parse `delta:half_points` into a symmetric grid spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub delta: f64,
    pub half_points: i64,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        crate::cf_engine::symmetric_grid(self.delta, self.half_points)
    }
}

pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let (d, h) = text
        .split_once(':')
        .ok_or_else(|| QsoError::InvalidSpec(format!("grid must be delta:half_points, got {text:?}")))?;
    let delta: f64 = d
        .trim()
        .parse()
        .map_err(|_| QsoError::InvalidSpec(format!("bad grid delta {d:?}")))?;
    let half_points: i64 = h
        .trim()
        .parse()
        .map_err(|_| QsoError::InvalidSpec(format!("bad grid point count {h:?}")))?;
    if !(delta > 0.0) || half_points < 1 {
        return Err(QsoError::InvalidSpec(format!(
            "grid needs delta > 0 and half_points >= 1, got {text:?}"
        )));
    }
    Ok(GridSpec { delta, half_points })
}

/// Parse an iteration count that may be `inf`.
pub fn parse_iterations(text: &str) -> Result<Option<u32>> {
    if text.eq_ignore_ascii_case("inf") || text.eq_ignore_ascii_case("infinity") {
        return Ok(None);
    }
    text.parse::<u32>()
        .map(Some)
        .map_err(|_| QsoError::InvalidSpec(format!("iteration count must be a u32 or 'inf', got {text:?}")))
}

pub fn parse_log_base(text: &str) -> Result<LogBase> {
    match text.to_ascii_lowercase().as_str() {
        "natural" | "ln" | "e" => Ok(LogBase::Natural),
        "base2" | "2" | "log2" => Ok(LogBase::Base2),
        other => Err(QsoError::InvalidSpec(format!(
            "log base must be 'natural' or 'base2', got {other:?}"
        ))),
    }
}

/// Read a single-column `value` CSV (header optional) into a vector.
pub fn read_samples_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line == "value") {
            continue;
        }
        values.push(line.parse::<f64>().map_err(|_| {
            QsoError::InvalidInput(format!("{}:{}: bad value {line:?}", path.display(), i + 1))
        })?);
    }
    if values.is_empty() {
        return Err(QsoError::InvalidInput(format!(
            "{}: no values found",
            path.display()
        )));
    }
    Ok(values)
}

/// Fully resolved configuration of one subcommand run; this is what the
/// manifest records and what `--config` replays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum CommandConfig {
    SimulatePopulation {
        seed_dist: DistributionSpec,
        kernel: DistributionSpec,
        population: usize,
        generations: u32,
        forbid_self_pairing: bool,
    },
    DrawExact {
        seed_dist: DistributionSpec,
        kernel: DistributionSpec,
        iterations: u32,
        count: usize,
        guard_override: Option<u32>,
    },
    DrawApprox {
        seed_dist: DistributionSpec,
        kernel: DistributionSpec,
        alpha: f64,
        delta: f64,
        iterations: Option<u32>,
        log_base: LogBase,
        bonferroni_k: Option<u64>,
        count: usize,
        collapse: bool,
    },
    Depth {
        alpha: f64,
        delta: f64,
        seed_variance: f64,
        kernel_variance: f64,
        iterations: Option<u32>,
        log_base: LogBase,
        bonferroni_k: Option<u64>,
    },
    CfIterate {
        seed_dist: DistributionSpec,
        kernel: DistributionSpec,
        iterations: u32,
        grid: GridSpec,
    },
    CfLimit {
        kernel: DistributionSpec,
        grid: GridSpec,
        depth_cap: u32,
        tol: f64,
        tail_amplitude: Option<f64>,
        tail_power: Option<f64>,
    },
    FixedPoint {
        candidate: DistributionSpec,
        kernel: DistributionSpec,
        grid: GridSpec,
    },
    TailCheck {
        kernel: DistributionSpec,
        amplitude: f64,
        power: f64,
        s_max: f64,
        grid: GridSpec,
    },
    StableLimit {
        dist: DistributionSpec,
        tail_constant: f64,
        n_values: Vec<u64>,
        grid: GridSpec,
    },
    Compare {
        a: String,
        b: String,
    },
    ReplicateFigures {
        population: usize,
        no_collapse: bool,
        figures: Vec<u8>,
    },
}

/// The run manifest written next to every run's outputs. Replaying it with
/// `--config manifest.json` reproduces the data files byte for byte; only
/// the timing fields differ between runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub master_seed: u64,
    pub threads: Option<usize>,
    pub out_dir: String,
    pub command: CommandConfig,
    pub wall_time_seconds: f64,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
