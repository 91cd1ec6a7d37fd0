//! Declarative run configuration: TOML schema, defaults, validation, and
//! conversion into core types.
//!
//! Every downstream constraint is re-checked at load time so that a bad
//! config is rejected (exit code 2) before any simulation starts. Flags
//! given on the command line override the corresponding config fields.

// Validation guards are written `if !(x > 0.0)` on purpose: the negated
// form rejects NaN, which `x <= 0.0` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use crate::CliError;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use stit_core::measure::DirectionalDistribution;
use stit_core::mixing::DecayConfig;
use stit_core::{Direction, HyperplaneMeasure};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Experiment name; prefixes every artifact file.
    #[serde(default = "defaults::experiment")]
    pub experiment: String,
    /// Master seed; every random stream in a run derives from it.
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    /// Monte Carlo replicates per estimate.
    #[serde(default = "defaults::replicates")]
    pub replicates: usize,
    /// All artifacts are written under this directory.
    #[serde(default = "defaults::output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; 0 keeps the library default (all cores).
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub measure: MeasureConfig,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub mixing: MixingConfig,
    #[serde(default)]
    pub bound: BoundConfig,
}

mod defaults {
    use std::path::PathBuf;

    pub fn experiment() -> String {
        "run".into()
    }
    pub fn seed() -> u64 {
        20260816
    }
    pub fn replicates() -> usize {
        10_000
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("out")
    }
    pub fn dimension() -> usize {
        2
    }
    pub fn inner_half() -> f64 {
        1.0
    }
    pub fn t() -> f64 {
        1.0
    }
    pub fn margin() -> f64 {
        2.0
    }
    pub fn u_grid() -> Vec<f64> {
        vec![0.7, 0.8, 0.9]
    }
    pub fn v_grid() -> Vec<f64> {
        vec![0.2, 0.3]
    }
    pub fn tail_replicates() -> usize {
        20_000
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    /// "axis" | "isotropic" | "discrete".
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default = "defaults::dimension")]
    pub dimension: usize,
    /// Intensity; defaults to 2ℓ (axis) or 2π (isotropic).
    pub gamma: Option<f64>,
    /// Direction atoms, "discrete" kind only.
    #[serde(default)]
    pub atoms: Vec<AtomConfig>,
}

fn default_kind() -> String {
    "axis".into()
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            kind: default_kind(),
            dimension: defaults::dimension(),
            gamma: None,
            atoms: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub direction: Vec<f64>,
    pub weight: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    /// Observation window half-width a.
    #[serde(default = "defaults::inner_half")]
    pub inner_half: f64,
    /// Enclosing half-width b, for the commands that separate two scales.
    pub outer_half: Option<f64>,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            inner_half: defaults::inner_half(),
            outer_half: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// Process time t.
    #[serde(default = "defaults::t")]
    pub t: f64,
    /// Horizon s, where a command distinguishes the two.
    pub s: Option<f64>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t: defaults::t(),
            s: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixingConfig {
    /// Simulation window half-width, as a multiple of b.
    #[serde(default = "defaults::margin")]
    pub margin: f64,
    /// Outer half-widths; empty means {4, 8, 16, 32, 64}·a.
    #[serde(default)]
    pub b_grid: Vec<f64>,
    /// Horizon exponents, s = b⁻ᵘ.
    #[serde(default = "defaults::u_grid")]
    pub u_grid: Vec<f64>,
    /// Cap exponents, M = bᵛ.
    #[serde(default = "defaults::v_grid")]
    pub v_grid: Vec<f64>,
    /// Replicates for the rate-tail estimate.
    #[serde(default = "defaults::tail_replicates")]
    pub tail_replicates: usize,
}

impl Default for MixingConfig {
    fn default() -> Self {
        MixingConfig {
            margin: defaults::margin(),
            b_grid: Vec::new(),
            u_grid: defaults::u_grid(),
            v_grid: defaults::v_grid(),
            tail_replicates: defaults::tail_replicates(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    /// Fixed tail probability; when absent the analytic birth-chain tail
    /// bound at M is used.
    pub p_tail: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config is valid")
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Re-validates every downstream constraint up front.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.experiment.is_empty()
            || self
                .experiment
                .chars()
                .any(|c| !(c.is_ascii_alphanumeric() || c == '-' || c == '_'))
        {
            return Err(CliError::Config(
                "experiment name must be nonempty [A-Za-z0-9_-]".into(),
            ));
        }
        if self.replicates == 0 {
            return Err(CliError::Config("replicates must be positive".into()));
        }
        self.build_measure()?; // surfaces measure-model violations
        let a = self.window.inner_half;
        if !(a > 0.0) || !a.is_finite() {
            return Err(CliError::Config("window.inner_half must be positive".into()));
        }
        if let Some(b) = self.window.outer_half {
            if !(b > a) {
                return Err(CliError::Config(format!(
                    "window.outer_half ({b}) must exceed inner_half ({a})"
                )));
            }
        }
        if !(self.time.t > 0.0) || !self.time.t.is_finite() {
            return Err(CliError::Config("time.t must be positive".into()));
        }
        if let Some(s) = self.time.s {
            if !(s > 0.0) || !s.is_finite() {
                return Err(CliError::Config("time.s must be positive".into()));
            }
        }
        if let Some(p) = self.bound.p_tail {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Config("bound.p_tail must lie in [0, 1]".into()));
            }
        }
        // Grid constraints, via the library's own validator.
        self.decay_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn build_measure(&self) -> Result<HyperplaneMeasure, CliError> {
        let m = &self.measure;
        let dim = m.dimension;
        let dist = match m.kind.as_str() {
            "axis" => DirectionalDistribution::axis(dim),
            "isotropic" => DirectionalDistribution::isotropic(dim),
            "discrete" => {
                let atoms = m
                    .atoms
                    .iter()
                    .map(|a| {
                        Direction::new(&a.direction)
                            .map(|d| (d, a.weight))
                            .map_err(|e| CliError::Config(format!("measure.atoms: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                DirectionalDistribution::DiscreteEven { dim, atoms }
            }
            other => {
                return Err(CliError::Config(format!(
                    "measure.kind '{other}' is not one of axis | isotropic | discrete"
                )))
            }
        };
        let gamma = m.gamma.unwrap_or(match m.kind.as_str() {
            "isotropic" => std::f64::consts::TAU,
            _ => 2.0 * dim as f64,
        });
        HyperplaneMeasure::new(gamma, dist)
            .map_err(|e| CliError::Config(format!("measure: {e}")))
    }

    /// Outer half-width grid; defaults to {4, 8, 16, 32, 64}·a.
    pub fn b_grid(&self) -> Vec<f64> {
        if self.mixing.b_grid.is_empty() {
            [4.0, 8.0, 16.0, 32.0, 64.0]
                .iter()
                .map(|r| r * self.window.inner_half)
                .collect()
        } else {
            self.mixing.b_grid.clone()
        }
    }

    pub fn decay_config(&self) -> DecayConfig {
        DecayConfig {
            a: self.window.inner_half,
            t: self.time.t,
            b_grid: self.b_grid(),
            u_grid: self.mixing.u_grid.clone(),
            v_grid: self.mixing.v_grid.clone(),
            margin: self.mixing.margin,
            replicates: self.replicates,
            tail_replicates: self.mixing.tail_replicates,
        }
    }
}
