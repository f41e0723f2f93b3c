//! JSON sweep configuration.
//!
//! Every field has a default, so `{}` is a valid configuration:
//!
//! ```json
//! {
//!   "model": "ozawa",
//!   "lambda_values": [1, 2, 5, 10],
//!   "object_state": {"family": "gaussian", "center": 0, "sigma": 1},
//!   "probes": {
//!     "ozawa": {"phi1": {"family": "gaussian", "sigma": 0.5},
//!               "phi2": {"family": "gaussian", "sigma": 1},
//!               "phi_v": {"family": "gaussian", "sigma": 1}},
//!     "alt": {"probe": {"family": "gaussian", "sigma": 1}}
//!   },
//!   "grid": {"n": 1024, "x_min": -16, "x_max": 16},
//!   "eps_width": 0.05,
//!   "eps_repeat": 1e-6,
//!   "repeat_cells": 1,
//!   "random_objects": 0,
//!   "output_path": "waysim_sweep.csv",
//!   "seed": 0
//! }
//! ```
//!
//! State families: `gaussian {center, sigma}`, `box {center, halfwidth,
//! edge_smoothing}`, `triangle {center, halfwidth}` and `skewed_gaussian
//! {center, sigma, skew}`. All states share the one grid.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use waysim_core::{Model, ProbeFamily64};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Ozawa,
    Alt,
}

impl From<ModelName> for Model {
    fn from(m: ModelName) -> Self {
        match m {
            ModelName::Ozawa => Model::Ozawa,
            ModelName::Alt => Model::Alt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateSpec {
    Gaussian {
        #[serde(default)]
        center: f64,
        sigma: f64,
    },
    Box {
        #[serde(default)]
        center: f64,
        halfwidth: f64,
        #[serde(default)]
        edge_smoothing: f64,
    },
    Triangle {
        #[serde(default)]
        center: f64,
        halfwidth: f64,
    },
    SkewedGaussian {
        #[serde(default)]
        center: f64,
        sigma: f64,
        skew: f64,
    },
}

impl StateSpec {
    pub fn gaussian(sigma: f64) -> Self {
        Self::Gaussian { center: 0.0, sigma }
    }

    pub fn family(&self) -> ProbeFamily64 {
        match *self {
            Self::Gaussian { center, sigma } => ProbeFamily64::gaussian(center, sigma),
            Self::Box {
                center,
                halfwidth,
                edge_smoothing,
            } => ProbeFamily64::smoothed_box(center, halfwidth, edge_smoothing),
            Self::Triangle { center, halfwidth } => ProbeFamily64::triangle(center, halfwidth),
            Self::SkewedGaussian { center, sigma, skew } => {
                ProbeFamily64::skewed_gaussian(center, sigma, skew)
            }
        }
    }

    /// Length the grid has to resolve.
    pub fn resolution_scale(&self) -> f64 {
        match *self {
            Self::Gaussian { sigma, .. } | Self::SkewedGaussian { sigma, .. } => sigma,
            Self::Box { halfwidth, .. } | Self::Triangle { halfwidth, .. } => halfwidth,
        }
    }

    /// Support halfwidth around the center for compact states.
    pub fn compact_halfwidth(&self) -> Option<f64> {
        self.family().compact_halfwidth()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OzawaStates {
    pub phi1: StateSpec,
    pub phi2: StateSpec,
    pub phi_v: StateSpec,
}

impl Default for OzawaStates {
    fn default() -> Self {
        Self {
            phi1: StateSpec::gaussian(0.5),
            phi2: StateSpec::gaussian(1.0),
            phi_v: StateSpec::gaussian(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AltStates {
    pub probe: StateSpec,
}

impl Default for AltStates {
    fn default() -> Self {
        Self {
            probe: StateSpec::gaussian(1.0),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeStates {
    pub ozawa: OzawaStates,
    pub alt: AltStates,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 1024,
            x_min: -16.0,
            x_max: 16.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelName,
    pub lambda_values: Vec<f64>,
    pub object_state: StateSpec,
    pub probes: ProbeStates,
    pub grid: GridConfig,
    /// Confidence parameter of the overall width of the error density.
    pub eps_width: f64,
    /// Confidence parameter of the repeatability width.
    pub eps_repeat: f64,
    /// Width in grid cells of the outcome intervals conditioned on.
    pub repeat_cells: usize,
    /// Extra random object states drawn from `seed`; the largest noise over
    /// all object states is reported as `eps_sq_sup`.
    pub random_objects: usize,
    pub output_path: PathBuf,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            model: ModelName::Ozawa,
            lambda_values: vec![1.0, 2.0, 5.0, 10.0],
            object_state: StateSpec::gaussian(1.0),
            probes: ProbeStates::default(),
            grid: GridConfig::default(),
            eps_width: 0.05,
            eps_repeat: 1e-6,
            repeat_cells: 1,
            random_objects: 0,
            output_path: PathBuf::from("waysim_sweep.csv"),
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks value ranges; grid adequacy is checked when states are sampled.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.lambda_values.is_empty() {
            return bad("lambda_values is empty".into());
        }
        if let Some(l) = self.lambda_values.iter().find(|l| !(**l > 1e-9 && l.is_finite())) {
            return bad(format!("lambda {l} must be a finite value above 1e-9"));
        }
        for (name, e) in [("eps_width", self.eps_width), ("eps_repeat", self.eps_repeat)] {
            if !(e > 0.0 && e < 1.0) {
                return bad(format!("{name} = {e} must lie in (0, 1)"));
            }
        }
        if self.repeat_cells == 0 {
            return bad("repeat_cells must be positive".into());
        }
        if !(self.grid.x_max > self.grid.x_min) || !self.grid.n.is_power_of_two() {
            return bad(format!(
                "grid [{}, {}] with n = {} must be a nonempty range with a power-of-two size",
                self.grid.x_min, self.grid.x_max, self.grid.n
            ));
        }
        Ok(())
    }

    pub fn csv_path(&self) -> PathBuf {
        self.output_path.clone()
    }

    pub fn json_path(&self) -> PathBuf {
        self.output_path.with_extension("json")
    }

    /// `<stem>_lambda<index>.tsv` next to the CSV output.
    pub fn plot_path(&self, index: usize) -> PathBuf {
        let stem = self
            .output_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "waysim_sweep".into());
        self.output_path
            .with_file_name(format!("{stem}_lambda{index}.tsv"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(SweepConfig::from_json("{}").unwrap(), SweepConfig::default());
    }

    #[test]
    fn parses_families() {
        let c = SweepConfig::from_json(
            r#"{"model": "alt", "lambda_values": [0.5],
                "probes": {"alt": {"probe": {"family": "box", "halfwidth": 1}}},
                "object_state": {"family": "skewed_gaussian", "sigma": 1, "skew": 3}}"#,
        )
        .unwrap();
        assert_eq!(c.model, ModelName::Alt);
        assert_eq!(c.probes.alt.probe.compact_halfwidth(), Some(1.0));
        assert!(c.object_state.compact_halfwidth().is_none());
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            r#"{"lambda_values": []}"#,
            r#"{"lambda_values": [0]}"#,
            r#"{"eps_repeat": 1.5}"#,
            r#"{"grid": {"n": 100}}"#,
            r#"{"unknown": 1}"#,
        ] {
            assert!(matches!(SweepConfig::from_json(text), Err(CliError::Config(_))), "{text}");
        }
    }
}
