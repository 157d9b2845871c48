//! TOML run configuration. Unknown keys are rejected at every level.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bell_basis::BellOutcome;
use crate::expsim::{AnalyzerModel, DetectorModel, ExperimentSetup, GeometryConfig};
use crate::spin_core::UnitVector3;

use super::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub teleport: TeleportConfig,
    #[serde(default)]
    pub scatter_check: ScatterCheckConfig,
    #[serde(default)]
    pub bellscan: BellscanConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            teleport: TeleportConfig::default(),
            scatter_check: ScatterCheckConfig::default(),
            bellscan: BellscanConfig::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TeleportConfig {
    pub trials: u64,
    /// Bloch vector of the input state; a Haar-random input is drawn from
    /// the seed when absent.
    pub input_bloch: Option<[f64; 3]>,
    pub ancilla: BellOutcome,
    /// Replace the ideal Bell measurement by the projector onto this state.
    pub filter: Option<BellOutcome>,
}

impl Default for TeleportConfig {
    fn default() -> Self {
        Self { trials: 10_000, input_bloch: None, ancilla: BellOutcome::PsiMinus, filter: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatterCheckConfig {
    /// Relative paths resolve against the config file's directory.
    pub amplitude_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BellscanConfig {
    pub state: BellOutcome,
    pub grid_points: usize,
    pub theta_max_rad: f64,
    /// Azimuth of the tilt plane; 0 tilts from ẑ toward x̂.
    pub plane_azimuth_rad: f64,
    pub samples_per_point: u64,
}

impl Default for BellscanConfig {
    fn default() -> Self {
        Self {
            state: BellOutcome::PsiPlus,
            grid_points: 19,
            theta_max_rad: FRAC_PI_2,
            plane_azimuth_rad: 0.0,
            samples_per_point: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub events: u64,
    pub target_bloch: [f64; 3],
    /// Bell state the polarized-target scattering selects.
    pub filter: BellOutcome,
    pub condition_on: BellOutcome,
    pub require_causal: bool,
    pub event_spacing_s: f64,
    pub singlet_acceptance: f64,
    pub analyzer_normals: Vec<[f64; 3]>,
    pub geometry: GeometryConfig,
    pub detectors: DetectorModel,
    pub analyzer: AnalyzerModel,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let setup = ExperimentSetup::default();
        Self {
            events: 100_000,
            target_bloch: [0.0, 1.0, 0.0],
            filter: BellOutcome::PsiMinus,
            condition_on: setup.condition_on,
            require_causal: setup.require_causal,
            event_spacing_s: setup.event_spacing_s,
            singlet_acceptance: setup.singlet_acceptance,
            analyzer_normals: setup.analyzer_normals.iter().map(|n| n.to_array()).collect(),
            geometry: setup.geometry,
            detectors: setup.detectors,
            analyzer: setup.analyzer,
        }
    }
}

pub(crate) fn unit(v: [f64; 3], what: &str) -> Result<UnitVector3, CliError> {
    UnitVector3::normalize(v[0], v[1], v[2]).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

impl ExperimentConfig {
    pub fn setup(&self) -> Result<ExperimentSetup, CliError> {
        let analyzer_normals = self
            .analyzer_normals
            .iter()
            .map(|n| unit(*n, "experiment.analyzer_normals"))
            .collect::<Result<Vec<_>, _>>()?;
        let setup = ExperimentSetup {
            geometry: self.geometry.clone(),
            detectors: self.detectors.clone(),
            analyzer: self.analyzer,
            analyzer_normals,
            event_spacing_s: self.event_spacing_s,
            singlet_acceptance: self.singlet_acceptance,
            condition_on: self.condition_on,
            require_causal: self.require_causal,
        };
        setup.validate().map_err(|e| CliError::Config(format!("experiment: {e}")))?;
        Ok(setup)
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    /// Loads a config file and anchors relative paths at its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if let Some(file) = &cfg.scatter_check.amplitude_file {
            if file.is_relative() {
                let base = path.parent().unwrap_or(Path::new(""));
                cfg.scatter_check.amplitude_file = Some(base.join(file));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
