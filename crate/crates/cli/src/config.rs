//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tumor_immune_core::presets;
use tumor_immune_core::{
    AuxProcess, AuxSet, DimensionalParams, EnsembleSpec, ModelParams, Preset, State, StepPolicy,
};

use crate::error::{CliError, Result};

/// Physical rates plus the two noise intensities, which the rescaling
/// does not produce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalInput {
    #[serde(flatten)]
    pub rates: DimensionalParams<f64>,
    pub sigma1: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSource {
    Nondimensional(ModelParams<f64>),
    Dimensional(DimensionalInput),
}

impl ParamSource {
    pub fn resolve(&self) -> Result<ModelParams<f64>> {
        let p = match self {
            ParamSource::Nondimensional(p) => *p,
            ParamSource::Dimensional(d) => {
                d.rates.nondimensionalize()?.with_noise(d.sigma1, d.sigma2)
            }
        };
        p.validate()?;
        Ok(p)
    }
}

/// Ensemble settings. Unset fields fall back to per-command defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    /// Overrides the preset rates when both are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<State<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<StepPolicy<f64>>,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<PathBuf>,
    /// Comparison processes to integrate alongside the system.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coupled: Vec<AuxProcess>,
    /// Start time of the tumor-free effector process.
    #[serde(default)]
    pub z_start: f64,
}

impl RunConfig {
    /// Parse, reporting the path of the offending key on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read `{}`: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let params = match (&self.params, self.preset) {
            (Some(src), _) => src.resolve()?,
            (None, Some(p)) => p.params(),
            (None, None) => {
                return Err(CliError::Config("give either `preset` or `params`".into()))
            }
        };
        let initial = self.initial.unwrap_or_else(presets::initial_state);
        State::new(initial.x, initial.y)?;
        let policy = self.policy.unwrap_or_default();
        policy.validate()?;
        if !(self.z_start.is_finite() && self.z_start >= 0.0) {
            return Err(CliError::Config(format!(
                "at `z_start`: must be >= 0, got {}",
                self.z_start
            )));
        }
        Ok(Resolved {
            preset: self.preset,
            params,
            initial,
            policy,
            ensemble: self.ensemble,
            out: self.outputs.clone().unwrap_or_else(|| PathBuf::from("out")),
            aux: self.coupled.iter().copied().collect(),
            z_start: self.z_start,
        })
    }
}

/// Per-command fallbacks for unset ensemble fields.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub n_paths: usize,
    pub horizon: f64,
    pub burn_in: Option<f64>,
}

/// A validated configuration with parameters in nondimensional form.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub preset: Option<Preset>,
    pub params: ModelParams<f64>,
    pub initial: State<f64>,
    pub policy: StepPolicy<f64>,
    pub ensemble: EnsembleConfig,
    pub out: PathBuf,
    pub aux: AuxSet,
    pub z_start: f64,
}

impl EnsembleConfig {
    pub fn spec(&self, policy: StepPolicy<f64>, d: Defaults) -> Result<EnsembleSpec<f64>> {
        let horizon = self.horizon.unwrap_or(d.horizon);
        // A default burn-in longer than a user horizon yields to the 20% rule.
        let burn_in = match (self.burn_in, d.burn_in) {
            (Some(b), _) => b,
            (None, Some(b)) if b < horizon => b,
            _ => 0.2 * horizon,
        };
        let spec = EnsembleSpec::new(
            self.n_paths.unwrap_or(d.n_paths),
            horizon,
            self.seed.unwrap_or(0),
        )
        .with_policy(policy)
        .with_stride(self.record_stride.unwrap_or(1))
        .with_burn_in(burn_in);
        spec.validate()?;
        Ok(spec)
    }
}

impl Resolved {
    pub fn spec(&self, d: Defaults) -> Result<EnsembleSpec<f64>> {
        self.ensemble.spec(self.policy, d)
    }
}
