//! Experiment configuration, read from JSON.

use std::path::Path;

use ladderlab::predictions::{predict, MediumTail, PredictionSource, WalkTail};
use ladderlab::spitzer::{phi_factor, CostMap, Transform};
use ladderlab::tail::{Censoring, FitMethod};
use ladderlab::{CostSpec, JumpLaw, Preset, SceneryLaw, TailPrediction};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Invalid configuration, naming the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("config field `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

fn bad(field: &str, reason: impl ToString) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    VerifyIdentities,
    SpitzerCheck,
    TailExperiment,
    Predict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum JumpLawConfig {
    SimpleSymmetric,
    Zipf { beta: f64 },
    CustomPmf { pmf: Vec<(i64, f64)> },
}

impl JumpLawConfig {
    pub fn build(&self) -> Result<JumpLaw, ConfigError> {
        match self {
            JumpLawConfig::SimpleSymmetric => Ok(JumpLaw::simple_symmetric()),
            JumpLawConfig::Zipf { beta } => JumpLaw::zipf(*beta),
            JumpLawConfig::CustomPmf { pmf } => JumpLaw::custom(pmf),
        }
        .map_err(|e| bad("jump_law", e))
    }
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SceneryLawConfig {
    Pareto {
        gamma: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    PositiveStable {
        gamma: f64,
    },
    Constant {
        value: f64,
    },
    Zero,
}

impl SceneryLawConfig {
    pub fn build(&self, field: &str) -> Result<SceneryLaw, ConfigError> {
        match self {
            SceneryLawConfig::Pareto { gamma, scale } => SceneryLaw::pareto(*gamma, *scale),
            SceneryLawConfig::PositiveStable { gamma } => SceneryLaw::positive_stable(*gamma),
            SceneryLawConfig::Constant { value } => SceneryLaw::constant(*value),
            SceneryLawConfig::Zero => Ok(SceneryLaw::zero()),
        }
        .map_err(|e| bad(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneryPair {
    pub plus: SceneryLawConfig,
    pub minus: SceneryLawConfig,
}

/// Sampled quantity of a tail experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    LadderTime,
    LadderHeight,
    LadderLength,
    YHeight,
    YLength,
    FirstPassageX,
    LadderCost,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::LadderTime => "ladder-time",
            Quantity::LadderHeight => "ladder-height",
            Quantity::LadderLength => "ladder-length",
            Quantity::YHeight => "y-height",
            Quantity::YLength => "y-length",
            Quantity::FirstPassageX => "first-passage-x",
            Quantity::LadderCost => "ladder-cost",
        }
    }
}

fn default_points() -> usize {
    40
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FitConfig {
    Hill {
        k: usize,
    },
    Loglog {
        x_lo: f64,
        x_hi: f64,
        #[serde(default = "default_points")]
        points: usize,
    },
}

impl FitConfig {
    pub fn method(self) -> FitMethod {
        match self {
            FitConfig::Hill { k } => FitMethod::Hill { k },
            FitConfig::Loglog { x_lo, x_hi, points } => FitMethod::LogLog { x_lo, x_hi, points },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensoringConfig {
    Exclude,
    RightCensored,
}

impl From<CensoringConfig> for Censoring {
    fn from(c: CensoringConfig) -> Self {
        match c {
            CensoringConfig::Exclude => Censoring::Exclude,
            CensoringConfig::RightCensored => Censoring::RightCensored,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub z: Vec<f64>,
    #[serde(default = "zero_grid")]
    pub s: Vec<f64>,
    #[serde(default = "zero_grid")]
    pub t: Vec<f64>,
}

fn zero_grid() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostMapConfig {
    Zero,
    Identity,
    Abs,
}

impl From<CostMapConfig> for CostMap {
    fn from(c: CostMapConfig) -> Self {
        match c {
            CostMapConfig::Zero => CostMap::Zero,
            CostMapConfig::Identity => CostMap::Identity,
            CostMapConfig::Abs => CostMap::Abs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformConfig {
    Fourier,
    Laplace,
}

impl From<TransformConfig> for Transform {
    fn from(t: TransformConfig) -> Self {
        match t {
            TransformConfig::Fourier => Transform::Fourier,
            TransformConfig::Laplace => Transform::Laplace,
        }
    }
}

fn one() -> u64 {
    1
}

fn one_ladder() -> usize {
    1
}

fn default_max_steps() -> u64 {
    1_000_000
}

fn default_tolerance() -> f64 {
    0.05
}

fn default_max_censored() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub task: Task,
    pub jump_law: JumpLawConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium_law: Option<SceneryLawConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenery_laws: Option<SceneryPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default = "one")]
    pub n_paths: u64,
    #[serde(default = "one_ladder")]
    pub n_ladders: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub censoring: Option<CensoringConfig>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_tolerance: Option<f64>,
    #[serde(default = "default_max_censored")]
    pub max_censored_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_map: Option<CostMapConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformConfig>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| bad("<document>", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.jump_law.build()?;
        if let Some(m) = &self.medium_law {
            let law = m.build("medium_law")?;
            if !law.is_positive() {
                return Err(bad("medium_law", "spacings must be positive"));
            }
        }
        if let Some(p) = &self.scenery_laws {
            p.plus.build("scenery_laws.plus")?;
            p.minus.build("scenery_laws.minus")?;
        }
        if self.workers == Some(0) {
            return Err(bad("workers", "must be positive"));
        }
        if self.n_paths == 0 {
            return Err(bad("n_paths", "must be positive"));
        }
        if self.n_ladders == 0 {
            return Err(bad("n_ladders", "must be positive"));
        }
        if self.max_steps == 0 {
            return Err(bad("max_steps", "must be positive"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(bad("tolerance", "must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.max_censored_fraction) {
            return Err(bad("max_censored_fraction", "must lie in [0, 1]"));
        }
        match self.task {
            Task::SpitzerCheck => {
                let g = self
                    .grid
                    .as_ref()
                    .ok_or_else(|| bad("grid", "required for spitzer-check"))?;
                if g.z.is_empty() || g.s.is_empty() || g.t.is_empty() {
                    return Err(bad("grid", "grids must be nonempty"));
                }
                if let Some(z) = g.z.iter().find(|z| !(**z > 0.0 && **z < 1.0)) {
                    return Err(bad("grid.z", format!("{z} outside (0, 1)")));
                }
            }
            Task::TailExperiment | Task::Predict => {
                let q = self
                    .quantity
                    .ok_or_else(|| bad("quantity", "required for this task"))?;
                self.cost_spec_for(q)?;
            }
            Task::VerifyIdentities => {}
        }
        Ok(())
    }

    pub fn medium(&self) -> Result<SceneryLaw, ConfigError> {
        self.medium_law
            .as_ref()
            .ok_or_else(|| bad("medium_law", "required for this quantity"))?
            .build("medium_law")
    }

    /// Cost specification for quantities that need one.
    pub fn cost_spec_for(&self, q: Quantity) -> Result<Option<CostSpec>, ConfigError> {
        match q {
            Quantity::YHeight | Quantity::YLength | Quantity::FirstPassageX => {
                self.medium()?;
                if self.n_ladders != 1 {
                    return Err(bad(
                        "n_ladders",
                        "medium quantities are predicted for the first ladder only",
                    ));
                }
                Ok(None)
            }
            Quantity::LadderCost => match (self.preset, &self.scenery_laws) {
                (Some(Preset::General) | None, Some(p)) => Ok(Some(CostSpec::general(
                    p.plus.build("scenery_laws.plus")?,
                    p.minus.build("scenery_laws.minus")?,
                ))),
                (Some(preset), None) => Ok(Some(
                    CostSpec::preset(preset, self.medium()?).map_err(|e| bad("preset", e))?,
                )),
                (Some(_), Some(_)) => Err(bad(
                    "preset",
                    "give either a preset with medium_law or scenery_laws",
                )),
                (None, None) => Err(bad("scenery_laws", "required for ladder-cost")),
            },
            _ => {
                if self.n_ladders != 1 {
                    return Err(bad(
                        "n_ladders",
                        "walk ladder quantities are predicted for the first ladder only",
                    ));
                }
                Ok(None)
            }
        }
    }

    /// Prediction for the configured quantity.
    pub fn prediction(&self) -> Result<TailPrediction, ConfigError> {
        let q = self.quantity.ok_or_else(|| bad("quantity", "required"))?;
        let law = self.jump_law.build()?;
        let walk = WalkTail::of(&law);
        let phi = || -> Result<f64, ConfigError> {
            phi_factor(1.0, 0.0, &law, &CostMap::Zero, Transform::Fourier)
                .map(|p| p.value.re)
                .map_err(|e| bad("jump_law", e))
        };
        let medium = || -> Result<MediumTail, ConfigError> {
            MediumTail::of(&self.medium()?).map_err(|e| bad("medium_law", e))
        };
        let source = match q {
            Quantity::LadderTime => PredictionSource::EvenCost {
                tail: ladderlab::predictions::EvenCostTail::Drift { nu: 1.0 },
                phi: phi()?,
            },
            Quantity::LadderHeight => PredictionSource::LadderHeight { walk, phi: phi()? },
            Quantity::LadderLength => PredictionSource::LadderLength { walk, phi: phi()? },
            Quantity::YHeight => PredictionSource::YHeight {
                walk,
                medium: medium()?,
                phi: phi()?,
            },
            Quantity::YLength => PredictionSource::YLength {
                walk,
                medium: medium()?,
                phi: phi()?,
            },
            Quantity::FirstPassageX => PredictionSource::FirstPassageX {
                beta: walk.beta,
                gamma: self.medium()?.gamma(),
            },
            Quantity::LadderCost => {
                let spec = self.cost_spec_for(q)?.expect("ladder cost has a spec");
                PredictionSource::LadderCost {
                    gamma_hat_plus: spec.gamma_hat_plus(),
                    gamma_hat_zero: spec.gamma_hat_zero(),
                    beta: walk.beta,
                    zero_stable: spec.even_law().is_some_and(|l| l.is_stable()),
                    n: self.n_ladders,
                }
            }
        };
        predict(source).map_err(|e| bad("quantity", e))
    }
}
