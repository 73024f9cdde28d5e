//! Run configuration: JSON text, dotted-key overrides, defaults, validation.

use std::path::PathBuf;

use micropolar::dynamics::{DataBand, Preset, Scheme};
use micropolar::{Domain64, PhysParams64, Resolution};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("config schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("config invariant violated: {0}")]
    Invariant(String),
    #[error("bad override {0:?} (expected key=value)")]
    Override(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    #[default]
    Simulate,
    Verify,
    Constants,
    Depend,
    Converge,
    Basis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub l: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { l: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolutionConfig {
    pub nx: usize,
    pub my: usize,
    pub jy: usize,
    #[serde(default)]
    pub quad_x: Option<usize>,
    #[serde(default)]
    pub quad_y: Option<usize>,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        Self {
            nx: 8,
            my: 8,
            jy: 8,
            quad_x: None,
            quad_y: None,
        }
    }
}

impl ResolutionConfig {
    pub fn resolution(&self) -> Resolution {
        let mut r = Resolution::new(self.nx, self.my, self.jy);
        if let Some(q) = self.quad_x {
            r.quad_x = q;
        }
        if let Some(q) = self.quad_y {
            r.quad_y = q;
        }
        r
    }
}

/// Every field is required once the block is present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(rename = "Pr")]
    pub pr: f64,
    #[serde(rename = "Ra")]
    pub ra: f64,
    #[serde(rename = "Nsq")]
    pub nsq: f64,
    #[serde(rename = "Lsq")]
    pub lsq: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperSection {
    /// `null` picks half the stability limit of the initial state.
    #[serde(default)]
    pub dt: Option<f64>,
    pub scheme: String,
    pub t_end: f64,
    pub ledger_stride: usize,
}

impl Default for StepperSection {
    fn default() -> Self {
        Self {
            dt: None,
            scheme: "cnab2".into(),
            t_end: 1.0,
            ledger_stride: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub preset: String,
    #[serde(default)]
    pub checkpoint: Option<PathBuf>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            preset: "smallRa".into(),
            checkpoint: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandConfig {
    pub nx: usize,
    pub my: usize,
    pub jy: usize,
}

impl Default for BandConfig {
    fn default() -> Self {
        let b = DataBand::default();
        Self {
            nx: b.nx,
            my: b.my,
            jy: b.jy,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorConfig {
    /// `null` means `1e-6 + dt`.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub strong_c1: Option<f64>,
    #[serde(default)]
    pub strong_c2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub trials: usize,
    pub names: Vec<String>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self {
            trials: 64,
            names: (1..=7).map(|i| format!("k{i}")).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DependConfig {
    pub deltas: Vec<f64>,
}

impl Default for DependConfig {
    fn default() -> Self {
        Self {
            deltas: vec![1e-6, 5e-7],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeConfig {
    /// Uniform mode counts, coarse to fine.
    pub resolutions: Vec<usize>,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self {
            resolutions: vec![8, 16, 32],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub ledger: Option<PathBuf>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub resolution: ResolutionConfig,
    /// Absent: the preset's parameters.
    #[serde(default)]
    pub params: Option<ParamsConfig>,
    #[serde(default)]
    pub stepper: StepperSection,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub data_band: BandConfig,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub experiment: Experiment,
    #[serde(default)]
    pub monitors: MonitorConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub depend: DependConfig,
    #[serde(default)]
    pub converge: ConvergeConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields defaulted")
    }
}

impl RunConfig {
    pub fn preset(&self) -> Preset {
        self.initial.preset.parse().expect("validated")
    }

    pub fn scheme(&self) -> Scheme {
        self.stepper.scheme.parse().expect("validated")
    }

    pub fn domain_spec(&self) -> Domain64 {
        Domain64::new(self.domain.l).expect("validated")
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution.resolution()
    }

    pub fn band(&self) -> DataBand {
        DataBand {
            nx: self.data_band.nx,
            my: self.data_band.my,
            jy: self.data_band.jy,
        }
    }

    /// Configured parameters, or the preset's, with `l` from the domain.
    pub fn params(&self) -> PhysParams64 {
        let mut p = match &self.params {
            Some(c) => PhysParams64 {
                pr: c.pr,
                ra: c.ra,
                nsq: c.nsq,
                lsq: c.lsq,
                d: c.d,
                l: 1.0,
            },
            None => self.preset().params(),
        };
        p.l = self.domain.l;
        p
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let inv = |e: micropolar::Error| ConfigError::Invariant(e.to_string());
        Domain64::new(self.domain.l).map_err(inv)?;
        self.resolution().validate().map_err(inv)?;
        self.params().validate().map_err(inv)?;
        self.stepper.scheme.parse::<Scheme>().map_err(inv)?;
        self.initial.preset.parse::<Preset>().map_err(inv)?;
        if let Some(dt) = self.stepper.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(ConfigError::Invariant(format!("dt > 0 violated (dt = {dt})")));
            }
        }
        if !(self.stepper.t_end.is_finite() && self.stepper.t_end >= 0.0) {
            return Err(ConfigError::Invariant(format!(
                "t_end ≥ 0 violated (t_end = {})",
                self.stepper.t_end
            )));
        }
        if let Some(tol) = self.monitors.tolerance {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(ConfigError::Invariant(format!(
                    "tolerance ≥ 0 violated (tolerance = {tol})"
                )));
            }
        }
        if self.stepper.ledger_stride == 0 {
            return Err(ConfigError::Invariant("ledger_stride ≥ 1 violated".into()));
        }
        for name in &self.constants.names {
            name.parse::<micropolar::analysis::ConstantName>().map_err(inv)?;
        }
        if self.depend.deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(ConfigError::Invariant("perturbation sizes δ ≥ 0 violated".into()));
        }
        if self.converge.resolutions.len() < 2 || self.converge.resolutions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Invariant(
                "converge.resolutions must list at least two increasing mode counts".into(),
            ));
        }
        if let Some(path) = &self.initial.checkpoint {
            if !path.is_file() {
                return Err(ConfigError::Invariant(format!(
                    "checkpoint {} is not a readable file",
                    path.display()
                )));
            }
        }
        if let Some(path) = &self.verify.ledger {
            if !path.is_file() {
                return Err(ConfigError::Invariant(format!(
                    "ledger {} is not a readable file",
                    path.display()
                )));
            }
        }
        Ok(())
    }
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), ConfigError> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(ConfigError::Override(key.to_string()));
        }
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| ConfigError::Override(format!("{key}: `{}` is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

/// Applies `key=value` with dotted keys; values parse as JSON, else as strings.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::Override(assignment.to_string()))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(root, key.trim(), value)
}

/// Parses, applies overrides, fills defaults and validates.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut value: Value = if text.trim().is_empty() {
        Value::Object(Default::default())
    } else {
        serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?
    };
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| ConfigError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &[])
}
