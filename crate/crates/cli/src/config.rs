//! Run configuration.
//!
//! The file format is flat `key = value` text (TOML syntax) with one section per
//! experiment and a `[law]` section for the disorder law. Every table is read
//! strictly: unknown keys are rejected. Missing keys take the defaults listed
//! on the section types below.
//!
//! ```text
//! master_seed = 7
//!
//! [law]
//! law = "twopoint"
//! r = 0.5
//! b = 1.0
//! p = 0.5
//!
//! [flux-curve]
//! sites = 256
//! rho = [0.3, 0.5, 0.7]
//! ```

use std::fmt;
use std::path::PathBuf;

use dtasep_core::DisorderLaw;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MASTER_SEED: u64 = 20_160_901;

/// A configuration value that failed validation, with the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration `{}`: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    EnvSample,
    LppTau,
    CouplingAudit,
    Plateau,
    FluxCurve,
    FundamentalDiagram,
}

impl Experiment {
    pub fn label(self) -> &'static str {
        match self {
            Experiment::EnvSample => "env-sample",
            Experiment::LppTau => "lpp-tau",
            Experiment::CouplingAudit => "coupling-audit",
            Experiment::Plateau => "plateau",
            Experiment::FluxCurve => "flux-curve",
            Experiment::FundamentalDiagram => "fundamental-diagram",
        }
    }
}

/// `[law]`: `law` is one of `point` (`r`), `twopoint` (`r` slow, `b` fast,
/// `p` probability of slow), `uniform` (`r` low, `b` high) or `mixture`
/// (`base` rate with probability `1 - epsilon`, otherwise a draw from the
/// `slow` law given by `slow_r`, `slow_b`, `slow_p`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSection {
    pub law: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slow: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slow_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slow_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slow_p: Option<f64>,
}

impl Default for LawSection {
    fn default() -> Self {
        Self::from_law(&DisorderLaw::TwoPoint {
            slow: 0.5,
            fast: 1.0,
            p_slow: 0.5,
        })
    }
}

fn simple_law(prefix: &str, name: &str, r: Option<f64>, b: Option<f64>, p: Option<f64>) -> Result<DisorderLaw, ConfigError> {
    let need = |v: Option<f64>, key: &str| v.ok_or_else(|| ConfigError::new(format!("law.{prefix}{key}"), format!("required for law `{name}`")));
    let forbid = |v: Option<f64>, key: &str| match v {
        Some(_) => Err(ConfigError::new(format!("law.{prefix}{key}"), format!("not a parameter of law `{name}`"))),
        None => Ok(()),
    };
    match name {
        "point" => {
            forbid(b, "b")?;
            forbid(p, "p")?;
            Ok(DisorderLaw::PointMass { rate: need(r, "r")? })
        }
        "twopoint" => Ok(DisorderLaw::TwoPoint {
            slow: need(r, "r")?,
            fast: need(b, "b")?,
            p_slow: need(p, "p")?,
        }),
        "uniform" => {
            forbid(p, "p")?;
            Ok(DisorderLaw::Uniform {
                lo: need(r, "r")?,
                hi: need(b, "b")?,
            })
        }
        other => Err(ConfigError::new(
            format!("law.{prefix}law"),
            format!("unknown law `{other}` (expected point, twopoint, uniform or mixture)"),
        )),
    }
}

impl LawSection {
    pub fn from_law(law: &DisorderLaw) -> Self {
        let mut s = LawSection {
            law: String::new(),
            r: None,
            b: None,
            p: None,
            base: None,
            epsilon: None,
            slow: None,
            slow_r: None,
            slow_b: None,
            slow_p: None,
        };
        let (name, r, b, p) = simple_parts(law);
        match law {
            DisorderLaw::Mixture { base, epsilon, slow } => {
                let (sname, sr, sb, sp) = simple_parts(slow);
                s.law = "mixture".into();
                s.base = Some(*base);
                s.epsilon = Some(*epsilon);
                s.slow = Some(sname.into());
                (s.slow_r, s.slow_b, s.slow_p) = (sr, sb, sp);
            }
            _ => {
                s.law = name.into();
                (s.r, s.b, s.p) = (r, b, p);
            }
        }
        s
    }

    pub fn to_law(&self) -> Result<DisorderLaw, ConfigError> {
        let law = if self.law == "mixture" {
            for (key, v) in [("r", self.r), ("b", self.b), ("p", self.p)] {
                if v.is_some() {
                    return Err(ConfigError::new(format!("law.{key}"), "mixture laws use base, epsilon and slow_* keys"));
                }
            }
            let slow_name = self
                .slow
                .as_deref()
                .ok_or_else(|| ConfigError::new("law.slow", "required for law `mixture`"))?;
            if slow_name == "mixture" {
                return Err(ConfigError::new("law.slow", "nested mixtures are not supported"));
            }
            DisorderLaw::Mixture {
                base: self.base.ok_or_else(|| ConfigError::new("law.base", "required for law `mixture`"))?,
                epsilon: self
                    .epsilon
                    .ok_or_else(|| ConfigError::new("law.epsilon", "required for law `mixture`"))?,
                slow: Box::new(simple_law("slow_", slow_name, self.slow_r, self.slow_b, self.slow_p)?),
            }
        } else {
            for (key, present) in [
                ("base", self.base.is_some()),
                ("epsilon", self.epsilon.is_some()),
                ("slow", self.slow.is_some()),
                ("slow_r", self.slow_r.is_some()),
                ("slow_b", self.slow_b.is_some()),
                ("slow_p", self.slow_p.is_some()),
            ] {
                if present {
                    return Err(ConfigError::new(format!("law.{key}"), "only mixture laws take this key"));
                }
            }
            simple_law("", &self.law, self.r, self.b, self.p)?
        };
        law.validate().map_err(|e| core_to_config("law", e))?;
        Ok(law)
    }
}

fn simple_parts(law: &DisorderLaw) -> (&'static str, Option<f64>, Option<f64>, Option<f64>) {
    match law {
        DisorderLaw::PointMass { rate } => ("point", Some(*rate), None, None),
        DisorderLaw::TwoPoint { slow, fast, p_slow } => ("twopoint", Some(*slow), Some(*fast), Some(*p_slow)),
        DisorderLaw::Uniform { lo, hi } => ("uniform", Some(*lo), Some(*hi), None),
        DisorderLaw::Mixture { .. } => ("mixture", None, None, None),
    }
}

/// Maps a core parameter error onto a configuration key under `section`.
pub fn core_to_config(section: &str, e: dtasep_core::Error) -> ConfigError {
    match e {
        dtasep_core::Error::Parameter { field, reason } => ConfigError::new(format!("{section}.{field}"), reason),
        other => ConfigError::new(section, other.to_string()),
    }
}

/// `[env-sample]`: site rates on `i_min..=i_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvSampleParams {
    pub i_min: i64,
    pub i_max: i64,
}

impl Default for EnvSampleParams {
    fn default() -> Self {
        Self { i_min: 0, i_max: 999 }
    }
}

/// `[lpp-tau]`: passage times at the points `(x[k], y[k])` along a size ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LppTauParams {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sizes: Vec<u64>,
    pub replicas: usize,
}

impl Default for LppTauParams {
    fn default() -> Self {
        Self {
            x: vec![0.0, 1.0, -0.5],
            y: vec![1.0, 1.0, 1.0],
            sizes: vec![250, 500, 1000, 2000],
            replicas: 50,
        }
    }
}

/// `[coupling-audit]`: a distributional audit of `Z = Y + U` with `samples`
/// cells, and the path-sum audit at `(path_x, path_y)` scaled by `path_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingAuditParams {
    pub samples: usize,
    pub path_x: f64,
    pub path_y: f64,
    pub path_n: u64,
    pub path_replicas: usize,
}

impl Default for CouplingAuditParams {
    fn default() -> Self {
        Self {
            samples: 100_000,
            path_x: 1.0,
            path_y: 1.0,
            path_n: 500,
            path_replicas: 200,
        }
    }
}

/// `[plateau]`: the density grid `rho_min, rho_min + rho_step, ... <= rho_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlateauParams {
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_step: f64,
}

impl Default for PlateauParams {
    fn default() -> Self {
        Self {
            rho_min: 0.01,
            rho_max: 0.99,
            rho_step: 0.01,
        }
    }
}

impl PlateauParams {
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.rho_max - self.rho_min) / self.rho_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| {
                let rho = self.rho_min + k as f64 * self.rho_step;
                // Snap to the decimal grid so that 0.07 prints as 0.07.
                (rho * 1e9).round() / 1e9
            })
            .collect()
    }
}

/// `[flux-curve]` and `[fundamental-diagram]`: ring simulations at every
/// density in `rho`. `burn_in` defaults to `10 L^2 / r`; `realizations = 1`
/// shares one environment across the grid, larger values average over that
/// many environments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluxCurveParams {
    pub sites: usize,
    pub rho: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    pub window: f64,
    pub batches: usize,
    pub realizations: usize,
}

impl Default for FluxCurveParams {
    fn default() -> Self {
        Self {
            sites: 256,
            rho: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            burn_in: None,
            window: 20_000.0,
            batches: 16,
            realizations: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    EnvSample(EnvSampleParams),
    LppTau(LppTauParams),
    CouplingAudit(CouplingAuditParams),
    Plateau(PlateauParams),
    FluxCurve(FluxCurveParams),
    FundamentalDiagram(FluxCurveParams),
}

/// The file as written: every section optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    law: Option<LawSection>,
    #[serde(rename = "env-sample", skip_serializing_if = "Option::is_none")]
    env_sample: Option<EnvSampleParams>,
    #[serde(rename = "lpp-tau", skip_serializing_if = "Option::is_none")]
    lpp_tau: Option<LppTauParams>,
    #[serde(rename = "coupling-audit", skip_serializing_if = "Option::is_none")]
    coupling_audit: Option<CouplingAuditParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plateau: Option<PlateauParams>,
    #[serde(rename = "flux-curve", skip_serializing_if = "Option::is_none")]
    flux_curve: Option<FluxCurveParams>,
    #[serde(rename = "fundamental-diagram", skip_serializing_if = "Option::is_none")]
    fundamental_diagram: Option<FluxCurveParams>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub master_seed: Option<u64>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

/// A fully resolved run: the experiment, its parameters and the law.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub master_seed: u64,
    /// Worker threads; 0 lets the pool pick. Outputs do not depend on it.
    pub workers: usize,
    pub output_dir: PathBuf,
    pub law: DisorderLaw,
    pub params: Params,
}

fn parse_error(e: toml::de::Error) -> ConfigError {
    let message = e.message().to_string();
    // serde reports unknown keys as "unknown field `x`, expected ..."
    let field = message
        .split('`')
        .nth(1)
        .filter(|_| message.starts_with("unknown field") || message.starts_with("missing field"))
        .unwrap_or("config")
        .to_string();
    ConfigError::new(field, message)
}

impl RunConfig {
    /// Reads `text` for `experiment` (the file's own `experiment` key, if any,
    /// must agree) and applies `overrides`.
    pub fn from_text(text: &str, experiment: Option<Experiment>, overrides: &Overrides) -> Result<Self, ConfigError> {
        let file: ConfigFile = toml::from_str(text).map_err(parse_error)?;
        let experiment = match (file.experiment, experiment) {
            (Some(a), Some(b)) if a != b => {
                return Err(ConfigError::new(
                    "experiment",
                    format!("file is for `{}` but `{}` was requested", a.label(), b.label()),
                ))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(ConfigError::new("experiment", "no experiment given")),
        };
        let params = match experiment {
            Experiment::EnvSample => Params::EnvSample(file.env_sample.unwrap_or_default()),
            Experiment::LppTau => Params::LppTau(file.lpp_tau.unwrap_or_default()),
            Experiment::CouplingAudit => Params::CouplingAudit(file.coupling_audit.unwrap_or_default()),
            Experiment::Plateau => Params::Plateau(file.plateau.unwrap_or_default()),
            Experiment::FluxCurve => Params::FluxCurve(file.flux_curve.unwrap_or_default()),
            Experiment::FundamentalDiagram => Params::FundamentalDiagram(file.fundamental_diagram.unwrap_or_default()),
        };
        let config = RunConfig {
            experiment,
            master_seed: overrides.master_seed.or(file.master_seed).unwrap_or(DEFAULT_MASTER_SEED),
            workers: overrides.workers.or(file.workers).unwrap_or(0),
            output_dir: overrides
                .output_dir
                .clone()
                .or(file.output_dir)
                .unwrap_or_else(|| PathBuf::from("out")),
            law: file.law.unwrap_or_default().to_law()?,
            params,
        };
        config.validate()?;
        Ok(config)
    }

    /// The canonical text of this run: every value spelled out, only the
    /// selected experiment's section present. Reading it back gives `self`.
    pub fn canonical(&self) -> String {
        let mut file = ConfigFile {
            experiment: Some(self.experiment),
            master_seed: Some(self.master_seed),
            workers: Some(self.workers),
            output_dir: Some(self.output_dir.clone()),
            law: Some(LawSection::from_law(&self.law)),
            ..ConfigFile::default()
        };
        match &self.params {
            Params::EnvSample(p) => file.env_sample = Some(p.clone()),
            Params::LppTau(p) => file.lpp_tau = Some(p.clone()),
            Params::CouplingAudit(p) => file.coupling_audit = Some(p.clone()),
            Params::Plateau(p) => file.plateau = Some(p.clone()),
            Params::FluxCurve(p) => file.flux_curve = Some(p.clone()),
            Params::FundamentalDiagram(p) => file.fundamental_diagram = Some(p.clone()),
        }
        toml::to_string(&file).expect("run configuration is always representable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.master_seed > i64::MAX as u64 {
            return Err(ConfigError::new("master_seed", "must be below 2^63"));
        }
        let sec = self.experiment.label();
        let field = |key: &str| format!("{sec}.{key}");
        match &self.params {
            Params::EnvSample(p) => {
                if p.i_max < p.i_min {
                    return Err(ConfigError::new(field("i_max"), "must be at least i_min"));
                }
            }
            Params::LppTau(p) => {
                if p.x.is_empty() || p.x.len() != p.y.len() {
                    return Err(ConfigError::new(field("y"), "x and y must be non-empty and of equal length"));
                }
                for (&x, &y) in p.x.iter().zip(&p.y) {
                    if !(x.is_finite() && y.is_finite() && y >= 0.0 && x + y >= 0.0 && (x, y) != (0.0, 0.0)) {
                        return Err(ConfigError::new(field("x"), format!("({x}, {y}) is not a nonzero point of the wedge y >= 0, x + y >= 0")));
                    }
                }
                if p.sizes.is_empty() || p.sizes[0] == 0 || p.sizes.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ConfigError::new(field("sizes"), "must be positive and strictly increasing"));
                }
                if p.replicas < 2 {
                    return Err(ConfigError::new(field("replicas"), "at least 2"));
                }
            }
            Params::CouplingAudit(p) => {
                if p.samples < 1000 {
                    return Err(ConfigError::new(field("samples"), "at least 1000"));
                }
                if !(p.path_x >= 0.0 && p.path_y >= 0.0 && p.path_x + p.path_y > 0.0) {
                    return Err(ConfigError::new(field("path_x"), "the path target needs x >= 0, y >= 0, x + y > 0"));
                }
                if p.path_n == 0 {
                    return Err(ConfigError::new(field("path_n"), "must be positive"));
                }
                if p.path_replicas < 2 {
                    return Err(ConfigError::new(field("path_replicas"), "at least 2"));
                }
            }
            Params::Plateau(p) => {
                for (key, v) in [("rho_min", p.rho_min), ("rho_max", p.rho_max)] {
                    if !(v > 0.0 && v < 1.0) {
                        return Err(ConfigError::new(field(key), format!("{v} is outside (0, 1)")));
                    }
                }
                if p.rho_max < p.rho_min {
                    return Err(ConfigError::new(field("rho_max"), "must be at least rho_min"));
                }
                if !(p.rho_step > 0.0) {
                    return Err(ConfigError::new(field("rho_step"), "must be positive"));
                }
            }
            Params::FluxCurve(p) | Params::FundamentalDiagram(p) => {
                if p.sites < 4 {
                    return Err(ConfigError::new(field("sites"), "at least 4"));
                }
                if p.rho.is_empty() {
                    return Err(ConfigError::new(field("rho"), "at least one density"));
                }
                if let Some(bad) = p.rho.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
                    return Err(ConfigError::new(field("rho"), format!("{bad} is outside (0, 1)")));
                }
                if let Some(b) = p.burn_in {
                    if !(b >= 0.0 && b.is_finite()) {
                        return Err(ConfigError::new(field("burn_in"), "must be a non-negative time"));
                    }
                }
                if !(p.window > 0.0 && p.window.is_finite()) {
                    return Err(ConfigError::new(field("window"), "must be a positive time"));
                }
                if p.batches < 8 {
                    return Err(ConfigError::new(field("batches"), "at least 8"));
                }
                if p.realizations == 0 {
                    return Err(ConfigError::new(field("realizations"), "at least 1"));
                }
            }
        }
        Ok(())
    }
}
