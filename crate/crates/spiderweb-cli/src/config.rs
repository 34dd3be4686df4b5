//! The run configuration: one TOML file per run.

use serde::{Deserialize, Serialize};
use spiderweb::constructor::{ConstructSettings, DeltaSpec};
use spiderweb::entire::EntireFunction;
use spiderweb::xnum::{from_decimal, Enclosure, ExtReal};
use std::path::{Path, PathBuf};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    pub function: Option<FunctionSource>,
    pub construct: Option<ConstructConfig>,
    pub certify: Option<CertifyConfig>,
    pub eps: Option<EpsConfig>,
    pub classify: Option<ClassifyConfig>,
    pub verify: Option<VerifyConfig>,
    /// Directory relative paths are resolved against; not part of the file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Where the entire function comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields, rename_all = "snake_case")]
pub enum FunctionSource {
    /// `f(z) = z^3`.
    Cubic {},
    /// `a_1 = exp(log_a1)`, `a_{n+1} = a_n^3`, `p_n = 1`.
    SlowGrowth { log_a1: f64, count: usize },
    /// A function JSON file.
    File { path: PathBuf },
    /// The ledger of a construction output.
    Construction { path: PathBuf },
}

fn default_k_max() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructConfig {
    pub delta: DeltaSpec,
    /// Smallest allowed `log a_1`, as decimal text.
    pub log_a1: String,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default)]
    pub settings: Option<ConstructSettings>,
}

fn default_r() -> f64 {
    10.0
}

fn default_horizon() -> usize {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Check this certificate file instead of building one.
    pub check: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsConfig {
    #[serde(default = "default_r")]
    pub r: f64,
    pub horizon: usize,
    #[serde(default = "EpsConfig::default_density")]
    pub grid_density: usize,
    #[serde(default = "EpsConfig::default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "EpsConfig::default_budget")]
    pub cell_budget: usize,
    #[serde(default)]
    pub sum_from: usize,
}

impl EpsConfig {
    fn default_density() -> usize {
        16
    }
    fn default_rel_tol() -> f64 {
        1e-9
    }
    fn default_budget() -> usize {
        6000
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    #[serde(default = "default_r")]
    pub r: f64,
    pub u_lo: f64,
    pub u_hi: f64,
    pub samples: usize,
    pub lag_max: usize,
    pub n_max: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub construction: PathBuf,
    #[serde(default = "VerifyConfig::default_small")]
    pub small_samples: usize,
    #[serde(default = "VerifyConfig::default_pairs")]
    pub convexity_pairs: usize,
    #[serde(default = "VerifyConfig::default_pairs")]
    pub cap_pairs: usize,
    #[serde(default = "VerifyConfig::default_horizon")]
    pub eps_horizon: usize,
}

impl VerifyConfig {
    fn default_small() -> usize {
        50
    }
    fn default_pairs() -> usize {
        200
    }
    fn default_horizon() -> usize {
        7
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.version != SCHEMA_VERSION {
            return Err(CliError::Invalid(format!("config version {} does not match schema version {SCHEMA_VERSION}", self.version)));
        }
        for r in [self.certify.as_ref().map(|c| c.r), self.eps.as_ref().map(|c| c.r), self.classify.as_ref().map(|c| c.r)]
            .into_iter()
            .flatten()
        {
            if !(r > 1.0 && r.is_finite()) {
                return Err(CliError::Invalid(format!("R must exceed 1, got {r}")));
            }
        }
        if let Some(e) = &self.eps {
            positive("eps.rel_tol", e.rel_tol)?;
            positive("eps.grid_density", e.grid_density as f64)?;
            positive("eps.cell_budget", e.cell_budget as f64)?;
        }
        if let Some(c) = &self.classify {
            if !(c.u_lo < c.u_hi) {
                return Err(CliError::Invalid("classify needs u_lo < u_hi".into()));
            }
        }
        if let Some(s) = self.construct.as_ref().and_then(|c| c.settings.as_ref()) {
            if !(s.slack >= 1.0) {
                return Err(CliError::Invalid(format!("construct.settings.slack must be at least 1, got {}", s.slack)));
            }
            positive("construct.settings.rel_width_limit", s.rel_width_limit)?;
            positive("construct.settings.step_budget", s.step_budget as f64)?;
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn section<'a, T>(&self, s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        s.as_ref().ok_or_else(|| CliError::Invalid(format!("config has no [{name}] section")))
    }

    pub fn function(&self) -> Result<EntireFunction, CliError> {
        let read_json = |p: &Path| -> Result<serde_json::Value, CliError> {
            let p = self.resolve(p);
            let text = std::fs::read_to_string(&p).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))
        };
        match self.section(&self.function, "function")? {
            FunctionSource::Cubic {} => Ok(EntireFunction::cubic()),
            FunctionSource::SlowGrowth { log_a1, count } => {
                positive("function.log_a1", *log_a1)?;
                Ok(EntireFunction::slow_growth(*log_a1, *count))
            }
            FunctionSource::File { path } => {
                serde_json::from_value(read_json(path)?).map_err(|e| CliError::Invalid(format!("function file: {e}")))
            }
            FunctionSource::Construction { path } => {
                let v = read_json(path)?;
                let st = spiderweb::constructor::ConstructionState::from_json(&v["construction"])
                    .map_err(|e| CliError::Invalid(format!("construction file: {e}")))?;
                st.function().map_err(|e| CliError::Invalid(e.to_string()))
            }
        }
    }
}

pub fn log_of(r: f64) -> Enclosure {
    Enclosure::from_f64(r).ln().expect("R > 1 checked at load")
}

pub fn parse_ext(s: &str, what: &str) -> Result<ExtReal, CliError> {
    from_decimal(s).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}
