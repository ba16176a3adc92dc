//! Experiment configuration stored as TOML.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::{FbmMethod, TimeGrid};
use crate::sde::fields::{BuiltinField, VectorFieldSet};
use crate::specfun::GreyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Specfun,
    Moments,
    Cf,
    Covariance,
    Fbm,
    Fernique,
    Young,
    Euler,
    Substitution,
    Regularity,
    Density,
    Tail,
    Finiteness,
    All,
}

impl Suite {
    pub const EACH: [Suite; 13] = [
        Suite::Specfun,
        Suite::Moments,
        Suite::Cf,
        Suite::Covariance,
        Suite::Fbm,
        Suite::Fernique,
        Suite::Young,
        Suite::Euler,
        Suite::Substitution,
        Suite::Regularity,
        Suite::Density,
        Suite::Tail,
        Suite::Finiteness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Moments => "moments",
            Suite::Cf => "cf",
            Suite::Covariance => "covariance",
            Suite::Fbm => "fbm",
            Suite::Fernique => "fernique",
            Suite::Young => "young",
            Suite::Euler => "euler",
            Suite::Substitution => "substitution",
            Suite::Regularity => "regularity",
            Suite::Density => "density",
            Suite::Tail => "tail",
            Suite::Finiteness => "finiteness",
            Suite::All => "all",
        }
    }

    /// Expands `all` into the individual suites.
    pub fn expand(selected: &[Suite]) -> Vec<Suite> {
        let mut out: Vec<Suite> = if selected.contains(&Suite::All) {
            Suite::EACH.to_vec()
        } else {
            selected.to_vec()
        };
        out.dedup();
        out
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub horizon: f64,
    pub steps: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            steps: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub streams: usize,
    /// Marginal Monte Carlo sample count.
    pub samples: usize,
    /// Path Monte Carlo count.
    pub paths: usize,
    pub method: FbmMethod,
    pub delta: f64,
    pub x0: Option<Vec<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            streams: 8,
            samples: 200_000,
            paths: 2_000,
            method: FbmMethod::Circulant,
            delta: 0.6,
            x0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reports: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    pub suites: Vec<Suite>,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            suites: vec![Suite::All],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: GreyParams,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_field")]
    pub field: BuiltinField,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
}

fn default_field() -> BuiltinField {
    BuiltinField::constant_scalar(1.0, 0.0)
}

impl ExperimentConfig {
    pub fn new(params: GreyParams) -> Self {
        Self {
            params,
            grid: GridConfig::default(),
            field: default_field(),
            run: RunConfig::default(),
            output: OutputConfig::default(),
            checks: ChecksConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.time_grid()?;
        self.fields()?;
        if self.run.streams == 0 {
            return Err(Error::Config("run.streams must be >= 1".into()));
        }
        if !(self.run.delta > 0.5 && self.run.delta < 1.0) {
            return Err(Error::Config(format!("run.delta = {} not in (1/2, 1)", self.run.delta)));
        }
        Ok(())
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.grid.horizon, self.grid.steps).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn fields(&self) -> Result<VectorFieldSet> {
        let f = VectorFieldSet::new(self.field.clone()).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(x0) = &self.run.x0 {
            if x0.len() != f.state_dim() {
                return Err(Error::Config(format!(
                    "run.x0 has {} entries, field has dimension {}",
                    x0.len(),
                    f.state_dim()
                )));
            }
        }
        Ok(f)
    }

    /// Initial point, zero when unset.
    pub fn x0(&self) -> Result<Vec<f64>> {
        let n = self.fields()?.state_dim();
        Ok(self.run.x0.clone().unwrap_or_else(|| vec![0.0; n]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let mut cfg = ExperimentConfig::new(GreyParams::new(1.5, 0.7).unwrap());
        cfg.field = BuiltinField::Sine {
            sigma: vec![vec![0.5, 0.1], vec![0.0, 0.3]],
            drift_amplitude: 0.2,
            frequency: 1.0 / 3.0,
            modulation: 0.1,
        };
        cfg.run.x0 = Some(vec![0.1, -0.2]);
        cfg.output.reports = Some("out/reports.json".into());
        cfg.checks.suites = vec![Suite::Moments, Suite::Tail];
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn minimal_file() {
        let cfg = ExperimentConfig::from_toml("[params]\nalpha = 1.5\nbeta = 0.5\n").unwrap();
        assert_eq!(cfg.grid, GridConfig::default());
        assert_eq!(cfg.checks.suites, vec![Suite::All]);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_toml("[params]\nalpha = 2.5\nbeta = 0.5\n").is_err());
        assert!(ExperimentConfig::from_toml("[params]\nalpha = 1.5\nbeta = 0.5\n[grid]\nhorizon = 1.0\nsteps = 0\n").is_err());
        assert!(ExperimentConfig::from_toml("[params]\nalpha = 1.5\nbeta = 0.5\nbogus = 1\n").is_err());
    }

    #[test]
    fn suite_names() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!(Suite::expand(&[Suite::All]).len(), 13);
    }
}
