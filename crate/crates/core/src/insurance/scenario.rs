//! JSON scenario files for the insurance experiments.

use serde::{Deserialize, Serialize};

use super::lapse::LapseModel;
use super::mortality::{mortality_weights, MortalityTable};
use crate::distributions::{uniform_excluding_zero, DiscreteDistribution, ProcessDistribution};
use crate::error::{Error, Result};

pub const DEFAULT_SCALE: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionSpec {
    Named(String),
    Probabilities(Vec<f64>),
}

/// Independent, identically distributed steps on a shared grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub steps: usize,
    pub resolution: usize,
    pub grid: Grid,
    pub distribution: DistributionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lapse: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mortality: Option<MortalityTable>,
    /// Integer scaling applied to whole-life weights before rounding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<u64>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("scenario: {e}")))?;
        if s.steps == 0 {
            return Err(Error::InvalidArgument("scenario needs at least one step".into()));
        }
        Ok(s)
    }

    pub fn step_distribution(&self) -> Result<DiscreteDistribution> {
        let d = match &self.distribution {
            DistributionSpec::Named(name) if name == "uniform_excluding_zero" => {
                uniform_excluding_zero(self.resolution)?
            }
            DistributionSpec::Named(name) => {
                return Err(Error::InvalidDistribution(format!("unknown distribution `{name}`")))
            }
            DistributionSpec::Probabilities(p) => DiscreteDistribution::on_unit_grid(self.resolution, p.clone())?,
        };
        d.with_grid(self.grid.z_min, self.grid.z_max)
    }

    pub fn process(&self) -> Result<ProcessDistribution> {
        ProcessDistribution::iid(self.steps, self.step_distribution()?)
    }

    pub fn lapse_model(&self) -> Result<LapseModel> {
        let rates = self.lapse.clone().ok_or_else(|| Error::InvalidArgument("scenario has no lapse table".into()))?;
        LapseModel::new(rates)
    }

    pub fn mortality_table(&self) -> Result<&MortalityTable> {
        self.mortality.as_ref().ok_or_else(|| Error::InvalidArgument("scenario has no mortality table".into()))
    }

    pub fn mortality_weights(&self) -> Result<Vec<f64>> {
        mortality_weights(self.mortality_table()?, self.steps)
    }

    pub fn scale(&self) -> u64 {
        self.scale.unwrap_or(DEFAULT_SCALE)
    }
}
