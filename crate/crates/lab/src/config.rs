//! Experiment configuration and its validation against the core size caps.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use stablab_core::conv::{default_params, find_params, ConvParams};
use stablab_core::measures::RenyiOrder;
use stablab_core::tolerance::{PHASE_SPACE_CAP, TABLE_DIM_CAP};
use stablab_core::PrimeModulus;

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Uncertainty,
    Extremality,
    Monotonicity,
    Clt,
    State,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Uncertainty => "uncertainty",
            Experiment::Extremality => "extremality",
            Experiment::Monotonicity => "monotonicity",
            Experiment::Clt => "clt",
            Experiment::State => "state",
        }
    }
}

/// Unit of entropic columns in emitted files. Verdicts are always taken in nats.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Nats,
    Dits,
}

impl FromStr for Unit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nats" => Ok(Unit::Nats),
            "dits" => Ok(Unit::Dits),
            _ => Err(format!("unknown unit {s:?} (expected nats or dits)")),
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Nats => "nats",
            Unit::Dits => "dits",
        })
    }
}

/// Which states an experiment generates. `Mixed` interleaves the families
/// the experiment knows about by case index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[default]
    Mixed,
    Random,
    Stabilizer,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mixed" => Ok(Family::Mixed),
            "random" => Ok(Family::Random),
            "stabilizer" => Ok(Family::Stabilizer),
            _ => Err(format!("unknown family {s:?} (expected mixed, random or stabilizer)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub d: u32,
    pub family: Family,
    pub count: usize,
    pub seed: u64,
    pub alphas: Vec<f64>,
    pub s: Option<u32>,
    pub t: Option<u32>,
    #[serde(rename = "L")]
    pub steps: Option<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub unit: Unit,
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

/// Typed view of a config that passed [`ExperimentConfig::check`].
#[derive(Clone, Debug)]
pub struct Checked {
    pub modulus: PrimeModulus,
    pub alphas: Vec<RenyiOrder>,
    pub params: Option<ConvParams>,
    pub steps: usize,
}

impl ExperimentConfig {
    /// Defaults per experiment.
    pub fn new(experiment: Experiment) -> Self {
        let (d, n, count) = match experiment {
            Experiment::Uncertainty => (3, 2, 100),
            Experiment::Extremality => (2, 2, 100),
            Experiment::Monotonicity => (7, 1, 20),
            Experiment::Clt => (7, 1, 20),
            Experiment::State => (2, 1, 1),
        };
        ExperimentConfig {
            experiment,
            n,
            d,
            family: Family::Mixed,
            count,
            seed: 1,
            alphas: vec![0.5, 1.0, 2.0],
            s: None,
            t: None,
            steps: None,
            out: None,
            unit: Unit::Nats,
            input: None,
        }
    }

    pub fn ln_d(&self) -> f64 {
        f64::from(self.d).ln()
    }

    pub fn check(&self) -> Result<Checked> {
        let bad = |m: String| Err(LabError::Config(m));
        let modulus = PrimeModulus::new(self.d).map_err(|e| LabError::Config(e.to_string()))?;
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        let d = self.d as usize;
        match d.checked_pow(self.n as u32) {
            Some(dim) if dim <= TABLE_DIM_CAP => {}
            _ => return bad(format!("d^n = {}^{} exceeds {TABLE_DIM_CAP}", self.d, self.n)),
        }
        match d.checked_pow(2 * self.n as u32) {
            Some(size) if size <= PHASE_SPACE_CAP => {}
            _ => return bad(format!("d^(2n) = {}^{} exceeds {PHASE_SPACE_CAP}", self.d, 2 * self.n)),
        }
        if self.experiment == Experiment::Extremality && self.n < 2 {
            return bad("extremality needs a bipartition, so n >= 2".into());
        }
        if self.alphas.is_empty() {
            return bad("at least one alpha is required".into());
        }
        let alphas = self
            .alphas
            .iter()
            .map(|&a| RenyiOrder::new(a).map_err(|_| LabError::Config(format!("alpha {a} must be finite and >= 0.5"))))
            .collect::<Result<Vec<_>>>()?;
        let needs_params = matches!(self.experiment, Experiment::Monotonicity | Experiment::Clt);
        let params = match (self.s, self.t) {
            (Some(s), Some(t)) => Some(ConvParams::new(modulus, s, t).map_err(|e| LabError::Config(e.to_string()))?),
            (None, None) if self.d == 7 => Some(default_params()),
            (None, None) => find_params(modulus).first().copied(),
            _ => return bad("--s and --t must be given together".into()),
        };
        if needs_params && params.is_none() {
            return bad(format!("no (s, t) with s^2 + t^2 = 1 and s, t != 0 exists mod {}", self.d));
        }
        let steps = self.steps.unwrap_or(match self.experiment {
            Experiment::Monotonicity if self.n == 1 => 8,
            Experiment::Monotonicity => 4,
            Experiment::Clt => 16,
            _ => 0,
        });
        if needs_params && steps == 0 {
            return bad("L must be at least 1".into());
        }
        if self.experiment == Experiment::State && self.input.is_none() {
            return bad("state needs an input matrix file".into());
        }
        Ok(Checked { modulus, alphas, params, steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for e in [Experiment::Uncertainty, Experiment::Extremality, Experiment::Monotonicity, Experiment::Clt] {
            ExperimentConfig::new(e).check().unwrap();
        }
    }

    #[test]
    fn caps_and_params_rejected() {
        let mut c = ExperimentConfig::new(Experiment::Uncertainty);
        c.d = 4;
        assert!(matches!(c.check(), Err(LabError::Config(_))));
        c.d = 2;
        c.n = 8;
        assert!(c.check().is_err());
        c.n = 7;
        assert!(c.check().is_ok());
        let mut m = ExperimentConfig::new(Experiment::Monotonicity);
        m.d = 3;
        assert!(m.check().is_err());
        m.d = 7;
        m.s = Some(1);
        m.t = Some(1);
        assert!(m.check().is_err());
        m.s = Some(5);
        m.t = Some(2);
        assert_eq!(m.check().unwrap().params.unwrap().s(), 5);
        let mut x = ExperimentConfig::new(Experiment::Extremality);
        x.n = 1;
        assert!(x.check().is_err());
        x.n = 2;
        x.alphas = vec![0.4];
        assert!(x.check().is_err());
    }
}
