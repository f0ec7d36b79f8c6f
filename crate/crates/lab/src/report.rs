//! Report rows, aggregates and tracked curves.

use std::collections::BTreeMap;

use serde::Serialize;
use stablab_core::tolerance::Tolerances;

use crate::config::{ExperimentConfig, Unit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One asserted check on one case. For inequality rows `gap` is the signed
/// margin (nonnegative when the inequality holds); for agreement rows it is
/// `|lhs - rhs|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub case: usize,
    pub family: String,
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub verdict: Verdict,
    pub note: String,
    #[serde(skip)]
    pub entropic: bool,
}

impl Row {
    fn base(case: usize, family: &str, inequality: &str, lhs: f64, rhs: f64, gap: f64, ok: bool) -> Self {
        Row {
            case,
            family: family.to_string(),
            inequality: inequality.to_string(),
            lhs,
            rhs,
            gap,
            verdict: Verdict::from_bool(ok),
            note: String::new(),
            entropic: false,
        }
    }

    /// `lhs >= rhs - slack`.
    pub fn geq(case: usize, family: &str, inequality: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Row::base(case, family, inequality, lhs, rhs, lhs - rhs, lhs - rhs >= -slack)
    }

    /// `lhs <= rhs + slack`.
    pub fn leq(case: usize, family: &str, inequality: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Row::base(case, family, inequality, lhs, rhs, rhs - lhs, rhs - lhs >= -slack)
    }

    /// `|lhs - rhs| <= tol`.
    pub fn within(case: usize, family: &str, inequality: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = (lhs - rhs).abs();
        Row::base(case, family, inequality, lhs, rhs, gap, gap <= tol)
    }

    /// A row whose verdict was decided by the caller.
    pub fn decided(case: usize, family: &str, inequality: &str, lhs: f64, rhs: f64, gap: f64, ok: bool) -> Self {
        Row::base(case, family, inequality, lhs, rhs, gap, ok)
    }

    pub fn entropic(mut self) -> Self {
        self.entropic = true;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// A tracked quantity, one block of `(x, y)` points per case.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub entropic: bool,
    pub blocks: Vec<(usize, Vec<(f64, f64)>)>,
}

/// Per-step metrics of one convolution trajectory, in nats.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub case: usize,
    pub metrics: Vec<stablab_core::conv::StepMetrics<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub unit: Unit,
    pub config: ExperimentConfig,
    pub tolerances: Tolerances,
}

impl Header {
    pub fn new(config: &ExperimentConfig) -> Self {
        Header {
            tool: "stablab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: config.experiment.name().into(),
            seed: config.seed,
            unit: config.unit,
            config: config.clone(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Aggregate {
    pub inequality: String,
    pub checks: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub header: Header,
    pub rows: Vec<Row>,
    pub curves: Vec<Curve>,
    pub trajectories: Vec<TrajectoryRecord>,
    /// Extra files emitted verbatim, by file name.
    pub attachments: Vec<(String, Vec<u8>)>,
    pub extras: BTreeMap<String, serde_json::Value>,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Report {
            header: Header::new(config),
            rows: Vec::new(),
            curves: Vec::new(),
            trajectories: Vec::new(),
            attachments: Vec::new(),
            extras: BTreeMap::new(),
        }
    }

    /// Counts per inequality, in order of first appearance.
    pub fn aggregates(&self) -> Vec<Aggregate> {
        let mut out: Vec<Aggregate> = Vec::new();
        for row in &self.rows {
            let idx = match out.iter().position(|a| a.inequality == row.inequality) {
                Some(i) => i,
                None => {
                    out.push(Aggregate { inequality: row.inequality.clone(), checks: 0, violations: 0 });
                    out.len() - 1
                }
            };
            out[idx].checks += 1;
            out[idx].violations += usize::from(!row.passed());
        }
        out
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.passed()).count()
    }

    pub fn rows_for<'a>(&'a self, inequality: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.inequality == inequality)
    }

    /// Divisor applied to entropic values under the configured unit.
    pub fn unit_scale(&self) -> f64 {
        match self.header.unit {
            Unit::Nats => 1.0,
            Unit::Dits => self.header.config.ln_d(),
        }
    }
}
