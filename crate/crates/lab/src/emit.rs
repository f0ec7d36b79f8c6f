//! Writing a report to disk: `rows.csv`, `summary.json`, one `.dat` file per
//! curve and one `trajectory_<case>.csv` per trajectory. Output depends only
//! on the report, so identical configs give identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use stablab_core::conv::TRAJECTORY_HEADER;

use crate::error::{LabError, Result};
use crate::report::{Aggregate, Curve, Header, Report, TrajectoryRecord};

pub const ROWS_HEADER: [&str; 8] = ["case", "family", "inequality", "lhs", "rhs", "gap", "verdict", "note"];

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn csv_err(e: csv::Error) -> LabError {
    LabError::Io(std::io::Error::other(e.to_string()))
}

pub fn write_rows<W: Write>(report: &Report, w: W) -> Result<()> {
    let scale = report.unit_scale();
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ROWS_HEADER).map_err(csv_err)?;
    for r in &report.rows {
        let k = if r.entropic { scale } else { 1.0 };
        let verdict = if r.passed() { "pass" } else { "fail" };
        out.write_record([
            r.case.to_string(),
            r.family.clone(),
            r.inequality.clone(),
            num(r.lhs / k),
            num(r.rhs / k),
            num(r.gap / k),
            verdict.to_string(),
            r.note.clone(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    header: &'a Header,
    cases: usize,
    rows: usize,
    violations: usize,
    aggregates: Vec<Aggregate>,
    extras: &'a std::collections::BTreeMap<String, serde_json::Value>,
}

pub fn summary_json(report: &Report) -> String {
    let cases = report.rows.iter().map(|r| r.case + 1).max().unwrap_or(0);
    let s = Summary {
        header: &report.header,
        cases,
        rows: report.rows.len(),
        violations: report.violations(),
        aggregates: report.aggregates(),
        extras: &report.extras,
    };
    let mut text = serde_json::to_string_pretty(&s).expect("summary serializes");
    text.push('\n');
    text
}

/// gnuplot data: two columns per line, blocks separated by two blank lines
/// so `index k` selects the k-th case.
pub fn write_curve<W: Write>(curve: &Curve, scale: f64, mut w: W) -> Result<()> {
    let k = if curve.entropic { scale } else { 1.0 };
    writeln!(w, "# {}: {} vs {}", curve.name, curve.x_label, curve.y_label)?;
    for (i, (case, points)) in curve.blocks.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
            writeln!(w)?;
        }
        writeln!(w, "# case {case}")?;
        for (x, y) in points {
            writeln!(w, "{} {}", x, num(y / k))?;
        }
    }
    Ok(())
}

pub fn write_trajectory<W: Write>(t: &TrajectoryRecord, scale: f64, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAJECTORY_HEADER).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(|x| num(x / scale)).unwrap_or_default();
    for m in &t.metrics {
        out.write_record([
            m.step.to_string(),
            num(m.entropy / scale),
            opt(m.ent_entropy),
            opt(m.cond_entropy),
            num(m.trace_dist_to_mean),
            m.pauli_rank.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes every artifact of `report` into `dir` (created if needed) and
/// returns the paths in write order.
pub fn emit(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let scale = report.unit_scale();
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    let mut rows = Vec::new();
    write_rows(report, &mut rows)?;
    put("rows.csv", rows)?;
    put("summary.json", summary_json(report).into_bytes())?;
    for c in &report.curves {
        let mut buf = Vec::new();
        write_curve(c, scale, &mut buf)?;
        put(&format!("{}.dat", c.name), buf)?;
    }
    for t in &report.trajectories {
        let mut buf = Vec::new();
        write_trajectory(t, scale, &mut buf)?;
        put(&format!("trajectory_{}.csv", t.case), buf)?;
    }
    for (name, bytes) in &report.attachments {
        put(name, bytes.clone())?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Experiment, ExperimentConfig};

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new(&ExperimentConfig::new(Experiment::Uncertainty));
        let mut buf = Vec::new();
        write_rows(&r, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "case,family,inequality,lhs,rhs,gap,verdict,note\n");
    }

    #[test]
    fn curve_blocks() {
        let c = Curve {
            name: "decay".into(),
            x_label: "L".into(),
            y_label: "trace distance".into(),
            entropic: false,
            blocks: vec![(0, vec![(0.0, 1.0), (1.0, 0.5)]), (3, vec![(0.0, 2.0)])],
        };
        let mut buf = Vec::new();
        write_curve(&c, 2.0, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# decay: L vs trace distance\n# case 0\n0 1.000000000000e0\n1 5.000000000000e-1\n\n\n# case 3\n0 2.000000000000e0\n"
        );
    }
}
