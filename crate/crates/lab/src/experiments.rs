//! The experiment runners. Case `i` draws all randomness from the stream
//! `(seed, "<experiment>/<i>")`; cases run in parallel and merge by index.

use std::fs::File;
use std::io::BufReader;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use stablab_core::conv::{convolve_dense, iterate, ConvParams, ConvPath, IterateOptions, StepMetrics};
use stablab_core::linalg::{
    eig_hermitian, random_local_unitary, random_state, rank_eps, read_matrix, stream, write_matrix, DensityOperator,
};
use stablab_core::measures::{
    conditional_entropy, entanglement_entropy, extremality_report, max_entropy, negativity, von_neumann_entropy,
    Bipartition, RenyiOrder,
};
use stablab_core::stab::{
    engineered_partial_stabilizer, is_stabilizer, mean_state_threshold, random_isotropic_points,
    random_stabilizer_state, stabilizer_group, stabilizer_state_from_generators,
};
use stablab_core::tolerance::{SLACK_EXACT, SLACK_MONOTONE, SLACK_OPTIMIZER, TOL_PSD};
use stablab_core::weyl::{char_function, pauli_rank};
use stablab_core::wigner::{wigner_function, wigner_rank};
use stablab_core::{PhaseSpace, PrimeModulus};

use crate::config::{Checked, Experiment, ExperimentConfig, Family};
use crate::error::{LabError, Result};
use crate::report::{Curve, Report, Row, TrajectoryRecord};

/// Trace distance the CLT curve must fall below.
pub const CLT_TARGET: f64 = 1e-3;
/// Below this trace distance successive steps are roundoff and are not
/// required to decrease.
pub const DECAY_FLOOR: f64 = 1e-12;
/// Agreement tolerance for alternative evaluation paths and commuting diagrams.
pub const PATH_AGREEMENT: f64 = 1e-9;
/// Local-unitary invariance tolerance for measure values.
pub const LU_INVARIANCE: f64 = 1e-8;

type Rho = DensityOperator<f64>;
type Block = (usize, Vec<(f64, f64)>);

#[derive(Default)]
struct CaseOut {
    rows: Vec<Row>,
    curves: Vec<Vec<(f64, f64)>>,
    trajectory: Option<Vec<StepMetrics<f64>>>,
    extra: Option<Value>,
}

struct CurveSpec {
    name: String,
    x_label: &'static str,
    y_label: String,
    entropic: bool,
}

pub fn run(config: &ExperimentConfig) -> Result<Report> {
    match config.experiment {
        Experiment::Uncertainty => run_uncertainty(config),
        Experiment::Extremality => run_extremality(config),
        Experiment::Monotonicity => run_monotonicity(config),
        Experiment::Clt => run_clt(config),
        Experiment::State => run_state(config),
    }
}

fn case_rng(config: &ExperimentConfig, case: usize) -> ChaCha20Rng {
    stream(config.seed, &format!("{}/{}", config.experiment.name(), case))
}

fn run_cases(
    config: &ExperimentConfig,
    curves: Vec<CurveSpec>,
    f: impl Fn(usize, &mut ChaCha20Rng) -> Result<CaseOut> + Sync,
) -> Result<(Report, Vec<Option<Value>>)> {
    let outs = (0..config.count)
        .into_par_iter()
        .map(|case| f(case, &mut case_rng(config, case)))
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report::new(config);
    let mut blocks: Vec<Vec<Block>> = vec![Vec::new(); curves.len()];
    let mut extras = Vec::with_capacity(outs.len());
    for (case, out) in outs.into_iter().enumerate() {
        report.rows.extend(out.rows);
        for (k, pts) in out.curves.into_iter().enumerate() {
            blocks[k].push((case, pts));
        }
        if let Some(metrics) = out.trajectory {
            report.trajectories.push(TrajectoryRecord { case, metrics });
        }
        extras.push(out.extra);
    }
    report.curves = curves
        .into_iter()
        .zip(blocks)
        .map(|(s, blocks)| Curve { name: s.name, x_label: s.x_label.into(), y_label: s.y_label, entropic: s.entropic, blocks })
        .collect();
    Ok((report, extras))
}

fn hilbert_dim(config: &ExperimentConfig) -> usize {
    (config.d as usize).pow(config.n as u32)
}

fn random_any_rank(config: &ExperimentConfig, rng: &mut ChaCha20Rng) -> Result<Rho> {
    let dim = hilbert_dim(config);
    let k = rng.random_range(1..=dim);
    Ok(random_state(config.n, config.d as usize, k, rng)?)
}

fn random_full_rank(config: &ExperimentConfig, rng: &mut ChaCha20Rng) -> Result<Rho> {
    Ok(random_state(config.n, config.d as usize, hilbert_dim(config), rng)?)
}

fn random_stabilizer(config: &ExperimentConfig, m: PrimeModulus, rng: &mut ChaCha20Rng) -> Result<Rho> {
    let r = rng.random_range(0..=config.n);
    Ok(random_stabilizer_state(config.n, m, r, rng)?)
}

/// Stabilizer state whose generators all carry the trivial phase.
fn zero_phase_stabilizer(config: &ExperimentConfig, m: PrimeModulus, rng: &mut ChaCha20Rng) -> Result<Rho> {
    let r = rng.random_range(1..=config.n);
    let space = PhaseSpace::new(m, config.n)?;
    let gens: Vec<_> = random_isotropic_points(space, r, rng)?.into_iter().map(|x| (x, 0)).collect();
    Ok(stabilizer_state_from_generators(config.n, m, &gens)?)
}

fn default_cut(n: usize) -> Result<Bipartition> {
    Ok(Bipartition::leading(n, n / 2)?)
}

fn min_eigenvalue(rho: &Rho) -> Result<f64> {
    Ok(eig_hermitian(rho.as_operator())?.min())
}

fn pair_rows(rows: &mut Vec<Row>, case: usize, family: &str, names: [&str; 2], lhs: f64, rhs: f64, expected: bool) {
    let equal = (lhs - rhs).abs() <= SLACK_EXACT;
    rows.push(Row::geq(case, family, names[0], lhs, rhs, SLACK_EXACT).entropic());
    rows.push(
        Row::decided(case, family, names[1], lhs, rhs, lhs - rhs, equal == expected)
            .entropic()
            .note(format!("equality={equal} expected={expected}")),
    );
}

/// Rank-support inequalities and their equality classification for one state.
pub fn uncertainty_rows(case: usize, family: &str, rho: &Rho) -> Result<Vec<Row>> {
    let n = rho.num_qudits();
    let d = rho.local_dim()?;
    let nld = n as f64 * (d as f64).ln();
    let smax = max_entropy(rho)?;
    let ln_p = (pauli_rank(rho)? as f64).ln();
    let stab = is_stabilizer(rho)?;
    let pure = rank_eps(rho.as_operator())? == 1;
    let mut rows = Vec::new();
    pair_rows(
        &mut rows,
        case,
        family,
        ["S_max + ln chi_P >= n ln d", "S_max + ln chi_P equality iff stabilizer"],
        smax + ln_p,
        nld,
        stab,
    );
    if d % 2 == 1 {
        let ln_w = (wigner_rank(rho)? as f64).ln();
        pair_rows(
            &mut rows,
            case,
            family,
            ["S_max + ln chi_W >= n ln d", "S_max + ln chi_W equality iff pure stabilizer"],
            smax + ln_w,
            nld,
            stab && pure,
        );
        pair_rows(
            &mut rows,
            case,
            family,
            ["ln chi_P + ln chi_W >= 2n ln d", "ln chi_P + ln chi_W equality iff stabilizer"],
            ln_p + ln_w,
            2.0 * nld,
            stab,
        );
    }
    Ok(rows)
}

pub fn run_uncertainty(config: &ExperimentConfig) -> Result<Report> {
    let checked = config.check()?;
    let (report, _) = run_cases(config, Vec::new(), |case, rng| {
        let (family, rho) = match (config.family, case) {
            (Family::Mixed, 0) => ("maximally-mixed", DensityOperator::maximally_mixed(config.n, config.d as usize)),
            (Family::Stabilizer, _) => ("stabilizer", random_stabilizer(config, checked.modulus, rng)?),
            (Family::Mixed, c) if c % 2 == 1 => ("stabilizer", random_stabilizer(config, checked.modulus, rng)?),
            _ => ("random", random_any_rank(config, rng)?),
        };
        Ok(CaseOut { rows: uncertainty_rows(case, family, &rho)?, ..CaseOut::default() })
    })?;
    Ok(report)
}

fn extremality_name(measure: &str) -> String {
    if measure == "N" {
        "N[rho] >= N[M(rho)]".into()
    } else {
        format!("{measure}[rho] <= {measure}[M(rho)]")
    }
}

fn extremality_rows(case: usize, family: &str, rho: &Rho, cut: &Bipartition, alphas: &[RenyiOrder]) -> Result<Vec<Row>> {
    let rep = extremality_report(rho, cut, alphas)?;
    let mut rows = Vec::new();
    for r in &rep.rows {
        let row = Row::decided(case, family, &extremality_name(&r.measure), r.value_rho, r.value_mean, r.gap, r.sign_ok);
        rows.push(if r.measure == "N" { row } else { row.entropic() });
    }
    if family == "stabilizer" {
        for r in &rep.rows {
            let row = Row::within(case, family, &format!("{} gap zero on stabilizers", r.measure), r.value_rho, r.value_mean, SLACK_EXACT);
            rows.push(if r.measure == "N" { row } else { row.entropic() });
        }
    }
    Ok(rows)
}

pub fn run_extremality(config: &ExperimentConfig) -> Result<Report> {
    let checked = config.check()?;
    let cut = default_cut(config.n)?;
    let (report, _) = run_cases(config, Vec::new(), |case, rng| {
        let kind = match config.family {
            Family::Random => 0,
            Family::Stabilizer => 1,
            Family::Mixed => case % 4,
        };
        let rows = match kind {
            0 => extremality_rows(case, "random", &random_any_rank(config, rng)?, &cut, &checked.alphas)?,
            1 => extremality_rows(case, "stabilizer", &random_stabilizer(config, checked.modulus, rng)?, &cut, &checked.alphas)?,
            2 => {
                let r = rng.random_range(1..config.n);
                let k = rng.random_range(1..=hilbert_dim(config));
                let rho = engineered_partial_stabilizer(config.n, checked.modulus, r, k, rng)?;
                extremality_rows(case, "engineered", &rho, &cut, &checked.alphas)?
            }
            _ => {
                let rho = random_full_rank(config, rng)?;
                let u = random_local_unitary(config.n, config.d as usize, rng);
                let twin = rho.conjugate_by(&u)?;
                let a = extremality_report(&rho, &cut, &checked.alphas)?;
                let b = extremality_report(&twin, &cut, &checked.alphas)?;
                let mut rows = extremality_rows(case, "lu-duplicate", &rho, &cut, &checked.alphas)?;
                for (x, y) in a.rows.iter().zip(&b.rows) {
                    let name = format!("{} local-unitary invariant", x.measure);
                    let row = Row::within(case, "lu-duplicate", &name, x.value_rho, y.value_rho, LU_INVARIANCE);
                    rows.push(if x.measure == "N" { row } else { row.entropic() });
                }
                rows
            }
        };
        Ok(CaseOut { rows, ..CaseOut::default() })
    })?;
    Ok(report)
}

fn monotone_rows(rows: &mut Vec<Row>, case: usize, family: &str, name: &str, values: &[f64], slack: f64) {
    for (k, w) in values.windows(2).enumerate() {
        rows.push(Row::leq(case, family, name, w[0], w[1], slack).entropic().note(format!("L={}", k + 1)));
    }
}

fn conv_params(checked: &Checked) -> ConvParams {
    checked.params.expect("validated config carries (s, t)")
}

pub fn run_monotonicity(config: &ExperimentConfig) -> Result<Report> {
    let checked = config.check()?;
    let params = conv_params(&checked);
    let cut = if config.n >= 2 { Some(default_cut(config.n)?) } else { None };
    let mut specs =
        vec![CurveSpec { name: "entropy".into(), x_label: "L", y_label: "S".into(), entropic: true }];
    if cut.is_some() {
        specs.push(CurveSpec { name: "ent_entropy".into(), x_label: "L", y_label: "S(A)".into(), entropic: true });
        for a in &checked.alphas {
            specs.push(CurveSpec {
                name: format!("cond_entropy_{a}"),
                x_label: "L",
                y_label: format!("S_{a}(A|B)"),
                entropic: true,
            });
        }
    }
    let (report, _) = run_cases(config, specs, |case, rng| {
        let stabilizer = match config.family {
            Family::Random => false,
            Family::Stabilizer => true,
            Family::Mixed => case % 5 == 4,
        };
        let (family, rho) = if stabilizer {
            ("stabilizer", random_stabilizer(config, checked.modulus, rng)?)
        } else {
            ("random", random_full_rank(config, rng)?)
        };
        let opts = IterateOptions { cut: cut.clone(), alpha: checked.alphas[0], path: ConvPath::Auto };
        let traj = iterate(&rho, &params, checked.steps, &opts)?;
        let mut out = CaseOut::default();
        let entropy: Vec<f64> = traj.metrics.iter().map(|m| m.entropy).collect();
        monotone_rows(&mut out.rows, case, family, "S[L] <= S[L+1]", &entropy, SLACK_MONOTONE);
        out.curves.push(points(&entropy));
        if let Some(cut) = &cut {
            let ent: Vec<f64> = traj.metrics.iter().map(|m| m.ent_entropy.expect("cut given")).collect();
            monotone_rows(&mut out.rows, case, family, "S(A)[L] <= S(A)[L+1]", &ent, SLACK_MONOTONE);
            out.curves.push(points(&ent));
            for (i, &a) in checked.alphas.iter().enumerate() {
                let values: Vec<f64> = if i == 0 {
                    traj.metrics.iter().map(|m| m.cond_entropy.expect("cut given")).collect()
                } else {
                    traj.states.iter().map(|s| Ok(conditional_entropy(s, cut, a)?.value)).collect::<Result<_>>()?
                };
                let name = format!("S_{a}(A|B)[L] <= S_{a}(A|B)[L+1]");
                monotone_rows(&mut out.rows, case, family, &name, &values, SLACK_OPTIMIZER);
                out.curves.push(points(&values));
            }
            let marginal = traj.states[1].partial_trace(cut.a())?;
            let rho_a = rho.partial_trace(cut.a())?;
            let direct = convolve_dense(&rho_a, &rho_a, &params)?;
            out.rows.push(Row::within(
                case,
                family,
                "Tr_B commutes with convolution",
                marginal.max_abs_diff(&direct),
                0.0,
                PATH_AGREEMENT,
            ));
        }
        if traj.path == ConvPath::Fast {
            let dense_opts = IterateOptions { cut: None, alpha: RenyiOrder::ONE, path: ConvPath::Dense };
            let dense = iterate(&rho, &params, checked.steps, &dense_opts)?;
            let diff = traj.states.iter().zip(&dense.states).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
            out.rows.push(Row::within(case, family, "fast path == dense path", diff, 0.0, PATH_AGREEMENT));
        }
        let worst = traj.states.iter().map(min_eigenvalue).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::INFINITY, f64::min);
        out.rows.push(Row::geq(case, family, "valid state along trajectory", worst, 0.0, TOL_PSD).note("lhs = min eigenvalue"));
        out.trajectory = Some(traj.metrics);
        Ok(out)
    })?;
    Ok(report)
}

fn points(values: &[f64]) -> Vec<(f64, f64)> {
    values.iter().enumerate().map(|(k, &v)| (k as f64, v)).collect()
}

pub fn run_clt(config: &ExperimentConfig) -> Result<Report> {
    let checked = config.check()?;
    let params = conv_params(&checked);
    let specs = vec![CurveSpec { name: "decay".into(), x_label: "L", y_label: "trace distance".into(), entropic: false }];
    let (mut report, extras) = run_cases(config, specs, |case, rng| {
        let stabilizer = match config.family {
            Family::Random => false,
            Family::Stabilizer => true,
            Family::Mixed => case % 5 == 4,
        };
        let (family, rho) = if stabilizer {
            ("zero-phase stabilizer", zero_phase_stabilizer(config, checked.modulus, rng)?)
        } else {
            ("random", random_full_rank(config, rng)?)
        };
        let traj = iterate(&rho, &params, checked.steps, &IterateOptions::default())?;
        let dist: Vec<f64> = traj.metrics.iter().map(|m| m.trace_dist_to_mean).collect();
        let mut out = CaseOut::default();
        let drift = mean_state_threshold(traj.last())?.state.max_abs_diff(&traj.mean);
        out.rows.push(Row::within(case, family, "M(rho_L) == M(rho)", drift, 0.0, PATH_AGREEMENT));
        if stabilizer {
            let worst = dist.iter().copied().fold(0.0, f64::max);
            out.rows.push(Row::within(case, family, "flat trajectory", worst, 0.0, PATH_AGREEMENT));
        } else {
            let rise = dist
                .windows(2)
                .filter(|w| w[0] > DECAY_FLOOR)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max);
            let rise = if rise.is_finite() { rise } else { 0.0 };
            out.rows.push(
                Row::decided(case, family, "strictly decreasing trace distance", rise, 0.0, -rise, rise < 0.0)
                    .note("lhs = largest step change"),
            );
            let last = *dist.last().expect("trajectory holds the input");
            out.rows.push(Row::leq(case, family, "final trace distance < 1e-3", last, CLT_TARGET, 0.0));
            let first = dist.iter().position(|&x| x < CLT_TARGET);
            if let Some(row) = out.rows.last_mut() {
                row.note = match first {
                    Some(l) => format!("first L below target = {l}"),
                    None => "target not reached".into(),
                };
            }
            out.extra = Some(json!({ "case": case, "first_L": first }));
        }
        out.curves.push(points(&dist));
        out.trajectory = Some(traj.metrics);
        Ok(out)
    })?;
    let per_case: Vec<Value> = extras.into_iter().flatten().collect();
    let all: Option<Vec<u64>> = per_case.iter().map(|v| v["first_L"].as_u64()).collect();
    let qualifying = all.map(|v| v.into_iter().max().unwrap_or(0));
    report.extras.insert("qualifying_L".into(), json!(qualifying));
    report.extras.insert("first_L_per_case".into(), Value::Array(per_case));
    Ok(report)
}

fn load_state(config: &ExperimentConfig) -> Result<Rho> {
    let path = config.input.as_ref().ok_or_else(|| LabError::Config("state needs an input matrix file".into()))?;
    let file = File::open(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
    let op = read_matrix::<f64, _>(BufReader::new(file)).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
    DensityOperator::new(op).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
}

/// Single-state analysis of a matrix file: measure values, the rank
/// inequalities, extremality rows when `n >= 2`, and phase-space tables.
pub fn run_state(config: &ExperimentConfig) -> Result<Report> {
    let rho = load_state(config)?;
    let mut config = config.clone();
    config.n = rho.num_qudits();
    config.d = u32::try_from(rho.local_dim()?).map_err(|_| LabError::Config("local dimension too large".into()))?;
    let checked = config.check()?;
    let mut report = Report::new(&config);
    let scale = report.unit_scale();
    let family = "input";
    report.rows = uncertainty_rows(0, family, &rho)?;
    let mean = mean_state_threshold(&rho)?;
    let group = stabilizer_group(&rho)?;
    let mut measures = serde_json::Map::new();
    measures.insert("entropy".into(), json!(von_neumann_entropy(&rho)? / scale));
    measures.insert("max_entropy".into(), json!(max_entropy(&rho)? / scale));
    measures.insert("purity".into(), json!(rho.purity()));
    measures.insert("pauli_rank".into(), json!(pauli_rank(&rho)?));
    measures.insert("stabilizer_rank".into(), json!(group.rank()));
    measures.insert("is_stabilizer".into(), json!(is_stabilizer(&rho)?));
    if config.d % 2 == 1 {
        measures.insert("wigner_rank".into(), json!(wigner_rank(&rho)?));
    }
    if config.n >= 2 {
        let cut = default_cut(config.n)?;
        report.rows.extend(extremality_rows(0, family, &rho, &cut, &checked.alphas)?);
        measures.insert("entanglement_entropy".into(), json!(entanglement_entropy(&rho, &cut)? / scale));
        measures.insert("negativity".into(), json!(negativity(&rho, &cut)?));
        let mut cond = serde_json::Map::new();
        for &a in &checked.alphas {
            cond.insert(a.to_string(), json!(conditional_entropy(&rho, &cut, a)?.value / scale));
        }
        measures.insert("conditional_entropy".into(), Value::Object(cond));
    }
    report.extras.insert("measures".into(), Value::Object(measures));
    let mut buf = Vec::new();
    char_function(&rho)?.write_csv(&mut buf)?;
    report.attachments.push(("char.csv".into(), buf));
    if config.d % 2 == 1 {
        let mut buf = Vec::new();
        wigner_function(&rho)?.write_csv(&mut buf)?;
        report.attachments.push(("wigner.csv".into(), buf));
    }
    report.attachments.push(("group.json".into(), format!("{}\n", group.to_json()).into_bytes()));
    let mut buf = Vec::new();
    write_matrix(mean.state.as_operator(), &mut buf)?;
    report.attachments.push(("mean.txt".into(), buf));
    Ok(report)
}
