use std::fs;
use std::path::Path;
use std::process::Command;

use stablab::emit::emit;
use stablab::{run, Experiment, ExperimentConfig, Family, Unit};
use stablab_core::linalg::{stream, write_matrix, DensityOperator};
use stablab_core::stab::{is_stabilizer, random_stabilizer_state};
use stablab_core::PrimeModulus;

const BIN: &str = env!("CARGO_BIN_EXE_stablab");

fn stablab(args: &[&str]) -> (i32, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn config(e: Experiment, d: u32, n: usize, count: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(e);
    c.d = d;
    c.n = n;
    c.count = count;
    c
}

#[test]
fn uncertainty_equality_set_is_the_stabilizer_subset() {
    let report = run(&config(Experiment::Uncertainty, 3, 2, 100)).unwrap();
    assert_eq!(report.violations(), 0);
    let cases = 100;
    let mut stabilizer_cases = 0;
    for case in 0..cases {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.case == case).collect();
        assert_eq!(rows.len(), 6);
        let eq = |name: &str| rows.iter().find(|r| r.inequality == name).unwrap().note.starts_with("equality=true");
        let p = eq("S_max + ln chi_P equality iff stabilizer");
        let w = eq("S_max + ln chi_W equality iff pure stabilizer");
        let pw = eq("ln chi_P + ln chi_W equality iff stabilizer");
        let family = rows[0].family.as_str();
        assert_eq!(p, family != "random", "case {case}");
        assert_eq!(pw, p);
        if w {
            assert!(p);
        }
        stabilizer_cases += usize::from(p);
    }
    assert!(stabilizer_cases >= 50);
}

#[test]
fn maximally_mixed_and_pure_stabilizer_rows() {
    let report = run(&config(Experiment::Uncertainty, 3, 2, 1)).unwrap();
    let nld = 2.0 * 3f64.ln();
    let lhs = |name: &str| report.rows.iter().find(|r| r.inequality == name).unwrap().lhs;
    assert!((lhs("S_max + ln chi_P >= n ln d") - nld).abs() < 1e-12);
    assert!((lhs("S_max + ln chi_W >= n ln d") - 3.0 * nld).abs() < 1e-12);
    assert!((lhs("ln chi_P + ln chi_W >= 2n ln d") - 2.0 * nld).abs() < 1e-12);

    let m = PrimeModulus::new(3).unwrap();
    let pure = random_stabilizer_state::<f64>(2, m, 2, &mut stream(4, "pure-stab")).unwrap();
    let rows = stablab::experiments::uncertainty_rows(0, "stabilizer", &pure).unwrap();
    for r in &rows {
        assert!(r.passed());
        assert!((r.lhs - r.rhs).abs() < 1e-9, "{}", r.inequality);
    }
}

#[test]
fn qubit_uncertainty_has_no_wigner_rows() {
    let report = run(&config(Experiment::Uncertainty, 2, 3, 12)).unwrap();
    assert_eq!(report.violations(), 0);
    assert!(report.rows.iter().all(|r| r.inequality.contains("chi_P") && !r.inequality.contains("chi_W")));
}

#[test]
fn extremality_stabilizer_gaps_vanish() {
    let mut c = config(Experiment::Extremality, 3, 2, 6);
    c.family = Family::Stabilizer;
    let report = run(&c).unwrap();
    assert_eq!(report.violations(), 0);
    assert_eq!(report.rows_for("S gap zero on stabilizers").count(), 6);
    let mut rng = stream(9, "check");
    let rho = random_stabilizer_state::<f64>(2, PrimeModulus::new(3).unwrap(), 1, &mut rng).unwrap();
    assert!(is_stabilizer(&rho).unwrap());
}

#[test]
fn clt_reports_decay_and_flat_cases() {
    let report = run(&config(Experiment::Clt, 7, 1, 5)).unwrap();
    assert_eq!(report.violations(), 0);
    assert_eq!(report.rows_for("flat trajectory").count(), 1);
    assert_eq!(report.rows_for("strictly decreasing trace distance").count(), 4);
    let q = report.extras["qualifying_L"].as_u64().unwrap();
    assert!((1..=16).contains(&q));
    let decay = &report.curves[0];
    assert_eq!(decay.name, "decay");
    assert_eq!(decay.blocks.len(), 5);
    let flat = &decay.blocks[4].1;
    assert!(flat.iter().all(|&(_, y)| y < 1e-9));
}

#[test]
fn unit_switch_rescales_entropic_columns_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(Experiment::Extremality, 3, 2, 4);
    let nats = run(&c).unwrap();
    c.unit = Unit::Dits;
    let dits = run(&c).unwrap();
    emit(&nats, &dir.path().join("n")).unwrap();
    emit(&dits, &dir.path().join("d")).unwrap();
    let parse = |p: &Path| -> Vec<Vec<String>> {
        csv::Reader::from_path(p).unwrap().records().map(|r| r.unwrap().iter().map(String::from).collect()).collect()
    };
    let a = parse(&dir.path().join("n/rows.csv"));
    let b = parse(&dir.path().join("d/rows.csv"));
    assert_eq!(a.len(), b.len());
    let ln3 = 3f64.ln();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[6], y[6], "verdicts unchanged");
        let (vx, vy): (f64, f64) = (x[3].parse().unwrap(), y[3].parse().unwrap());
        if x[2].starts_with('N') {
            assert_eq!(vx, vy);
        } else {
            assert!((vx / ln3 - vy).abs() < 1e-11 * (1.0 + vx.abs()));
        }
    }
}

#[test]
fn empty_report_has_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&config(Experiment::Uncertainty, 3, 1, 0)).unwrap();
    emit(&report, dir.path()).unwrap();
    assert_eq!(fs::read_to_string(dir.path().join("rows.csv")).unwrap(), "case,family,inequality,lhs,rhs,gap,verdict,note\n");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for run_dir in ["a", "b"] {
        let out = dir.path().join(run_dir);
        let (code, _) = stablab(&["monotonicity", "--count", "3", "--seed", "42", "--L", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    let a = read_dir_sorted(&dir.path().join("a"));
    let b = read_dir_sorted(&dir.path().join("b"));
    assert!(a.iter().any(|(n, _)| n == "entropy.dat"));
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    assert_eq!(stablab(&["uncertainty", "--count", "3"]).0, 0);
    assert_eq!(stablab(&["uncertainty", "--d", "4"]).0, 3);
    assert_eq!(stablab(&["uncertainty", "--d", "2", "--n", "8"]).0, 3);
    assert_eq!(stablab(&["extremality", "--n", "1"]).0, 3);
    assert_eq!(stablab(&["clt", "--d", "3"]).0, 3);
    assert_eq!(stablab(&["clt", "--s", "1", "--t", "1"]).0, 3);
    assert_eq!(stablab(&["extremality", "--alpha", "0.25"]).0, 3);
    assert_eq!(stablab(&["clt", "--unit", "bits"]).0, 3);
    assert_eq!(stablab(&["nonsense"]).0, 3);
    assert_eq!(stablab(&["--help"]).0, 0);
}

#[test]
fn violations_give_exit_status_two() {
    // L = 1 leaves the trajectory far from the mean state
    let (code, stdout) = stablab(&["clt", "--count", "2", "--L", "1"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("violations: 2"));
}

#[test]
fn state_subcommand_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let m = PrimeModulus::new(3).unwrap();
    let rho = random_stabilizer_state::<f64>(2, m, 1, &mut stream(2, "state-cli")).unwrap();
    let input = dir.path().join("rho.txt");
    let mut buf = Vec::new();
    write_matrix(rho.as_operator(), &mut buf).unwrap();
    fs::write(&input, buf).unwrap();
    let out = dir.path().join("out");
    let (code, stdout) = stablab(&["state", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    for f in ["rows.csv", "summary.json", "char.csv", "wigner.csv", "group.json", "mean.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let mean: stablab_core::Operator =
        stablab_core::linalg::read_matrix(fs::File::open(out.join("mean.txt")).map(std::io::BufReader::new).unwrap()).unwrap();
    assert!(mean.max_abs_diff(&rho) < 1e-9);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["extras"]["measures"]["stabilizer_rank"], 1);
    assert_eq!(summary["header"]["seed"], 1);
    assert!(summary["header"]["tolerances"]["slack_exact"].as_f64().unwrap() > 0.0);

    fs::write(&input, "4 2 2\n0 0 1 0\n").unwrap();
    assert_eq!(stablab(&["state", input.to_str().unwrap()]).0, 3);
    let not_a_state = DensityOperator::<f64>::maximally_mixed(1, 2).scale(2.0);
    let mut buf = Vec::new();
    write_matrix(&not_a_state, &mut buf).unwrap();
    fs::write(&input, buf).unwrap();
    assert_eq!(stablab(&["state", input.to_str().unwrap()]).0, 3);
}
