use std::path::Path;
use std::process::{Command, Output};

use attrest::moments::mse_t1;
use attrest::population::summarize_population;
use attrest::DesignMoments;
use attrest_cli::io::load_population_csv;

fn attrest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attrest"))
        .args(args)
        .output()
        .expect("spawn attrest")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn generate(dir: &Path, name: &str, n: &str, p: &str, rho: &str, seed: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let out = attrest(&[
        "generate",
        "--N",
        n,
        "--P",
        p,
        "--rho",
        rho,
        "--seed",
        seed,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

fn csv_column(csv: &str, row: &str, column: &str) -> f64 {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == column).unwrap();
    let line = lines.find(|l| l.starts_with(&format!("{row},"))).unwrap();
    line.split(',').nth(idx).unwrap().parse().unwrap()
}

#[test]
fn generate_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pop.csv");
    let out = attrest(&[
        "generate",
        "--N",
        "120",
        "--P",
        "0.3",
        "--rho",
        "0.6",
        "--seed",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let echoed = stdout(&out);
    let s = summarize_population(&load_population_csv(&path).unwrap()).unwrap();
    assert!(echoed.contains(&format!("N={}", s.size)));
    assert!(echoed.contains(&format!("P={}", s.p)));
    assert!(echoed.contains(&format!("rho_pb={}", s.rho_pb)));
    assert!(echoed.contains(&format!("X={}", s.x_bar)));
    assert!((s.rho_pb - 0.6).abs() < 1e-9);
}

#[test]
fn perfect_correlation_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pop.csv");
    let out = attrest(&[
        "generate",
        "--N",
        "50",
        "--P",
        "0.5",
        "--rho",
        "1.0",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn unwritable_output_fails() {
    let out = attrest(&["table1", "--out", "/nonexistent-dir/report.md"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent-dir"));
}

#[test]
fn enumeration_limit_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "pop.csv", "40", "0.5", "0.5", "3");
    let out = attrest(&[
        "enumerate",
        "--population",
        path.to_str().unwrap(),
        "--n",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let small = attrest(&[
        "enumerate",
        "--population",
        path.to_str().unwrap(),
        "--n",
        "3",
        "--format",
        "csv",
    ]);
    assert!(small.status.success());
    assert!(stdout(&small).starts_with("estimator,"));
}

#[test]
fn malformed_population_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "phi,x\n1,2.0\n0,3.0\n2,4.0\n").unwrap();
    let out = attrest(&[
        "simulate",
        "--population",
        path.to_str().unwrap(),
        "--n",
        "2",
        "--reps",
        "10",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn same_seed_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "pop.csv", "200", "0.4", "0.7", "11");
    let p = path.to_str().unwrap();
    let args = [
        "simulate",
        "--population",
        p,
        "--n",
        "20",
        "--reps",
        "5000",
        "--seed",
        "17",
        "--format",
        "csv",
    ];
    let a = attrest(&args);
    let b = attrest(&[&args[..], &["--threads", "3"]].concat());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = attrest(&[
        "simulate",
        "--population",
        p,
        "--n",
        "20",
        "--reps",
        "5000",
        "--seed",
        "18",
        "--format",
        "csv",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn single_replicate_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "pop.csv", "60", "0.5", "0.5", "2");
    let out = attrest(&[
        "simulate",
        "--population",
        path.to_str().unwrap(),
        "--n",
        "10",
        "--reps",
        "1",
        "--seed",
        "0",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("reps=1"));
}

#[test]
fn theory_from_json_and_census() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(
        &path,
        r#"{"n": 11, "N": 40, "P": 0.525, "x_bar": 14.4, "rho": 0.897, "c_p": 0.963, "c_x": 0.3085}"#,
    )
    .unwrap();
    let out = attrest(&[
        "theory",
        "--summary",
        path.to_str().unwrap(),
        "--t3",
        "alpha=0,beta=1",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let csv = stdout(&out);
    assert!((csv_column(&csv, "t1", "pre") - 189.425).abs() < 1e-3);

    std::fs::write(
        &path,
        r#"{"n": 40, "N": 40, "P": 0.525, "x_bar": 14.4, "rho": 0.897, "c_p": 0.963, "c_x": 0.3085}"#,
    )
    .unwrap();
    let out = attrest(&["theory", "--summary", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("census"));

    std::fs::write(
        &path,
        r#"{"n": 11, "N": 40, "P": 1.5, "x_bar": 1, "rho": 0, "c_p": 1, "c_x": 1}"#,
    )
    .unwrap();
    assert_eq!(
        attrest(&["theory", "--summary", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn simulated_ratio_efficiency_tracks_theory() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "pop.csv", "500", "0.4", "0.9", "21");
    let out = attrest(&[
        "simulate",
        "--population",
        path.to_str().unwrap(),
        "--n",
        "50",
        "--reps",
        "100000",
        "--seed",
        "5",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let (theory, empirical) = (
        csv_column(&csv, "t1", "pre"),
        csv_column(&csv, "t1", "emp_pre"),
    );
    assert!(
        (empirical - theory).abs() / theory < 0.10,
        "theory {theory} empirical {empirical}"
    );

    let s = summarize_population(&load_population_csv(&path).unwrap()).unwrap();
    let dm = DesignMoments::for_sample_size(50, s).unwrap();
    assert!((csv_column(&csv, "t1", "mse") - mse_t1(&dm)).abs() < 1e-15);
}
