use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use schurkit::linalg::eigvalsh;
use schurkit::{duality_pair, schur_norm, Matrix, SchurMethod};
use schurkit_cli::MatrixFile;
use serde_json::Value;
use tempfile::TempDir;

fn schurkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schurkit"))
        .args(args)
        .env_remove("SCHURKIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn matrix(v: &Value) -> Matrix {
    let f: MatrixFile = serde_json::from_value(v.clone()).unwrap();
    f.to_matrix()
}

const DIAG_EXAMPLE: &str = r#"{"m":2,"n":2,"entries":[[[1,0],[0,0]],[[0,0],[-0.25,0]]]}"#;
const DIAG_PM1: &str = r#"{"m":2,"n":2,"entries":[[[1,0],[0,0]],[[0,0],[-1,0]]]}"#;
const ONES2: &str = r#"{"m":2,"n":2,"entries":[[[1,0],[1,0]],[[1,0],[1,0]]]}"#;

#[test]
fn schur_norm_of_the_two_by_two_example() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "diag_example.json", DIAG_EXAMPLE);
    for method in ["auto", "sdp"] {
        let o = schurkit(&["norm", "--kind", "schur", "--in", s(&f), "--method", method, "--json"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let r = json(&o);
        assert!((r["value"].as_f64().unwrap() - 1.0).abs() <= 1e-8);
        assert_eq!(r["verification"]["passed"], Value::Bool(true));
    }
}

#[test]
fn certify_plus_minus_diagonal() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "diag_pm1.json", DIAG_PM1);
    let o = schurkit(&["certify", "--in", s(&f), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert!((r["value"].as_f64().unwrap() - 2.0).abs() <= 1e-8);
    let z = matrix(&r["certificate"]);
    assert!(z.max_abs_diff(&Matrix::from_real_diag(&[1.0, -1.0])) <= 1e-8);
    assert_eq!(r["verification"]["passed"], Value::Bool(true));
    // Both sides are printed in the human form too.
    let text = stdout(&schurkit(&["certify", "--in", s(&f)]));
    assert!(
        text.contains("value: 2.0") && text.contains("pairing: [2.0,0.0]"),
        "{text}"
    );
}

#[test]
fn cbb_engines_agree_on_all_ones() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ones2.json", ONES2);
    let value = |method: &str| {
        let o = schurkit(&["norm", "--kind", "cbb", "--in", s(&f), "--method", method, "--json"]);
        assert_eq!(o.status.code(), Some(0));
        json(&o)["value"].as_f64().unwrap()
    };
    let (cp, sdp) = (value("cutting-plane"), value("sdp"));
    assert!((cp - 4.0).abs() <= 1e-6 && (sdp - 4.0).abs() <= 1e-6, "{cp} {sdp}");
}

#[test]
fn certify_success_means_the_certificate_rechecks() {
    let dir = TempDir::new().unwrap();
    for seed in 0..4 {
        let f = dir.path().join(format!("x{seed}.json"));
        let kind = if seed % 2 == 0 { "selfadjoint" } else { "general" };
        let o = schurkit(&[
            "gen",
            "--type",
            kind,
            "--n",
            "4",
            "--seed",
            &seed.to_string(),
            "--out",
            s(&f),
        ]);
        assert_eq!(o.status.code(), Some(0));
        for method in ["sdp", "cutting-plane"] {
            let o = schurkit(&["certify", "--in", s(&f), "--method", method, "--json"]);
            assert_eq!(o.status.code(), Some(0), "seed {seed} {method}");
            let r = json(&o);
            let x = MatrixFile::parse(&std::fs::read_to_string(&f).unwrap())
                .unwrap()
                .to_matrix();
            let z = matrix(&r["certificate"]);
            let value = r["value"].as_f64().unwrap();
            let tol = r["tol"].as_f64().unwrap();
            assert!((duality_pair(&x, &z).unwrap().re - value).abs() <= tol * (1.0 + value));
            assert!(schur_norm(&z, SchurMethod::Sdp, tol).unwrap().value <= 1.0 + tol);
        }
    }
}

#[test]
fn json_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    schurkit(&[
        "gen",
        "--type",
        "general",
        "--n",
        "3",
        "--m",
        "2",
        "--seed",
        "9",
        "--out",
        s(&a),
    ]);
    schurkit(&[
        "gen",
        "--type",
        "selfadjoint",
        "--n",
        "3",
        "--seed",
        "10",
        "--out",
        s(&b),
    ]);
    for args in [
        vec!["norm", "--kind", "cbb", "--in", s(&a), "--json"],
        vec!["norm", "--kind", "schur", "--in", s(&b), "--json"],
        vec!["factorize", "--kind", "schur-lr", "--in", s(&b), "--json"],
        vec!["check", "--in", s(&a), s(&b), "--trials", "20", "--seed", "4", "--json"],
    ] {
        let first = schurkit(&args);
        let second = schurkit(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn generated_files_parse_and_have_their_structure() {
    let dir = TempDir::new().unwrap();
    for (kind, m) in [("psd", 5), ("selfadjoint", 5), ("general", 3), ("diag", 5)] {
        for seed in 0..3 {
            let f = dir.path().join(format!("{kind}{seed}.json"));
            let mut args = vec!["gen", "--type", kind, "--n", "5", "--out", s(&f)];
            let seed_s = seed.to_string();
            let m_s = m.to_string();
            args.extend(["--seed", &seed_s]);
            if kind == "general" {
                args.extend(["--m", &m_s]);
            }
            assert_eq!(schurkit(&args).status.code(), Some(0));
            let x = MatrixFile::parse(&std::fs::read_to_string(&f).unwrap())
                .unwrap()
                .to_matrix();
            match kind {
                "psd" => assert!(eigvalsh(&x).unwrap()[0] >= -1e-10 * (1.0 + x.frobenius_norm())),
                "selfadjoint" => assert!(x.is_hermitian()),
                "diag" => assert!(x.is_diagonal() && x.as_slice().iter().all(|z| z.im == 0.0)),
                _ => assert_eq!(x.shape(), (3, 5)),
            }
        }
    }
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    schurkit(&["gen", "--type", "psd", "--n", "3", "--seed", "77", "--out", s(&a)]);
    let o = Command::new(env!("CARGO_BIN_EXE_schurkit"))
        .args(["gen", "--type", "psd", "--n", "3", "--out", s(&b)])
        .env("SCHURKIT_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // No seed at all is a usage error for gen.
    let o = schurkit(&["gen", "--type", "psd", "--n", "3", "--out", s(&b)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors_exit_with_one_and_name_the_row() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", r#"{"m":2,"n":2,"entries":[[[1,0],[0,0]]]}"#);
    let o = schurkit(&["norm", "--kind", "schur", "--in", s(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 1"));
    let o = schurkit(&["norm", "--kind", "schur", "--in", "/nonexistent/x.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = schurkit(&["norm", "--kind", "nope", "--in", s(&f)]);
    assert_eq!(o.status.code(), Some(1));
    let o = schurkit(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(schurkit(&["--help"]).status.code(), Some(0));
    // Preconditions: schur-lr needs a square self-adjoint input.
    let g = dir.path().join("g.json");
    schurkit(&[
        "gen",
        "--type",
        "general",
        "--n",
        "3",
        "--m",
        "2",
        "--seed",
        "1",
        "--out",
        s(&g),
    ]);
    assert_eq!(
        schurkit(&["factorize", "--kind", "schur-lr", "--in", s(&g)])
            .status
            .code(),
        Some(1)
    );
    let o = schurkit(&["norm", "--kind", "schur", "--in", s(&g), "--tol", "-1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tolerance_is_floored() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ones2.json", ONES2);
    let o = schurkit(&[
        "norm",
        "--kind",
        "cbb",
        "--in",
        s(&f),
        "--method",
        "sdp",
        "--tol",
        "1e-15",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["tol"].as_f64(), Some(1e-12));
    assert!(String::from_utf8_lossy(&o.stderr).contains("raised"));
}

#[test]
fn factorize_reports_verified_factors() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "diag_example.json", DIAG_EXAMPLE);
    for kind in ["cbb", "schur-lr", "sqrtp"] {
        let o = schurkit(&["factorize", "--kind", kind, "--in", s(&f), "--json"]);
        assert_eq!(o.status.code(), Some(0), "{kind}");
        let r = json(&o);
        assert_eq!(r["verification"]["passed"], Value::Bool(true), "{kind}");
    }
    let o = schurkit(&[
        "factorize",
        "--kind",
        "cbb",
        "--in",
        s(&f),
        "--method",
        "cutting-plane",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert!((r["value"].as_f64().unwrap() - 1.25).abs() <= 1e-7);
}

#[test]
fn batch_check_keeps_order_and_aggregates() {
    let dir = TempDir::new().unwrap();
    let mut files = Vec::new();
    for seed in 0..5 {
        let f = dir.path().join(format!("x{seed}.json"));
        schurkit(&[
            "gen",
            "--type",
            "selfadjoint",
            "--n",
            "3",
            "--seed",
            &seed.to_string(),
            "--out",
            s(&f),
        ]);
        files.push(f);
    }
    let missing = dir.path().join("missing.json");
    let mut args = vec!["check", "--trials", "20", "--json", "--in"];
    args.extend(files.iter().map(|f| s(f)));
    let o = schurkit(&args);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    let paths: Vec<&str> = r["instances"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["path"].as_str().unwrap())
        .collect();
    assert_eq!(paths, files.iter().map(|f| s(f)).collect::<Vec<_>>());
    assert_eq!(r["passed"], Value::from(5));

    // One unreadable file does not abort the rest.
    args.push(s(&missing));
    let o = schurkit(&args);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!((r["passed"].as_u64(), r["errors"].as_u64()), (Some(5), Some(1)));
    assert_eq!(r["instances"][5]["status"], Value::from("error"));
}
