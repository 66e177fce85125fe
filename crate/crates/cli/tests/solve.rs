mod common;

use common::*;
use feast_gsvd::oracle::dense_gsvd_reference;
use feast_gsvd::sparse::make_derivative_b;
use feast_gsvd::Matrix;

#[test]
fn diag3_reports_sigma_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_diag(dir.path(), "diag3.mtx", &[1.0, 2.0, 3.0]);
    let out = dir.path().join("out");
    let o = run(&["solve", "--svd", a.to_str().unwrap(), "--interval", "1.5,2.5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let r = json(&out.join("report.json"));
    for key in ["mode", "interval", "sigma", "residuals", "iterations", "stopping_reason", "options_echo", "seed"] {
        assert!(r.get(key).is_some(), "report.json lacks {key}");
    }
    assert_eq!(r["mode"], "svd");
    assert_eq!(r["stopping_reason"], "AllConverged");
    let sigma = r["sigma"].as_array().unwrap();
    assert_eq!(sigma.len(), 1);
    assert!((sigma[0].as_f64().unwrap() - 2.0).abs() < 1e-12);

    let hist = std::fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(hist.lines().next(), Some("iter,max_rel_residual,converged"));
    assert_eq!(hist.lines().count(), 1 + r["iterations"].as_u64().unwrap() as usize);
}

#[test]
fn stdout_carries_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_diag(dir.path(), "d.mtx", &[1.0, 2.0, 3.0, 4.0]);
    let o = run(&["solve", "--a", a.to_str().unwrap(), "--interval", "1.5,3.5"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["sigma"].as_array().unwrap().len(), 2);

    let o = run(&["solve", "--a", a.to_str().unwrap(), "--interval", "1.5,3.5", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,sigma,residual,converged");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].ends_with(",true"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_diag(dir.path(), "d.mtx", &[1.0, 2.0, 3.0]);
    let a = a.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--svd", a, "--interval", "2.5,1.5"],
        vec!["solve", "--svd", a, "--interval", "-1,2"],
        vec!["solve", "--svd", a, "--interval", "oops"],
        vec!["solve", "--svd", "--interval", "1,2"],
        vec!["solve", "--svd", a, "--derivative-b", "--interval", "1,2"],
        vec!["solve", "--gsvd", a, "--interval", "1,2"],
        vec!["solve", a, "--b", a, "--derivative-b", "--interval", "1,2"],
        vec!["solve", a, "--interval", "1,2", "--variant", "minus"],
        vec!["solve", a, "--interval", "1,2", "--subspace", "many"],
        vec!["solve", "/no/such/file.mtx", "--interval", "1,2"],
        vec!["solve", a, "--interval", "1,2", "--no-such-flag"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(!stderr(&o).is_empty(), "{args:?}");
    }
    let o = run(&["solve", "--svd", a, "--interval", "2.5,1.5"]);
    assert!(stderr(&o).contains("interval"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["solve", "--help"])), 0);
}

#[test]
fn derivative_b_builds_the_difference_pencil() {
    let dir = tempfile::tempdir().unwrap();
    let d = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let a = write_diag(dir.path(), "a.mtx", &d);
    let out = dir.path().join("o");
    let o = run(&[
        "solve",
        "--gsvd",
        a.to_str().unwrap(),
        "--derivative-b",
        "--interval",
        "0.9,3.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&out.join("report.json"));
    assert_eq!(r["mode"], "gsvd");

    let b = make_derivative_b::<f64>(d.len()).to_dense();
    let reference = dense_gsvd_reference(&Matrix::diag_real(&d), Some(&b)).unwrap();
    let want = reference.in_interval((0.9, 3.0));
    let got: Vec<f64> = r["sigma"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(!want.is_empty());
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-10 * w, "{g} vs {w}");
    }
}

#[test]
fn transpose_gives_the_same_values() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = write_synthetic(dir.path(), 5);
    let run_one = |extra: &[&str]| -> Vec<f64> {
        let mut args = vec!["solve", "--svd", a.to_str().unwrap(), "--interval", "0.5,2", "--seed", "3"];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        r["sigma"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect()
    };
    let plain = run_one(&[]);
    let trans = run_one(&["--transpose"]);
    assert!(!plain.is_empty());
    assert_eq!(plain.len(), trans.len());
    for (x, y) in plain.iter().zip(&trans) {
        assert!((x - y).abs() <= 1e-10 * x);
    }
}

#[test]
fn same_seed_same_history() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = write_synthetic(dir.path(), 11);
    let go = |name: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "solve",
            "--a",
            a.to_str().unwrap(),
            "--b",
            b.to_str().unwrap(),
            "--interval",
            "0.5,2",
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!([0, 2].contains(&code(&o)), "{}", stderr(&o));
        (std::fs::read(out.join("history.csv")).unwrap(), json(&out.join("report.json"))["sigma"].clone())
    };
    let (h1, s1) = go("r1");
    let (h2, s2) = go("r2");
    assert_eq!(h1, h2);
    assert_eq!(s1, s2);
}

#[test]
fn iteration_cap_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = write_synthetic(dir.path(), 2);
    let o = run(&[
        "solve",
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
        "--interval",
        "0.5,2",
        "--max-iter",
        "1",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["stopping_reason"], "MaxIterations");
}

#[test]
fn empty_interval_is_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_diag(dir.path(), "d.mtx", &[1.0, 2.0, 3.0]);
    let o = run(&["solve", a.to_str().unwrap(), "--interval", "5,6"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["stopping_reason"], "NoEigenvaluesInInterval");
    assert!(r["sigma"].as_array().unwrap().is_empty());
}
