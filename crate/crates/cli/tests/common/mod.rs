#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use feast_gsvd::oracle::make_synthetic_gsvd;
use feast_gsvd::sparse::write_matrix_market;
use feast_gsvd::{Matrix, Sparse};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_feast-gsvd"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn feast-gsvd")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn write_diag(dir: &Path, name: &str, d: &[f64]) -> PathBuf {
    let p = dir.join(name);
    write_matrix_market(&p, &Sparse::from_dense(&Matrix::diag_real(d))).unwrap();
    p
}

pub fn log_spaced(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect()
}

/// 100x80x60 pencil, 60 values log-spaced over [10^-1.5, 10^1.5] and
/// cond(X) = 100; twelve of them lie in (0.5, 2).
pub fn write_synthetic(dir: &Path, seed: u64) -> (PathBuf, PathBuf) {
    let g = make_synthetic_gsvd(100, 80, 60, &log_spaced(60, -1.5, 1.5), 100.0, seed).unwrap();
    let (a, b) = (dir.join("A.mtx"), dir.join("B.mtx"));
    write_matrix_market(&a, &Sparse::from_dense(&g.a)).unwrap();
    write_matrix_market(&b, &Sparse::from_dense(&g.b)).unwrap();
    (a, b)
}
