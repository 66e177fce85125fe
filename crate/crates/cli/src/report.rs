use std::io::Write;
use std::path::Path;

use feast_gsvd::driver::{ConvergenceReport, StoppingReason};
use feast_gsvd::{Mode, Options, SolveOutput};
use serde::Serialize;

use crate::error::CliError;

/// One row of `history.csv`.
#[derive(Debug, Serialize)]
pub struct HistoryRow {
    pub iter: usize,
    /// Largest relative residual over the in-interval Ritz values.
    pub max_rel_residual: Option<f64>,
    /// Converged in-interval count.
    pub converged: usize,
}

#[derive(Debug, Serialize)]
pub struct SolveReport<'a> {
    pub mode: &'static str,
    pub interval: [f64; 2],
    pub sigma: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
    pub iterations: usize,
    pub stopping_reason: StoppingReason,
    pub options_echo: &'a Options,
    pub seed: u64,
    pub tol: f64,
    pub subspace_size: usize,
    pub k_hat: Option<f64>,
    pub factorizations: usize,
    pub history: Vec<HistoryRow>,
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Svd => "svd",
        Mode::Gsvd => "gsvd",
    }
}

pub fn history_rows(report: &ConvergenceReport) -> Vec<HistoryRow> {
    report
        .records
        .iter()
        .map(|r| HistoryRow { iter: r.iteration, max_rel_residual: r.max_rel_residual, converged: r.converged_count })
        .collect()
}

impl<'a> SolveReport<'a> {
    pub fn new(mode: Mode, options: &'a Options, out: &SolveOutput<f64>) -> Self {
        let sol = &out.solution;
        SolveReport {
            mode: mode_name(mode),
            interval: [options.interval.0, options.interval.1],
            sigma: sol.sigma.clone(),
            residuals: sol.rel_residuals.clone(),
            converged: sol.converged.clone(),
            iterations: out.report.iterations,
            stopping_reason: out.report.stopping_reason,
            options_echo: options,
            seed: options.seed,
            tol: out.report.tol,
            subspace_size: out.report.subspace_size,
            k_hat: out.report.trace.as_ref().map(|t| t.k_hat),
            factorizations: out.report.factorizations,
            history: history_rows(&out.report),
        }
    }

    /// 0 when every in-interval value converged (or there was nothing to
    /// find), 2 when the run stagnated with unconverged values, 3 at the
    /// iteration cap.
    pub fn exit_code(&self) -> i32 {
        match self.stopping_reason {
            StoppingReason::AllConverged | StoppingReason::NoEigenvaluesInInterval => 0,
            StoppingReason::StagnantCount if self.converged.iter().all(|&c| c) => 0,
            StoppingReason::StagnantCount => 2,
            StoppingReason::MaxIterations => 3,
        }
    }

    /// Value table: `index,sigma,residual,converged`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["index", "sigma", "residual", "converged"])?;
        for (i, ((s, r), c)) in self.sigma.iter().zip(&self.residuals).zip(&self.converged).enumerate() {
            wr.write_record([i.to_string(), fmt_f64(*s), fmt_f64(*r), c.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

/// `iter,max_rel_residual,converged`; a missing residual (no Ritz value in
/// the interval) is written as `nan`.
pub fn write_history(path: &Path, rows: &[HistoryRow]) -> Result<(), CliError> {
    let mut wr = csv::Writer::from_path(path)?;
    wr.write_record(["iter", "max_rel_residual", "converged"])?;
    for r in rows {
        let res = r.max_rel_residual.map_or_else(|| "nan".to_string(), fmt_f64);
        wr.write_record([r.iter.to_string(), res, r.converged.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), CliError> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}
