use std::path::Path;

use feast_gsvd::driver::{random_initial_pair, IterationRecord};
use feast_gsvd::oracle::{dense_gsvd_reference, make_artificial_guess, ArtificialGuess};
use feast_gsvd::solver::FactorizationCache;
use feast_gsvd::sparse::{make_derivative_b, read_matrix_market, read_matrix_market_dense, write_matrix_market_dense};
use feast_gsvd::trace::{auto_subspace_size, estimate_count, TraceEstimate, TraceOptions};
use feast_gsvd::{feast_gsvd, Contour, FilterVariant, Options, Pair, Pencil, Sparse, StoppingReason, SubspaceSize};
use serde::Serialize;

use crate::args::{BSource, Format, InitialGuess, RunConfig, SubcommandKind};
use crate::error::CliError;
use crate::report::{history_rows, mode_name, write_history, write_json, SolveReport};

/// Largest `m * n` for which the artificial guesses may build the dense
/// reference decomposition.
const DENSE_LIMIT: usize = 4_000_000;

pub fn load_pencil(cfg: &RunConfig) -> Result<Pencil, CliError> {
    let read = |p: &Path| -> Result<Sparse, CliError> {
        let m = read_matrix_market::<f64>(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        Ok(if cfg.transpose { m.adjoint() } else { m })
    };
    let a = read(&cfg.a_path)?;
    let pencil = match &cfg.b {
        BSource::None => Pencil::svd(a)?,
        BSource::Path(p) => Pencil::gsvd(a, read(p)?)?,
        BSource::Derivative => {
            let n = a.cols();
            Pencil::gsvd(a, make_derivative_b(n))?
        }
    };
    Ok(pencil)
}

fn prepare_out(cfg: &RunConfig) -> Result<Option<&Path>, CliError> {
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

fn print_json<S: Serialize>(value: &S) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn cmd_solve(cfg: &RunConfig) -> Result<i32, CliError> {
    let pencil = load_pencil(cfg)?;
    let out = feast_gsvd(&pencil, &cfg.options, None)?;
    let report = SolveReport::new(pencil.mode(), &cfg.options, &out);
    if let Some(dir) = prepare_out(cfg)? {
        write_json(&dir.join("report.json"), &report)?;
        write_history(&dir.join("history.csv"), &report.history)?;
        if cfg.save_vectors {
            let keep: Vec<usize> = (0..out.solution.len()).filter(|&i| out.solution.converged[i]).collect();
            write_matrix_market_dense(dir.join("U.mtx"), &out.solution.u.select_columns(&keep))?;
            write_matrix_market_dense(dir.join("W.mtx"), &out.solution.w.select_columns(&keep))?;
        }
    }
    match cfg.format {
        Format::Json => print_json(&report)?,
        Format::Csv => report.write_csv(std::io::stdout().lock())?,
    }
    Ok(report.exit_code())
}

#[derive(Debug, Serialize)]
struct EstimateReport {
    mode: &'static str,
    interval: [f64; 2],
    k_hat: f64,
    std_dev: f64,
    std_error: f64,
    samples: usize,
    nodes: usize,
    recommended_subspace: usize,
    seed: u64,
    note: Option<String>,
}

/// Fewer probes than this get a warning about the estimate's spread.
const FEW_SAMPLES: usize = 10;

fn run_estimate(pencil: &Pencil, opts: &Options, cache: &FactorizationCache<f64>) -> Result<TraceEstimate, CliError> {
    let contour = Contour::build(opts.interval.0, opts.interval.1, opts.aspect_ratio, opts.trace_nodes)?;
    let topts = TraceOptions { samples: opts.trace_samples, seed: opts.seed, conjugate_reduction: pencil.is_real() };
    Ok(estimate_count(pencil, &contour, topts, cache)?)
}

fn cmd_estimate(cfg: &RunConfig) -> Result<i32, CliError> {
    let pencil = load_pencil(cfg)?;
    let est = run_estimate(&pencil, &cfg.options, &FactorizationCache::new())?;
    let note = (est.samples < FEW_SAMPLES).then(|| {
        format!(
            "only {} probe vectors: the standard error ({:.3}) is wide, use --samples 30 or more for a reliable count",
            est.samples,
            est.std_error()
        )
    });
    let report = EstimateReport {
        mode: mode_name(pencil.mode()),
        interval: [cfg.interval.0, cfg.interval.1],
        k_hat: est.k_hat,
        std_dev: est.std_dev,
        std_error: est.std_error(),
        samples: est.samples,
        nodes: est.nodes,
        recommended_subspace: auto_subspace_size(est.k_hat).min(pencil.m().min(pencil.n())),
        seed: cfg.seed,
        note,
    };
    if let Some(dir) = prepare_out(cfg)? {
        write_json(&dir.join("estimate.json"), &report)?;
    }
    match cfg.format {
        Format::Json => print_json(&report)?,
        Format::Csv => {
            let mut wr = csv::Writer::from_writer(std::io::stdout().lock());
            wr.serialize(&report)?;
            wr.flush()?;
        }
    }
    if let Some(n) = &report.note {
        eprintln!("note: {n}");
    }
    Ok(0)
}

/// Starting pair shared by every run. Artificial guesses also return the
/// number of reference values in the interval.
fn build_guess(cfg: &RunConfig, pencil: &Pencil) -> Result<(Pair, Option<usize>), CliError> {
    let (m, n) = (pencil.m(), pencil.n());
    let cap = m.min(n).max(1);
    match &cfg.guess {
        InitialGuess::Random => {
            let l = match cfg.options.subspace_size {
                SubspaceSize::Fixed(l) => l,
                SubspaceSize::Auto => auto_subspace_size(run_estimate(pencil, &cfg.options, &FactorizationCache::new())?.k_hat),
            };
            Ok((random_initial_pair(pencil, l.clamp(1, cap), cfg.seed)?, None))
        }
        InitialGuess::Files { u, w } => {
            let u = read_matrix_market_dense::<f64>(u).map_err(|e| CliError::Usage(format!("{}: {e}", u.display())))?;
            let w = read_matrix_market_dense::<f64>(w).map_err(|e| CliError::Usage(format!("{}: {e}", w.display())))?;
            Ok((Pair::raw(u, w)?, None))
        }
        InitialGuess::Artificial(kind) => artificial_guess(cfg, pencil, *kind),
    }
}

/// Artificial guesses are built from the exact in-interval triplets of the
/// dense reference; with `--subspace auto` the width is `k + 2`.
fn artificial_guess(cfg: &RunConfig, pencil: &Pencil, kind: ArtificialGuess) -> Result<(Pair, Option<usize>), CliError> {
    let (m, n) = (pencil.m(), pencil.n());
    if m * n > DENSE_LIMIT {
        return Err(CliError::Usage(format!("artificial guesses need a dense reference; {m}x{n} is too large")));
    }
    let a = pencil.a().to_dense();
    let b = pencil.b().map(|b| b.to_dense());
    let reference = dense_gsvd_reference(&a, b.as_ref())?;
    let truth = reference.pair_in_interval(cfg.interval);
    let k = truth.cols();
    if k == 0 {
        return Err(CliError::Usage("no singular values in the interval; artificial guess is undefined".into()));
    }
    let l = match cfg.options.subspace_size {
        SubspaceSize::Fixed(l) => l.max(k),
        SubspaceSize::Auto => (k + 2).min(m.min(n)).max(k),
    };
    Ok((make_artificial_guess(&truth, kind, l, cfg.seed)?, Some(k)))
}

#[derive(Debug, Serialize)]
struct VariantSummary {
    variant: &'static str,
    iterations: Option<usize>,
    stopping_reason: Option<StoppingReason>,
    first_max_rel_residual: Option<f64>,
    converged: Option<usize>,
    iterations_to_reference: Option<usize>,
    sigma: Vec<f64>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct CompareReport<'a> {
    mode: &'static str,
    interval: [f64; 2],
    init: String,
    subspace_size: usize,
    reference_count: Option<usize>,
    seed: u64,
    options_echo: &'a Options,
    variants: Vec<VariantSummary>,
}

pub fn dispatch(cfg: &RunConfig) -> Result<i32, CliError> {
    match cfg.subcommand {
        SubcommandKind::Solve => cmd_solve(cfg),
        SubcommandKind::Estimate => cmd_estimate(cfg),
        SubcommandKind::CompareFilters => cmd_compare_filters(cfg),
        SubcommandKind::Refine => cmd_refine(cfg),
    }
}

fn guess_label(g: &InitialGuess) -> String {
    match g {
        InitialGuess::Random => "random".into(),
        InitialGuess::Files { u, w } => format!("{} + {}", u.display(), w.display()),
        InitialGuess::Artificial(ArtificialGuess::NegativePair) => "negative".into(),
        InitialGuess::Artificial(ArtificialGuess::NearlyNegativePair) => "nearly-negative".into(),
        InitialGuess::Artificial(ArtificialGuess::Noisy(q)) => format!("noisy:{q}"),
    }
}

pub fn cmd_compare_filters(cfg: &RunConfig) -> Result<i32, CliError> {
    let pencil = load_pencil(cfg)?;
    let (guess, reference) = build_guess(cfg, &pencil)?;
    let mut opts = cfg.options.clone();
    opts.subspace_size = SubspaceSize::Fixed(guess.cols());
    let dir = prepare_out(cfg)?;

    let mut variants = Vec::new();
    for v in FilterVariant::ALL {
        opts.variant = v;
        let summary = match feast_gsvd(&pencil, &opts, Some(&guess)) {
            Ok(out) => {
                let rows = history_rows(&out.report);
                if let Some(dir) = dir {
                    write_history(&dir.join(format!("history_{}.csv", v.name())), &rows)?;
                }
                VariantSummary {
                    variant: v.name(),
                    iterations: Some(out.report.iterations),
                    stopping_reason: Some(out.report.stopping_reason),
                    first_max_rel_residual: rows.first().and_then(|r| r.max_rel_residual),
                    converged: rows.last().map(|r| r.converged),
                    iterations_to_reference: reference.and_then(|k| first_reaching(&out.report.records, k)),
                    sigma: out.solution.converged_sigma(),
                    error: None,
                }
            }
            // One variant failing (a singular shift, a vanished block) should
            // not hide the others.
            Err(e) => VariantSummary {
                variant: v.name(),
                iterations: None,
                stopping_reason: None,
                first_max_rel_residual: None,
                converged: None,
                iterations_to_reference: None,
                sigma: vec![],
                error: Some(e.to_string()),
            },
        };
        variants.push(summary);
    }

    let report = CompareReport {
        mode: mode_name(pencil.mode()),
        interval: [cfg.interval.0, cfg.interval.1],
        init: guess_label(&cfg.guess),
        subspace_size: guess.cols(),
        reference_count: reference,
        seed: cfg.seed,
        options_echo: &opts,
        variants,
    };
    if let Some(dir) = dir {
        write_json(&dir.join("compare.json"), &report)?;
    }
    match cfg.format {
        Format::Json => print_json(&report)?,
        Format::Csv => {
            let mut wr = csv::Writer::from_writer(std::io::stdout().lock());
            wr.write_record(["variant", "iterations", "stopping_reason", "first_max_rel_residual", "converged", "iterations_to_reference", "error"])?;
            for s in &report.variants {
                wr.write_record([
                    s.variant.to_string(),
                    s.iterations.map_or(String::new(), |i| i.to_string()),
                    s.stopping_reason.map_or(String::new(), |r| format!("{r:?}")),
                    s.first_max_rel_residual.map_or(String::new(), |r| format!("{r:.6e}")),
                    s.converged.map_or(String::new(), |c| c.to_string()),
                    s.iterations_to_reference.map_or(String::new(), |i| i.to_string()),
                    s.error.clone().unwrap_or_default(),
                ])?;
            }
            wr.flush()?;
        }
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct RefineReport<'a> {
    #[serde(flatten)]
    base: SolveReport<'a>,
    guess_columns: usize,
    /// First iteration after which every in-interval value had converged.
    iterations_to_converge: Option<usize>,
    /// Reference values in the interval (artificial guesses only) and the
    /// first iteration with that many converged in-interval values.
    reference_count: Option<usize>,
    iterations_to_reference: Option<usize>,
}

fn cmd_refine(cfg: &RunConfig) -> Result<i32, CliError> {
    let pencil = load_pencil(cfg)?;
    let (guess, reference) = build_guess(cfg, &pencil)?;
    let out = feast_gsvd(&pencil, &cfg.options, Some(&guess))?;
    let base = SolveReport::new(pencil.mode(), &cfg.options, &out);
    let code = base.exit_code();
    let iterations_to_converge = first_all_converged(&out.report.records);
    let iterations_to_reference = reference.and_then(|k| first_reaching(&out.report.records, k));
    let report = RefineReport {
        base,
        guess_columns: guess.cols(),
        iterations_to_converge,
        reference_count: reference,
        iterations_to_reference,
    };
    if let Some(dir) = prepare_out(cfg)? {
        write_json(&dir.join("report.json"), &report)?;
        write_history(&dir.join("history.csv"), &report.base.history)?;
    }
    match cfg.format {
        Format::Json => print_json(&report)?,
        Format::Csv => report.base.write_csv(std::io::stdout().lock())?,
    }
    Ok(code)
}

fn first_all_converged(records: &[IterationRecord]) -> Option<usize> {
    records.iter().find(|r| r.inside_count > 0 && r.converged_count == r.inside_count).map(|r| r.iteration)
}

fn first_reaching(records: &[IterationRecord], k: usize) -> Option<usize> {
    records.iter().find(|r| r.converged_count >= k).map(|r| r.iteration)
}
