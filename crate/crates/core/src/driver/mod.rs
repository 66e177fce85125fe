//! Contour-filtered subspace iteration for partial SVD/GSVD.

mod steps;

pub use steps::{
    b_orthonormalize_pair, b_orthonormalize_pair_with, check_convergence, default_rank_tol, in_interval, rayleigh_ritz,
    retain_locked, select_components, select_indices, ResidualCheck, LOCK_SLACK,
};

use std::time::Instant;

use serde::Serialize;

use crate::contour::EllipseContour;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::filter::{apply_variant, FilterVariant, SubspacePair};
use crate::random::{gaussian_matrix, seeded_rng};
use crate::scalar::Real;
use crate::solver::FactorizationCache;
use crate::sparse::{SparseMatrix, SparsePencil};
use crate::trace::{auto_subspace_size, estimate_count, TraceEstimate, TraceOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum SubspaceSize {
    Auto,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum Tolerance<T> {
    /// `tol_base * sqrt(m)`.
    Auto,
    Fixed(T),
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverOptions<T: Real + Serialize> {
    pub interval: (T, T),
    pub n_nodes: usize,
    pub aspect_ratio: T,
    pub subspace_size: SubspaceSize,
    pub tol: Tolerance<T>,
    pub max_iterations: usize,
    pub variant: FilterVariant,
    pub soft_locking: bool,
    pub seed: u64,
    /// Probes for the automatic subspace size.
    pub trace_samples: usize,
    /// Quadrature nodes for the automatic subspace size.
    pub trace_nodes: usize,
    /// Basis truncation threshold; `None` means `rank_tol_base * sqrt(rows)`.
    pub rank_tol: Option<T>,
}

impl<T: Real + Serialize> SolverOptions<T> {
    pub fn new(alpha: T, beta: T) -> Self {
        SolverOptions {
            interval: (alpha, beta),
            n_nodes: 12,
            aspect_ratio: T::of(5.0),
            subspace_size: SubspaceSize::Auto,
            tol: Tolerance::Auto,
            max_iterations: 30,
            variant: FilterVariant::AugmentedPair,
            soft_locking: true,
            seed: 0,
            trace_samples: 30,
            trace_nodes: 12,
            rank_tol: None,
        }
    }

    pub fn resolved_tol(&self, m: usize) -> T {
        match self.tol {
            Tolerance::Auto => T::tol_base() * T::of_usize(m.max(1)).sqrt(),
            Tolerance::Fixed(t) => t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.interval;
        if !(b > a) || a < T::zero() || !b.is_finite() {
            return Err(Error::DegenerateInterval { alpha: a.to_f64_lossy(), beta: b.to_f64_lossy() });
        }
        if let SubspaceSize::Fixed(0) = self.subspace_size {
            return Err(Error::InvalidParameter("subspace size must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StoppingReason {
    /// Every Ritz value inside the interval satisfies both residual criteria.
    AllConverged,
    /// The converged in-interval count did not change between two
    /// consecutive iterations.
    StagnantCount,
    MaxIterations,
    /// The trace estimate rounds to zero: nothing to compute.
    NoEigenvaluesInInterval,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Maximum relative residual over Ritz values inside the interval
    /// (`None` when there are none).
    pub max_rel_residual: Option<f64>,
    pub converged_count: usize,
    pub inside_count: usize,
    pub ritz_values: Vec<f64>,
    /// Relative residual of each Ritz triplet, aligned with `ritz_values`.
    pub residuals: Vec<f64>,
    /// Convergence flags, aligned with `ritz_values`. Triplets converged in
    /// an earlier iteration keep the flag while their residual stays within
    /// `LOCK_SLACK * tol`.
    pub converged: Vec<bool>,
    pub columns: usize,
    pub locked: usize,
    /// Before component selection; only present when selection dropped columns.
    pub pre_selection: Option<SelectionSnapshot>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectionSnapshot {
    pub max_rel_residual: Option<f64>,
    pub converged_count: usize,
    pub ritz_values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub records: Vec<IterationRecord>,
    pub stopping_reason: StoppingReason,
    pub iterations: usize,
    pub subspace_size: usize,
    pub tol: f64,
    pub trace: Option<TraceEstimate>,
    pub factorizations: usize,
}

/// In-interval Ritz triplets, ascending in `sigma`, with the recovered
/// GSVD quantities once [`recover_full_gsvd`] has run.
#[derive(Clone, Debug)]
pub struct GsvdSolution<T: Real> {
    pub sigma: Vec<T>,
    pub u: DenseMatrix<T>,
    pub w: DenseMatrix<T>,
    pub v: Option<DenseMatrix<T>>,
    pub c: Vec<T>,
    pub s: Vec<T>,
    pub x: Option<DenseMatrix<T>>,
    pub r1: Vec<T>,
    pub r2: Vec<T>,
    pub rel_residuals: Vec<T>,
    pub converged: Vec<bool>,
}

impl<T: Real> GsvdSolution<T> {
    fn empty(m: usize, n: usize) -> Self {
        GsvdSolution {
            sigma: vec![],
            u: DenseMatrix::zeros(m, 0),
            w: DenseMatrix::zeros(n, 0),
            v: None,
            c: vec![],
            s: vec![],
            x: None,
            r1: vec![],
            r2: vec![],
            rel_residuals: vec![],
            converged: vec![],
        }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Singular values whose triplets passed both residual tests.
    pub fn converged_sigma(&self) -> Vec<T> {
        self.sigma.iter().zip(&self.converged).filter(|(_, &c)| c).map(|(&s, _)| s).collect()
    }
}

/// `V = B W`, `S = (I + Sigma^2)^{-1/2}`, `C = Sigma S`, `X = W S`.
pub fn recover_full_gsvd<T: Real>(mut sol: GsvdSolution<T>, pencil: &SparsePencil<T>) -> GsvdSolution<T> {
    let s: Vec<T> = sol.sigma.iter().map(|&x| T::one() / (T::one() + x * x).sqrt()).collect();
    let c: Vec<T> = sol.sigma.iter().zip(&s).map(|(&x, &si)| x * si).collect();
    sol.v = Some(pencil.apply_b(&sol.w));
    sol.x = Some(sol.w.scale_columns(&s));
    sol.c = c;
    sol.s = s;
    sol
}

/// Result of a run: the in-interval solution, the report, and the final
/// working basis (useful for restarts and diagnostics).
#[derive(Clone, Debug)]
pub struct SolveOutput<T: Real> {
    pub solution: GsvdSolution<T>,
    pub report: ConvergenceReport,
    pub ritz_values: Vec<T>,
    pub basis: SubspacePair<T>,
}

fn to_f64s<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

struct Summary {
    max_rel: Option<f64>,
    converged_inside: usize,
    inside: usize,
}

fn summarize<T: Real>(sigma: &[T], check: &ResidualCheck<T>, interval: (T, T)) -> Summary {
    let mut max_rel: Option<f64> = None;
    let mut converged_inside = 0;
    let mut inside = 0;
    for (i, &s) in sigma.iter().enumerate() {
        if in_interval(s, interval) {
            inside += 1;
            let r = check.rel[i].to_f64_lossy();
            max_rel = Some(max_rel.map_or(r, |m: f64| m.max(r)));
            if check.converged[i] {
                converged_inside += 1;
            }
        }
    }
    Summary { max_rel, converged_inside, inside }
}

/// Gaussian initial pair, orthonormalized in the pencil's inner products.
pub fn random_initial_pair<T: Real>(pencil: &SparsePencil<T>, l: usize, seed: u64) -> Result<SubspacePair<T>> {
    let mut rng = seeded_rng(seed);
    let u = gaussian_matrix(pencil.m(), l, &mut rng);
    let w = gaussian_matrix(pencil.n(), l, &mut rng);
    b_orthonormalize_pair(pencil, &SubspacePair::raw(u, w)?)
}

/// Partial SVD of `a` (the pencil `(A, I)`).
pub fn feast_svd<T: Real + Serialize>(a: SparseMatrix<T>, opts: &SolverOptions<T>) -> Result<SolveOutput<T>> {
    let pencil = SparsePencil::svd(a)?;
    feast_gsvd(&pencil, opts, None)
}

/// Contour-filtered subspace iteration on the Jordan-Wielandt pencil.
///
/// With `guess = None` the starting pair is Gaussian (seeded by
/// `opts.seed`); otherwise the supplied pair is orthonormalized and used,
/// and its column count fixes the subspace size when that is `Auto`.
pub fn feast_gsvd<T: Real + Serialize>(
    pencil: &SparsePencil<T>,
    opts: &SolverOptions<T>,
    guess: Option<&SubspacePair<T>>,
) -> Result<SolveOutput<T>> {
    let cache = FactorizationCache::new();
    feast_gsvd_with_cache(pencil, opts, guess, &cache)
}

pub fn feast_gsvd_with_cache<T: Real + Serialize>(
    pencil: &SparsePencil<T>,
    opts: &SolverOptions<T>,
    guess: Option<&SubspacePair<T>>,
    cache: &FactorizationCache<T>,
) -> Result<SolveOutput<T>> {
    opts.validate()?;
    let (m, n) = (pencil.m(), pencil.n());
    let interval = opts.interval;
    let tol = opts.resolved_tol(m);
    let contour = EllipseContour::build(interval.0, interval.1, opts.aspect_ratio, opts.n_nodes)?;
    let cap = m.min(n).max(1);

    if let Some(g) = guess {
        if g.u.rows() != m || g.w.rows() != n || g.u.cols() != g.w.cols() || g.u.cols() == 0 {
            return Err(Error::GuessDimensionMismatch(format!(
                "guess is ({}x{}, {}x{}), pencil needs ({m}x l, {n}x l)",
                g.u.rows(),
                g.u.cols(),
                g.w.rows(),
                g.w.cols()
            )));
        }
    }

    let mut trace = None;
    let l = match (opts.subspace_size, guess) {
        (SubspaceSize::Fixed(l), _) => l,
        (SubspaceSize::Auto, Some(g)) => g.u.cols(),
        (SubspaceSize::Auto, None) => {
            let tc = if opts.trace_nodes == opts.n_nodes {
                contour.clone()
            } else {
                EllipseContour::build(interval.0, interval.1, opts.aspect_ratio, opts.trace_nodes)?
            };
            let topts = TraceOptions { samples: opts.trace_samples, seed: opts.seed ^ 0x7ace, conjugate_reduction: true };
            let est = if tc.nodes == contour.nodes {
                estimate_count(pencil, &tc, topts, cache)?
            } else {
                estimate_count(pencil, &tc, topts, &FactorizationCache::new())?
            };
            let k_hat = est.k_hat;
            trace = Some(est);
            if k_hat < 0.5 {
                let report = ConvergenceReport {
                    records: vec![],
                    stopping_reason: StoppingReason::NoEigenvaluesInInterval,
                    iterations: 0,
                    subspace_size: 0,
                    tol: tol.to_f64_lossy(),
                    trace,
                    factorizations: cache.factorization_count(),
                };
                return Ok(SolveOutput {
                    solution: GsvdSolution::empty(m, n),
                    report,
                    ritz_values: vec![],
                    basis: SubspacePair { u: DenseMatrix::zeros(m, 0), w: DenseMatrix::zeros(n, 0), orthonormalized: true },
                });
            }
            auto_subspace_size(k_hat)
        }
    }
    .min(cap);

    let mut pair = match guess {
        Some(g) => b_orthonormalize_pair_with(pencil, g, opts.rank_tol)?,
        None => random_initial_pair(pencil, l, opts.seed)?,
    };

    let mut records = Vec::new();
    let mut sigma: Vec<T> = Vec::new();
    let mut check = ResidualCheck::default();
    let mut prev_converged: Option<usize> = None;
    let mut prev_locked: Vec<T> = Vec::new();
    let mut reason = StoppingReason::MaxIterations;
    let mut iterations = 0;

    for iter in 1..=opts.max_iterations {
        let t0 = Instant::now();
        iterations = iter;
        let first = iter == 1;

        // Soft locking: converged in-interval triplets skip the filter but
        // stay in the Rayleigh-Ritz basis.
        let locked: Vec<usize> = if first || !opts.soft_locking {
            vec![]
        } else {
            (0..sigma.len()).filter(|&i| check.converged[i] && in_interval(sigma[i], interval)).collect()
        };
        let active: Vec<usize> = (0..pair.cols()).filter(|i| !locked.contains(i)).collect();

        if first && opts.variant == FilterVariant::SimplePlusRR {
            pair = rayleigh_ritz(pencil, &pair)?.1;
        }
        let raw = if active.is_empty() {
            pair.clone()
        } else {
            let filtered = apply_variant(pencil, &contour, cache, &pair.select(&active), opts.variant, first)?;
            let f = SubspacePair::from_stacked(&filtered, m);
            let keep = pair.select(&locked);
            SubspacePair::raw(DenseMatrix::hstack(&[&keep.u, &f.u]), DenseMatrix::hstack(&[&keep.w, &f.w]))?
        };
        let ortho = b_orthonormalize_pair_with(pencil, &raw, opts.rank_tol)?;
        let (s, rr) = rayleigh_ritz(pencil, &ortho)?;
        sigma = s;
        pair = rr;
        check = check_convergence(pencil, &sigma, &pair, tol);
        if opts.soft_locking {
            retain_locked(&sigma, &mut check, &prev_locked, tol);
        }

        let mut pre_selection = None;
        if pair.cols() > l {
            let pre = summarize(&sigma, &check, interval);
            pre_selection = Some(SelectionSnapshot {
                max_rel_residual: pre.max_rel,
                converged_count: pre.converged_inside,
                ritz_values: to_f64s(&sigma),
            });
            let (s2, p2, idx) = select_components(&sigma, &pair, &check.rel, interval, l);
            sigma = s2;
            pair = p2;
            check = ResidualCheck {
                r1: idx.iter().map(|&i| check.r1[i]).collect(),
                r2: idx.iter().map(|&i| check.r2[i]).collect(),
                rel: idx.iter().map(|&i| check.rel[i]).collect(),
                converged: idx.iter().map(|&i| check.converged[i]).collect(),
            };
        }

        let sm = summarize(&sigma, &check, interval);
        records.push(IterationRecord {
            iteration: iter,
            max_rel_residual: sm.max_rel,
            converged_count: sm.converged_inside,
            inside_count: sm.inside,
            ritz_values: to_f64s(&sigma),
            residuals: to_f64s(&check.rel),
            converged: check.converged.clone(),
            columns: pair.cols(),
            locked: locked.len(),
            pre_selection,
            wall_time_s: t0.elapsed().as_secs_f64(),
        });

        if sm.inside > 0 && sm.converged_inside == sm.inside {
            reason = StoppingReason::AllConverged;
            break;
        }
        // An unchanged count of zero while unconverged Ritz values sit in
        // the interval is the normal state of early iterations, not
        // stagnation.
        if prev_converged == Some(sm.converged_inside) && (sm.converged_inside > 0 || sm.inside == 0) {
            reason = StoppingReason::StagnantCount;
            break;
        }
        prev_converged = Some(sm.converged_inside);
        prev_locked = (0..sigma.len()).filter(|&i| check.converged[i] && in_interval(sigma[i], interval)).map(|i| sigma[i]).collect();
    }

    // Collect in-interval triplets, ascending.
    let mut idx: Vec<usize> = (0..sigma.len()).filter(|&i| in_interval(sigma[i], interval)).collect();
    idx.sort_by(|&i, &j| sigma[i].partial_cmp(&sigma[j]).unwrap_or(std::cmp::Ordering::Equal));
    let solution = GsvdSolution {
        sigma: idx.iter().map(|&i| sigma[i]).collect(),
        u: pair.u.select_columns(&idx),
        w: pair.w.select_columns(&idx),
        v: None,
        c: vec![],
        s: vec![],
        x: None,
        r1: idx.iter().map(|&i| check.r1[i]).collect(),
        r2: idx.iter().map(|&i| check.r2[i]).collect(),
        rel_residuals: idx.iter().map(|&i| check.rel[i]).collect(),
        converged: idx.iter().map(|&i| check.converged[i]).collect(),
    };
    let solution = recover_full_gsvd(solution, pencil);
    let report = ConvergenceReport {
        records,
        stopping_reason: reason,
        iterations,
        subspace_size: l,
        tol: tol.to_f64_lossy(),
        trace,
        factorizations: cache.factorization_count(),
    };
    Ok(SolveOutput { solution, report, ritz_values: sigma, basis: pair })
}
