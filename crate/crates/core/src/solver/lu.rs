//! Left-looking sparse LU with threshold partial pivoting.
//!
//! Column `k` of the factors is obtained by a sparse triangular solve with
//! the already computed part of `L`; the nonzero pattern of the solution is
//! the set of rows reachable from the pattern of the input column in the
//! graph of `L`, found by depth-first search before any arithmetic.

use num_complex::Complex;

use crate::scalar::{czero, Real};
use crate::sparse::SparseMatrix;

const NONE: usize = usize::MAX;

/// Factors with `M[p, q] = L U`, `L` unit lower triangular.
#[derive(Clone, Debug)]
pub struct SparseLu<T: Real> {
    n: usize,
    l_colptr: Vec<usize>,
    l_rowidx: Vec<usize>,
    l_vals: Vec<Complex<T>>,
    u_colptr: Vec<usize>,
    u_rowidx: Vec<usize>,
    u_vals: Vec<Complex<T>>,
    u_diag: Vec<Complex<T>>,
    p: Vec<usize>,
    q: Vec<usize>,
}

/// Pivot failure at elimination step `step`.
#[derive(Debug)]
pub struct TinyPivot {
    pub step: usize,
}

impl<T: Real> SparseLu<T> {
    /// Factorizes `m` with column order `q`. A diagonal candidate (the row
    /// matching the eliminated column) is kept whenever its magnitude is at
    /// least `threshold` times the column maximum; pivots below `abs_tol`
    /// abort the factorization.
    pub fn factor(m: &SparseMatrix<T>, q: Vec<usize>, threshold: T, abs_tol: T) -> Result<Self, TinyPivot> {
        let n = m.rows();
        assert_eq!(n, m.cols());
        assert_eq!(q.len(), n);
        let mut pinv = vec![NONE; n];
        let mut x = vec![czero::<T>(); n];
        let mut mark = vec![NONE; n];
        let mut reach = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut pstack = vec![0usize; n];

        let mut l_colptr = vec![0usize];
        let mut l_rowidx = Vec::new();
        let mut l_vals = Vec::new();
        let mut u_colptr = vec![0usize];
        let mut u_rowidx = Vec::new();
        let mut u_vals = Vec::new();
        let mut u_diag = Vec::with_capacity(n);
        let mut p = vec![NONE; n];

        for k in 0..n {
            let col = q[k];
            let (rows, vals) = m.column(col);

            // Symbolic: topological order of the reach lands in reach[top..].
            let mut top = n;
            for &s in rows {
                if mark[s] == k {
                    continue;
                }
                let mut head = 0usize;
                stack[0] = s;
                loop {
                    let j = stack[head];
                    let lcol = pinv[j];
                    if mark[j] != k {
                        mark[j] = k;
                        pstack[head] = if lcol == NONE { 0 } else { l_colptr[lcol] };
                    }
                    let mut descended = false;
                    if lcol != NONE {
                        let end = l_colptr[lcol + 1];
                        let mut ptr = pstack[head];
                        while ptr < end {
                            let i = l_rowidx[ptr];
                            ptr += 1;
                            if mark[i] != k {
                                pstack[head] = ptr;
                                head += 1;
                                stack[head] = i;
                                descended = true;
                                break;
                            }
                        }
                        if !descended {
                            pstack[head] = end;
                        }
                    }
                    if !descended {
                        top -= 1;
                        reach[top] = j;
                        if head == 0 {
                            break;
                        }
                        head -= 1;
                    }
                }
            }

            // Numeric: scatter and eliminate in topological order.
            for (&i, &v) in rows.iter().zip(vals) {
                x[i] = v;
            }
            for t in top..n {
                let j = reach[t];
                let lcol = pinv[j];
                if lcol == NONE {
                    continue;
                }
                let xj = x[j];
                if xj == czero() {
                    continue;
                }
                for ptr in l_colptr[lcol]..l_colptr[lcol + 1] {
                    let i = l_rowidx[ptr];
                    x[i] -= l_vals[ptr] * xj;
                }
            }

            // Pivot choice among rows not yet pivotal.
            let mut best = NONE;
            let mut best_abs = T::zero();
            let mut diag_abs = -T::one();
            for &i in &reach[top..n] {
                if pinv[i] != NONE {
                    continue;
                }
                let a = x[i].norm();
                if a > best_abs || best == NONE {
                    best = i;
                    best_abs = a;
                }
                if i == col {
                    diag_abs = a;
                }
            }
            if diag_abs >= T::zero() && diag_abs >= threshold * best_abs {
                best = col;
                best_abs = diag_abs;
            }
            if best == NONE || !(best_abs > abs_tol) {
                return Err(TinyPivot { step: k });
            }
            let piv = x[best];
            pinv[best] = k;
            p[k] = best;
            u_diag.push(piv);

            for &i in &reach[top..n] {
                let v = x[i];
                x[i] = czero();
                let pos = pinv[i];
                if i == best {
                    continue;
                }
                if pos != NONE {
                    if v != czero() {
                        u_rowidx.push(pos);
                        u_vals.push(v);
                    }
                } else if v != czero() {
                    l_rowidx.push(i);
                    l_vals.push(v / piv);
                }
            }
            u_colptr.push(u_rowidx.len());
            l_colptr.push(l_rowidx.len());
        }

        // Rows of L move from original numbering to pivot order.
        for r in l_rowidx.iter_mut() {
            *r = pinv[*r];
        }
        Ok(SparseLu { n, l_colptr, l_rowidx, l_vals, u_colptr, u_rowidx, u_vals, u_diag, p, q })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz_l(&self) -> usize {
        self.l_vals.len()
    }

    /// Off-diagonal entries of `U` plus the diagonal.
    pub fn nnz_u(&self) -> usize {
        self.u_vals.len() + self.n
    }

    /// Overwrites nothing; returns `x` with `M x = b`.
    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        let mut y: Vec<Complex<T>> = self.p.iter().map(|&r| b[r]).collect();
        for k in 0..n {
            let yk = y[k];
            if yk == czero() {
                continue;
            }
            for ptr in self.l_colptr[k]..self.l_colptr[k + 1] {
                y[self.l_rowidx[ptr]] -= self.l_vals[ptr] * yk;
            }
        }
        for k in (0..n).rev() {
            let yk = y[k] / self.u_diag[k];
            y[k] = yk;
            if yk == czero() {
                continue;
            }
            for ptr in self.u_colptr[k]..self.u_colptr[k + 1] {
                y[self.u_rowidx[ptr]] -= self.u_vals[ptr] * yk;
            }
        }
        let mut x = vec![czero(); n];
        for k in 0..n {
            x[self.q[k]] = y[k];
        }
        x
    }
}
