//! Left-looking sparse LU (Gilbert-Peierls) with threshold pivoting.
//!
//! Columns are processed in a fill-reducing order computed on the pattern of
//! `A + Aᵀ`. With [`PivotStrategy::DiagonalPreference`] the diagonal entry of
//! the current column is taken whenever it is within the threshold of the
//! column maximum, so symmetric matrices keep a symmetric pivot sequence as
//! long as their diagonal allows it; zero diagonal blocks pivot off-diagonal.

use crate::error::{Error, Result};

use super::sparse::CscMatrix;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PivotStrategy {
    /// Accept the diagonal if `|a_kk| >= threshold * max_i |a_ik|`.
    DiagonalPreference { threshold: f64 },
    /// Classic partial pivoting on the column maximum.
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    Natural,
    /// Approximate minimum degree on the pattern of `A + Aᵀ`.
    Amd,
    /// For `[S Bᵀ; B 0]` with the first `primal` unknowns in the `S` block:
    /// minimum degree on the pattern of `S + BᵀB`, each multiplier placed
    /// right after the last primal unknown it couples to, so that its
    /// diagonal has filled in by the time it is eliminated.
    Saddle { primal: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuOptions {
    pub strategy: PivotStrategy,
    pub ordering: Ordering,
    /// A pivot below `singular_tolerance * max|a_ij|` is reported as singular.
    pub singular_tolerance: f64,
}

impl LuOptions {
    /// Options for `[S Bᵀ; B 0]` with `primal` unknowns in the `S` block.
    ///
    /// The low threshold keeps the symmetric pivot sequence produced by the
    /// saddle ordering; accuracy is recovered by iterative refinement.
    pub fn saddle(primal: usize) -> Self {
        Self {
            strategy: PivotStrategy::DiagonalPreference { threshold: 1e-4 },
            ordering: Ordering::Saddle { primal },
            singular_tolerance: 1e-14,
        }
    }
}

impl Default for LuOptions {
    fn default() -> Self {
        Self {
            strategy: PivotStrategy::DiagonalPreference { threshold: 0.1 },
            ordering: Ordering::Amd,
            singular_tolerance: 1e-14,
        }
    }
}

/// Pivot statistics gathered during factorization.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PivotReport {
    pub min_pivot: f64,
    pub max_pivot: f64,
    /// `max_pivot / min_pivot`; a cheap conditioning indicator.
    pub pivot_ratio: f64,
    /// Largest matrix entry, the scale for the singularity threshold.
    pub scale: f64,
    pub off_diagonal_pivots: usize,
    pub factor_nnz: usize,
}

#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    // unit lower factor, row indices in pivot order, diagonal first in each column
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    // upper factor, diagonal last in each column
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
    pinv: Vec<usize>,
    q: Vec<usize>,
    report: PivotReport,
}

fn column_ordering(a: &CscMatrix, ordering: Ordering) -> Result<Vec<usize>> {
    let n = a.ncols();
    match ordering {
        Ordering::Natural => Ok((0..n).collect()),
        Ordering::Amd => {
            if n == 0 {
                return Ok(Vec::new());
            }
            let control = amd::Control::default();
            let (p, _, _) = amd::order(n, a.col_ptr(), a.row_idx(), &control)
                .map_err(|s| Error::InvalidArgument(format!("AMD ordering failed: {s:?}")))?;
            Ok(p)
        }
        Ordering::Saddle { primal } => saddle_ordering(a, primal),
    }
}

fn saddle_ordering(a: &CscMatrix, primal: usize) -> Result<Vec<usize>> {
    let n = a.ncols();
    if primal > n {
        return Err(Error::InvalidArgument(format!("primal block {primal} larger than matrix {n}")));
    }
    // multiplier j -> its primal neighbours (rows of column j in the B block)
    let neighbours: Vec<Vec<usize>> =
        (primal..n).map(|j| a.column(j).map(|(i, _)| i).filter(|&i| i < primal).collect()).collect();
    let mut pattern = Vec::new();
    for j in 0..primal {
        for (i, _) in a.column(j) {
            if i < primal {
                pattern.push((i, j, 1.0));
            }
        }
    }
    for nb in &neighbours {
        for &i in nb {
            for &j in nb {
                pattern.push((i, j, 1.0));
            }
        }
    }
    let mut order = if primal == 0 {
        Vec::new()
    } else {
        let g = CscMatrix::from_triplets(primal, primal, &pattern);
        let (p, _, _) = amd::order(primal, g.col_ptr(), g.row_idx(), &amd::Control::default())
            .map_err(|s| Error::InvalidArgument(format!("AMD ordering failed: {s:?}")))?;
        p
    };
    let mut position = vec![0usize; primal];
    for (k, &i) in order.iter().enumerate() {
        position[i] = k;
    }
    // multipliers grouped by the slot after which they go, stable in index
    let mut after: Vec<Vec<usize>> = vec![Vec::new(); primal + 1];
    for (m, nb) in neighbours.iter().enumerate() {
        let slot = nb.iter().map(|&i| position[i] + 1).max().unwrap_or(0);
        after[slot].push(primal + m);
    }
    let mut q = Vec::with_capacity(n);
    q.append(&mut after[0]);
    for k in 0..primal {
        q.push(order[k]);
        q.append(&mut after[k + 1]);
    }
    order.clear();
    Ok(q)
}

/// Depth-first search from `start` in the graph of the partially built `L`.
/// Writes finished nodes to `out[..top]` downward and returns the new `top`.
#[allow(clippy::too_many_arguments)]
fn dfs(
    start: usize,
    l_ptr: &[usize],
    l_idx: &[usize],
    pinv: &[usize],
    mark: &mut [usize],
    stamp: usize,
    stack: &mut [usize],
    pstack: &mut [usize],
    out: &mut [usize],
    mut top: usize,
) -> usize {
    let mut head = 0usize;
    stack[0] = start;
    loop {
        let j = stack[head];
        let jnew = pinv[j];
        if mark[j] != stamp {
            mark[j] = stamp;
            pstack[head] = if jnew == NONE { 0 } else { l_ptr[jnew] };
        }
        let end = if jnew == NONE { 0 } else { l_ptr[jnew + 1] };
        let mut done = true;
        let mut p = pstack[head];
        while p < end {
            let i = l_idx[p];
            p += 1;
            if mark[i] == stamp {
                continue;
            }
            pstack[head] = p;
            head += 1;
            stack[head] = i;
            done = false;
            break;
        }
        if done {
            top -= 1;
            out[top] = j;
            if head == 0 {
                return top;
            }
            head -= 1;
        }
    }
}

impl SparseLu {
    pub fn factor(a: &CscMatrix, options: &LuOptions) -> Result<Self> {
        let n = a.ncols();
        if a.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.nrows() });
        }
        let q = column_ordering(a, options.ordering)?;
        let scale = a.max_abs();
        let threshold = options.singular_tolerance * scale;

        let mut l_ptr = vec![0usize; n + 1];
        let mut l_idx = Vec::with_capacity(4 * a.nnz());
        let mut l_val = Vec::with_capacity(4 * a.nnz());
        let mut u_ptr = vec![0usize; n + 1];
        let mut u_idx = Vec::with_capacity(4 * a.nnz());
        let mut u_val = Vec::with_capacity(4 * a.nnz());

        let mut x = vec![0.0; n];
        let mut pinv = vec![NONE; n];
        let mut mark = vec![NONE; n];
        let mut stack = vec![0usize; n];
        let mut pstack = vec![0usize; n];
        let mut reach = vec![0usize; n];

        let mut min_pivot = f64::INFINITY;
        let mut max_pivot: f64 = 0.0;
        let mut off_diagonal = 0usize;

        for k in 0..n {
            l_ptr[k] = l_idx.len();
            u_ptr[k] = u_idx.len();
            let col = q[k];

            // sparse triangular solve x = L \ A(:, col)
            let mut top = n;
            for (i, _) in a.column(col) {
                if mark[i] != k {
                    top = dfs(
                        i, &l_ptr, &l_idx, &pinv, &mut mark, k, &mut stack, &mut pstack, &mut reach, top,
                    );
                }
            }
            for &i in &reach[top..n] {
                x[i] = 0.0;
            }
            for (i, v) in a.column(col) {
                x[i] = v;
            }
            for px in top..n {
                let j = reach[px];
                let jnew = pinv[j];
                if jnew == NONE {
                    continue;
                }
                let xj = x[j];
                for p in l_ptr[jnew] + 1..l_ptr[jnew + 1] {
                    x[l_idx[p]] -= l_val[p] * xj;
                }
            }

            // pivot selection
            let mut ipiv = NONE;
            let mut amax = -1.0;
            for &i in &reach[top..n] {
                if pinv[i] == NONE {
                    if x[i].abs() > amax {
                        amax = x[i].abs();
                        ipiv = i;
                    }
                } else {
                    u_idx.push(pinv[i]);
                    u_val.push(x[i]);
                }
            }
            if ipiv == NONE || !(amax > threshold) {
                return Err(Error::SingularSystem { step: k, pivot: amax.max(0.0), threshold });
            }
            if let PivotStrategy::DiagonalPreference { threshold: tau } = options.strategy {
                if pinv[col] == NONE && mark[col] == k && x[col].abs() >= tau * amax {
                    ipiv = col;
                }
            }
            if ipiv != col {
                off_diagonal += 1;
            }
            let pivot = x[ipiv];
            min_pivot = min_pivot.min(pivot.abs());
            max_pivot = max_pivot.max(pivot.abs());
            u_idx.push(k);
            u_val.push(pivot);
            pinv[ipiv] = k;
            l_idx.push(ipiv);
            l_val.push(1.0);
            for &i in &reach[top..n] {
                if pinv[i] == NONE {
                    l_idx.push(i);
                    l_val.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
        }
        l_ptr[n] = l_idx.len();
        u_ptr[n] = u_idx.len();
        for i in l_idx.iter_mut() {
            *i = pinv[*i];
        }

        let factor_nnz = l_idx.len() + u_idx.len();
        let report = PivotReport {
            min_pivot: if n == 0 { 0.0 } else { min_pivot },
            max_pivot,
            pivot_ratio: if n == 0 { 1.0 } else { max_pivot / min_pivot },
            scale,
            off_diagonal_pivots: off_diagonal,
            factor_nnz,
        };
        Ok(Self { n, l_ptr, l_idx, l_val, u_ptr, u_idx, u_val, pinv, q, report })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn report(&self) -> PivotReport {
        self.report
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = vec![0.0; self.n];
        for (i, &bi) in b.iter().enumerate() {
            x[self.pinv[i]] = bi;
        }
        for j in 0..self.n {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for p in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                x[self.l_idx[p]] -= self.l_val[p] * xj;
            }
        }
        for j in (0..self.n).rev() {
            let diag = self.u_ptr[j + 1] - 1;
            x[j] /= self.u_val[diag];
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for p in self.u_ptr[j]..diag {
                x[self.u_idx[p]] -= self.u_val[p] * xj;
            }
        }
        let mut out = vec![0.0; self.n];
        for (k, &col) in self.q.iter().enumerate() {
            out[col] = x[k];
        }
        out
    }
}
