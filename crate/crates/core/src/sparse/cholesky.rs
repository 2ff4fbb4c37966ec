//! Sparse Cholesky: elimination tree, up-looking numeric factorization,
//! triangular solves. The factor is stored column-major with the diagonal
//! entry first in each column.

use super::csr::CsrMatrix;
use super::ordering::{nested_dissection_points, rcm};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    Natural,
    Rcm,
    /// Recursive coordinate bisection on DOF representative points.
    NestedDissection,
}

#[derive(Debug, Clone)]
pub struct CholFactor<T> {
    /// perm[new] = old.
    pub perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<T>,
    n: usize,
}

/// Elimination tree of a symmetric matrix from its CSR pattern
/// (Liu's algorithm with path compression).
fn elimination_tree<T: Real>(a: &CsrMatrix<T>) -> Vec<usize> {
    let n = a.nrows();
    let mut parent = vec![usize::MAX; n];
    let mut ancestor = vec![usize::MAX; n];
    for k in 0..n {
        let (cols, _) = a.row(k);
        for &j in cols {
            if j >= k {
                continue;
            }
            let mut i = j;
            while i != usize::MAX && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == usize::MAX {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}

/// Pattern of row k of L: the union of etree paths from the below-diagonal
/// entries of row k up toward k, in topological (ascending-target) order.
fn ereach<T: Real>(
    a: &CsrMatrix<T>,
    k: usize,
    parent: &[usize],
    mark: &mut [usize],
    stack: &mut Vec<usize>,
) -> Vec<usize> {
    stack.clear();
    let mut path = Vec::new();
    mark[k] = k;
    let (cols, _) = a.row(k);
    for &j in cols {
        if j >= k {
            continue;
        }
        let mut i = j;
        path.clear();
        while mark[i] != k {
            path.push(i);
            mark[i] = k;
            if parent[i] == usize::MAX {
                break;
            }
            i = parent[i];
            if i >= k {
                break;
            }
        }
        // Append the path in reverse so ancestors come after descendants.
        while let Some(x) = path.pop() {
            stack.push(x);
        }
    }
    let mut s = stack.clone();
    s.sort_unstable();
    s
}

/// Sparse Cholesky of a symmetric positive definite matrix.
///
/// `points`, when provided, gives a representative location per row for the
/// nested dissection ordering.
pub fn cholesky<T: Real>(
    a: &CsrMatrix<T>,
    ordering: Ordering,
    points: Option<&[[T; 3]]>,
) -> Result<CholFactor<T>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let perm: Vec<usize> = match ordering {
        Ordering::Natural => (0..n).collect(),
        Ordering::Rcm => rcm(a),
        Ordering::NestedDissection => {
            let pts = points.ok_or_else(|| {
                Error::invalid_argument("nested dissection ordering requires DOF points")
            })?;
            nested_dissection_points(pts)
        }
    };
    let ap = a.permute_symmetric(&perm);
    cholesky_permuted(&ap, perm)
}

/// Factor a matrix that is already in the desired order.
pub fn cholesky_permuted<T: Real>(ap: &CsrMatrix<T>, perm: Vec<usize>) -> Result<CholFactor<T>> {
    let n = ap.nrows();
    let parent = elimination_tree(ap);
    let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    let mut diag = vec![T::zero(); n];
    let mut x = vec![T::zero(); n];
    let mut mark = vec![usize::MAX; n];
    let mut stack = Vec::new();
    for k in 0..n {
        let pattern = ereach(ap, k, &parent, &mut mark, &mut stack);
        // Scatter row k of the lower triangle (incl. diagonal).
        let (acols, avals) = ap.row(k);
        let mut d = T::zero();
        for (&j, &v) in acols.iter().zip(avals) {
            if j < k {
                x[j] = v;
            } else if j == k {
                d = v;
            }
        }
        for &j in &pattern {
            let lkj = x[j] / diag[j];
            x[j] = T::zero();
            for &(i, v) in &cols[j] {
                x[i] -= v * lkj;
            }
            d -= lkj * lkj;
            cols[j].push((k, lkj));
        }
        if d <= T::zero() {
            return Err(Error::numerical(format!(
                "sparse Cholesky: nonpositive pivot {d:e} at row {k}"
            )));
        }
        diag[k] = d.sqrt();
    }
    // Flatten column-major with the diagonal first.
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::new();
    let mut vals = Vec::new();
    col_ptr.push(0);
    for j in 0..n {
        row_idx.push(j);
        vals.push(diag[j]);
        for &(i, v) in &cols[j] {
            row_idx.push(i);
            vals.push(v);
        }
        col_ptr.push(row_idx.len());
    }
    Ok(CholFactor { perm, col_ptr, row_idx, vals, n })
}

impl<T: Real> CholFactor<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn memory_bytes(&self) -> usize {
        self.col_ptr.len() * std::mem::size_of::<usize>()
            + self.row_idx.len() * std::mem::size_of::<usize>()
            + self.vals.len() * std::mem::size_of::<T>()
            + self.perm.len() * std::mem::size_of::<usize>()
    }

    /// Solve A x = b. Flops: ~4 nnz(L).
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[T], out: &mut [T]) {
        let n = self.n;
        let mut y = vec![T::zero(); n];
        for new in 0..n {
            y[new] = b[self.perm[new]];
        }
        // Forward: L z = Pb (column-oriented).
        for j in 0..n {
            let lo = self.col_ptr[j];
            let hi = self.col_ptr[j + 1];
            let zj = y[j] / self.vals[lo];
            y[j] = zj;
            for p in lo + 1..hi {
                y[self.row_idx[p]] -= self.vals[p] * zj;
            }
        }
        // Backward: L^T w = z.
        for j in (0..n).rev() {
            let lo = self.col_ptr[j];
            let hi = self.col_ptr[j + 1];
            let mut s = y[j];
            for p in lo + 1..hi {
                s -= self.vals[p] * y[self.row_idx[p]];
            }
            y[j] = s / self.vals[lo];
        }
        for new in 0..n {
            out[self.perm[new]] = y[new];
        }
    }

    /// (row, col) positions of the stored factor entries, permuted indexing.
    pub fn pattern_lower(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.nnz());
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                out.push((self.row_idx[p], j));
            }
        }
        out
    }

    /// Entries as (row, col, value) in permuted indexing.
    pub fn entries(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::with_capacity(self.nnz());
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                out.push((self.row_idx[p], j, self.vals[p]));
            }
        }
        out
    }

    /// Reconstruct P A P^T = L L^T (test support).
    pub fn reconstruct(&self) -> CsrMatrix<T> {
        let mut trips = Vec::new();
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                trips.push((self.row_idx[p], j, self.vals[p]));
            }
        }
        let l = CsrMatrix::from_triplets(self.n, self.n, &mut trips);
        let lt = l.transpose();
        l.matmul(&lt)
    }
}
