//! Incomplete Cholesky on an imposed sparsity pattern, and the
//! statically-condensed pattern used for vertex-star relaxations.

use super::cholesky::CholFactor;
use super::csr::CsrMatrix;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// An imposed lower-triangular pattern together with the symmetric
/// permutation it lives in. `lower[i]` holds the strictly-below-diagonal
/// columns allowed in row i (sorted); diagonals are always allowed.
#[derive(Debug, Clone)]
pub struct RowPattern {
    /// perm[new] = old.
    pub perm: Vec<usize>,
    pub lower: Vec<Vec<usize>>,
}

impl RowPattern {
    pub fn nnz(&self) -> usize {
        self.lower.iter().map(|r| r.len()).sum::<usize>() + self.lower.len()
    }
}

/// The sparsity pattern arising from static condensation.
///
/// DOFs are reordered interiors-first; the pattern is the (permuted) pattern
/// of A plus, on the interface block, the symbolic pattern of
/// `A_GG + A_GI inv(A_II) A_IG` with the interior block treated as block
/// diagonal over its connected groups.
pub fn sc_pattern<T: Real>(a: &CsrMatrix<T>, interior: &[bool]) -> RowPattern {
    let n = a.nrows();
    assert_eq!(interior.len(), n);
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    perm.extend((0..n).filter(|&i| interior[i]));
    let n_int = perm.len();
    perm.extend((0..n).filter(|&i| !interior[i]));
    let mut iperm = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        iperm[old] = new;
    }

    let mut lower: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let (cols, _) = a.row(i);
        let ni = iperm[i];
        for &j in cols {
            let nj = iperm[j];
            if nj < ni {
                lower[ni].push(nj);
            }
        }
    }

    // Interior groups: connected components of the interior-interior graph.
    let mut comp = vec![usize::MAX; n_int];
    let mut ncomp = 0;
    let mut stack = Vec::new();
    for s in 0..n_int {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = ncomp;
        stack.push(s);
        while let Some(u) = stack.pop() {
            let (cols, _) = a.row(perm[u]);
            for &j in cols {
                let nj = iperm[j];
                if nj < n_int && comp[nj] == usize::MAX {
                    comp[nj] = ncomp;
                    stack.push(nj);
                }
            }
        }
        ncomp += 1;
    }
    // Interface neighbors of each group; Schur fill couples all pairs that
    // share a group.
    let mut group_nbrs: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for u in 0..n_int {
        let (cols, _) = a.row(perm[u]);
        for &j in cols {
            let nj = iperm[j];
            if nj >= n_int {
                group_nbrs[comp[u]].push(nj);
            }
        }
    }
    for nbrs in &mut group_nbrs {
        nbrs.sort_unstable();
        nbrs.dedup();
        for a_i in 0..nbrs.len() {
            for b_i in 0..a_i {
                lower[nbrs[a_i]].push(nbrs[b_i]);
            }
        }
    }
    for row in &mut lower {
        row.sort_unstable();
        row.dedup();
    }
    RowPattern { perm, lower }
}

/// Recover the lower pattern of an existing (complete) Cholesky factor.
pub fn pattern_from_cholesky<T: Real>(f: &CholFactor<T>) -> RowPattern {
    let n = f.n();
    let mut lower: Vec<Vec<usize>> = vec![Vec::new(); n];
    let rec = f.pattern_lower();
    for (i, j) in rec {
        if j < i {
            lower[i].push(j);
        }
    }
    for row in &mut lower {
        row.sort_unstable();
        row.dedup();
    }
    RowPattern { perm: f.perm.clone(), lower }
}

#[derive(Debug, Clone)]
pub struct IccFactor<T> {
    /// perm[new] = old.
    pub perm: Vec<usize>,
    rows: Vec<Vec<(usize, T)>>,
    diag: Vec<T>,
    /// Diagonal shift that was needed for the factorization to exist.
    pub shift: T,
    n: usize,
}

/// Incomplete Cholesky dropping all fill outside `pattern`.
///
/// On a pivot failure the factorization restarts from `A` with the diagonal
/// shifted by sigma, starting at 1e-10 max|diag| and doubling until success;
/// sigma beyond 1e-2 max|diag| is a hard failure.
pub fn icc_imposed<T: Real>(a: &CsrMatrix<T>, pattern: &RowPattern) -> Result<IccFactor<T>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(pattern.lower.len(), n);
    let ap = a.permute_symmetric(&pattern.perm);
    let max_diag = ap.diagonal().iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let mut shift = T::zero();
    let sigma0 = real::<T>(1e-10) * max_diag;
    let cap = real::<T>(1e-2) * max_diag;
    loop {
        match try_icc(&ap, &pattern.lower, shift) {
            Ok((rows, diag)) => {
                return Ok(IccFactor { perm: pattern.perm.clone(), rows, diag, shift, n });
            }
            Err(_) => {
                shift = if shift == T::zero() { sigma0 } else { shift + shift };
                if shift > cap {
                    return Err(Error::numerical(format!(
                        "incomplete Cholesky failed even with shift {shift:e} (cap {cap:e})"
                    )));
                }
            }
        }
    }
}

#[allow(clippy::type_complexity)]
fn try_icc<T: Real>(
    ap: &CsrMatrix<T>,
    lower: &[Vec<usize>],
    shift: T,
) -> Result<(Vec<Vec<(usize, T)>>, Vec<T>)> {
    let n = ap.nrows();
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    let mut diag = vec![T::zero(); n];
    for k in 0..n {
        let (acols, avals) = ap.row(k);
        let mut akk = shift;
        let get_a = |j: usize| -> T {
            match acols.binary_search(&j) {
                Ok(p) => avals[p],
                Err(_) => T::zero(),
            }
        };
        match acols.binary_search(&k) {
            Ok(p) => akk += avals[p],
            Err(_) => {}
        }
        let mut lrow: Vec<(usize, T)> = Vec::with_capacity(lower[k].len());
        for &j in &lower[k] {
            debug_assert!(j < k);
            // Dot of the partial rows k and j over columns < j.
            let mut s = get_a(j);
            let rj = &rows[j];
            let mut pa = 0;
            let mut pb = 0;
            while pa < lrow.len() && pb < rj.len() {
                let (ca, va) = lrow[pa];
                let (cb, vb) = rj[pb];
                match ca.cmp(&cb) {
                    std::cmp::Ordering::Less => pa += 1,
                    std::cmp::Ordering::Greater => pb += 1,
                    std::cmp::Ordering::Equal => {
                        s -= va * vb;
                        pa += 1;
                        pb += 1;
                    }
                }
            }
            let lkj = s / diag[j];
            lrow.push((j, lkj));
        }
        let mut d = akk;
        for &(_, v) in &lrow {
            d -= v * v;
        }
        if d <= T::zero() {
            return Err(Error::numerical(format!("icc pivot failure at row {k}")));
        }
        diag[k] = d.sqrt();
        // Rescale stored entries by nothing: rows store L(k, j) with the
        // convention L(k,k) = diag[k]; entries were divided by diag already.
        rows[k] = lrow;
    }
    Ok((rows, diag))
}

impl<T: Real> IccFactor<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum::<usize>() + self.n
    }

    pub fn memory_bytes(&self) -> usize {
        self.nnz() * (std::mem::size_of::<usize>() + std::mem::size_of::<T>())
            + self.perm.len() * std::mem::size_of::<usize>()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        self.solve_into(b, &mut out);
        out
    }

    pub fn solve_into(&self, b: &[T], out: &mut [T]) {
        let n = self.n;
        let mut y = vec![T::zero(); n];
        for new in 0..n {
            y[new] = b[self.perm[new]];
        }
        for i in 0..n {
            let mut s = y[i];
            for &(j, v) in &self.rows[i] {
                s -= v * y[j];
            }
            y[i] = s / self.diag[i];
        }
        for i in (0..n).rev() {
            let xi = y[i] / self.diag[i];
            y[i] = xi;
            for &(j, v) in &self.rows[i] {
                y[j] -= v * xi;
            }
        }
        for new in 0..n {
            out[self.perm[new]] = y[new];
        }
    }

    /// Entries as (row, col, value) in permuted indexing, diagonal included.
    pub fn entries(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            for &(j, v) in &self.rows[i] {
                out.push((i, j, v));
            }
            out.push((i, i, self.diag[i]));
        }
        out
    }
}
