//! Compressed sparse row matrices with sorted column indices per row.

use crate::dense::DenseMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            vals: vec![T::one(); n],
        }
    }

    /// Build from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &mut Vec<(usize, usize, T)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut vals: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in triplets.iter() {
            debug_assert!(r < nrows && c < ncols);
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix { nrows, ncols, row_ptr, col_idx, vals }
    }

    pub fn from_dense(m: &DenseMatrix<T>, drop_tol: T) -> Self {
        let mut trips = Vec::new();
        for i in 0..m.nrows {
            for j in 0..m.ncols {
                if m[(i, j)].abs() > drop_tol {
                    trips.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows, m.ncols, &mut trips)
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m[(i, j)] += v;
            }
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.vals[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> T {
        self.vals.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut s = T::zero();
            for (&j, &v) in cols.iter().zip(vals) {
                s += v * x[j];
            }
            y[i] = s;
        }
    }

    /// y += A^T x without materializing the transpose.
    pub fn matvec_transpose_add(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        for i in 0..self.nrows {
            let xi = x[i];
            if xi == T::zero() {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut trips: Vec<(usize, usize, T)> = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                trips.push((j, i, v));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, &mut trips)
    }

    /// Sparse product A * B.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut trips = Vec::new();
        let mut marker = vec![usize::MAX; other.ncols];
        let mut row_vals: Vec<T> = Vec::new();
        let mut row_cols: Vec<usize> = Vec::new();
        for i in 0..self.nrows {
            row_vals.clear();
            row_cols.clear();
            let (acols, avals) = self.row(i);
            for (&k, &av) in acols.iter().zip(avals) {
                let (bcols, bvals) = other.row(k);
                for (&j, &bv) in bcols.iter().zip(bvals) {
                    if marker[j] == usize::MAX {
                        marker[j] = row_cols.len();
                        row_cols.push(j);
                        row_vals.push(av * bv);
                    } else {
                        row_vals[marker[j]] += av * bv;
                    }
                }
            }
            for (idx, &j) in row_cols.iter().enumerate() {
                trips.push((i, j, row_vals[idx]));
                marker[j] = usize::MAX;
            }
        }
        Self::from_triplets(self.nrows, other.ncols, &mut trips)
    }

    /// Extract the submatrix with the given row and column index sets
    /// (global -> local positions are the slice positions).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (local, &g) in cols.iter().enumerate() {
            col_map[g] = local;
        }
        let mut trips = Vec::new();
        for (li, &gi) in rows.iter().enumerate() {
            let (rcols, rvals) = self.row(gi);
            for (&gj, &v) in rcols.iter().zip(rvals) {
                let lj = col_map[gj];
                if lj != usize::MAX {
                    trips.push((li, lj, v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), &mut trips)
    }

    /// Symmetric permutation: entry (i, j) of the result is
    /// (perm[i], perm[j]) of `self`, i.e. perm maps new -> old.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert_eq!(self.nrows, self.ncols);
        let mut iperm = vec![0usize; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let mut trips = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                trips.push((iperm[i], iperm[j], v));
            }
        }
        Self::from_triplets(self.nrows, self.ncols, &mut trips)
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        let t = self.transpose();
        if t.col_idx != self.col_idx || t.row_ptr != self.row_ptr {
            return false;
        }
        self.vals
            .iter()
            .zip(&t.vals)
            .all(|(&a, &b)| (a - b).abs() <= tol * a.abs().max(b.abs()).max(T::one()))
    }

    /// Drop entries with magnitude <= tol (keeps explicit structural zeros out).
    pub fn drop_small(&self, tol: T) -> Self {
        let mut trips = Vec::new();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if v.abs() > tol {
                    trips.push((i, j, v));
                }
            }
        }
        Self::from_triplets(self.nrows, self.ncols, &mut trips)
    }

    pub fn scale(&mut self, s: T) {
        for v in &mut self.vals {
            *v *= s;
        }
    }

    /// A + B with general patterns.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        let mut trips = Vec::with_capacity(self.nnz() + other.nnz());
        for m in [self, other] {
            for i in 0..m.nrows {
                let (cols, vals) = m.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    trips.push((i, j, v));
                }
            }
        }
        Self::from_triplets(self.nrows, self.ncols, &mut trips)
    }

    /// Tracked bytes of the stored arrays (memory accounting proxy).
    pub fn memory_bytes(&self) -> usize {
        self.row_ptr.len() * std::mem::size_of::<usize>()
            + self.col_idx.len() * std::mem::size_of::<usize>()
            + self.vals.len() * std::mem::size_of::<T>()
    }

    /// Coordinate-list text dump: one `i j value` line per entry.
    pub fn write_coo(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "# coo {} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.17e}", i, j, v)?;
            }
        }
        Ok(())
    }
}
