//! Small dense matrices: storage, factorizations, and the symmetric
//! generalized eigensolver used for the 1D basis construction.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix { nrows, ncols, data: vec![T::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows > 0 { rows[0].len() } else { 0 };
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols);
            data.extend_from_slice(r);
        }
        DenseMatrix { nrows, ncols, data }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.ncols, x.len());
        let mut y = vec![T::zero(); self.nrows];
        for i in 0..self.nrows {
            let mut s = T::zero();
            for j in 0..self.ncols {
                s += self[(i, j)] * x[j];
            }
            y[i] = s;
        }
        y
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    /// Extract the submatrix with the given (sorted or unsorted) row/col ids.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (ii, &i) in rows.iter().enumerate() {
            for (jj, &j) in cols.iter().enumerate() {
                out[(ii, jj)] = self[(i, j)];
            }
        }
        out
    }

    /// In-place lower Cholesky factorization; errors on a nonpositive pivot.
    pub fn cholesky(&self) -> Result<DenseMatrix<T>> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut l = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if s <= T::zero() {
                        return Err(Error::numerical(format!(
                            "dense Cholesky: nonpositive pivot {s:e} at row {i}"
                        )));
                    }
                    l[(i, i)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Ok(l)
    }

    /// Solve A x = b given L from `cholesky`.
    pub fn cholesky_solve(l: &DenseMatrix<T>, b: &[T]) -> Vec<T> {
        let n = l.nrows;
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= l[(i, k)] * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= l[(k, i)] * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        x
    }

    /// Symmetric positive definite solve.
    pub fn spd_solve(&self, b: &[T]) -> Result<Vec<T>> {
        let l = self.cholesky()?;
        Ok(Self::cholesky_solve(&l, b))
    }

    /// LU solve with partial pivoting, for indefinite test oracles.
    pub fn lu_solve(&self, b: &[T]) -> Result<Vec<T>> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let mut x = b.to_vec();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[(piv[k], k)].abs();
            for i in k + 1..n {
                let v = a[(piv[i], k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() {
                return Err(Error::numerical("LU solve: singular matrix".to_string()));
            }
            piv.swap(k, p);
            let pk = piv[k];
            for i in k + 1..n {
                let pi = piv[i];
                let f = a[(pi, k)] / a[(pk, k)];
                a[(pi, k)] = f;
                for j in k + 1..n {
                    let s = a[(pk, j)];
                    a[(pi, j)] = a[(pi, j)] - f * s;
                }
            }
        }
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut s = x[piv[i]];
            for j in 0..i {
                s -= a[(piv[i], j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= a[(piv[i], j)] * x[j];
            }
            x[i] = s / a[(piv[i], i)];
        }
        Ok(x)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.ncols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.ncols + j]
    }
}

const JACOBI_SWEEP_CAP: usize = 100;

/// Cyclic Jacobi eigensolver for a symmetric matrix.
///
/// Returns (eigenvalues, eigenvectors as columns), unsorted. Iterates sweeps
/// until the off-diagonal Frobenius norm falls below `1e-14 * ||A||_F`, with
/// a cap of 100 sweeps.
pub fn jacobi_eigh<T: Real>(a: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    assert_eq!(a.nrows, a.ncols);
    let n = a.nrows;
    let mut a = a.clone();
    let mut v = DenseMatrix::<T>::identity(n);
    if n <= 1 {
        let eigs = (0..n).map(|i| a[(i, i)]).collect();
        return Ok((eigs, v));
    }
    let norm: T = a.data.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    let tol = real::<T>(1e-14) * norm;

    for _sweep in 0..JACOBI_SWEEP_CAP {
        let mut off = T::zero();
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if (off + off).sqrt() <= tol {
            let eigs = (0..n).map(|i| a[(i, i)]).collect();
            return Ok((eigs, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (real::<T>(2.0) * apq);
                let t = {
                    let s = if theta >= T::zero() { T::one() } else { -T::one() };
                    s / (theta.abs() + (T::one() + theta * theta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // Apply the rotation to rows/cols p and q.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::numerical(format!(
        "Jacobi eigensolver did not converge within {JACOBI_SWEEP_CAP} sweeps (n = {n})"
    )))
}

/// Symmetric generalized eigenproblem A x = lambda B x with B SPD.
///
/// Reduces with the Cholesky factor of B, solves the standard problem by
/// cyclic Jacobi, and back-transforms. Eigenvalues are returned sorted
/// ascending; each eigenvector is scaled so that its entry of largest
/// magnitude is positive, making tabulations reproducible.
pub fn generalized_eigh<T: Real>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
) -> Result<(Vec<T>, DenseMatrix<T>)> {
    assert_eq!(a.nrows, a.ncols);
    assert_eq!(b.nrows, b.ncols);
    assert_eq!(a.nrows, b.nrows);
    let n = a.nrows;
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }
    let l = b.cholesky()?;
    // C = L^-1 A L^-T
    let mut c = DenseMatrix::<T>::zeros(n, n);
    // First solve L Y = A (column-wise), then L Z = Y^T; C = Z^T ... done via
    // two triangular solves on columns.
    let mut y = DenseMatrix::<T>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let mut s = a[(i, j)];
            for k in 0..i {
                s -= l[(i, k)] * y[(k, j)];
            }
            y[(i, j)] = s / l[(i, i)];
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut s = y[(i, j)];
            for k in 0..j {
                s -= l[(j, k)] * c[(i, k)];
            }
            c[(i, j)] = s / l[(j, j)];
        }
    }
    let (eigs, q) = jacobi_eigh(&c)?;
    // X = L^-T Q
    let mut x = DenseMatrix::<T>::zeros(n, n);
    for j in 0..n {
        for i in (0..n).rev() {
            let mut s = q[(i, j)];
            for k in i + 1..n {
                s -= l[(k, i)] * x[(k, j)];
            }
            x[(i, j)] = s / l[(i, i)];
        }
    }
    // Sort ascending and fix signs.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigs[i].partial_cmp(&eigs[j]).unwrap());
    let mut eigs_sorted = Vec::with_capacity(n);
    let mut xs = DenseMatrix::<T>::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        eigs_sorted.push(eigs[oldj]);
        let mut big = T::zero();
        let mut sign = T::one();
        for i in 0..n {
            let v = x[(i, oldj)];
            if v.abs() > big {
                big = v.abs();
                sign = if v >= T::zero() { T::one() } else { -T::one() };
            }
        }
        for i in 0..n {
            xs[(i, newj)] = sign * x[(i, oldj)];
        }
    }
    Ok((eigs_sorted, xs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn cholesky_solve_matches_direct() {
        let a = dm(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]);
        let x = a.spd_solve(&[1.0, 2.0, 3.0]).unwrap();
        let r = a.matvec(&x);
        assert!((r[0] - 1.0).abs() < 1e-12);
        assert!((r[1] - 2.0).abs() < 1e-12);
        assert!((r[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = dm(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(a.cholesky().is_err());
    }

    #[test]
    fn jacobi_recovers_diagonal_spectrum() {
        // Similarity-transform a known diagonal.
        let q = {
            let c = (0.3f64).cos();
            let s = (0.3f64).sin();
            dm(&[&[c, -s, 0.0], &[s, c, 0.0], &[0.0, 0.0, 1.0]])
        };
        let d = dm(&[&[1.0, 0.0, 0.0], &[0.0, 5.0, 0.0], &[0.0, 0.0, 9.0]]);
        let a = q.matmul(&d).matmul(&q.transpose());
        let (mut eigs, _) = jacobi_eigh(&a).unwrap();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 5.0).abs() < 1e-12);
        assert!((eigs[2] - 9.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_eigh_b_orthonormal() {
        let a = dm(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]);
        let b = dm(&[&[2.0, 0.5, 0.0], &[0.5, 2.0, 0.5], &[0.0, 0.5, 2.0]]);
        let (eigs, x) = generalized_eigh(&a, &b).unwrap();
        assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
        let bx = b.matmul(&x);
        let g = x.transpose().matmul(&bx);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - want).abs() < 1e-12, "gram {i}{j} = {}", g[(i, j)]);
            }
        }
        let ax = a.matmul(&x);
        let lam = x.transpose().matmul(&ax);
        for i in 0..3 {
            assert!((lam[(i, i)] - eigs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn lu_solves_indefinite() {
        let a = dm(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let x = a.lu_solve(&[3.0, 4.0]).unwrap();
        assert!((x[0] - 4.0).abs() < 1e-14);
        assert!((x[1] - 3.0).abs() < 1e-14);
    }
}
