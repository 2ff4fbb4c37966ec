//! 1D FDM basis on the reference interval [-1, 1].
//!
//! The interior basis functions solve the generalized eigenproblem
//! (s_i, s_j) = delta_ij, (s_i', s_j') = lambda_i delta_ij with zero boundary
//! values; the two interface functions are pinned to values (1, 0) and (0, 1)
//! at the endpoints and are L2-orthogonal to every interior function. The
//! companion DP basis for discontinuous polynomials of degree p-1 consists of
//! the normalized interior derivatives plus the normalized constant.

use crate::dense::{generalized_eigh, jacobi_eigh, DenseMatrix};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_rule, gauss_lobatto_rule, lagrange_tabulate};
use crate::scalar::{real, Real};

#[derive(Debug, Clone)]
pub struct FdmBasis1D<T> {
    /// Polynomial degree of the continuous space.
    pub degree: usize,
    /// p+1 Gauss–Lobatto nodes carrying the Lagrange representation.
    pub gll_nodes: Vec<T>,
    /// Coefficients of the FDM basis in the GLL Lagrange basis:
    /// `s[(i, j)] = s_j(xi_i)`.
    pub s: DenseMatrix<T>,
    /// lambda_0 = 2 (interval length), then the interior eigenvalues
    /// lambda_1..lambda_{p-1}, ascending.
    pub eigenvalues: Vec<T>,
    /// Differentiation matrix `d[(i, j)] = (r_i, s_j')`, p x (p+1).
    pub d: DenseMatrix<T>,
    /// Broken transform: maps FDM coefficients to coefficients in a fully
    /// L2-orthonormal broken basis. Identity except on the 2x2 interface
    /// block {0, p}.
    pub g1d: DenseMatrix<T>,
    /// Inverse of `g1d` (tabulates the broken basis functions).
    pub g1d_inv: DenseMatrix<T>,
    /// FDM mass matrix (s_i, s_j): diagonal plus the (0, p) coupling.
    pub mass: DenseMatrix<T>,
    /// FDM stiffness matrix (s_i', s_j').
    pub stiff: DenseMatrix<T>,
    /// p Gauss–Legendre nodes carrying the nodal DP representation.
    pub dp_nodes: Vec<T>,
    /// DP tabulation at `dp_nodes`: `dp_tab[(i, j)] = r_j(g_i)`.
    pub dp_tab: DenseMatrix<T>,
}

/// GLL-basis stiffness and mass matrices on [-1, 1], integrated with a
/// Gauss–Legendre rule exact for degree 2p.
pub fn reference_matrices_gll<T: Real>(p: usize) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    if p < 1 {
        return Err(Error::invalid_argument("reference_matrices_gll requires p >= 1"));
    }
    let gll = gauss_lobatto_rule::<T>(p + 1)?;
    let gl = gauss_legendre_rule::<T>(p + 1)?;
    let (vals, ders) = lagrange_tabulate(&gll.points, &gl.points)?;
    let n = p + 1;
    let mut a = DenseMatrix::<T>::zeros(n, n);
    let mut b = DenseMatrix::<T>::zeros(n, n);
    for q in 0..gl.len() {
        let w = gl.weights[q];
        for i in 0..n {
            let vi = vals[(q, i)];
            let di = ders[(q, i)];
            for j in 0..n {
                a[(i, j)] += w * di * ders[(q, j)];
                b[(i, j)] += w * vi * vals[(q, j)];
            }
        }
    }
    Ok((a, b))
}

/// Symmetric square root of an SPD 2x2 (or general small) matrix, with its
/// inverse square root.
fn sqrtm_spd<T: Real>(g: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let (eigs, q) = jacobi_eigh(g)?;
    let n = g.nrows;
    for &e in &eigs {
        if e <= T::zero() {
            return Err(Error::numerical(
                "interface Gram matrix is not positive definite".to_string(),
            ));
        }
    }
    let mut root = DenseMatrix::<T>::zeros(n, n);
    let mut inv_root = DenseMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = T::zero();
            let mut si = T::zero();
            for k in 0..n {
                let lk = eigs[k].sqrt();
                s += q[(i, k)] * lk * q[(j, k)];
                si += q[(i, k)] / lk * q[(j, k)];
            }
            root[(i, j)] = s;
            inv_root[(i, j)] = si;
        }
    }
    Ok((root, inv_root))
}

/// Symmetric (Löwdin) orthogonalization of the interface pair, returning the
/// broken coefficient transform and its inverse.
///
/// The transformed basis keeps the interior functions (already orthonormal)
/// and replaces the interface pair by combinations that are L2-orthonormal;
/// the symmetric choice preserves the x -> -x symmetry of the basis.
pub fn broken_orthogonalize<T: Real>(
    p: usize,
    mass: &DenseMatrix<T>,
) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let gram = DenseMatrix::from_rows(&[
        vec![mass[(0, 0)], mass[(0, p)]],
        vec![mass[(p, 0)], mass[(p, p)]],
    ]);
    let (root, inv_root) = sqrtm_spd(&gram)?;
    let mut g = DenseMatrix::<T>::identity(p + 1);
    let mut ginv = DenseMatrix::<T>::identity(p + 1);
    let idx = [0, p];
    for a in 0..2 {
        for b in 0..2 {
            g[(idx[a], idx[b])] = root[(a, b)];
            ginv[(idx[a], idx[b])] = inv_root[(a, b)];
        }
    }
    Ok((g, ginv))
}

/// Construct the FDM basis of degree `p`.
pub fn build_fdm_basis<T: Real>(p: usize) -> Result<FdmBasis1D<T>> {
    if p < 1 {
        return Err(Error::invalid_argument("build_fdm_basis requires p >= 1"));
    }
    let gll = gauss_lobatto_rule::<T>(p + 1)?;
    let (a_gll, b_gll) = reference_matrices_gll::<T>(p)?;
    let n = p + 1;
    let interior: Vec<usize> = (1..p).collect();
    let ni = interior.len();

    let mut s = DenseMatrix::<T>::zeros(n, n);
    s[(0, 0)] = T::one();
    s[(p, p)] = T::one();
    let mut eigenvalues = Vec::with_capacity(p);
    eigenvalues.push(real::<T>(2.0));

    if ni > 0 {
        let a_ii = a_gll.submatrix(&interior, &interior);
        let b_ii = b_gll.submatrix(&interior, &interior);
        let (lam, s_ii) = generalized_eigh(&a_ii, &b_ii)?;
        eigenvalues.extend_from_slice(&lam);
        for (r, &i) in interior.iter().enumerate() {
            for (c, &j) in interior.iter().enumerate() {
                s[(i, j)] = s_ii[(r, c)];
            }
        }
        // S_IG = -S_II S_II^T B_IG enforces the interior/interface duality.
        let b_ig = b_gll.submatrix(&interior, &[0, p]);
        let sst = s_ii.matmul(&s_ii.transpose());
        let s_ig = sst.matmul(&b_ig);
        for (r, &i) in interior.iter().enumerate() {
            s[(i, 0)] = -s_ig[(r, 0)];
            s[(i, p)] = -s_ig[(r, 1)];
        }
    }

    let mass = s.transpose().matmul(&b_gll).matmul(&s);
    let stiff = s.transpose().matmul(&a_gll).matmul(&s);

    // Differentiation matrix: row 0 pairs against the normalized constant
    // (values via the fundamental theorem of calculus); interior rows pair
    // against normalized interior derivatives, which gives single-entry
    // interior columns by construction.
    let mut d = DenseMatrix::<T>::zeros(p, n);
    let inv_sqrt2 = T::one() / real::<T>(2.0).sqrt();
    d[(0, 0)] = -inv_sqrt2;
    d[(0, p)] = inv_sqrt2;
    for i in 1..p {
        let scale = T::one() / eigenvalues[i].sqrt();
        d[(i, i)] = eigenvalues[i].sqrt();
        d[(i, 0)] = scale * stiff[(i, 0)];
        d[(i, p)] = scale * stiff[(i, p)];
    }

    let (g1d, g1d_inv) = broken_orthogonalize(p, &mass)?;

    let dp_nodes = gauss_legendre_rule::<T>(p)?.points;
    let dp_tab = tabulate_dp_impl(p, &gll.points, &s, &eigenvalues, &dp_nodes)?;

    Ok(FdmBasis1D {
        degree: p,
        gll_nodes: gll.points,
        s,
        eigenvalues,
        d,
        g1d,
        g1d_inv,
        mass,
        stiff,
        dp_nodes,
        dp_tab,
    })
}

fn tabulate_dp_impl<T: Real>(
    p: usize,
    gll_nodes: &[T],
    s: &DenseMatrix<T>,
    eigenvalues: &[T],
    points: &[T],
) -> Result<DenseMatrix<T>> {
    let (_, ders) = lagrange_tabulate(gll_nodes, points)?;
    let nq = points.len();
    let mut out = DenseMatrix::<T>::zeros(nq, p);
    let inv_sqrt2 = T::one() / real::<T>(2.0).sqrt();
    for q in 0..nq {
        out[(q, 0)] = inv_sqrt2;
        for j in 1..p {
            let mut v = T::zero();
            for i in 0..=p {
                v += ders[(q, i)] * s[(i, j)];
            }
            out[(q, j)] = v / eigenvalues[j].sqrt();
        }
    }
    Ok(out)
}

impl<T: Real> FdmBasis1D<T> {
    pub fn interface(&self) -> [usize; 2] {
        [0, self.degree]
    }

    /// Values and derivatives of the p+1 continuous basis functions at
    /// arbitrary points.
    pub fn tabulate_cg(&self, points: &[T]) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
        let (lv, ld) = lagrange_tabulate(&self.gll_nodes, points)?;
        Ok((lv.matmul(&self.s), ld.matmul(&self.s)))
    }

    /// Values of the p discontinuous basis functions at arbitrary points.
    pub fn tabulate_dp(&self, points: &[T]) -> Result<DenseMatrix<T>> {
        tabulate_dp_impl(self.degree, &self.gll_nodes, &self.s, &self.eigenvalues, points)
    }

    /// Values of the broken (fully orthonormal) continuous-family functions.
    pub fn tabulate_broken(&self, points: &[T]) -> Result<DenseMatrix<T>> {
        let (v, _) = self.tabulate_cg(points)?;
        Ok(v.matmul(&self.g1d_inv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre_rule;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn gll_reference_matrices_p1() {
        // Closed-form integrals of the linear hat functions.
        let (a, b) = reference_matrices_gll::<f64>(1).unwrap();
        assert_close(a[(0, 0)], 0.5, 1e-14);
        assert_close(a[(0, 1)], -0.5, 1e-14);
        assert_close(b[(0, 0)], 2.0 / 3.0, 1e-14);
        assert_close(b[(0, 1)], 1.0 / 3.0, 1e-14);
    }

    #[test]
    fn gll_reference_matrix_row_sums() {
        for p in 1..=8 {
            let (a, b) = reference_matrices_gll::<f64>(p).unwrap();
            for i in 0..=p {
                let row: f64 = a.row(i).iter().sum();
                assert_close(row, 0.0, 1e-12);
            }
            let total: f64 = b.data.iter().sum();
            assert_close(total, 2.0, 1e-12);
        }
    }

    #[test]
    fn p2_closed_forms() {
        // Independent oracle: s1 = sqrt(15)/4 (1 - x^2) is the unique
        // normalized quadratic bubble, and s0 = (-1 - 4x + 5x^2)/8 follows
        // from the 3x3 system s0(-1)=1, s0(1)=0, (s0, s1)=0.
        let basis = build_fdm_basis::<f64>(2).unwrap();
        assert_close(basis.eigenvalues[0], 2.0, 1e-14);
        assert_close(basis.eigenvalues[1], 2.5, 1e-12);
        // Tabulation at the middle GLL node (x = 0).
        assert_close(basis.s[(1, 1)], 15f64.sqrt() / 4.0, 1e-12);
        assert_close(basis.s[(1, 0)], -0.125, 1e-12);
        assert_close(basis.s[(1, 2)], -0.125, 1e-12);
        // FDM mass matrix closed forms.
        assert_close(basis.mass[(0, 0)], 0.25, 1e-12);
        assert_close(basis.mass[(2, 2)], 0.25, 1e-12);
        assert_close(basis.mass[(0, 2)], -1.0 / 12.0, 1e-12);
        assert_close(basis.mass[(1, 1)], 1.0, 1e-12);
        assert_close(basis.mass[(0, 1)], 0.0, 1e-12);
    }

    #[test]
    fn differentiation_matrix_constant_row() {
        for p in 1..=7 {
            let basis = build_fdm_basis::<f64>(p).unwrap();
            assert_close(basis.d[(0, 0)], -1.0 / 2f64.sqrt(), 1e-13);
            assert_close(basis.d[(0, p)], 1.0 / 2f64.sqrt(), 1e-13);
            for j in 1..p {
                assert_close(basis.d[(0, j)], 0.0, 1e-13);
            }
        }
    }

    #[test]
    fn eigenproblem_residuals_up_to_p12() {
        for p in 2..=12 {
            let basis = build_fdm_basis::<f64>(p).unwrap();
            let (a_gll, b_gll) = reference_matrices_gll::<f64>(p).unwrap();
            let interior: Vec<usize> = (1..p).collect();
            let s_ii = basis.s.submatrix(&interior, &interior);
            let a_ii = a_gll.submatrix(&interior, &interior);
            let b_ii = b_gll.submatrix(&interior, &interior);
            let gb = s_ii.transpose().matmul(&b_ii).matmul(&s_ii);
            let ga = s_ii.transpose().matmul(&a_ii).matmul(&s_ii);
            for i in 0..p - 1 {
                for j in 0..p - 1 {
                    let want_b = if i == j { 1.0 } else { 0.0 };
                    let want_a = if i == j { basis.eigenvalues[i + 1] } else { 0.0 };
                    assert!((gb[(i, j)] - want_b).abs() < 1e-9, "p={p} B res");
                    assert!((ga[(i, j)] - want_a).abs() < 1e-9, "p={p} A res");
                }
            }
            // Eigenvalues strictly positive, ascending.
            for w in basis.eigenvalues.windows(2) {
                assert!(w[0] > 0.0 && w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn mass_matrix_sparsity() {
        for p in 1..=12 {
            let basis = build_fdm_basis::<f64>(p).unwrap();
            for i in 0..=p {
                for j in 0..=p {
                    let corner = (i == 0 && j == p) || (i == p && j == 0);
                    if i != j && !corner {
                        assert!(
                            basis.mass[(i, j)].abs() < 1e-10,
                            "p={p}: mass({i},{j}) = {}",
                            basis.mass[(i, j)]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dp_basis_is_orthonormal() {
        for p in 1..=10 {
            let basis = build_fdm_basis::<f64>(p).unwrap();
            let rule = gauss_legendre_rule::<f64>(p + 2).unwrap();
            let tab = basis.tabulate_dp(&rule.points).unwrap();
            for i in 0..p {
                for j in 0..p {
                    let mut s = 0.0;
                    for q in 0..rule.len() {
                        s += rule.weights[q] * tab[(q, i)] * tab[(q, j)];
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((s - want).abs() < 1e-10, "p={p} ({i},{j}): {s}");
                }
            }
        }
    }

    #[test]
    fn d_interior_columns_single_entry() {
        for p in 2..=10 {
            let basis = build_fdm_basis::<f64>(p).unwrap();
            for j in 1..p {
                for i in 0..p {
                    let want = if i == j { basis.eigenvalues[j].sqrt() } else { 0.0 };
                    assert!(
                        (basis.d[(i, j)] - want).abs() < 1e-10,
                        "p={p} d({i},{j}) = {}",
                        basis.d[(i, j)]
                    );
                }
            }
        }
    }

    /// D must actually tabulate the derivative: for any coefficient vector u,
    /// the DP expansion D u evaluated at quadrature points matches the direct
    /// derivative of the expansion of u.
    #[test]
    fn d_tabulates_derivatives() {
        for p in 1..=8 {
            let basis = build_fdm_basis::<f64>(p).unwrap();
            let rule = gauss_legendre_rule::<f64>(p + 2).unwrap();
            let (_, cg_der) = basis.tabulate_cg(&rule.points).unwrap();
            let dp_val = basis.tabulate_dp(&rule.points).unwrap();
            let u: Vec<f64> = (0..=p).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect();
            let mut du = vec![0.0; p];
            for i in 0..p {
                for j in 0..=p {
                    du[i] += basis.d[(i, j)] * u[j];
                }
            }
            for q in 0..rule.len() {
                let mut direct = 0.0;
                for j in 0..=p {
                    direct += cg_der[(q, j)] * u[j];
                }
                let mut via_dp = 0.0;
                for i in 0..p {
                    via_dp += dp_val[(q, i)] * du[i];
                }
                assert!((direct - via_dp).abs() < 1e-10, "p={p}: {direct} vs {via_dp}");
            }
        }
    }

    #[test]
    fn broken_transform_orthonormalizes_interface() {
        for p in 1..=8 {
            let basis = build_fdm_basis::<f64>(p).unwrap();
            // Interior block of G identity.
            for i in 1..p {
                for j in 0..=p {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_close(basis.g1d[(i, j)], want, 1e-14);
                    assert_close(basis.g1d[(j, i)], want, 1e-14);
                }
            }
            // Transformed Gram of the broken basis is the identity.
            let rule = gauss_legendre_rule::<f64>(p + 2).unwrap();
            let tab = basis.tabulate_broken(&rule.points).unwrap();
            for i in 0..=p {
                for j in 0..=p {
                    let mut s = 0.0;
                    for q in 0..rule.len() {
                        s += rule.weights[q] * tab[(q, i)] * tab[(q, j)];
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((s - want).abs() < 1e-12, "p={p} broken gram ({i},{j}) = {s}");
                }
            }
            // x <-> -x symmetry preserved: G interface block is symmetric
            // with equal diagonal.
            assert_close(basis.g1d[(0, 0)], basis.g1d[(p, p)], 1e-13);
            assert_close(basis.g1d[(0, p)], basis.g1d[(p, 0)], 1e-13);
        }
    }

    #[test]
    fn p2_interface_gram_closed_form() {
        let basis = build_fdm_basis::<f64>(2).unwrap();
        assert_close(basis.mass[(0, 0)], 0.25, 1e-12);
        assert_close(basis.mass[(0, 2)], -1.0 / 12.0, 1e-12);
        // G^T G reproduces the interface Gram (Löwdin square root).
        let g = &basis.g1d;
        let gtg00 = g[(0, 0)] * g[(0, 0)] + g[(2, 0)] * g[(2, 0)];
        let gtg02 = g[(0, 0)] * g[(0, 2)] + g[(2, 0)] * g[(2, 2)];
        assert_close(gtg00, 0.25, 1e-12);
        assert_close(gtg02, -1.0 / 12.0, 1e-12);
    }

    #[test]
    fn rejects_p0() {
        assert!(build_fdm_basis::<f64>(0).is_err());
    }

    #[test]
    fn f32_instantiation_smoke() {
        let basis = build_fdm_basis::<f32>(3).unwrap();
        assert_eq!(basis.eigenvalues.len(), 3);
        assert!((basis.eigenvalues[0] - 2.0).abs() < 1e-6);
    }
}
