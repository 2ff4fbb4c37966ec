//! Tensor-product k-form elements on the reference hexahedron [-1,1]^3.
//!
//! k = 0, 1, 2, 3 label H(grad), H(curl), H(div), and L2 elements. Each
//! vector component is a tensor product of the continuous degree-p family
//! (Cg) and the discontinuous degree-(p-1) family (Dp); which directions are
//! continuous encodes the conformity of the space.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::fdm1d::FdmBasis1D;
use crate::quadrature::QuadratureRule;
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Continuous degree-p factor with interface indices {0, p}.
    Cg,
    /// Discontinuous degree-(p-1) factor; never couples across cells.
    Dp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElemDof {
    pub comp: usize,
    pub idx: [usize; 3],
}

#[derive(Debug, Clone)]
pub struct ElementSpace {
    pub k: usize,
    pub p: usize,
    pub ncomp: usize,
    /// Per-component, per-direction family tags.
    pub families: Vec<[Family; 3]>,
    /// Per-component, per-direction 1D dof counts.
    pub sizes: Vec<[usize; 3]>,
    /// Flat offset of each component block.
    pub comp_offsets: Vec<usize>,
    pub ndofs: usize,
    /// Deterministic order: component-major, then (l, j, i) with i fastest.
    pub dofs: Vec<ElemDof>,
    /// True where no continuous-direction index sits at {0, p}.
    pub interior_mask: Vec<bool>,
}

/// Component/direction family layout for each form degree.
pub fn form_families(k: usize) -> Result<Vec<[Family; 3]>> {
    use Family::{Cg, Dp};
    match k {
        0 => Ok(vec![[Cg, Cg, Cg]]),
        1 => Ok(vec![[Dp, Cg, Cg], [Cg, Dp, Cg], [Cg, Cg, Dp]]),
        2 => Ok(vec![[Cg, Dp, Dp], [Dp, Cg, Dp], [Dp, Dp, Cg]]),
        3 => Ok(vec![[Dp, Dp, Dp]]),
        _ => Err(Error::invalid_argument(format!("form degree {k} not in 0..=3"))),
    }
}

pub fn build_element(k: usize, p: usize) -> Result<ElementSpace> {
    if p < 1 {
        return Err(Error::invalid_argument("build_element requires p >= 1"));
    }
    let families = form_families(k)?;
    let ncomp = families.len();
    let size_of = |f: Family| if f == Family::Cg { p + 1 } else { p };
    let sizes: Vec<[usize; 3]> = families
        .iter()
        .map(|f| [size_of(f[0]), size_of(f[1]), size_of(f[2])])
        .collect();
    let mut comp_offsets = Vec::with_capacity(ncomp);
    let mut dofs = Vec::new();
    let mut interior_mask = Vec::new();
    let mut offset = 0;
    for c in 0..ncomp {
        comp_offsets.push(offset);
        let [ni, nj, nl] = sizes[c];
        for l in 0..nl {
            for j in 0..nj {
                for i in 0..ni {
                    let idx = [i, j, l];
                    let mut interior = true;
                    for d in 0..3 {
                        if families[c][d] == Family::Cg && (idx[d] == 0 || idx[d] == p) {
                            interior = false;
                        }
                    }
                    dofs.push(ElemDof { comp: c, idx });
                    interior_mask.push(interior);
                }
            }
        }
        offset += ni * nj * nl;
    }
    Ok(ElementSpace {
        k,
        p,
        ncomp,
        families,
        sizes,
        comp_offsets,
        ndofs: offset,
        dofs,
        interior_mask,
    })
}

impl ElementSpace {
    /// Flat index of the dof (comp; i, j, l).
    #[inline]
    pub fn dof_index(&self, comp: usize, idx: [usize; 3]) -> usize {
        let [ni, nj, _] = self.sizes[comp];
        self.comp_offsets[comp] + (idx[2] * nj + idx[1]) * ni + idx[0]
    }

    pub fn interior_count(&self) -> usize {
        self.interior_mask.iter().filter(|&&b| b).count()
    }
}

/// Sparse reference exterior derivative mapping V^k coefficients to V^{k+1}
/// coefficients, assembled from the 1D differentiation matrix.
///
/// Signs follow the local complete-sequence relations of the basis: for the
/// curl this differs from the geometric orientation by a global factor of -1,
/// which cancels in every quadratic form and preserves d.d = 0.
#[derive(Debug, Clone)]
pub struct ReferenceDiff<T> {
    pub source_k: usize,
    pub matrix: CsrMatrix<T>,
}

pub fn reference_diff<T: Real>(
    k: usize,
    p: usize,
    basis: &FdmBasis1D<T>,
) -> Result<ReferenceDiff<T>> {
    if k > 2 {
        return Err(Error::invalid_argument("reference_diff requires k in 0..=2"));
    }
    assert_eq!(basis.degree, p);
    let src = build_element(k, p)?;
    let dst = build_element(k + 1, p)?;
    let d1 = &basis.d;
    let mut trips: Vec<(usize, usize, T)> = Vec::new();

    // Emit the contribution of differentiating direction `dir` of source dof
    // (comp c, idx), landing in target component tc with sign.
    let mut emit = |src_dof: usize, idx: [usize; 3], dir: usize, tc: usize, sign: T| {
        for a in 0..p {
            let v = d1[(a, idx[dir])];
            if v == T::zero() {
                continue;
            }
            let mut tidx = idx;
            tidx[dir] = a;
            trips.push((dst.dof_index(tc, tidx), src_dof, sign * v));
        }
    };

    match k {
        0 => {
            // grad: component m of the target is the m-derivative.
            for (s, dof) in src.dofs.iter().enumerate() {
                for m in 0..3 {
                    emit(s, dof.idx, m, m, T::one());
                }
            }
        }
        1 => {
            // curl in the basis sign convention:
            //   d(comp 1) = +d_y -> comp 3, -d_z -> comp 2
            //   d(comp 2) = +d_z -> comp 1, -d_x -> comp 3
            //   d(comp 3) = +d_x -> comp 2, -d_y -> comp 1
            for (s, dof) in src.dofs.iter().enumerate() {
                match dof.comp {
                    0 => {
                        emit(s, dof.idx, 1, 2, T::one());
                        emit(s, dof.idx, 2, 1, -T::one());
                    }
                    1 => {
                        emit(s, dof.idx, 2, 0, T::one());
                        emit(s, dof.idx, 0, 2, -T::one());
                    }
                    _ => {
                        emit(s, dof.idx, 0, 1, T::one());
                        emit(s, dof.idx, 1, 0, -T::one());
                    }
                }
            }
        }
        _ => {
            // div: differentiate each component along itself.
            for (s, dof) in src.dofs.iter().enumerate() {
                emit(s, dof.idx, dof.comp, 0, T::one());
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(dst.ndofs, src.ndofs, &mut trips);
    Ok(ReferenceDiff { source_k: k, matrix })
}

/// Broken basis transform: block-diagonal over components, each block a
/// Kronecker product of the 1D interface orthogonalization (continuous
/// directions) with identities (discontinuous directions).
pub fn broken_transform<T: Real>(
    k: usize,
    p: usize,
    basis: &FdmBasis1D<T>,
) -> Result<CsrMatrix<T>> {
    let elem = build_element(k, p)?;
    let g = &basis.g1d;
    let mut trips: Vec<(usize, usize, T)> = Vec::new();
    for (s, dof) in elem.dofs.iter().enumerate() {
        // Column s of the transform: enumerate target index combinations.
        let fam = elem.families[dof.comp];
        let mut targets: Vec<([usize; 3], T)> = vec![(dof.idx, T::one())];
        for d in 0..3 {
            if fam[d] == Family::Dp {
                continue;
            }
            let sidx = dof.idx[d];
            let rows: &[usize] =
                if sidx == 0 || sidx == p { &[0, p] } else { std::slice::from_ref(&dof.idx[d]) };
            let mut next = Vec::with_capacity(targets.len() * rows.len());
            for (tidx, w) in &targets {
                for &r in rows {
                    let gv = g[(r, sidx)];
                    if gv == T::zero() {
                        continue;
                    }
                    let mut nidx = *tidx;
                    nidx[d] = r;
                    next.push((nidx, *w * gv));
                }
            }
            targets = next;
        }
        for (tidx, w) in targets {
            trips.push((elem.dof_index(dof.comp, tidx), s, w));
        }
    }
    Ok(CsrMatrix::from_triplets(elem.ndofs, elem.ndofs, &mut trips))
}

/// Per-direction 1D tabulations at a quadrature rule, shared by the three
/// directions.
#[derive(Debug, Clone)]
pub struct ElementTables<T> {
    /// Values of the p+1 continuous functions, nq x (p+1).
    pub cg_val: DenseMatrix<T>,
    /// Derivatives of the continuous functions, nq x (p+1).
    pub cg_der: DenseMatrix<T>,
    /// Values of the p discontinuous functions, nq x p.
    pub dp_val: DenseMatrix<T>,
    /// Values of the broken (orthonormalized) continuous functions.
    pub broken_cg_val: DenseMatrix<T>,
    pub points: Vec<T>,
    pub weights: Vec<T>,
}

pub fn tabulate_element<T: Real>(
    basis: &FdmBasis1D<T>,
    rule: &QuadratureRule<T>,
) -> Result<ElementTables<T>> {
    let (cg_val, cg_der) = basis.tabulate_cg(&rule.points)?;
    let dp_val = basis.tabulate_dp(&rule.points)?;
    let broken_cg_val = cg_val.matmul(&basis.g1d_inv);
    Ok(ElementTables {
        cg_val,
        cg_der,
        dp_val,
        broken_cg_val,
        points: rule.points.clone(),
        weights: rule.weights.clone(),
    })
}

impl<T: Real> ElementTables<T> {
    pub fn nq(&self) -> usize {
        self.points.len()
    }

    pub fn values(&self, fam: Family) -> &DenseMatrix<T> {
        match fam {
            Family::Cg => &self.cg_val,
            Family::Dp => &self.dp_val,
        }
    }

    pub fn broken_values(&self, fam: Family) -> &DenseMatrix<T> {
        match fam {
            Family::Cg => &self.broken_cg_val,
            Family::Dp => &self.dp_val,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdm1d::build_fdm_basis;
    use crate::quadrature::gauss_lobatto_rule;
    use crate::rng;

    #[test]
    fn dof_counts() {
        let e = build_element(1, 2).unwrap();
        assert_eq!(e.ndofs, 54);
        let e = build_element(0, 4).unwrap();
        assert_eq!(e.ndofs, 125);
        assert_eq!(e.interior_count(), 27);
        let e = build_element(3, 3).unwrap();
        assert_eq!(e.ndofs, 27);
        assert_eq!(e.interior_count(), 27);
        for p in 1..=6 {
            assert_eq!(build_element(0, p).unwrap().ndofs, (p + 1).pow(3));
            assert_eq!(build_element(1, p).unwrap().ndofs, 3 * p * (p + 1).pow(2));
            assert_eq!(build_element(2, p).unwrap().ndofs, 3 * p * p * (p + 1));
            assert_eq!(build_element(3, p).unwrap().ndofs, p.pow(3));
            assert_eq!(build_element(0, p).unwrap().interior_count(), (p - 1).pow(3));
            assert_eq!(build_element(1, p).unwrap().interior_count(), 3 * p * (p - 1).pow(2));
            assert_eq!(build_element(2, p).unwrap().interior_count(), 3 * p * p * (p - 1));
        }
        assert!(build_element(4, 2).is_err());
    }

    #[test]
    fn dof_enumeration_is_bijective() {
        for k in 0..=3 {
            let e = build_element(k, 3).unwrap();
            for (f, dof) in e.dofs.iter().enumerate() {
                assert_eq!(e.dof_index(dof.comp, dof.idx), f);
            }
        }
    }

    #[test]
    fn complex_property_dd_zero() {
        for p in 1..=6 {
            let basis = build_fdm_basis::<f64>(p).unwrap();
            for k in 0..=1usize {
                let d0 = reference_diff(k, p, &basis).unwrap();
                let d1 = reference_diff(k + 1, p, &basis).unwrap();
                let prod = d1.matrix.matmul(&d0.matrix);
                assert!(
                    prod.max_abs() < 1e-10,
                    "d.d != 0 for k={k} p={p}: {}",
                    prod.max_abs()
                );
            }
        }
        assert!(reference_diff(3, 2, &build_fdm_basis::<f64>(2).unwrap()).is_err());
    }

    #[test]
    fn grad_interior_column_values() {
        // Interior column of psi_111 at p=2 has lambda^(1/2) = sqrt(5/2) in
        // all three components.
        let p = 2;
        let basis = build_fdm_basis::<f64>(p).unwrap();
        let d = reference_diff(0, p, &basis).unwrap();
        let src = build_element(0, p).unwrap();
        let dst = build_element(1, p).unwrap();
        let col = src.dof_index(0, [1, 1, 1]);
        let expected = (2.5f64).sqrt();
        let mut found = Vec::new();
        for r in 0..d.matrix.nrows() {
            let v = d.matrix.get(r, col);
            if v != 0.0 {
                found.push((r, v));
            }
        }
        assert_eq!(found.len(), 3);
        for (m, &(r, v)) in found.iter().enumerate() {
            assert_eq!(r, dst.dof_index(m, [1, 1, 1]));
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn div_interior_column_single_entry() {
        let p = 2;
        let basis = build_fdm_basis::<f64>(p).unwrap();
        let d = reference_diff(2, p, &basis).unwrap();
        let src = build_element(2, p).unwrap();
        let dst = build_element(3, p).unwrap();
        let col = src.dof_index(0, [1, 1, 1]);
        for r in 0..d.matrix.nrows() {
            let v = d.matrix.get(r, col);
            if r == dst.dof_index(0, [1, 1, 1]) {
                assert!((v - 2.5f64.sqrt()).abs() < 1e-12);
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn curl_interior_relations() {
        // curl Psi^(1)_ijl = lam_j^(1/2) Phi^(3)_ijl - lam_l^(1/2) Phi^(2)_ijl
        let p = 3;
        let basis = build_fdm_basis::<f64>(p).unwrap();
        let d = reference_diff(1, p, &basis).unwrap();
        let src = build_element(1, p).unwrap();
        let dst = build_element(2, p).unwrap();
        let (i, j, l) = (1, 1, 2);
        let col = src.dof_index(0, [i, j, l]);
        let lam_j = basis.eigenvalues[j].sqrt();
        let lam_l = basis.eigenvalues[l].sqrt();
        assert!((d.matrix.get(dst.dof_index(2, [i, j, l]), col) - lam_j).abs() < 1e-12);
        assert!((d.matrix.get(dst.dof_index(1, [i, j, l]), col) + lam_l).abs() < 1e-12);
        let mut nnz = 0;
        for r in 0..d.matrix.nrows() {
            if d.matrix.get(r, col) != 0.0 {
                nnz += 1;
            }
        }
        assert_eq!(nnz, 2);
    }

    #[test]
    fn broken_transform_k3_identity() {
        let basis = build_fdm_basis::<f64>(3).unwrap();
        let g = broken_transform(3, 3, &basis).unwrap();
        let n = g.nrows();
        for i in 0..n {
            let (cols, vals) = g.row(i);
            assert_eq!(cols, &[i]);
            assert_eq!(vals, &[1.0]);
        }
    }

    #[test]
    fn broken_transform_row_sparsity() {
        let basis = build_fdm_basis::<f64>(2).unwrap();
        let g = broken_transform(0, 2, &basis).unwrap();
        for i in 0..g.nrows() {
            assert!(g.row(i).0.len() <= 8);
        }
    }

    /// Component-major block of the k=1 transform matches a dense Kronecker
    /// oracle applied to a random vector.
    #[test]
    fn broken_transform_matches_kronecker_oracle() {
        let p = 2;
        let basis = build_fdm_basis::<f64>(p).unwrap();
        let g = broken_transform(1, p, &basis).unwrap();
        let elem = build_element(1, p).unwrap();
        let u: Vec<f64> = (0..elem.ndofs).map(|i| rng::unit(5, 0, i as u64)).collect();
        let gu = g.matvec(&u);
        // Oracle: component 1 = G1 (z) x G1 (y) x I_p (x) in the (l, j, i)
        // layout; apply per direction with explicit loops.
        let g1 = &basis.g1d;
        let comp = 0;
        let [ni, nj, nl] = elem.sizes[comp];
        for l in 0..nl {
            for j in 0..nj {
                for i in 0..ni {
                    let mut expect = 0.0;
                    for jj in 0..nj {
                        for ll in 0..nl {
                            expect +=
                                g1[(j, jj)] * g1[(l, ll)] * u[elem.dof_index(comp, [i, jj, ll])];
                        }
                    }
                    let got = gu[elem.dof_index(comp, [i, j, l])];
                    assert!((got - expect).abs() < 1e-13, "({i},{j},{l}): {got} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn tabulation_reconstructs_polynomials() {
        let p = 2;
        let basis = build_fdm_basis::<f64>(p).unwrap();
        let rule = gauss_lobatto_rule::<f64>(5).unwrap();
        let tables = tabulate_element(&basis, &rule).unwrap();
        // Constant 1 in FDM coefficients: interface values 1, interior
        // moments (s_i, 1).
        let gl = crate::quadrature::gauss_legendre_rule::<f64>(p + 1).unwrap();
        let (vals, _) = basis.tabulate_cg(&gl.points).unwrap();
        let mut coeff = vec![0.0; p + 1];
        coeff[0] = 1.0;
        coeff[p] = 1.0;
        for i in 1..p {
            let mut m = 0.0;
            for q in 0..gl.len() {
                m += gl.weights[q] * vals[(q, i)];
            }
            coeff[i] = m;
        }
        for q in 0..tables.nq() {
            let mut v = 0.0;
            for i in 0..=p {
                v += tables.cg_val[(q, i)] * coeff[i];
            }
            assert!((v - 1.0).abs() < 1e-12, "partition of unity at q={q}: {v}");
        }
        // s_1 value at x=0 (middle GLL point of the 5-point rule).
        assert!((tables.cg_val[(2, 1)] - 15f64.sqrt() / 4.0).abs() < 1e-12);
        // r_0 everywhere.
        for q in 0..tables.nq() {
            assert!((tables.dp_val[(q, 0)] - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        }
    }

    /// Reconstructing a random degree-p polynomial from its FDM coefficients
    /// at the rule points matches direct evaluation.
    #[test]
    fn tabulation_random_polynomial_round_trip() {
        for p in 1..=6 {
            let basis = build_fdm_basis::<f64>(p).unwrap();
            let rule = gauss_lobatto_rule::<f64>(p + 3).unwrap();
            let tables = tabulate_element(&basis, &rule).unwrap();
            // Random polynomial via random FDM coefficients; compare its
            // values from the tables against evaluation through tabulate_cg.
            let coeff: Vec<f64> = (0..=p).map(|i| rng::unit(9, p as u64, i as u64)).collect();
            let (direct, _) = basis.tabulate_cg(&rule.points).unwrap();
            for q in 0..tables.nq() {
                let mut a = 0.0;
                let mut b = 0.0;
                for i in 0..=p {
                    a += tables.cg_val[(q, i)] * coeff[i];
                    b += direct[(q, i)] * coeff[i];
                }
                assert!((a - b).abs() < 1e-11);
            }
        }
    }
}
