//! Static condensation of cell-interior unknowns.
//!
//! For the auxiliary operator the interior block decomposes into dense groups
//! of size at most 3 (one per shared tensor index triple), so the interface
//! Schur complement can be assembled exactly and the full inverse applied
//! with one Schur solve and two interior block solves.

use super::csr::CsrMatrix;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
struct InteriorBlock<T> {
    /// Positions into the interior index list.
    members: Vec<usize>,
    inverse: DenseMatrix<T>,
}

#[derive(Debug, Clone)]
pub struct CondensedOperator<T> {
    n_full: usize,
    /// Full-space indices of interior and interface unknowns.
    pub interior: Vec<usize>,
    pub interface: Vec<usize>,
    blocks: Vec<InteriorBlock<T>>,
    /// Coupling P_IG as (interior-local rows) x (interface-local cols).
    p_ig: CsrMatrix<T>,
    /// Exact interface Schur complement S = P_GG - P_GI inv(P_II) P_IG.
    schur: CsrMatrix<T>,
}

/// Group the interior unknowns into connected components of the
/// interior-interior coupling graph; fails with `InvalidStructure` if any
/// component exceeds the block bound (the matrix was not auxiliary-sparse).
pub fn condense<T: Real>(p: &CsrMatrix<T>, interior_mask: &[bool]) -> Result<CondensedOperator<T>> {
    const MAX_BLOCK: usize = 3;
    let n = p.nrows();
    assert_eq!(n, p.ncols());
    assert_eq!(interior_mask.len(), n);

    let interior: Vec<usize> = (0..n).filter(|&i| interior_mask[i]).collect();
    let interface: Vec<usize> = (0..n).filter(|&i| !interior_mask[i]).collect();
    let mut int_local = vec![usize::MAX; n];
    for (l, &g) in interior.iter().enumerate() {
        int_local[g] = l;
    }
    let mut gam_local = vec![usize::MAX; n];
    for (l, &g) in interface.iter().enumerate() {
        gam_local[g] = l;
    }

    // Connected components of the interior-interior graph.
    let ni = interior.len();
    let mut comp = vec![usize::MAX; ni];
    let mut blocks_members: Vec<Vec<usize>> = Vec::new();
    let mut stack = Vec::new();
    for s in 0..ni {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = blocks_members.len();
        let mut members = vec![s];
        comp[s] = id;
        stack.push(s);
        while let Some(u) = stack.pop() {
            let (cols, _) = p.row(interior[u]);
            for &j in cols {
                let lj = int_local[j];
                if lj != usize::MAX && comp[lj] == usize::MAX {
                    comp[lj] = id;
                    members.push(lj);
                    stack.push(lj);
                }
            }
        }
        if members.len() > MAX_BLOCK {
            return Err(Error::InvalidStructure(format!(
                "interior block of size {} exceeds {MAX_BLOCK}; operator is not auxiliary-sparse",
                members.len()
            )));
        }
        members.sort_unstable();
        blocks_members.push(members);
    }

    // Invert each block and assemble the Schur complement.
    let mut blocks = Vec::with_capacity(blocks_members.len());
    let mut schur_trips: Vec<(usize, usize, T)> = Vec::new();
    for (lg, &g) in interface.iter().enumerate() {
        let (cols, vals) = p.row(g);
        for (&j, &v) in cols.iter().zip(vals) {
            let lj = gam_local[j];
            if lj != usize::MAX {
                schur_trips.push((lg, lj, v));
            }
        }
    }
    let mut ig_trips: Vec<(usize, usize, T)> = Vec::new();
    for (li, &gi) in interior.iter().enumerate() {
        let (cols, vals) = p.row(gi);
        for (&j, &v) in cols.iter().zip(vals) {
            let lj = gam_local[j];
            if lj != usize::MAX {
                ig_trips.push((li, lj, v));
            }
        }
    }
    let p_ig = CsrMatrix::from_triplets(ni, interface.len(), &mut ig_trips);

    for members in blocks_members {
        let m = members.len();
        let mut block = DenseMatrix::<T>::zeros(m, m);
        for (r, &lu) in members.iter().enumerate() {
            let (cols, vals) = p.row(interior[lu]);
            for (&j, &v) in cols.iter().zip(vals) {
                let lj = int_local[j];
                if lj != usize::MAX {
                    if let Some(c) = members.iter().position(|&x| x == lj) {
                        block[(r, c)] = v;
                    }
                }
            }
        }
        // Invert via Cholesky on identity columns.
        let l = block.cholesky().map_err(|e| {
            Error::numerical(format!("interior block factorization failed: {e}"))
        })?;
        let mut inv = DenseMatrix::<T>::zeros(m, m);
        for c in 0..m {
            let mut e = vec![T::zero(); m];
            e[c] = T::one();
            let x = DenseMatrix::cholesky_solve(&l, &e);
            for r in 0..m {
                inv[(r, c)] = x[r];
            }
        }
        // Schur contribution: -C^T inv C with C the block rows of P_IG.
        let mut touched: Vec<usize> = Vec::new();
        for &lu in &members {
            let (cols, _) = p_ig.row(lu);
            touched.extend_from_slice(cols);
        }
        touched.sort_unstable();
        touched.dedup();
        if !touched.is_empty() {
            let t = touched.len();
            let mut c_local = DenseMatrix::<T>::zeros(m, t);
            for (r, &lu) in members.iter().enumerate() {
                let (cols, vals) = p_ig.row(lu);
                for (&j, &v) in cols.iter().zip(vals) {
                    let pos = touched.binary_search(&j).unwrap();
                    c_local[(r, pos)] = v;
                }
            }
            let w = inv.matmul(&c_local);
            for a in 0..t {
                for b in 0..t {
                    let mut s = T::zero();
                    for r in 0..m {
                        s += c_local[(r, a)] * w[(r, b)];
                    }
                    if s != T::zero() {
                        schur_trips.push((touched[a], touched[b], -s));
                    }
                }
            }
        }
        blocks.push(InteriorBlock { members, inverse: inv });
    }

    let schur = CsrMatrix::from_triplets(interface.len(), interface.len(), &mut schur_trips);
    Ok(CondensedOperator { n_full: n, interior, interface, blocks, p_ig, schur })
}

impl<T: Real> CondensedOperator<T> {
    pub fn n_full(&self) -> usize {
        self.n_full
    }

    pub fn schur(&self) -> &CsrMatrix<T> {
        &self.schur
    }

    pub fn n_interface(&self) -> usize {
        self.interface.len()
    }

    pub fn memory_bytes(&self) -> usize {
        self.schur.memory_bytes()
            + self.p_ig.memory_bytes()
            + self
                .blocks
                .iter()
                .map(|b| b.inverse.data.len() * std::mem::size_of::<T>())
                .sum::<usize>()
    }

    /// x_I = inv(P_II) r_I on interior-local vectors.
    pub fn solve_interior(&self, r: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.interior.len()];
        for b in &self.blocks {
            let m = b.members.len();
            for r_i in 0..m {
                let mut s = T::zero();
                for c_i in 0..m {
                    s += b.inverse[(r_i, c_i)] * r[b.members[c_i]];
                }
                x[b.members[r_i]] = s;
            }
        }
        x
    }

    pub fn gather_interior(&self, full: &[T]) -> Vec<T> {
        self.interior.iter().map(|&g| full[g]).collect()
    }

    pub fn gather_interface(&self, full: &[T]) -> Vec<T> {
        self.interface.iter().map(|&g| full[g]).collect()
    }

    /// Ideal restriction R_G r = r_G - P_GI inv(P_II) r_I applied to a
    /// full-space residual.
    pub fn apply_ideal_restriction(&self, full: &[T]) -> Vec<T> {
        let r_i = self.gather_interior(full);
        let y = self.solve_interior(&r_i);
        let mut out = self.gather_interface(full);
        // out -= P_GI y = (P_IG)^T y.
        let mut tmp = vec![T::zero(); self.interface.len()];
        self.p_ig.matvec_transpose_add(&y, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o -= *t;
        }
        out
    }

    /// Transpose of the ideal restriction: harmonic extension of interface
    /// coefficients into the full space.
    pub fn apply_ideal_extension(&self, gamma: &[T]) -> Vec<T> {
        let mut full = vec![T::zero(); self.n_full];
        let w = self.p_ig.matvec(gamma);
        let y = self.solve_interior(&w);
        for (l, &g) in self.interior.iter().enumerate() {
            full[g] = -y[l];
        }
        for (l, &g) in self.interface.iter().enumerate() {
            full[g] = gamma[l];
        }
        full
    }

    /// Apply the exact inverse given a solver for S: one Schur solve and two
    /// interior block solves.
    pub fn apply_inverse_with(&self, solve_s: impl Fn(&[T]) -> Vec<T>, r: &[T]) -> Vec<T> {
        let r_i = self.gather_interior(r);
        let y_i = self.solve_interior(&r_i);
        let mut rhat = self.gather_interface(r);
        let mut tmp = vec![T::zero(); self.interface.len()];
        self.p_ig.matvec_transpose_add(&y_i, &mut tmp);
        for (o, t) in rhat.iter_mut().zip(&tmp) {
            *o -= *t;
        }
        let x_g = solve_s(&rhat);
        let w = self.p_ig.matvec(&x_g);
        let z = self.solve_interior(&w);
        let mut out = vec![T::zero(); self.n_full];
        for (l, &g) in self.interior.iter().enumerate() {
            out[g] = y_i[l] - z[l];
        }
        for (l, &g) in self.interface.iter().enumerate() {
            out[g] = x_g[l];
        }
        out
    }
}
