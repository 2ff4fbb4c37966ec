//! Fill-reducing orderings. Permutations map new index -> old index.

use super::csr::CsrMatrix;
use crate::scalar::Real;

/// Reverse Cuthill–McKee on the pattern of a symmetric matrix.
///
/// BFS per connected component from a minimum-degree node, neighbors visited
/// in increasing degree, whole traversal reversed. Components are emitted
/// consecutively, so block-diagonal matrices stay block diagonal.
pub fn rcm<T: Real>(a: &CsrMatrix<T>) -> Vec<usize> {
    let n = a.nrows();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&i| degree[i]);
    for &start in &starts {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let (cols, _) = a.row(u);
            let mut nbrs: Vec<usize> = cols.iter().copied().filter(|&v| v != u && !visited[v]).collect();
            nbrs.sort_by_key(|&v| degree[v]);
            for v in nbrs {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    order.reverse();
    order
}

/// Nested dissection by recursive coordinate bisection.
///
/// Each level splits the index set at the median of the widest coordinate
/// axis; points on the median plane form the separator and are ordered last.
/// DOFs carry a representative point (the image of their tensor-product
/// node), which makes this a geometric analogue of graph nested dissection.
pub fn nested_dissection_points<T: Real>(points: &[[T; 3]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    let mut order = Vec::with_capacity(points.len());
    dissect(points, &mut idx, &mut order);
    order
}

fn dissect<T: Real>(points: &[[T; 3]], idx: &mut [usize], order: &mut Vec<usize>) {
    const LEAF: usize = 8;
    if idx.len() <= LEAF {
        order.extend_from_slice(idx);
        return;
    }
    // Widest axis.
    let mut axis = 0;
    let mut best = T::zero();
    for d in 0..3 {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for &i in idx.iter() {
            lo = lo.min(points[i][d]);
            hi = hi.max(points[i][d]);
        }
        if hi - lo > best {
            best = hi - lo;
            axis = d;
        }
    }
    if best <= T::epsilon() {
        order.extend_from_slice(idx);
        return;
    }
    idx.sort_by(|&a, &b| points[a][axis].partial_cmp(&points[b][axis]).unwrap());
    let median = points[idx[idx.len() / 2]][axis];
    let tol = best * crate::scalar::real::<T>(1e-12);
    let mut left = Vec::new();
    let mut sep = Vec::new();
    let mut right = Vec::new();
    for &i in idx.iter() {
        let x = points[i][axis];
        if (x - median).abs() <= tol {
            sep.push(i);
        } else if x < median {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    if left.is_empty() && right.is_empty() {
        order.extend_from_slice(&sep);
        return;
    }
    dissect(points, &mut left, order);
    dissect(points, &mut right, order);
    order.extend_from_slice(&sep);
}
