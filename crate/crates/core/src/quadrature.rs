//! Gauss–Legendre and Gauss–Lobatto rules on [-1, 1], plus Lagrange
//! tabulation at arbitrary points.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    /// Strictly increasing abscissae in [-1, 1].
    pub points: Vec<T>,
    /// Positive weights summing to 2.
    pub weights: Vec<T>,
    /// Highest polynomial degree integrated exactly.
    pub exactness_degree: usize,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        let mut s = T::zero();
        for (&x, &w) in self.points.iter().zip(&self.weights) {
            s += w * f(x);
        }
        s
    }
}

/// Legendre polynomial P_n and derivative P_n' at x, by recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = real::<T>(k as f64);
        let p2 = ((real::<T>(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // P_n' from (1-x^2) P_n' = n (P_{n-1} - x P_n)
    let nf = real::<T>(n as f64);
    let denom = T::one() - x * x;
    let dp = if denom.abs() > T::epsilon() {
        nf * (p0 - x * p1) / denom
    } else {
        // endpoint value n(n+1)/2 * sign
        let v = nf * (nf + T::one()) / real::<T>(2.0);
        if x > T::zero() {
            v
        } else if n % 2 == 0 {
            -v
        } else {
            v
        }
    };
    (p1, dp)
}

/// Gauss–Legendre rule with `n` interior points; exact for degree 2n-1.
pub fn gauss_legendre_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    if n < 1 {
        return Err(Error::invalid_argument("gauss_legendre_rule requires n >= 1"));
    }
    let mut points = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    for i in 0..n {
        // Newton on P_n from the Chebyshev initial guess.
        let mut x = real::<T>(-(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos());
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= real::<T>(4.0) * T::epsilon() {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        points[i] = x;
        weights[i] = real::<T>(2.0) / ((T::one() - x * x) * dp * dp);
    }
    // The midpoint is exactly zero for odd n.
    if n % 2 == 1 {
        points[n / 2] = T::zero();
    }
    Ok(QuadratureRule { points, weights, exactness_degree: 2 * n - 1 })
}

/// Gauss–Lobatto rule with `n >= 2` points including both endpoints;
/// exact for degree 2n-3.
pub fn gauss_lobatto_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    if n < 2 {
        return Err(Error::invalid_argument("gauss_lobatto_rule requires n >= 2"));
    }
    let mut points = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    points[0] = -T::one();
    points[n - 1] = T::one();
    let m = n - 1;
    for i in 1..m {
        // Interior nodes are the roots of P_{n-1}'.
        let mut x =
            real::<T>(-(std::f64::consts::PI * i as f64 / m as f64).cos());
        for _ in 0..100 {
            // Newton on f = (1 - x^2) P_m'(x); by the Legendre ODE,
            // f' = -m(m+1) P_m(x).
            let (p, dp) = legendre(m, x);
            let f = (T::one() - x * x) * dp;
            let df = -real::<T>((m * (m + 1)) as f64) * p;
            let dx = f / df;
            x = x - dx;
            if dx.abs() <= real::<T>(4.0) * T::epsilon() {
                break;
            }
        }
        points[i] = x;
    }
    if n % 2 == 1 {
        points[n / 2] = T::zero();
    }
    let scale = real::<T>(2.0 / (m as f64 * (m + 1) as f64));
    for i in 0..n {
        let (p, _) = legendre(m, points[i]);
        weights[i] = scale / (p * p);
    }
    Ok(QuadratureRule { points, weights, exactness_degree: 2 * n - 3 })
}

/// Tabulate the Lagrange basis on `nodes` at `eval_points`.
///
/// Returns (values, derivatives) with `values[(q, j)] = l_j(x_q)`. Rows of
/// values sum to 1 and rows of derivatives sum to 0 (partition of unity).
pub fn lagrange_tabulate<T: Real>(
    nodes: &[T],
    eval_points: &[T],
) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let n = nodes.len();
    for i in 0..n {
        for j in i + 1..n {
            if nodes[i] == nodes[j] {
                return Err(Error::invalid_argument(format!(
                    "lagrange_tabulate: duplicate nodes at {i} and {j}"
                )));
            }
        }
    }
    let nq = eval_points.len();
    let mut values = DenseMatrix::<T>::zeros(nq, n);
    let mut derivs = DenseMatrix::<T>::zeros(nq, n);
    for (q, &x) in eval_points.iter().enumerate() {
        for j in 0..n {
            // l_j(x) via the direct product; stable for the modest n used here.
            let mut v = T::one();
            for k in 0..n {
                if k != j {
                    v *= (x - nodes[k]) / (nodes[j] - nodes[k]);
                }
            }
            values[(q, j)] = v;
            // l_j'(x) = sum_m 1/(x_j - x_m) prod_{k != j, m} (x - x_k)/(x_j - x_k)
            let mut d = T::zero();
            for m in 0..n {
                if m == j {
                    continue;
                }
                let mut term = T::one() / (nodes[j] - nodes[m]);
                for k in 0..n {
                    if k != j && k != m {
                        term *= (x - nodes[k]) / (nodes[j] - nodes[k]);
                    }
                }
                d += term;
            }
            derivs[(q, j)] = d;
        }
    }
    Ok((values, derivs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn lobatto_small_rules() {
        let r = gauss_lobatto_rule::<f64>(2).unwrap();
        assert_eq!(r.points, vec![-1.0, 1.0]);
        assert_eq!(r.weights, vec![1.0, 1.0]);

        // n=3: derived by requiring exactness on monomials up to degree 3.
        let r = gauss_lobatto_rule::<f64>(3).unwrap();
        assert_close(r.points[1], 0.0, 1e-15);
        assert_close(r.weights[0], 1.0 / 3.0, 1e-14);
        assert_close(r.weights[1], 4.0 / 3.0, 1e-14);

        // n=4: interior points are the roots of P3', +-1/sqrt(5).
        let r = gauss_lobatto_rule::<f64>(4).unwrap();
        assert_close(r.points[1], -1.0 / 5.0f64.sqrt(), 1e-14);
        assert_close(r.points[2], 1.0 / 5.0f64.sqrt(), 1e-14);
        assert_close(r.weights[0], 1.0 / 6.0, 1e-14);
        assert_close(r.weights[1], 5.0 / 6.0, 1e-14);
    }

    #[test]
    fn legendre_small_rules() {
        let r = gauss_legendre_rule::<f64>(1).unwrap();
        assert_eq!(r.points, vec![0.0]);
        assert_eq!(r.weights, vec![2.0]);

        let r = gauss_legendre_rule::<f64>(2).unwrap();
        assert_close(r.points[0], -1.0 / 3.0f64.sqrt(), 1e-15);
        assert_close(r.weights[0], 1.0, 1e-14);

        let r = gauss_legendre_rule::<f64>(3).unwrap();
        assert_close(r.points[0], -(3.0f64 / 5.0).sqrt(), 1e-15);
        assert_close(r.weights[0], 5.0 / 9.0, 1e-14);
        assert_close(r.weights[1], 8.0 / 9.0, 1e-14);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(gauss_lobatto_rule::<f64>(1).is_err());
        assert!(gauss_legendre_rule::<f64>(0).is_err());
    }

    /// Both rules must integrate monomials exactly up to their stated degree.
    #[test]
    fn exactness_on_monomials() {
        for n in 2..=14 {
            let rules = [
                gauss_lobatto_rule::<f64>(n).unwrap(),
                gauss_legendre_rule::<f64>(n).unwrap(),
            ];
            for r in &rules {
                assert!(r.points.windows(2).all(|w| w[0] < w[1]));
                let wsum: f64 = r.weights.iter().sum();
                assert_close(wsum, 2.0, 1e-12);
                for k in 0..=r.exactness_degree {
                    let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                    let got = r.integrate(|x| x.powi(k as i32));
                    assert!(
                        (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                        "n={n} deg={k}: {got} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn lagrange_examples() {
        let (v, d) = lagrange_tabulate(&[-1.0, 1.0], &[0.0]).unwrap();
        assert_close(v[(0, 0)], 0.5, 1e-15);
        assert_close(v[(0, 1)], 0.5, 1e-15);
        assert_close(d[(0, 0)], -0.5, 1e-15);
        assert_close(d[(0, 1)], 0.5, 1e-15);

        // Cardinality at the nodes.
        let nodes = [-1.0, 0.0, 1.0];
        let (v, _) = lagrange_tabulate(&nodes, &nodes).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_close(v[(i, j)], if i == j { 1.0 } else { 0.0 }, 1e-15);
            }
        }

        // Quadratic Lagrange polynomials at 1/2.
        let (v, _) = lagrange_tabulate(&nodes, &[0.5]).unwrap();
        assert_close(v[(0, 0)], -1.0 / 8.0, 1e-15);
        assert_close(v[(0, 1)], 3.0 / 4.0, 1e-15);
        assert_close(v[(0, 2)], 3.0 / 8.0, 1e-15);

        assert!(lagrange_tabulate(&[0.5, 0.5], &[0.0]).is_err());
    }

    #[test]
    fn lagrange_partition_of_unity() {
        let nodes = gauss_lobatto_rule::<f64>(9).unwrap().points;
        let evals: Vec<f64> = (0..17).map(|i| -1.0 + i as f64 / 8.0).collect();
        let (v, d) = lagrange_tabulate(&nodes, &evals).unwrap();
        for q in 0..evals.len() {
            let sv: f64 = v.row(q).iter().sum();
            let sd: f64 = d.row(q).iter().sum();
            assert_close(sv, 1.0, 1e-12);
            assert_close(sd, 0.0, 1e-10);
        }
    }
}
