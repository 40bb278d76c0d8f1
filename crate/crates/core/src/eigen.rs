//! Extreme eigenvalues of Hermitian operators.

use faer::Side;

use crate::{c64, Error, Operator, Result};

/// Dimension at and above which the Lanczos path replaces the dense solver.
pub const DENSE_EIGEN_LIMIT: usize = 4096;

/// Largest eigenvalue of a Hermitian operator.
pub fn lambda_max(h: &Operator) -> Result<f64> {
    if !h.is_square() {
        return Err(Error::Dimension("eigenvalues need a square operator".into()));
    }
    let tol = crate::operator::HERMITIAN_TOL * h.max_norm().max(1.0);
    if !h.hermitian_flag() && h.hermitian_defect() > tol {
        return Err(Error::NotHermitian(h.hermitian_defect()));
    }
    if h.rows() == 0 {
        return Err(Error::Dimension("empty operator".into()));
    }
    if h.nnz() == 0 {
        return Ok(0.0);
    }
    if h.rows() < DENSE_EIGEN_LIMIT {
        dense_lambda_max(h)
    } else {
        Ok(lanczos_lambda_max(h, 1e-10, 1000))
    }
}

pub fn dense_eigenvalues(h: &Operator) -> Result<Vec<f64>> {
    h.to_dense()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::InvalidArgument(format!("eigensolver failed: {e:?}")))
}

fn dense_lambda_max(h: &Operator) -> Result<f64> {
    Ok(dense_eigenvalues(h)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Lanczos with full reorthogonalisation; stops when the Ritz value moves by
/// less than `tol` relative between iterations or the Krylov space is exhausted.
pub fn lanczos_lambda_max(h: &Operator, tol: f64, max_iter: usize) -> f64 {
    let n = h.rows();
    let norm = |v: &[c64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let dot = |a: &[c64], b: &[c64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<c64>();

    // Deterministic start vector with support on every entry.
    let mut q: Vec<c64> = (0..n).map(|i| c64::new(1.0 + (i as f64 * 0.618).sin() * 0.5, (i as f64 * 0.37).cos() * 0.1)).collect();
    let s = norm(&q);
    q.iter_mut().for_each(|x| *x /= s);
    let mut basis: Vec<Vec<c64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    let iters = max_iter.min(n);
    for it in 0..iters {
        let mut w = h.matvec(&q);
        let a = dot(&q, &w).re;
        for (x, y) in w.iter_mut().zip(&q) {
            *x -= a * y;
        }
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            for (x, y) in w.iter_mut().zip(prev) {
                *x -= b * y;
            }
        }
        basis.push(q.clone());
        // Two passes of classical Gram–Schmidt against the whole basis.
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (x, y) in w.iter_mut().zip(v) {
                    *x -= c * y;
                }
            }
        }
        alpha.push(a);
        let b = norm(&w);
        let ritz = tridiagonal_max(&alpha, &beta);
        let converged = (ritz - last).abs() <= tol * ritz.abs().max(1.0);
        if converged && it > 4 || b <= 1e-12 * ritz.abs().max(1.0) {
            return ritz;
        }
        last = ritz;
        beta.push(b);
        q = w.into_iter().map(|x| x / b).collect();
    }
    tridiagonal_max(&alpha, &beta)
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal `a` and
/// off-diagonal `b` (`b.len() >= a.len() − 1`), by bisection on Sturm counts.
fn tridiagonal_max(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let off = |i: usize| if i < n - 1 { b[i].abs() } else { 0.0 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = off(i) + if i > 0 { off(i - 1) } else { 0.0 };
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    // Number of eigenvalues strictly below x.
    let count_below = |x: f64| {
        let mut c = 0;
        let mut d = 1.0;
        for i in 0..n {
            let b2 = if i > 0 { b[i - 1] * b[i - 1] } else { 0.0 };
            d = a[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + 1.0);
            }
            if d < 0.0 {
                c += 1;
            }
        }
        c
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermitian_tridiag(n: usize) -> Operator {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, c64::new((i % 7) as f64 * 0.3, 0.0)));
            if i + 1 < n {
                let v = c64::new(0.5, 0.2 * (i as f64).sin());
                t.push((i, i + 1, v));
                t.push((i + 1, i, v.conj()));
            }
        }
        Operator::from_triplets(n, n, t)
    }

    #[test]
    fn lanczos_matches_dense() {
        let h = hermitian_tridiag(300);
        let dense = dense_lambda_max(&h).unwrap();
        let lz = lanczos_lambda_max(&h, 1e-12, 300);
        assert!((dense - lz).abs() < 1e-8, "{dense} vs {lz}");
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = Operator::from_triplets(2, 2, [(0, 1, c64::new(1.0, 0.0))]);
        assert!(lambda_max(&a).is_err());
    }

    #[test]
    fn tridiagonal_bisection() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        assert!((tridiagonal_max(&[2.0, 2.0], &[1.0]) - 3.0).abs() < 1e-12);
        assert!((tridiagonal_max(&[-1.0], &[]) + 1.0).abs() < 1e-12);
    }
}
