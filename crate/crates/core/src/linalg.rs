//! Dense and iterative linear algebra helpers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Systems up to this size are factorized directly.
pub(crate) const DENSE_LIMIT: usize = 500;

/// Symmetric positive definite system in coordinate form.
pub(crate) struct SparseSym {
    pub n: usize,
    pub diag: Vec<f64>,
    /// Off-diagonal entries `(i, j, value)` with `i != j`, each stored once.
    pub off: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new(n: usize) -> Self {
        SparseSym { n, diag: vec![0.0; n], off: Vec::new() }
    }

    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = self.diag[i] * x[i];
        }
        for &(i, j, a) in &self.off {
            out[i] += a * x[j];
            out[j] += a * x[i];
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::from_diagonal(&DVector::from_column_slice(&self.diag));
        for &(i, j, a) in &self.off {
            m[(i, j)] += a;
            m[(j, i)] += a;
        }
        m
    }

    /// Solves `A x = b`, directly for small systems, otherwise by
    /// Jacobi-preconditioned conjugate gradients.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if self.n == 0 {
            return Ok(Vec::new());
        }
        if self.n <= DENSE_LIMIT {
            let lu = self.to_dense().full_piv_lu();
            let x = lu.solve(&DVector::from_column_slice(b)).ok_or(Error::SingularSystem)?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularSystem);
            }
            Ok(x.as_slice().to_vec())
        } else {
            self.pcg(b)
        }
    }

    fn pcg(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if self.diag.iter().any(|&d| d <= 0.0) {
            return Err(Error::SingularSystem);
        }
        let bnorm = norm(b);
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let tol = 1e-14 * bnorm;
        for _ in 0..(20 * n).max(1000) {
            self.mul(&p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                return Err(Error::SingularSystem);
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if norm(&r) <= tol {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] / self.diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::SingularSystem)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Vectors whose
/// residual norm falls below `tol` times their original norm are dropped.
pub(crate) fn orthonormalize(seed: &[DVector<f64>], candidates: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = seed.to_vec();
    let start = basis.len();
    for v in candidates {
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let nw = w.norm();
        if nw > tol * n0 {
            basis.push(w / nw);
        }
    }
    basis.split_off(start)
}

/// Numerical rank by singular values relative to the largest one.
pub(crate) fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseSym {
        let mut a = SparseSym::new(n);
        for i in 0..n {
            a.diag[i] = 2.0 + 0.01 * i as f64;
            if i + 1 < n {
                a.off.push((i, i + 1, -1.0));
            }
        }
        a
    }

    #[test]
    fn dense_and_cg_agree() {
        let n = 600;
        let a = laplacian_1d(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x_cg = a.pcg(&b).unwrap();
        let x_lu = a.to_dense().full_piv_lu().solve(&DVector::from_column_slice(&b)).unwrap();
        let err = x_cg.iter().zip(x_lu.iter()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let v = vec![
            DVector::from_vec(vec![1.0, 1.0, 0.0]),
            DVector::from_vec(vec![2.0, 2.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 1.0]),
        ];
        let q = orthonormalize(&[], &v, 1e-10);
        assert_eq!(q.len(), 2);
        assert!(q[0].dot(&q[1]).abs() < 1e-15);
        assert!((q[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_of_projector() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(rank(&m, 1e-10), 1);
    }
}
