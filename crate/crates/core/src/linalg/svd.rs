//! Complex singular value decomposition by one-sided (Hestenes) Jacobi.
//!
//! Columns of a working copy of `A` are rotated pairwise until mutually
//! orthogonal; the accumulated rotations form `V`, the column norms are the
//! singular values and the normalized columns are the leading columns of `U`.

use num_complex::Complex64;

use super::matrix::{inner, norm, ComplexMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Full SVD `A = U diag(s) V^H` with `U` and `V` square unitary.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    /// Descending, nonnegative; length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdResult {
    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// `U diag(s) V^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut us = ComplexMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                us[(i, k)] = self.u[(i, k)] * s;
            }
        }
        us.matmul(&self.v.adjoint())
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidParameter("svd of an empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if a.rows() >= a.cols() {
        Ok(svd_tall(a))
    } else {
        // A^H = U' S V'^H  =>  A = V' S U'^H
        let t = svd_tall(&a.adjoint());
        Ok(SvdResult { u: t.v, singular_values: t.singular_values, v: t.u })
    }
}

/// Singular values only.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.singular_values)
}

/// Spectral norm `||A||_2`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(svd(a)?.largest())
}

fn svd_tall(a: &ComplexMatrix) -> SvdResult {
    let (m, n) = (a.rows(), a.cols());
    // Work on columns as contiguous vectors.
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.col(j)).collect();
    let mut vcols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let tol = f64::EPSILON * (m as f64).sqrt();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = cols[p].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let beta = cols[q].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // [a_p, a_q] <- [a_p, a_q] * [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                let ph = phase.conj();
                rotate(&mut cols, p, q, c, s, ph);
                rotate(&mut vcols, p, q, c, s, ph);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let smax = norms[order[0]];
    let mut u = ComplexMatrix::zeros(m, m);
    let mut v = ComplexMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for (k, &j) in order.iter().enumerate() {
        s.push(norms[j]);
        v.set_col(k, &vcols[j]);
        // Columns with negligible norm carry no direction; they are completed below.
        if basis.len() == k && norms[j] > smax * 1e-14 && norms[j] > 0.0 {
            basis.push(cols[j].iter().map(|z| z / norms[j]).collect());
        }
    }
    complete_orthonormal(&mut basis, m);
    for (k, col) in basis.iter().enumerate() {
        u.set_col(k, col);
    }
    SvdResult { u, singular_values: s, v }
}

fn rotate(cols: &mut [Vec<Complex64>], p: usize, q: usize, c: f64, s: f64, ph: Complex64) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yp = *y * ph;
        let nx = *x * c - yp * s;
        let ny = *x * s + yp * c;
        *x = nx;
        *y = ny;
    }
}

/// Extends an orthonormal family to an orthonormal basis of `C^dim` using
/// twice-iterated Gram–Schmidt on the standard basis vectors.
pub(crate) fn complete_orthonormal(basis: &mut Vec<Vec<Complex64>>, dim: usize) {
    let mut candidate = 0;
    while basis.len() < dim && candidate < dim {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[candidate] = Complex64::new(1.0, 0.0);
        candidate += 1;
        for _ in 0..2 {
            for b in basis.iter() {
                let c = inner(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            basis.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    // Fewer than `dim` standard vectors can only be rejected if the family is
    // already spanning, so the loop above always completes.
    debug_assert_eq!(basis.len(), dim);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let r = svd(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(r.singular_values.len(), 2);
        for s in r.singular_values {
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_singular_values_are_moduli() {
        let a = ComplexMatrix::diag(&[c(3.0, 0.0), c(0.0, 4.0)]);
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let r = svd(&ComplexMatrix::zeros(3, 2)).unwrap();
        assert_eq!(r.singular_values, vec![0.0, 0.0]);
        let uu = r.u.adjoint().matmul(&r.u);
        assert!(uu.sub(&ComplexMatrix::identity(3)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn wide_and_rank_deficient() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        let r = svd(&a).unwrap();
        assert!(r.smallest() < 1e-14);
        assert!((r.largest() - (14.0f64 * 5.0).sqrt()).abs() < 1e-12);
        assert!(r.reconstruct().sub(&a).frobenius_norm() < 1e-13);
        let vv = r.v.adjoint().matmul(&r.v);
        assert!(vv.sub(&ComplexMatrix::identity(3)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let a = ComplexMatrix::from_real_rows(&[&[f64::NAN]]);
        assert_eq!(svd(&a).unwrap_err(), Error::NonFinite);
    }
}
