//! Eigendecomposition of a general complex matrix.
//!
//! Householder reduction to Hessenberg form, then single-shift complex QR
//! with Wilkinson shifts (Givens rotations, full Schur form). Right and left
//! eigenvectors come from triangular solves against the Schur factor and are
//! mapped back through the accumulated unitary.

use num_complex::Complex64;

use super::matrix::{normalized, ComplexMatrix};
use super::qr::hessenberg;
use crate::error::{Error, Result};

/// Iterations allowed per eigenvalue before giving up.
const MAX_ITER_PER_EIGENVALUE: usize = 100;

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub eigenvalues: Vec<Complex64>,
    /// Unit right eigenvectors, column `i` pairs with `eigenvalues[i]`.
    pub right_vectors: ComplexMatrix,
    /// Unit left eigenvectors: `y_i^H A = lambda_i y_i^H`.
    pub left_vectors: ComplexMatrix,
    /// Minimum pairwise distance between eigenvalues (`+inf` for `n = 1`).
    pub min_gap: f64,
}

impl EigenResult {
    pub fn right(&self, i: usize) -> Vec<Complex64> {
        self.right_vectors.col(i)
    }

    pub fn left(&self, i: usize) -> Vec<Complex64> {
        self.left_vectors.col(i)
    }
}

pub fn eigen(a: &ComplexMatrix) -> Result<EigenResult> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::InvalidParameter(format!(
            "eigen needs a nonempty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let (t, z) = schur(a)?;
    let eigenvalues: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();

    let tnorm = t.frobenius_norm();
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);

    let mut right = ComplexMatrix::zeros(n, n);
    let mut left = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = eigenvalues[k];

        // (T - lambda I) v = 0 with v_k = 1, v_j = 0 for j > k.
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let s: Complex64 = (j + 1..=k).map(|i| t[(j, i)] * v[i]).sum();
            v[j] = -s / guarded(t[(j, j)] - lambda, smin);
            rescale_if_large(&mut v);
        }
        right.set_col(k, &normalized(&z.mul_vec(&v)));

        // u (T - lambda I) = 0 with u_k = 1, u_j = 0 for j < k.
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        u[k] = Complex64::new(1.0, 0.0);
        for j in k + 1..n {
            let s: Complex64 = (k..j).map(|i| u[i] * t[(i, j)]).sum();
            u[j] = -s / guarded(t[(j, j)] - lambda, smin);
            rescale_if_large(&mut u);
        }
        // y^H = u Z^H  =>  y = Z conj(u)
        let uc: Vec<Complex64> = u.iter().map(|x| x.conj()).collect();
        left.set_col(k, &normalized(&z.mul_vec(&uc)));
    }

    Ok(EigenResult { min_gap: min_gap(&eigenvalues), eigenvalues, right_vectors: right, left_vectors: left })
}

/// Eigenvalues only.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let (t, _) = schur(a)?;
    Ok((0..t.rows()).map(|i| t[(i, i)]).collect())
}

pub fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

fn guarded(d: Complex64, smin: f64) -> Complex64 {
    if d.norm() < smin {
        Complex64::new(smin, 0.0)
    } else {
        d
    }
}

fn rescale_if_large(v: &mut [Complex64]) {
    let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m > 1e150 {
        for z in v.iter_mut() {
            *z /= m;
        }
    }
}

/// Complex Schur form `A = Z T Z^H` with `T` upper triangular.
pub fn schur(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::InvalidParameter("schur needs a square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let (mut h, mut z) = hessenberg(a);
    if n == 1 {
        return Ok((h, z));
    }
    let anorm = h.frobenius_norm();
    let eps = f64::EPSILON;

    let mut ihi = n - 1;
    let mut its = 0usize;
    while ihi > 0 {
        // Locate the active unreduced block [l, ihi].
        let mut l = ihi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut diag = h[(l - 1, l - 1)].l1_norm() + h[(l, l)].l1_norm();
            if diag == 0.0 {
                diag = anorm;
            }
            if sub <= eps * diag || sub < f64::MIN_POSITIVE {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == ihi {
            ihi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        if its > MAX_ITER_PER_EIGENVALUE {
            return Err(Error::EigenNonConvergence { index: ihi, iterations: its - 1 });
        }

        let shift = if its.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            h[(ihi, ihi)] + Complex64::new(0.75 * h[(ihi, ihi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(ihi - 1, ihi - 1)], h[(ihi - 1, ihi)], h[(ihi, ihi - 1)], h[(ihi, ihi)])
        };

        let mut x = h[(l, l)] - shift;
        let mut y = h[(l + 1, l)];
        for k in l..ihi {
            if k > l {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (c, s) = givens(x, y);
            // Rows k, k+1: G = [[c, s], [-conj(s), c]].
            let c0 = if k > l { k - 1 } else { l };
            for j in c0..n {
                let a0 = h[(k, j)];
                let a1 = h[(k + 1, j)];
                h[(k, j)] = a0 * c + s * a1;
                h[(k + 1, j)] = -s.conj() * a0 + a1 * c;
            }
            // Columns k, k+1 with G^H.
            let rmax = (k + 2).min(ihi);
            for i in 0..=rmax {
                let a0 = h[(i, k)];
                let a1 = h[(i, k + 1)];
                h[(i, k)] = a0 * c + a1 * s.conj();
                h[(i, k + 1)] = -a0 * s + a1 * c;
            }
            for i in 0..n {
                let a0 = z[(i, k)];
                let a1 = z[(i, k + 1)];
                z[(i, k)] = a0 * c + a1 * s.conj();
                z[(i, k + 1)] = -a0 * s + a1 * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    // Clean the strictly lower part.
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((h, z))
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let r1 = d + half + disc;
    let r2 = d + half - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Rotation `(c, s)` with real `c` such that `[[c, s], [-conj(s), c]] [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let nrm = ax.hypot(ay);
    let c = ax / nrm;
    let s = (x / ax) * y.conj() / nrm;
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{inner, norm};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal_matrix() {
        let a = ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let e = eigen(&a).unwrap();
        for i in 0..2 {
            let lam = e.eigenvalues[i];
            let k = if (lam - c(1.0, 0.0)).norm() < 1e-14 { 0 } else { 1 };
            assert!((inner(&e.right(i), &e.right(i)).re - 1.0).abs() < 1e-14);
            assert!((e.right(i)[k].norm() - 1.0).abs() < 1e-14);
            assert!((e.left(i)[k].norm() - 1.0).abs() < 1e-14);
        }
        assert!((e.min_gap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nilpotent_has_zero_gap() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = eigen(&a).unwrap();
        assert_eq!(e.min_gap, 0.0);
        assert!(e.eigenvalues.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn upper_triangular_two_by_two() {
        // Hand solution: lambda = 1 has x = (1, 0), y = (1, -1)/sqrt 2.
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]);
        let e = eigen(&a).unwrap();
        let i = e.eigenvalues.iter().position(|z| (z - c(1.0, 0.0)).norm() < 1e-14).unwrap();
        let x = e.right(i);
        let y = e.left(i);
        assert!((x[0].norm() - 1.0).abs() < 1e-14 && x[1].norm() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Up to a global phase: y is parallel to (1, -1).
        assert!((inner(&[c(s, 0.0), c(-s, 0.0)], &y).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_eigenvalues_of_rotation() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let ev = sorted_re(eigenvalues(&a).unwrap());
        let ev = {
            let mut v = ev;
            v.sort_by(|a, b| a.im.total_cmp(&b.im));
            v
        };
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn residuals_on_a_companion_like_matrix() {
        let a = ComplexMatrix::from_fn(6, 6, |i, j| {
            if i == j + 1 {
                c(1.0, 0.0)
            } else if i == 0 {
                c(-(j as f64 + 1.0), 0.5)
            } else {
                c(0.0, 0.0)
            }
        });
        let e = eigen(&a).unwrap();
        let scale = a.frobenius_norm();
        for i in 0..6 {
            let x = e.right(i);
            let ax = a.mul_vec(&x);
            let r: Vec<Complex64> = ax.iter().zip(&x).map(|(p, q)| p - e.eigenvalues[i] * q).collect();
            assert!(norm(&r) <= 1e-8 * scale);
            let y = e.left(i);
            let ahy = a.adjoint().mul_vec(&y);
            let r: Vec<Complex64> =
                ahy.iter().zip(&y).map(|(p, q)| p - e.eigenvalues[i].conj() * q).collect();
            assert!(norm(&r) <= 1e-8 * scale);
        }
    }

    #[test]
    fn rejects_non_square() {
        assert!(eigen(&ComplexMatrix::zeros(2, 3)).is_err());
    }
}
