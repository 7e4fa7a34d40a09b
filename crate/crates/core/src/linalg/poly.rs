//! Univariate polynomial utilities. Coefficient vectors are in ascending
//! order: `coeffs[k]` multiplies `X^k`.

use num_complex::Complex64;

use super::eigen::eigenvalues;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Horner evaluation.
pub fn poly_eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

pub fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

pub fn poly_mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Monic polynomial with the given roots.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    roots.iter().fold(vec![Complex64::new(1.0, 0.0)], |acc, &r| {
        poly_mul(&acc, &[-r, Complex64::new(1.0, 0.0)])
    })
}

/// All roots of a univariate polynomial, as eigenvalues of its companion
/// matrix followed by a guarded Newton polish.
pub fn companion_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.len() < 2 {
        return Err(Error::InvalidParameter("polynomial degree must be at least 1".into()));
    }
    if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidParameter("leading coefficient is zero".into()));
    }
    // Companion matrix in upper Hessenberg form: first row -c_{d-1-j}/c_d.
    let comp = ComplexMatrix::from_fn(d, d, |i, j| {
        if i == 0 {
            -coeffs[d - 1 - j] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut roots = eigenvalues(&comp)?;
    let deriv = poly_derivative(coeffs);
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let f = poly_eval(coeffs, *r);
            let df = poly_eval(&deriv, *r);
            if df.norm() == 0.0 {
                break;
            }
            let cand = *r - f / df;
            if poly_eval(coeffs, cand).norm() < f.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(roots)
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::InvalidParameter("determinant needs a square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm())).unwrap();
        if m[(piv, k)].norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if piv != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            det = -det;
        }
        let p = m[(k, k)];
        det *= p;
        for i in k + 1..n {
            let f = m[(i, k)] / p;
            for j in k + 1..n {
                let mk = m[(k, j)];
                m[(i, j)] -= f * mk;
            }
        }
    }
    Ok(det)
}

/// Sylvester resultant, `res(p, q) = lc(p)^{deg q} * prod q(root_i(p))`.
///
/// Both inputs are ascending coefficient vectors whose last entry is taken as
/// the leading coefficient.
pub fn sylvester_resultant(p: &[Complex64], q: &[Complex64]) -> Result<Complex64> {
    if p.len() < 2 || q.len() < 2 {
        return Err(Error::InvalidParameter("both polynomials need degree at least 1".into()));
    }
    let all = p.iter().chain(q);
    if all.clone().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let (m, n) = (p.len() - 1, q.len() - 1);
    let size = m + n;
    let mut s = ComplexMatrix::zeros(size, size);
    // n shifted copies of p, then m shifted copies of q; descending order in each row.
    for r in 0..n {
        for (k, &c) in p.iter().rev().enumerate() {
            s[(r, r + k)] = c;
        }
    }
    for r in 0..m {
        for (k, &c) in q.iter().rev().enumerate() {
            s[(n + r, r + k)] = c;
        }
    }
    determinant(&s)
}

/// Discriminant `prod_{i<j} (r_i - r_j)^2` of a monic polynomial given by its roots.
pub fn discriminant_from_roots(roots: &[Complex64]) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let diff = roots[i] - roots[j];
            d *= diff * diff;
        }
    }
    d
}

/// Greedy matching of two root multisets by modulus of difference; returns
/// the largest matched distance.
pub fn match_roots(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut done = vec![false; a.len()];
    let mut worst: f64 = 0.0;
    for (dist, i, j) in pairs {
        if !done[i] && !used[j] {
            done[i] = true;
            used[j] = true;
            worst = worst.max(dist);
        }
    }
    worst
}
