//! Householder reflections: QR factorization and Hessenberg reduction.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;

/// Elementary reflector `H = I - tau v v^H` (with `v[0] = 1`) such that
/// `H^H x = beta e_1` with `beta` real.
fn householder(x: &[Complex64]) -> (Vec<Complex64>, Complex64, Complex64) {
    let alpha = x[0];
    let xnorm2: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
    let mut v = vec![Complex64::new(0.0, 0.0); x.len()];
    v[0] = Complex64::new(1.0, 0.0);
    if xnorm2 == 0.0 && alpha.im == 0.0 {
        return (v, Complex64::new(0.0, 0.0), alpha);
    }
    let norm = (alpha.norm_sqr() + xnorm2).sqrt();
    let beta = if alpha.re >= 0.0 { -norm } else { norm };
    let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = Complex64::new(1.0, 0.0) / (alpha - beta);
    for (vi, xi) in v[1..].iter_mut().zip(&x[1..]) {
        *vi = xi * scale;
    }
    (v, tau, Complex64::new(beta, 0.0))
}

/// `A <- (I - tau v v^H) A`, touching rows `r0..` and columns `c0..`.
fn apply_left(a: &mut ComplexMatrix, v: &[Complex64], tau: Complex64, r0: usize, c0: usize) {
    for j in c0..a.cols() {
        let mut w = Complex64::new(0.0, 0.0);
        for (k, vk) in v.iter().enumerate() {
            w += vk.conj() * a[(r0 + k, j)];
        }
        w *= tau;
        for (k, vk) in v.iter().enumerate() {
            a[(r0 + k, j)] -= vk * w;
        }
    }
}

/// `A <- A (I - tau v v^H)`, touching columns `c0..`.
fn apply_right(a: &mut ComplexMatrix, v: &[Complex64], tau: Complex64, c0: usize) {
    for i in 0..a.rows() {
        let mut w = Complex64::new(0.0, 0.0);
        for (k, vk) in v.iter().enumerate() {
            w += a[(i, c0 + k)] * vk;
        }
        w *= tau;
        for (k, vk) in v.iter().enumerate() {
            a[(i, c0 + k)] -= w * vk.conj();
        }
    }
}

/// Full QR factorization `A = Q R` of an `m x n` matrix, `Q` being `m x m`.
pub fn qr(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(m);
    for k in 0..n.min(m.saturating_sub(1)) {
        let x: Vec<Complex64> = (k..m).map(|i| r[(i, k)]).collect();
        let (v, tau, beta) = householder(&x);
        if tau == Complex64::new(0.0, 0.0) {
            continue;
        }
        apply_left(&mut r, &v, tau.conj(), k, k);
        r[(k, k)] = beta;
        for i in k + 1..m {
            r[(i, k)] = Complex64::new(0.0, 0.0);
        }
        apply_right(&mut q, &v, tau, k);
    }
    (q, r)
}

/// Reduction to upper Hessenberg form: returns `(H, Q)` with `A = Q H Q^H`.
pub fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let (v, tau, beta) = householder(&x);
        if tau == Complex64::new(0.0, 0.0) {
            continue;
        }
        apply_left(&mut h, &v, tau.conj(), k + 1, k);
        apply_right(&mut h, &v, tau, k + 1);
        h[(k + 1, k)] = beta;
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
        apply_right(&mut q, &v, tau, k + 1);
    }
    (h, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn random(m: usize, n: usize, seed: u64) -> ComplexMatrix {
        let mut s = RandomStream::new(seed);
        ComplexMatrix::from_fn(m, n, |_, _| s.complex_normal())
    }

    #[test]
    fn qr_reconstructs_and_q_is_unitary() {
        for &(m, n) in &[(1, 1), (3, 3), (5, 2), (2, 4), (6, 6)] {
            let a = random(m, n, (m * 10 + n) as u64);
            let (q, r) = qr(&a);
            assert!(q.matmul(&r).sub(&a).frobenius_norm() < 1e-12 * a.frobenius_norm().max(1.0));
            let qq = q.adjoint().matmul(&q);
            assert!(qq.sub(&ComplexMatrix::identity(m)).frobenius_norm() < 1e-12);
            for i in 0..m {
                for j in 0..i.min(n) {
                    assert_eq!(r[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn hessenberg_similarity() {
        let a = random(7, 7, 11);
        let (h, q) = hessenberg(&a);
        let back = q.matmul(&h).matmul(&q.adjoint());
        assert!(back.sub(&a).frobenius_norm() < 1e-12 * a.frobenius_norm());
        for i in 0..7usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], Complex64::new(0.0, 0.0));
            }
        }
    }
}
