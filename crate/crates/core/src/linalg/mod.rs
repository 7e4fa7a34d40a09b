//! Dense complex linear algebra at desk scale (dimensions up to 64).

mod eigen;
mod matrix;
mod poly;
mod qr;
mod svd;

pub use eigen::{eigen, eigenvalues, min_gap, schur, EigenResult};
pub use matrix::{inner, norm, normalized, ComplexMatrix};
pub use poly::{
    companion_roots, determinant, discriminant_from_roots, match_roots, poly_derivative, poly_eval,
    poly_from_roots, poly_mul, sylvester_resultant,
};
pub use qr::{hessenberg, qr};
pub use svd::{singular_values, spectral_norm, svd, SvdResult};

use crate::error::{Error, Result};

/// Singular values below `RANK_TOL * ||A||_F` count as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Eigenvalues closer than `SIMPLICITY_TOL * ||A||_F` are treated as multiple.
pub const SIMPLICITY_TOL: f64 = 1e-8;

/// Smallest of the `min(rows, cols)` singular values: the Frobenius (and
/// spectral) distance from `A` to the rank-deficient matrices.
pub fn smallest_singular_value(a: &ComplexMatrix) -> Result<f64> {
    Ok(svd(a)?.smallest())
}

/// Moore–Penrose inverse of a full-column-rank matrix, `V diag(1/s) U^H`.
pub fn pseudo_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() < a.cols() {
        return Err(Error::InvalidParameter(format!(
            "pseudo-inverse expects rows >= cols, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let d = svd(a)?;
    let fro = a.frobenius_norm();
    if d.smallest() <= RANK_TOL * fro {
        return Err(Error::IllPosed(format!(
            "rank-deficient matrix (sigma_min = {:e}, ||A||_F = {:e})",
            d.smallest(),
            fro
        )));
    }
    let n = a.cols();
    let m = a.rows();
    // V diag(1/s) then times the first n columns of U, adjointed.
    let mut out = ComplexMatrix::zeros(n, m);
    for k in 0..n {
        let inv = 1.0 / d.singular_values[k];
        for i in 0..n {
            let vik = d.v[(i, k)] * inv;
            for j in 0..m {
                out[(i, j)] += vik * d.u[(j, k)].conj();
            }
        }
    }
    Ok(out)
}
