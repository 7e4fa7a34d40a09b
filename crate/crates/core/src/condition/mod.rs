//! Conic condition numbers for linear systems, Moore–Penrose inversion,
//! eigenvalue problems and homogeneous polynomial systems.

mod polysys;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    discriminant_from_roots, eigen, eigenvalues, inner, spectral_norm, svd, ComplexMatrix, RANK_TOL,
    SIMPLICITY_TOL,
};

pub use polysys::{
    discriminant_degree_bound, monomials, mu_norm_at_zero, mu_norm_system, multinomial, weyl_inner_product,
    PolySystem,
};

/// A condition number, possibly infinite on ill-posed input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionValue {
    pub value: f64,
    pub log_value: f64,
    pub ill_posed: bool,
}

impl ConditionValue {
    pub fn finite(value: f64) -> Self {
        debug_assert!(value.is_finite());
        Self { value, log_value: value.ln(), ill_posed: false }
    }

    pub fn infinite() -> Self {
        Self { value: f64::INFINITY, log_value: f64::INFINITY, ill_posed: true }
    }

    /// `num / den`, infinite when `den` is numerically zero relative to `num`.
    fn ratio(num: f64, den: f64, scale: f64) -> Self {
        if scale == 0.0 || den <= RANK_TOL * scale || !(num / den).is_finite() {
            Self::infinite()
        } else {
            Self::finite(num / den)
        }
    }

    pub fn is_finite(&self) -> bool {
        !self.ill_posed
    }
}

// JSON has no infinity: ill-posed values serialize as null.
impl Serialize for ConditionValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ConditionValue", 3)?;
        st.serialize_field("value", &(!self.ill_posed).then_some(self.value))?;
        st.serialize_field("log_value", &(!self.ill_posed).then_some(self.log_value))?;
        st.serialize_field("ill_posed", &self.ill_posed)?;
        st.end()
    }
}

/// `kappa_F(A) = ||A||_F ||A^{-1}||`, i.e. `||A||_F / sigma_min(A)`.
pub fn kappa_f(a: &ComplexMatrix) -> Result<ConditionValue> {
    if !a.is_square() {
        return Err(Error::InvalidParameter(format!("kappa_f needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    frobenius_over_smallest(a)
}

/// `kappa_F^dagger(A) = ||A||_F ||A^dagger||` for `rows >= cols`.
pub fn kappa_dagger_f(a: &ComplexMatrix) -> Result<ConditionValue> {
    if a.rows() < a.cols() {
        return Err(Error::InvalidParameter(format!(
            "kappa_dagger_f needs rows >= cols, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    frobenius_over_smallest(a)
}

fn frobenius_over_smallest(a: &ComplexMatrix) -> Result<ConditionValue> {
    let fro = a.frobenius_norm();
    let smin = svd(a)?.smallest();
    Ok(ConditionValue::ratio(fro, smin, fro))
}

/// Spectral projector `P = (y^H x)^{-1} x y^H` of a simple eigenvalue.
pub fn projection_matrix(x: &[Complex64], y: &[Complex64]) -> Result<ComplexMatrix> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let yx = inner(y, x);
    let scale = crate::linalg::norm(x) * crate::linalg::norm(y);
    if yx.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::IllPosed(format!(
            "left and right eigenvectors are orthogonal (|y^H x| = {:e}); eigenvalue is not simple",
            yx.norm()
        )));
    }
    Ok(ComplexMatrix::outer(x, y).scale(Complex64::new(1.0, 0.0) / yx))
}

/// `kappa_eigen(A) = max_lambda ||P_lambda||`, infinite on multiple eigenvalues.
pub fn kappa_eigen(a: &ComplexMatrix) -> Result<ConditionValue> {
    let e = eigen(a)?;
    let fro = a.frobenius_norm();
    if fro == 0.0 || e.min_gap <= SIMPLICITY_TOL * fro {
        return Ok(ConditionValue::infinite());
    }
    let mut worst: f64 = 0.0;
    for i in 0..a.rows() {
        match projection_matrix(&e.right(i), &e.left(i)) {
            Ok(p) => worst = worst.max(spectral_norm(&p)?),
            Err(Error::IllPosed(_)) => return Ok(ConditionValue::infinite()),
            Err(err) => return Err(err),
        }
    }
    if !worst.is_finite() {
        return Ok(ConditionValue::infinite());
    }
    Ok(ConditionValue::finite(worst))
}

/// `disc(chi_A) = prod_{i<j} (lambda_i - lambda_j)^2` from computed eigenvalues.
pub fn char_poly_discriminant(a: &ComplexMatrix) -> Result<Complex64> {
    Ok(discriminant_from_roots(&eigenvalues(a)?))
}
