//! Homogeneous polynomial systems with the unitarily invariant (Weyl) Hermitian
//! product, and the normalized condition number at a zero.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ConditionValue;
use crate::error::{Error, Result};
use crate::linalg::{companion_roots, norm, svd, ComplexMatrix};
#[cfg(test)]
use crate::linalg::inner;
use crate::projective::ProjectivePoint;

/// Residual tolerance, relative to the Weyl norm, for accepting a point as a zero.
pub const ZERO_TOL: f64 = 1e-8;

/// `n` homogeneous equations in the variables `X_0..X_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct PolySystem {
    n: usize,
    degrees: Vec<u32>,
    equations: Vec<BTreeMap<Vec<u32>, Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    n: usize,
    degrees: Vec<u32>,
    equations: Vec<Vec<TermRepr>>,
}

impl TryFrom<SystemRepr> for PolySystem {
    type Error = Error;

    fn try_from(r: SystemRepr) -> Result<Self> {
        let mut equations = Vec::with_capacity(r.equations.len());
        for (i, eq) in r.equations.into_iter().enumerate() {
            let mut map = BTreeMap::new();
            for t in eq {
                if map.insert(t.alpha.clone(), Complex64::new(t.re, t.im)).is_some() {
                    return Err(Error::Malformed(format!("equation {i}: repeated exponent {:?}", t.alpha)));
                }
            }
            equations.push(map);
        }
        PolySystem::new(r.n, r.degrees, equations)
    }
}

impl From<PolySystem> for SystemRepr {
    fn from(f: PolySystem) -> Self {
        SystemRepr {
            n: f.n,
            degrees: f.degrees,
            equations: f
                .equations
                .into_iter()
                .map(|eq| eq.into_iter().map(|(alpha, c)| TermRepr { alpha, re: c.re, im: c.im }).collect())
                .collect(),
        }
    }
}

/// `d! / (alpha_0! ... alpha_n!)`.
pub fn multinomial(alpha: &[u32]) -> f64 {
    let mut out = 1.0;
    let mut total = 0u32;
    for &a in alpha {
        for k in 1..=a {
            total += 1;
            out *= total as f64 / k as f64;
        }
    }
    out
}

/// All exponent tuples of length `vars` summing to `degree`, in lexicographically
/// decreasing order (so `X_0^d` comes first).
pub fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, rest: u32, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=rest).rev() {
            prefix.push(a);
            rec(prefix, left - 1, rest - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if vars > 0 {
        rec(&mut Vec::with_capacity(vars), vars, degree, &mut out);
    }
    out
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.checked_mul(n - i)? / (i + 1);
    }
    Some(out)
}

impl PolySystem {
    pub fn new(n: usize, degrees: Vec<u32>, equations: Vec<BTreeMap<Vec<u32>, Complex64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("a system needs at least one equation".into()));
        }
        if degrees.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: degrees.len() });
        }
        if equations.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: equations.len() });
        }
        for (i, (eq, &d)) in equations.iter().zip(&degrees).enumerate() {
            if d == 0 {
                return Err(Error::InvalidParameter(format!("equation {i} has degree 0")));
            }
            for (alpha, c) in eq {
                if alpha.len() != n + 1 {
                    return Err(Error::Malformed(format!(
                        "equation {i}: exponent {alpha:?} should have {} entries",
                        n + 1
                    )));
                }
                if alpha.iter().sum::<u32>() != d {
                    return Err(Error::Malformed(format!("equation {i}: exponent {alpha:?} does not sum to {d}")));
                }
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(Error::NonFinite);
                }
            }
            if eq.values().all(|c| *c == Complex64::new(0.0, 0.0)) {
                return Err(Error::InvalidParameter(format!("equation {i} is identically zero")));
            }
        }
        Ok(Self { n, degrees, equations })
    }

    /// A single binary form from coefficients of `X_0^{d-k} X_1^k`, `k = 0..=d`.
    pub fn binary_form(coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidParameter("a binary form needs degree at least 1".into()));
        }
        let d = (coeffs.len() - 1) as u32;
        let eq = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(k, c)| (vec![d - k as u32, k as u32], *c))
            .collect();
        Self::new(1, vec![d], vec![eq])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn equation(&self, i: usize) -> &BTreeMap<Vec<u32>, Complex64> {
        &self.equations[i]
    }

    pub fn coefficient(&self, i: usize, alpha: &[u32]) -> Complex64 {
        self.equations[i].get(alpha).copied().unwrap_or_default()
    }

    /// Dimension of the space of degree-`d_i` forms in `n + 1` variables, per equation.
    pub fn monomial_counts(&self) -> Vec<u128> {
        self.degrees
            .iter()
            .map(|&d| binomial_u128(self.n as u128 + d as u128, d as u128).expect("monomial count overflow"))
            .collect()
    }

    /// Projective dimension of the space of systems with these degrees.
    pub fn projective_dimension(&self) -> u128 {
        self.monomial_counts().iter().sum::<u128>() - 1
    }

    /// Product of the degrees.
    pub fn bezout_number(&self) -> u128 {
        self.degrees.iter().map(|&d| d as u128).product()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for eq in &mut out.equations {
            for c in eq.values_mut() {
                *c *= s;
            }
        }
        out
    }

    pub fn weyl_norm(&self) -> f64 {
        weyl_inner_product(self, self).expect("same shape").re.max(0.0).sqrt()
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_point(x)?;
        Ok(self.equations.iter().map(|eq| eq.iter().map(|(a, c)| c * monomial(x, a, None)).sum()).collect())
    }

    /// `n x (n+1)` matrix of partial derivatives at `x`.
    pub fn jacobian(&self, x: &[Complex64]) -> Result<ComplexMatrix> {
        self.check_point(x)?;
        Ok(ComplexMatrix::from_fn(self.n, self.n + 1, |i, k| {
            self.equations[i].iter().map(|(a, c)| c * monomial(x, a, Some(k))).sum()
        }))
    }

    fn check_point(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: x.len() });
        }
        Ok(())
    }
}

/// `x^alpha`, or its partial derivative in variable `k`.
fn monomial(x: &[Complex64], alpha: &[u32], k: Option<usize>) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for (j, (&xj, &aj)) in x.iter().zip(alpha).enumerate() {
        if Some(j) == k {
            if aj == 0 {
                return Complex64::new(0.0, 0.0);
            }
            out *= xj.powu(aj - 1) * aj as f64;
        } else {
            out *= xj.powu(aj);
        }
    }
    out
}

/// `sum_i sum_alpha a_alpha conj(b_alpha) / multinomial(d_i, alpha)`.
pub fn weyl_inner_product(f: &PolySystem, g: &PolySystem) -> Result<Complex64> {
    if f.n != g.n || f.degrees != g.degrees {
        return Err(Error::InvalidParameter(format!(
            "systems have different shapes: n={} degrees={:?} vs n={} degrees={:?}",
            f.n, f.degrees, g.n, g.degrees
        )));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (ef, eg) in f.equations.iter().zip(&g.equations) {
        for (alpha, a) in ef {
            if let Some(b) = eg.get(alpha) {
                total += a * b.conj() / multinomial(alpha);
            }
        }
    }
    Ok(total)
}

/// `mu_norm(f, zeta) = ||f|| * ||(Df(zeta)|_{zeta^perp})^{-1} diag(sqrt d_i)||`.
pub fn mu_norm_at_zero(f: &PolySystem, zeta: &ProjectivePoint) -> Result<ConditionValue> {
    let z = zeta.coords();
    let fnorm = f.weyl_norm();
    let residual = norm(&f.evaluate(z)?);
    let tolerance = ZERO_TOL * fnorm;
    if residual > tolerance {
        return Err(Error::NotAZero { residual, tolerance });
    }
    let tangent = tangent_basis(z);
    let restricted = f.jacobian(z)?.matmul(&tangent);
    mu_from_restricted(f, &restricted)
}

fn mu_from_restricted(f: &PolySystem, restricted: &ComplexMatrix) -> Result<ConditionValue> {
    let mut scaled = restricted.clone();
    for (i, &d) in f.degrees.iter().enumerate() {
        let w = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        for k in 0..scaled.cols() {
            scaled[(i, k)] *= w;
        }
    }
    let fro = scaled.frobenius_norm();
    let smin = svd(&scaled)?.smallest();
    Ok(ConditionValue::ratio(f.weyl_norm(), smin, fro))
}

/// Orthonormal basis of the complement of a unit vector, as columns.
fn tangent_basis(z: &[Complex64]) -> ComplexMatrix {
    let u = svd(&ComplexMatrix::column(z)).expect("unit vector").u;
    let n = z.len();
    ComplexMatrix::from_fn(n, n - 1, |i, k| u[(i, k + 1)])
}

/// Largest `mu_norm` over all projective zeros of a binary form.
pub fn mu_norm_system(f: &PolySystem) -> Result<ConditionValue> {
    if f.n != 1 {
        return Err(Error::Unsupported(format!(
            "root enumeration is only available for a single binary form (n = 1, got n = {}); \
             use mu_norm_at_zero with known zeros instead",
            f.n
        )));
    }
    let d = f.degrees[0] as usize;
    // g(x) = f(1, x), ascending in x.
    let g: Vec<Complex64> = (0..=d).map(|k| f.coefficient(0, &[(d - k) as u32, k as u32])).collect();
    let scale = g.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let top = (0..=d).rev().find(|&k| g[k].norm() > 1e-14 * scale).unwrap_or(0);
    let at_infinity = d - top;
    if at_infinity >= 2 {
        return Ok(ConditionValue::infinite());
    }
    let mut zeros = Vec::with_capacity(d);
    if top >= 1 {
        for x in companion_roots(&g[..=top])? {
            zeros.push(ProjectivePoint::new(vec![Complex64::new(1.0, 0.0), x])?);
        }
    }
    if at_infinity == 1 {
        zeros.push(ProjectivePoint::basis(1, 1));
    }
    let mut worst = ConditionValue::finite(0.0);
    for zeta in &zeros {
        let mu = match mu_norm_at_zero(f, zeta) {
            Ok(mu) => mu,
            // Roots of a nearly repeated factor lose accuracy; the restricted
            // derivative is tiny there, so the value is infinite either way.
            Err(Error::NotAZero { .. }) => at_zero_unchecked(f, zeta)?,
            Err(e) => return Err(e),
        };
        if mu.ill_posed {
            return Ok(mu);
        }
        if mu.value > worst.value {
            worst = mu;
        }
    }
    Ok(worst)
}

fn at_zero_unchecked(f: &PolySystem, zeta: &ProjectivePoint) -> Result<ConditionValue> {
    let z = zeta.coords();
    mu_from_restricted(f, &f.jacobian(z)?.matmul(&tangent_basis(z)))
}

/// Degree of the discriminant hypersurface for a system with these degrees,
/// and the cruder bound `2 n D^2`.
pub fn discriminant_degree_bound(degrees: &[u32]) -> Result<(u128, u128)> {
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(Error::InvalidParameter("degrees must be a nonempty list of positive integers".into()));
    }
    let overflow = || Error::InvalidParameter("discriminant degree overflows 128 bits".into());
    let n = degrees.len() as u128;
    let bezout = degrees.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128)).ok_or_else(overflow)?;
    let aux_degree = 1 + degrees.iter().map(|&d| d as u128).sum::<u128>() - n;
    let partials: u128 = degrees.iter().map(|&d| bezout / d as u128).sum();
    let exact = aux_degree.checked_mul(partials).and_then(|v| v.checked_add(bezout)).ok_or_else(overflow)?;
    let crude = bezout
        .checked_mul(bezout)
        .and_then(|v| v.checked_mul(2 * n))
        .ok_or_else(overflow)?;
    Ok((exact, crude))
}

#[cfg(test)]
fn is_orthonormal_complement(z: &[Complex64], basis: &ComplexMatrix) -> bool {
    (0..basis.cols()).all(|k| {
        let b = basis.col(k);
        inner(z, &b).norm() < 1e-12 && (norm(&b) - 1.0).abs() < 1e-12
    })
}
