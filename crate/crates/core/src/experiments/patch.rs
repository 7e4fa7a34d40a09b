//! Integral-geometry estimate of the volume of a patch of the determinant
//! quadric `V = {det = 0}` in `P^3` (projectivized 2 x 2 matrices).
//!
//! A Haar-random projective line meets an `m`-dimensional variety patch
//! `M` in `v(M) / v(P^m)` points on average, so the mean number of
//! intersection points with `V ∩ B(y, eps)` estimates `v(V ∩ B(y, eps)) / v(P^2)`.

use num_complex::Complex64;
use serde::Serialize;

use super::{normal_quantile, run_trials};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::projective::{projective_distance, random_unitary, ProjectivePoint};
use crate::rng::{RandomStream, DERIVATION_TAG};

const DEGREE: f64 = 2.0;
// binom(p, m) with p = 3, m = 2.
const BINOM_P_M: f64 = 3.0;
const MAX_EPS: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatchVolumeReport {
    pub experiment: String,
    pub center: ProjectivePoint,
    pub eps: f64,
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
    pub seed_derivation: String,
    pub estimate: f64,
    pub std_error: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    /// Lower bound `1/2 eps^4`.
    pub floor: f64,
    /// Upper bound `deg(V) binom(3, 2) eps^4`.
    pub ceiling: f64,
    /// Whether the whole confidence interval lies in `[floor, ceiling]`.
    pub ci_inside: bool,
    pub degenerate_redraws: u64,
    /// `floor <= estimate <= ceiling`.
    pub pass: bool,
}

/// Coefficients `(a, b, c)` of `det(s A + t B) = a s^2 + b s t + c t^2`.
fn det_on_line(a: &[Complex64], b: &[Complex64]) -> (Complex64, Complex64, Complex64) {
    let det = |m: &[Complex64]| m[0] * m[3] - m[1] * m[2];
    let mixed = a[0] * b[3] + b[0] * a[3] - a[1] * b[2] - b[1] * a[2];
    (det(a), mixed, det(b))
}

/// Both roots of `lead x^2 + mid x + tail = 0` for `|lead| >= |tail|`, `lead != 0`.
fn quadratic_roots(lead: Complex64, mid: Complex64, tail: Complex64) -> [Complex64; 2] {
    let disc = (mid * mid - 4.0 * lead * tail).sqrt();
    let plus = mid + disc;
    let minus = mid - disc;
    let q = -0.5 * if plus.norm() >= minus.norm() { plus } else { minus };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / lead, tail / q]
}

/// Zeros `(s : t)` of the binary quadratic `a s^2 + b s t + c t^2`, or `None`
/// when it vanishes identically (up to rounding).
fn binary_quadratic_zeros(a: Complex64, b: Complex64, c: Complex64) -> Option<[(Complex64, Complex64); 2]> {
    let one = Complex64::new(1.0, 0.0);
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale <= 1e-13 {
        return None;
    }
    if a.norm().max(c.norm()) <= 1e-14 * scale {
        return Some([(one, Complex64::new(0.0, 0.0)), (Complex64::new(0.0, 0.0), one)]);
    }
    if c.norm() >= a.norm() {
        // x = t/s solves c x^2 + b x + a = 0.
        let [x1, x2] = quadratic_roots(c, b, a);
        Some([(one, x1), (one, x2)])
    } else {
        // y = s/t solves a y^2 + b y + c = 0.
        let [y1, y2] = quadratic_roots(a, b, c);
        Some([(y1, one), (y2, one)])
    }
}

/// Estimate `v(V ∩ B(y, eps)) / v(P^2)` from `trials` random lines.
pub fn patch_volume_via_lines(
    y: &ProjectivePoint,
    eps: f64,
    trials: u64,
    seed: u64,
    confidence: f64,
    threads: Option<usize>,
) -> Result<PatchVolumeReport> {
    if y.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 4, got: y.dim() + 1 });
    }
    let yc = y.coords();
    if (yc[0] * yc[3] - yc[1] * yc[2]).norm() > 1e-12 {
        return Err(Error::InvalidParameter("center must be a singular 2 x 2 matrix".into()));
    }
    if !(0.0..=MAX_EPS).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps must lie in [0, 1/sqrt 2], got {eps}")));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least 2 trials".into()));
    }
    let z = normal_quantile(confidence)?;

    let per_trial = run_trials(trials, threads, |i| {
        let mut rng = RandomStream::derive(seed, i);
        let mut redraws = 0u64;
        loop {
            let u: ComplexMatrix = random_unitary(4, &mut rng);
            let (u0, u1) = (u.col(0), u.col(1));
            let (a, b, c) = det_on_line(&u0, &u1);
            let Some(zeros) = binary_quadratic_zeros(a, b, c) else {
                redraws += 1;
                continue;
            };
            let mut hits = 0u32;
            for (s, t) in zeros {
                let point: Vec<Complex64> = u0.iter().zip(&u1).map(|(p, q)| s * p + t * q).collect();
                let point = ProjectivePoint::new(point)?;
                if projective_distance(y, &point)? < eps {
                    hits += 1;
                }
            }
            return Ok((hits, redraws));
        }
    })?;

    let n = trials as f64;
    let total: u64 = per_trial.iter().map(|(h, _)| *h as u64).sum();
    let sum_sq: u64 = per_trial.iter().map(|(h, _)| (*h as u64) * (*h as u64)).sum();
    let redraws = per_trial.iter().map(|(_, r)| r).sum();
    let estimate = total as f64 / n;
    let var = ((sum_sq as f64 - n * estimate * estimate) / (n - 1.0)).max(0.0);
    let std_error = (var / n).sqrt();
    let (ci_lower, ci_upper) = (estimate - z * std_error, estimate + z * std_error);
    let e4 = eps.powi(4);
    let floor = 0.5 * e4;
    let ceiling = DEGREE * BINOM_P_M * e4;
    Ok(PatchVolumeReport {
        experiment: "patch_volume".into(),
        center: y.clone(),
        eps,
        trials,
        seed,
        confidence,
        seed_derivation: DERIVATION_TAG.into(),
        estimate,
        std_error,
        ci_lower,
        ci_upper,
        floor,
        ceiling,
        ci_inside: floor <= ci_lower && ci_upper <= ceiling,
        degenerate_redraws: redraws,
        pass: floor <= estimate && estimate <= ceiling,
    })
}

impl PatchVolumeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
