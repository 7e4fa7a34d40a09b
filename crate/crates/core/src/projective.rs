//! Complex projective space `CP^p` with the Fubini–Study structure.
//!
//! Points are stored as unit-norm representatives in `C^{p+1}`; the global
//! phase is left as is and every operation here is phase invariant.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, norm, qr, ComplexMatrix};
use crate::rng::RandomStream;

/// Tolerance on the norm of a stored representative.
pub const UNIT_TOL: f64 = 1e-12;

/// Point of `CP^p`, stored as a unit representative of length `p + 1`.
///
/// `==` compares representatives; use [`ProjectivePoint::same_point`] for projective equality.
///
/// JSON form: `{"coords": [[re, im], ...]}`; coordinates are normalized on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct ProjectivePoint {
    coords: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    coords: Vec<Complex64>,
}

impl TryFrom<PointRepr> for ProjectivePoint {
    type Error = Error;

    fn try_from(r: PointRepr) -> Result<Self> {
        ProjectivePoint::new(r.coords)
    }
}

impl From<ProjectivePoint> for PointRepr {
    fn from(p: ProjectivePoint) -> Self {
        PointRepr { coords: p.coords }
    }
}

impl ProjectivePoint {
    /// Normalizes `coords` to a unit representative.
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a point of CP^p needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = norm(&coords);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("zero vector has no projective class".into()));
        }
        Ok(Self { coords: coords.into_iter().map(|z| z / n).collect() })
    }

    /// Point from real coordinates.
    pub fn from_real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_k` of `CP^p`.
    pub fn basis(p: usize, k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); p + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self { coords: c }
    }

    /// Projective class of a nonzero matrix, entries read row-major.
    pub fn from_matrix(a: &ComplexMatrix) -> Result<Self> {
        Self::new(a.as_slice().to_vec())
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.coords
    }

    /// The `p` in `CP^p`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Image under a linear map (typically unitary), renormalized.
    pub fn transform(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.cols() != self.coords.len() || u.rows() != self.coords.len() {
            return Err(Error::DimensionMismatch { expected: self.coords.len(), got: u.cols() });
        }
        Self::new(u.mul_vec(&self.coords))
    }

    /// Equality of projective classes: `|<x, y>| = 1` within `1e-10`.
    pub fn same_point(&self, other: &Self) -> bool {
        self.coords.len() == other.coords.len()
            && (inner(&self.coords, &other.coords).norm() - 1.0).abs() <= 1e-10
    }
}

/// Open ball `B(center, sigma)` in projective distance.
#[derive(Clone, Debug)]
pub struct BallSpec {
    center: ProjectivePoint,
    sigma: f64,
}

impl BallSpec {
    pub fn new(center: ProjectivePoint, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::InvalidParameter(format!("ball radius must lie in (0, 1], got {sigma}")));
        }
        Ok(Self { center, sigma })
    }

    pub fn center(&self) -> &ProjectivePoint {
        &self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

fn check_same_dim(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<()> {
    if x.coords.len() != y.coords.len() {
        return Err(Error::DimensionMismatch { expected: x.coords.len(), got: y.coords.len() });
    }
    Ok(())
}

/// Fubini–Study distance `arccos |<x, y>|`, in `[0, pi/2]`.
pub fn riemannian_distance(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
    check_same_dim(x, y)?;
    let c = inner(&x.coords, &y.coords).norm().min(1.0);
    let s = projective_distance(x, y)?;
    // atan2 keeps full accuracy near both ends of the range.
    Ok(s.atan2(c))
}

/// Projective distance `sin d_R(x, y)`, in `[0, 1]`.
///
/// Evaluated as the norm of the component of `y` orthogonal to `x`, which
/// does not lose accuracy for nearby points.
pub fn projective_distance(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
    check_same_dim(x, y)?;
    let c = inner(&x.coords, &y.coords);
    let perp: f64 = x
        .coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| (b - c * a).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(perp.min(1.0))
}

/// `ln(pi^p / p!)`.
pub fn log_projective_volume(p: usize) -> f64 {
    p as f64 * PI.ln() - ln_factorial(p)
}

/// `v(P^p) = pi^p / p!`; computed through the log form for `p > 150`.
pub fn projective_volume(p: usize) -> f64 {
    if p > 150 {
        return log_projective_volume(p).exp();
    }
    (1..=p).fold(1.0, |acc, k| acc * PI / k as f64)
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Uniform (unitarily invariant) point of `CP^p`: a normalized standard
/// complex Gaussian vector.
pub fn sample_uniform_projective(p: usize, rng: &mut RandomStream) -> ProjectivePoint {
    assert!(p >= 1, "sample_uniform_projective needs p >= 1");
    loop {
        let g = rng.complex_normal_vec(p + 1);
        if let Ok(pt) = ProjectivePoint::new(g) {
            return pt;
        }
    }
}

/// Exact uniform sampler on `B(center, sigma)`.
///
/// The radial law follows from `v(B(x, e)) = v(P^p) e^{2p}`: the distance to
/// the center is `u = sigma * U^{1/(2p)}`. The direction is uniform on the
/// unit sphere of the orthogonal complement of the center.
pub fn sample_uniform_ball(ball: &BallSpec, rng: &mut RandomStream) -> ProjectivePoint {
    let a = &ball.center.coords;
    let p = ball.center.dim();
    let u = ball.sigma * rng.uniform_open01().powf(1.0 / (2.0 * p as f64));
    let w = loop {
        let mut g = rng.complex_normal_vec(p + 1);
        let c = inner(a, &g);
        for (gi, ai) in g.iter_mut().zip(a) {
            *gi -= c * ai;
        }
        let ng = norm(&g);
        if ng > 1e-8 {
            break g.into_iter().map(|z| z / ng).collect::<Vec<_>>();
        }
    };
    let r = (1.0 - u * u).sqrt();
    let z = a.iter().zip(&w).map(|(ai, wi)| ai * r + wi * u).collect();
    ProjectivePoint::new(z).expect("unit combination of orthonormal vectors")
}

/// Haar-distributed `n x n` unitary: QR of a complex Gaussian matrix with the
/// diagonal of `R` normalized to positive reals.
pub fn random_unitary(n: usize, rng: &mut RandomStream) -> ComplexMatrix {
    assert!(n >= 1, "random_unitary needs n >= 1");
    let g = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_normal());
    let (mut q, r) = qr(&g);
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Projective distance from `z` to the coordinate subspace
/// `P(span(e_0, ..., e_k))`: the norm of coordinates `k+1..=p`.
pub fn distance_to_coordinate_subspace(z: &ProjectivePoint, k: usize) -> Result<f64> {
    let p = z.dim();
    if k >= p {
        return Err(Error::InvalidParameter(format!("subspace index k = {k} must be below p = {p}")));
    }
    Ok(norm(&z.coords[k + 1..]).min(1.0))
}

/// Normalized tube volume `v_eps(P^{p-m}) / v(P^p)` of a linear subspace of
/// codimension `m`, from the binomial expansion of
/// `2 pi v(P^{p-m}) v(P^{m-1}) int_0^eps (1-u^2)^{p-m} u^{2m-1} du`.
pub fn tube_volume_linear_subspace_exact(p: usize, m: usize, eps: f64) -> Result<f64> {
    if m == 0 || m > p {
        return Err(Error::InvalidParameter(format!("need 0 < m <= p, got p = {p}, m = {m}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    let q = p - m;
    let e2 = eps * eps;
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut power = e2.powi(m as i32);
    for k in 0..=q {
        let term = binom * power / (2 * (m + k)) as f64;
        sum += if k % 2 == 0 { term } else { -term };
        binom = binom * (q - k) as f64 / (k + 1) as f64;
        power *= e2;
    }
    let log_pref = (2.0 * PI).ln() + log_projective_volume(q) + log_projective_volume(m - 1)
        - log_projective_volume(p);
    Ok((log_pref.exp() * sum).clamp(f64::MIN_POSITIVE, 1.0))
}
