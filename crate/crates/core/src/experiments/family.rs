//! Problem families: how a point of `CP^p` becomes a problem instance, which
//! condition number it carries, and which bounds apply.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    binomial, bound_polysys, bound_prop_eigen, bound_prop_square, expectation_bound_theorem1,
    tail_bound_hypersurface, tail_bound_theorem1, BoundInput, BoundValue,
};
use crate::condition::{kappa_dagger_f, kappa_eigen, kappa_f, mu_norm_system, ConditionValue, PolySystem};
use crate::error::{Error, Result};
use crate::linalg::{poly_from_roots, ComplexMatrix};
use crate::projective::{sample_uniform_projective, ProjectivePoint};
use crate::rng::{RandomStream, CENTER_STREAM};

/// Smallest diagonal entry (or eigenvalue gap, or root gap) of the
/// near-singular centers.
pub const NEAR_SINGULAR_DELTA: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemFamily {
    /// `n x n` linear systems, condition `kappa_F`.
    Square { n: usize },
    /// `l x n` matrices with `l >= n`, condition `kappa_F^dagger`.
    MoorePenrose { l: usize, n: usize },
    /// `n x n` eigenvalue problems, condition `kappa_eigen`.
    Eigen { n: usize },
    /// Binary forms of degree `d`, condition `mu_norm`.
    BinaryForm { d: usize },
}

/// A decoded instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Matrix(ComplexMatrix),
    Form(PolySystem),
}

/// Where the smoothing ball is centered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    Identity,
    NearSingular,
    Random { seed: u64 },
    File { path: PathBuf },
}

impl std::str::FromStr for Center {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Center::Identity),
            "near-singular" | "near_singular" => Ok(Center::NearSingular),
            _ => {
                if let Some(seed) = s.strip_prefix("random:") {
                    let seed = seed
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad center seed in '{s}'")))?;
                    Ok(Center::Random { seed })
                } else if let Some(path) = s.strip_prefix("file:") {
                    Ok(Center::File { path: path.into() })
                } else {
                    Err(Error::InvalidParameter(format!(
                        "unknown center '{s}' (expected identity, near-singular, random:SEED or file:PATH)"
                    )))
                }
            }
        }
    }
}

impl ProblemFamily {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ProblemFamily::Square { n } | ProblemFamily::Eigen { n } => n >= 2,
            ProblemFamily::MoorePenrose { l, n } => n >= 1 && l >= n && l * n >= 2,
            ProblemFamily::BinaryForm { d } => d >= 2,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("family {self:?} has no nontrivial ill-posed set")));
        }
        Ok(())
    }

    /// Projective dimension `p` of the input space.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            ProblemFamily::Square { n } | ProblemFamily::Eigen { n } => n * n - 1,
            ProblemFamily::MoorePenrose { l, n } => l * n - 1,
            ProblemFamily::BinaryForm { d } => d,
        }
    }

    /// Dimension of the ill-posed set.
    pub fn ill_posed_dim(&self) -> usize {
        match *self {
            ProblemFamily::MoorePenrose { l, n } => l * n - l + n - 2,
            _ => self.ambient_dim() - 1,
        }
    }

    /// Degree of (a variety containing) the ill-posed set.
    pub fn ill_posed_degree(&self) -> f64 {
        match *self {
            ProblemFamily::Square { n } => n as f64,
            ProblemFamily::MoorePenrose { l, n } => binomial(l as u64, n as u64 - 1).map_or(f64::INFINITY, |b| b as f64),
            ProblemFamily::Eigen { n } => (n * n - n) as f64,
            ProblemFamily::BinaryForm { d } => 2.0 * d as f64,
        }
    }

    /// Factor `c` with `condition <= c * C` for the conic condition number `C`
    /// of the ill-posed set, so that tails are compared at `t / c`. Only the
    /// eigenvalue condition number needs one (`sqrt 2`).
    pub fn conic_factor(&self) -> f64 {
        match self {
            ProblemFamily::Eigen { .. } => std::f64::consts::SQRT_2,
            _ => 1.0,
        }
    }

    /// Tail bound from the general theorem for this family's ill-posed set.
    pub fn tail_bound(&self, sigma: f64, t: f64) -> Result<BoundValue> {
        let input = BoundInput::new(
            self.ambient_dim() as u64,
            self.ill_posed_dim() as u64,
            self.ill_posed_degree(),
            sigma,
            t / self.conic_factor(),
        )?;
        Ok(tail_bound_theorem1(&input))
    }

    /// The coarser hypersurface bound, when the ill-posed set is a hypersurface.
    pub fn relaxed_tail_bound(&self, sigma: f64, t: f64) -> Result<Option<BoundValue>> {
        let p = self.ambient_dim() as u64;
        match *self {
            ProblemFamily::MoorePenrose { l, n } if l != n => Ok(None),
            ProblemFamily::BinaryForm { d } => Ok(Some(bound_polysys(1, &[d as u64], sigma, t)?.0)),
            _ => Ok(Some(tail_bound_hypersurface(p, self.ill_posed_degree(), sigma, t / self.conic_factor())?)),
        }
    }

    /// Bound on the expected log condition number.
    pub fn expectation_bound(&self, sigma: f64) -> Result<f64> {
        match *self {
            ProblemFamily::Square { n } => bound_prop_square(n as u64, sigma),
            ProblemFamily::Eigen { n } => bound_prop_eigen(n as u64, sigma),
            ProblemFamily::MoorePenrose { .. } => expectation_bound_theorem1(
                self.ambient_dim() as u64,
                self.ill_posed_dim() as u64,
                self.ill_posed_degree(),
                sigma,
            ),
            ProblemFamily::BinaryForm { d } => Ok(bound_polysys(1, &[d as u64], sigma, 1.0)?.1),
        }
    }

    fn matrix_shape(&self) -> Option<(usize, usize)> {
        match *self {
            ProblemFamily::Square { n } | ProblemFamily::Eigen { n } => Some((n, n)),
            ProblemFamily::MoorePenrose { l, n } => Some((l, n)),
            ProblemFamily::BinaryForm { .. } => None,
        }
    }

    /// Turn a point of `CP^p` into an instance. Matrices are read row-major;
    /// binary forms are read in the Weyl-orthonormal monomial basis
    /// `sqrt(binom(d, k)) X_0^{d-k} X_1^k`.
    pub fn decode(&self, z: &ProjectivePoint) -> Result<Instance> {
        let coords = z.coords();
        if coords.len() != self.ambient_dim() + 1 {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim() + 1, got: coords.len() });
        }
        match (*self, self.matrix_shape()) {
            (_, Some((r, c))) => Ok(Instance::Matrix(ComplexMatrix::from_vec(r, c, coords.to_vec())?)),
            (ProblemFamily::BinaryForm { d }, None) => {
                let c: Vec<Complex64> = coords.iter().enumerate().map(|(k, z)| z * weyl_weight(d, k)).collect();
                Ok(Instance::Form(PolySystem::binary_form(&c)?))
            }
            _ => unreachable!(),
        }
    }

    /// Inverse of [`decode`](Self::decode), normalized to a projective point.
    pub fn encode(&self, instance: &Instance) -> Result<ProjectivePoint> {
        match (instance, *self) {
            (Instance::Matrix(a), _) if self.matrix_shape() == Some((a.rows(), a.cols())) => {
                ProjectivePoint::new(a.as_slice().to_vec())
            }
            (Instance::Form(f), ProblemFamily::BinaryForm { d }) if f.n() == 1 && f.degrees()[0] as usize == d => {
                let coords = (0..=d)
                    .map(|k| f.coefficient(0, &[(d - k) as u32, k as u32]) / weyl_weight(d, k))
                    .collect();
                ProjectivePoint::new(coords)
            }
            _ => Err(Error::InvalidParameter(format!("instance does not belong to family {self:?}"))),
        }
    }

    /// The family's condition number at the instance encoded by `z`.
    pub fn condition(&self, z: &ProjectivePoint) -> Result<ConditionValue> {
        match (self.decode(z)?, *self) {
            (Instance::Matrix(a), ProblemFamily::Square { .. }) => kappa_f(&a),
            (Instance::Matrix(a), ProblemFamily::MoorePenrose { .. }) => kappa_dagger_f(&a),
            (Instance::Matrix(a), ProblemFamily::Eigen { .. }) => kappa_eigen(&a),
            (Instance::Form(f), ProblemFamily::BinaryForm { .. }) => mu_norm_system(&f),
            _ => unreachable!(),
        }
    }

    /// Resolve a center specification to a point of this family's `CP^p`.
    ///
    /// `identity` is the (stacked) identity matrix, or `X_0^d - X_1^d` for
    /// binary forms. `near-singular` puts the center at distance about
    /// [`NEAR_SINGULAR_DELTA`] from the ill-posed set.
    pub fn center_point(&self, center: &Center) -> Result<ProjectivePoint> {
        let p = self.ambient_dim();
        let delta = NEAR_SINGULAR_DELTA;
        match (center, *self) {
            (Center::Random { seed }, _) => {
                Ok(sample_uniform_projective(p, &mut RandomStream::derive(*seed, CENTER_STREAM)))
            }
            (Center::File { path }, _) => self.load_center(path),
            (Center::Identity, ProblemFamily::BinaryForm { d }) => {
                let mut c = vec![Complex64::new(0.0, 0.0); d + 1];
                c[0] = Complex64::new(1.0, 0.0);
                c[d] = Complex64::new(-1.0, 0.0);
                ProjectivePoint::new(c)
            }
            (Center::NearSingular, ProblemFamily::BinaryForm { d }) => {
                // Roots 1, 1 + delta and the remaining d-th roots of unity.
                let roots: Vec<Complex64> = (0..d)
                    .map(|k| match k {
                        1 => Complex64::new(1.0 + delta, 0.0),
                        _ => Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64),
                    })
                    .collect();
                self.encode(&Instance::Form(PolySystem::binary_form(&poly_from_roots(&roots))?))
            }
            (Center::Identity, _) => {
                let (r, c) = self.matrix_shape().expect("matrix family");
                let a = ComplexMatrix::from_fn(r, c, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
                ProjectivePoint::new(a.into_vec())
            }
            (Center::NearSingular, ProblemFamily::Eigen { n }) => {
                // Eigenvalues 1..n-1 and n-1+delta.
                let values: Vec<Complex64> = (0..n)
                    .map(|i| Complex64::new(if i + 1 == n { (n - 1) as f64 + delta } else { (i + 1) as f64 }, 0.0))
                    .collect();
                ProjectivePoint::new(ComplexMatrix::diag(&values).into_vec())
            }
            (Center::NearSingular, _) => {
                let (r, c) = self.matrix_shape().expect("matrix family");
                let a = ComplexMatrix::from_fn(r, c, |i, j| match (i == j, i + 1 == c) {
                    (true, true) => Complex64::new(delta, 0.0),
                    (true, false) => Complex64::new(1.0, 0.0),
                    _ => Complex64::new(0.0, 0.0),
                });
                ProjectivePoint::new(a.into_vec())
            }
        }
    }

    fn load_center(&self, path: &std::path::Path) -> Result<ProjectivePoint> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read center file {}: {e}", path.display())))?;
        let malformed = |e: serde_json::Error| Error::Malformed(format!("{}: {e}", path.display()));
        let instance = match self {
            ProblemFamily::BinaryForm { .. } => Instance::Form(serde_json::from_str(&text).map_err(malformed)?),
            _ => Instance::Matrix(serde_json::from_str(&text).map_err(malformed)?),
        };
        self.encode(&instance)
    }
}

fn weyl_weight(d: usize, k: usize) -> f64 {
    (binomial(d as u64, k as u64).expect("small binomial") as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::projective_distance;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn family_parameters() {
        let sq = ProblemFamily::Square { n: 2 };
        assert_eq!((sq.ambient_dim(), sq.ill_posed_dim(), sq.ill_posed_degree()), (3, 2, 2.0));
        let mp = ProblemFamily::MoorePenrose { l: 4, n: 2 };
        assert_eq!((mp.ambient_dim(), mp.ill_posed_dim(), mp.ill_posed_degree()), (7, 4, 4.0));
        let ei = ProblemFamily::Eigen { n: 3 };
        assert_eq!((ei.ambient_dim(), ei.ill_posed_dim(), ei.ill_posed_degree()), (8, 7, 6.0));
        let bf = ProblemFamily::BinaryForm { d: 3 };
        assert_eq!((bf.ambient_dim(), bf.ill_posed_dim(), bf.ill_posed_degree()), (3, 2, 6.0));
        assert!(ProblemFamily::Square { n: 1 }.validate().is_err());
        assert!(ProblemFamily::MoorePenrose { l: 1, n: 2 }.validate().is_err());
    }

    #[test]
    fn family_json() {
        let f = ProblemFamily::MoorePenrose { l: 4, n: 2 };
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"kind":"moore_penrose","l":4,"n":2}"#);
        assert_eq!(serde_json::from_str::<ProblemFamily>(&s).unwrap(), f);
    }

    #[test]
    fn identity_square_center() {
        let f = ProblemFamily::Square { n: 2 };
        let z = f.center_point(&Center::Identity).unwrap();
        match f.decode(&z).unwrap() {
            Instance::Matrix(a) => {
                let expected = ComplexMatrix::identity(2).scale(c(std::f64::consts::FRAC_1_SQRT_2));
                assert!(a.sub(&expected).frobenius_norm() < 1e-15);
            }
            _ => panic!(),
        }
        assert!((f.condition(&z).unwrap().value - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn binary_form_decoding_uses_weyl_basis() {
        let f = ProblemFamily::BinaryForm { d: 2 };
        let z = ProjectivePoint::basis(2, 1);
        match f.decode(&z).unwrap() {
            Instance::Form(g) => {
                assert!((g.coefficient(0, &[1, 1]) - c(2f64.sqrt())).norm() < 1e-15);
                assert!((g.weyl_norm() - 1.0).abs() < 1e-15);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn decode_encode_round_trip() {
        let mut s = RandomStream::new(3);
        for f in [
            ProblemFamily::Square { n: 3 },
            ProblemFamily::MoorePenrose { l: 4, n: 2 },
            ProblemFamily::Eigen { n: 2 },
            ProblemFamily::BinaryForm { d: 5 },
        ] {
            let z = sample_uniform_projective(f.ambient_dim(), &mut s);
            let back = f.encode(&f.decode(&z).unwrap()).unwrap();
            for (a, b) in z.coords().iter().zip(back.coords()) {
                assert!((a - b).norm() < 1e-14);
            }
            assert!(f.decode(&ProjectivePoint::basis(f.ambient_dim() + 1, 0)).is_err());
        }
    }

    #[test]
    fn near_singular_centers_are_close_to_ill_posed_set() {
        for f in [
            ProblemFamily::Square { n: 2 },
            ProblemFamily::Square { n: 3 },
            ProblemFamily::MoorePenrose { l: 4, n: 2 },
            ProblemFamily::BinaryForm { d: 3 },
        ] {
            let z = f.center_point(&Center::NearSingular).unwrap();
            let k = f.condition(&z).unwrap();
            assert!(k.is_finite() && k.value > 100.0, "{f:?}: {}", k.value);
        }
        // The eigenvalue center is normal, so kappa_eigen stays 1 while the
        // spectrum is nearly multiple.
        let f = ProblemFamily::Eigen { n: 3 };
        let z = f.center_point(&Center::NearSingular).unwrap();
        let Instance::Matrix(a) = f.decode(&z).unwrap() else { panic!() };
        let gap = crate::linalg::min_gap(&crate::linalg::eigenvalues(&a).unwrap());
        assert!(gap < 2.0 * NEAR_SINGULAR_DELTA * 0.3 && gap > 0.0);
        assert!((f.condition(&z).unwrap().value - 1.0).abs() < 1e-10);
        let id = ProblemFamily::BinaryForm { d: 3 }.center_point(&Center::Identity).unwrap();
        assert!(ProblemFamily::BinaryForm { d: 3 }.condition(&id).unwrap().is_finite());
    }

    #[test]
    fn random_centers_are_reproducible() {
        let f = ProblemFamily::Eigen { n: 3 };
        let a = f.center_point(&Center::Random { seed: 5 }).unwrap();
        let b = f.center_point(&Center::Random { seed: 5 }).unwrap();
        let c = f.center_point(&Center::Random { seed: 6 }).unwrap();
        assert_eq!(a, b);
        assert!(projective_distance(&a, &c).unwrap() > 1e-3);
    }

    #[test]
    fn center_parsing() {
        assert_eq!("identity".parse::<Center>().unwrap(), Center::Identity);
        assert_eq!("near-singular".parse::<Center>().unwrap(), Center::NearSingular);
        assert_eq!("random:9".parse::<Center>().unwrap(), Center::Random { seed: 9 });
        assert_eq!("file:a.json".parse::<Center>().unwrap(), Center::File { path: "a.json".into() });
        assert!("random:x".parse::<Center>().is_err());
        assert!("other".parse::<Center>().is_err());
    }

    #[test]
    fn file_centers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.json");
        std::fs::write(&path, r#"{"rows":2,"cols":2,"entries":[[2,0],[0,0],[0,0],[2,0]]}"#).unwrap();
        let f = ProblemFamily::Square { n: 2 };
        let z = f.center_point(&Center::File { path: path.clone() }).unwrap();
        assert!(z.same_point(&f.center_point(&Center::Identity).unwrap()));
        assert!(ProblemFamily::Square { n: 3 }.center_point(&Center::File { path }).is_err());
        let form = dir.path().join("f.json");
        std::fs::write(&form, r#"{"n":1,"degrees":[2],"equations":[[{"alpha":[1,1],"re":1,"im":0}]]}"#).unwrap();
        let g = ProblemFamily::BinaryForm { d: 2 };
        let z = g.center_point(&Center::File { path: form }).unwrap();
        assert!(z.same_point(&ProjectivePoint::basis(2, 1)));
    }

    #[test]
    fn eigen_bounds_account_for_conic_factor() {
        let f = ProblemFamily::Eigen { n: 2 };
        let b = f.tail_bound(0.5, 100.0).unwrap();
        let direct = tail_bound_theorem1(&BoundInput::new(3, 2, 2.0, 0.5, 100.0 / 2f64.sqrt()).unwrap());
        assert_eq!(b, direct);
        assert!(ProblemFamily::MoorePenrose { l: 4, n: 2 }.relaxed_tail_bound(1.0, 10.0).unwrap().is_none());
        assert!(ProblemFamily::Square { n: 2 }.relaxed_tail_bound(1.0, 10.0).unwrap().is_some());
    }
}
