//! Closed-form tail and expectation bounds for conic condition numbers,
//! evaluated in log space.
//!
//! Tail bounds are probabilities `Prob{C(z) >= t}` for `z` uniform in a ball of
//! radius `sigma`; expectation bounds are upper bounds on `E ln C(z)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Inputs for the general tail bound: ill-posed set of dimension `m` and
/// degree `deg_sigma` inside `P^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundInput {
    pub p: u64,
    pub m: u64,
    pub deg_sigma: f64,
    pub sigma: f64,
    pub t: f64,
}

impl BoundInput {
    pub fn new(p: u64, m: u64, deg_sigma: f64, sigma: f64, t: f64) -> Result<Self> {
        check_dims(p, m)?;
        check_degree(deg_sigma)?;
        check_sigma(sigma)?;
        check_positive("t", t)?;
        Ok(Self { p, m, deg_sigma, sigma, t })
    }
}

/// A probability bound: raw log value, its exponential clamped to `[0, 1]`,
/// and whether the threshold condition of the bound holds at this `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub log_value: f64,
    pub valid: bool,
}

impl BoundValue {
    fn probability(log_value: f64, valid: bool) -> Self {
        Self { value: log_value.min(0.0).exp(), log_value, valid }
    }
}

fn check_dims(p: u64, m: u64) -> Result<()> {
    if m == 0 || m >= p {
        return Err(Error::InvalidParameter(format!("need 0 < m < p, got p={p}, m={m}")));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::InvalidParameter(format!("sigma must lie in (0, 1], got {sigma}")));
    }
    Ok(())
}

fn check_degree(deg: f64) -> Result<()> {
    if !(deg >= 1.0 && deg.is_finite()) {
        return Err(Error::InvalidParameter(format!("degree must be at least 1, got {deg}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

fn check_count(name: &str, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(format!("{name} must be at least 1")));
    }
    Ok(())
}

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `ln K(p, m) = ln 2 + 3p ln p - 3m ln m - 3(p-m) ln(p-m)`.
pub fn log_k(p: u64, m: u64) -> Result<f64> {
    check_dims(p, m)?;
    let (p, m) = (p as f64, m as f64);
    Ok(std::f64::consts::LN_2 + 3.0 * (xlnx(p) - xlnx(m) - xlnx(p - m)))
}

/// `K(p,m) deg (1/(t sigma))^{2(p-m)} (1 + p/((p-m) t sigma))^{2m}`, valid for
/// `t >= p sqrt 2 / (p-m)`.
pub fn tail_bound_theorem1(input: &BoundInput) -> BoundValue {
    let BoundInput { p, m, deg_sigma, sigma, t } = *input;
    let codim = (p - m) as f64;
    let ts = t * sigma;
    let log_value = log_k(p, m).expect("validated input") + deg_sigma.ln() - 2.0 * codim * ts.ln()
        + 2.0 * m as f64 * (p as f64 / (codim * ts)).ln_1p();
    let valid = t >= p as f64 * std::f64::consts::SQRT_2 / codim;
    BoundValue::probability(log_value, valid)
}

/// `(ln K + ln deg + 3) / (2(p-m)) + ln(pm/(p-m)) + 2 ln(1/sigma)`.
pub fn expectation_bound_theorem1(p: u64, m: u64, deg_sigma: f64, sigma: f64) -> Result<f64> {
    check_degree(deg_sigma)?;
    check_sigma(sigma)?;
    let lk = log_k(p, m)?;
    let codim = (p - m) as f64;
    Ok((lk + deg_sigma.ln() + 3.0) / (2.0 * codim) + (p as f64 * m as f64 / codim).ln() - 2.0 * sigma.ln())
}

/// Tail bound for an ill-posed set contained in a hypersurface of degree `d`:
/// `2 p^3 e^3 d (1/(t sigma))^2 (1 + p/(t sigma))^{2(p-1)}`, valid for `t >= p sqrt 2`.
pub fn tail_bound_hypersurface(p: u64, d: f64, sigma: f64, t: f64) -> Result<BoundValue> {
    check_count("p", p)?;
    check_degree(d)?;
    check_sigma(sigma)?;
    check_positive("t", t)?;
    let pf = p as f64;
    let ts = t * sigma;
    let log_value = std::f64::consts::LN_2 + 3.0 * pf.ln() + 3.0 + d.ln() - 2.0 * ts.ln()
        + 2.0 * (pf - 1.0) * (pf / ts).ln_1p();
    Ok(BoundValue::probability(log_value, t >= pf * std::f64::consts::SQRT_2))
}

/// `(7/2) ln p + (1/2) ln d + 4 + 2 ln(1/sigma)`.
pub fn expectation_bound_hypersurface(p: u64, d: f64, sigma: f64) -> Result<f64> {
    check_count("p", p)?;
    check_degree(d)?;
    check_sigma(sigma)?;
    Ok(3.5 * (p as f64).ln() + 0.5 * d.ln() + 4.0 - 2.0 * sigma.ln())
}

/// Bound on `E ln X` when `Prob{X >= t} <= k t^{-alpha}` for all `t >= t0`.
pub fn expectation_from_tail(alpha: f64, t0: f64, k: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("t0", t0)?;
    check_positive("k", k)?;
    let tail = (k.ln() + 1.0) / alpha;
    if t0.ln() <= k.ln() / alpha {
        Ok(tail)
    } else {
        Ok(t0.ln() + tail)
    }
}

/// Expected log of `kappa_F` for square `n x n` matrices:
/// `(15/2) ln n + 2 ln(1/sigma) + 4`.
pub fn bound_prop_square(n: u64, sigma: f64) -> Result<f64> {
    check_count("n", n)?;
    check_sigma(sigma)?;
    Ok(7.5 * (n as f64).ln() - 2.0 * sigma.ln() + 4.0)
}

/// Limit, as the row count grows, of the expected log of `kappa_F^dagger` for
/// `l x n` matrices: `(n + 3/2) ln n + n ln 2 + 2 + (n+1) ln(1/sigma)`.
pub fn bound_prop_moore_penrose(n: u64, sigma: f64) -> Result<f64> {
    check_count("n", n)?;
    check_sigma(sigma)?;
    let nf = n as f64;
    Ok((nf + 1.5) * nf.ln() + nf * std::f64::consts::LN_2 + 2.0 - (nf + 1.0) * sigma.ln())
}

/// Finite-`l` bound for `l x n` matrices: `(7/2) ln l + 4 ln n + 4 + 2 ln(1/sigma)`.
pub fn bound_mp_remark(l: u64, n: u64, sigma: f64) -> Result<f64> {
    check_count("n", n)?;
    if l < n {
        return Err(Error::InvalidParameter(format!("need l >= n, got l={l}, n={n}")));
    }
    check_sigma(sigma)?;
    Ok(3.5 * (l as f64).ln() + 4.0 * (n as f64).ln() + 4.0 - 2.0 * sigma.ln())
}

/// Expected log of `kappa_eigen` for `n x n` matrices: `8 ln n + 2 ln(1/sigma) + 5`.
pub fn bound_prop_eigen(n: u64, sigma: f64) -> Result<f64> {
    check_count("n", n)?;
    check_sigma(sigma)?;
    Ok(8.0 * (n as f64).ln() - 2.0 * sigma.ln() + 5.0)
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut out: u128 = 1;
    for i in 0..k {
        // out * (n - i) is divisible by (i + 1).
        out = out.checked_mul(n - i)? / (i + 1);
    }
    Some(out)
}

/// Projective dimension `N = sum_i binom(n + d_i, d_i) - 1` of the space of
/// systems and the Bezout number `D = prod d_i`.
pub fn system_dimensions(n: u64, degrees: &[u64]) -> Result<(u128, u128)> {
    check_count("n", n)?;
    if degrees.len() as u64 != n {
        return Err(Error::DimensionMismatch { expected: n as usize, got: degrees.len() });
    }
    if degrees.contains(&0) {
        return Err(Error::InvalidParameter("degrees must be positive".into()));
    }
    let overflow = || Error::InvalidParameter("system dimension overflows 128 bits".into());
    let mut total: u128 = 0;
    let mut bezout: u128 = 1;
    for &d in degrees {
        total = total.checked_add(binomial(n + d, d).ok_or_else(overflow)?).ok_or_else(overflow)?;
        bezout = bezout.checked_mul(d as u128).ok_or_else(overflow)?;
    }
    Ok((total - 1, bezout))
}

/// Tail and expectation bounds for `mu_norm` of a system with the given degrees:
/// tail `4 N^3 e^3 n D^2 (1/(t sigma))^2 (1 + N/(t sigma))^{2(N-1)}`, valid for
/// `t >= N sqrt 2`; expectation `(7/2) ln N + ln D + (1/2) ln n + 5 + 2 ln(1/sigma)`.
pub fn bound_polysys(n: u64, degrees: &[u64], sigma: f64, t: f64) -> Result<(BoundValue, f64)> {
    check_sigma(sigma)?;
    check_positive("t", t)?;
    let (big_n, bezout) = system_dimensions(n, degrees)?;
    let (nn, d, nf) = (big_n as f64, bezout as f64, n as f64);
    let ts = t * sigma;
    let log_tail = 4f64.ln() + 3.0 * nn.ln() + 3.0 + nf.ln() + 2.0 * d.ln() - 2.0 * ts.ln()
        + 2.0 * (nn - 1.0) * (nn / ts).ln_1p();
    let tail = BoundValue::probability(log_tail, t >= nn * std::f64::consts::SQRT_2);
    let expectation = 3.5 * nn.ln() + d.ln() + 0.5 * nf.ln() + 5.0 - 2.0 * sigma.ln();
    Ok((tail, expectation))
}

/// Older tail estimate `eps^4 n^3 (n+1) N (N-1) D` for `Prob{mu_norm >= 1/eps}`.
/// Not clamped.
pub fn shub_smale_tail(n: u64, degrees: &[u64], eps: f64) -> Result<f64> {
    if n <= 1 {
        return Err(Error::InvalidParameter(format!("this estimate needs n > 1, got {n}")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {eps}")));
    }
    let (big_n, bezout) = system_dimensions(n, degrees)?;
    let nf = n as f64;
    let nn = big_n as f64;
    Ok(eps.powi(4) * nf.powi(3) * (nf + 1.0) * nn * (nn - 1.0) * bezout as f64)
}

/// `H(z) = -z ln z - (1-z) ln(1-z)` on `[0, 1]`.
pub fn binomial_entropy(z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidParameter(format!("entropy argument must lie in [0, 1], got {z}")));
    }
    Ok(-xlnx(z) - xlnx(1.0 - z))
}
