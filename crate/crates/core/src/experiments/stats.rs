//! Interval estimates for Monte Carlo summaries.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided standard normal quantile for the given confidence level.
pub fn normal_quantile(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParameter(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(std.inverse_cdf(0.5 + confidence / 2.0))
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidParameter(format!("need 0 <= successes <= trials, trials > 0; got {successes}/{trials}")));
    }
    let z = normal_quantile(confidence)?;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = phat + z2 / (2.0 * n);
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lower = if successes == 0 { 0.0 } else { ((center - half) / denom).max(0.0) };
    let upper = if successes == trials { 1.0 } else { ((center + half) / denom).min(1.0) };
    Ok((lower, upper))
}

/// Sample mean with its standard error, accumulated in input order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub count: u64,
}

pub fn mean_estimate(values: &[f64]) -> Option<MeanEstimate> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some(MeanEstimate { mean, std_error: (var / n).sqrt(), count: values.len() as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use statrs::distribution::{Binomial, Discrete};

    #[test]
    fn quantiles() {
        assert!((normal_quantile(0.99).unwrap() - 2.5758293).abs() < 1e-6);
        assert!((normal_quantile(0.95).unwrap() - 1.9599640).abs() < 1e-6);
        assert!(normal_quantile(1.0).is_err());
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, 0.99).unwrap();
        let z2 = normal_quantile(0.99).unwrap().powi(2);
        assert_eq!(lo, 0.0);
        assert!((hi - z2 / (100.0 + z2)).abs() < 1e-15);
        assert!((hi - 0.0622).abs() < 1e-4);
        let (lo2, hi2) = wilson_interval(100, 100, 0.99).unwrap();
        assert!((lo2 - (1.0 - hi)).abs() < 1e-15);
        assert_eq!(hi2, 1.0);
        let (a, b) = wilson_interval(30, 100, 0.95).unwrap();
        let (c, d) = wilson_interval(70, 100, 0.95).unwrap();
        assert!((a - (1.0 - d)).abs() < 1e-15 && (b - (1.0 - c)).abs() < 1e-15);
        assert!(wilson_interval(5, 4, 0.9).is_err());
        assert!(wilson_interval(0, 0, 0.9).is_err());
    }

    #[test]
    fn wilson_coverage() {
        let (n, p, conf) = (200u64, 0.2, 0.99);
        // Exact coverage from the binomial law.
        let law = Binomial::new(p, n).unwrap();
        let exact: f64 = (0..=n)
            .filter(|&k| {
                let (lo, hi) = wilson_interval(k, n, conf).unwrap();
                lo <= p && p <= hi
            })
            .map(|k| law.pmf(k))
            .sum();
        assert!(exact >= conf - 2e-3, "exact coverage {exact}");
        // Simulation over 10^4 replications.
        let reps = 10_000;
        let mut s = RandomStream::new(17);
        let mut covered = 0;
        for _ in 0..reps {
            let k = (0..n).filter(|_| s.uniform_open01() < p).count() as u64;
            let (lo, hi) = wilson_interval(k, n, conf).unwrap();
            covered += (lo <= p && p <= hi) as u32;
        }
        let frac = covered as f64 / reps as f64;
        let se = (exact * (1.0 - exact) / reps as f64).sqrt();
        assert!(frac >= exact - 4.0 * se, "simulated coverage {frac}, exact {exact}");
    }

    #[test]
    fn means() {
        let m = mean_estimate(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        assert!((m.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(mean_estimate(&[]).is_none());
        assert_eq!(mean_estimate(&[7.0]).unwrap().std_error, 0.0);
    }
}
