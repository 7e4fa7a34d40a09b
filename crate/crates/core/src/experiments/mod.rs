//! Seeded Monte Carlo experiments comparing empirical tails and means of
//! condition numbers with the closed-form bounds.
//!
//! Trial `i` draws from `RandomStream::derive(seed, i)`. Trials run on a rayon
//! pool, results are collected in trial order and reduced sequentially, so
//! reports are bit-identical for every worker count.

mod family;
mod patch;
mod stats;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::ConditionValue;
use crate::error::{Error, Result};
use crate::projective::{sample_uniform_ball, BallSpec};
use crate::rng::{RandomStream, DERIVATION_TAG};

pub use family::{Center, Instance, ProblemFamily, NEAR_SINGULAR_DELTA};
pub use patch::{patch_volume_via_lines, PatchVolumeReport};
pub use stats::{mean_estimate, normal_quantile, wilson_interval, MeanEstimate};

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "CONDNUM_THREADS";

pub const MIN_TRIALS: u64 = 100;
pub const DEFAULT_CONFIDENCE: f64 = 0.99;
pub const DEFAULT_STDERR_MULTIPLIER: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: ProblemFamily,
    pub center: Center,
    pub sigma: f64,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default = "default_multiplier")]
    pub stderr_multiplier: f64,
    /// Worker count; never part of the report.
    #[serde(skip)]
    pub threads: Option<usize>,
}

fn default_confidence() -> f64 {
    DEFAULT_CONFIDENCE
}

fn default_multiplier() -> f64 {
    DEFAULT_STDERR_MULTIPLIER
}

impl ExperimentConfig {
    pub fn new(family: ProblemFamily, center: Center, sigma: f64, trials: u64, seed: u64) -> Self {
        Self {
            family,
            center,
            sigma,
            t_grid: Vec::new(),
            trials,
            seed,
            confidence: DEFAULT_CONFIDENCE,
            stderr_multiplier: DEFAULT_STDERR_MULTIPLIER,
            threads: None,
        }
    }

    pub fn with_t_grid(mut self, t_grid: Vec<f64>) -> Self {
        self.t_grid = t_grid;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn validate(&self, needs_grid: bool) -> Result<()> {
        self.family.validate()?;
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return Err(Error::InvalidParameter(format!("sigma must lie in (0, 1], got {}", self.sigma)));
        }
        if self.trials < MIN_TRIALS {
            return Err(Error::InvalidParameter(format!("need at least {MIN_TRIALS} trials, got {}", self.trials)));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidParameter(format!("confidence must lie in (0, 1), got {}", self.confidence)));
        }
        if !(self.stderr_multiplier >= 0.0 && self.stderr_multiplier.is_finite()) {
            return Err(Error::InvalidParameter("stderr multiplier must be nonnegative".into()));
        }
        if needs_grid && self.t_grid.is_empty() {
            return Err(Error::InvalidParameter("tail experiments need a nonempty t grid".into()));
        }
        if self.t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter("t grid entries must be positive".into()));
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("t grid must be strictly ascending".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyParams {
    pub ambient_dim: usize,
    pub ill_posed_dim: usize,
    pub ill_posed_degree: f64,
    pub conic_factor: f64,
}

impl From<&ProblemFamily> for FamilyParams {
    fn from(f: &ProblemFamily) -> Self {
        Self {
            ambient_dim: f.ambient_dim(),
            ill_posed_dim: f.ill_posed_dim(),
            ill_posed_degree: f.ill_posed_degree(),
            conic_factor: f.conic_factor(),
        }
    }
}

/// One threshold of a tail experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub t: f64,
    pub exceed_count: u64,
    pub empirical_prob: f64,
    pub wilson_lower: f64,
    pub wilson_upper: f64,
    pub bound_value: f64,
    pub bound_log_value: f64,
    pub bound_valid: bool,
    pub relaxed_bound_value: Option<f64>,
    pub relaxed_bound_valid: Option<bool>,
    /// `None` where no judgement is made (threshold invalid or bound >= 1).
    pub pass: Option<bool>,
    /// Whether a zero count would certify the bound at this trial count, i.e.
    /// the Wilson upper limit for zero successes is at most the bound.
    pub resolvable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectationSummary {
    pub mean_log_cond: Option<f64>,
    pub std_error: Option<f64>,
    pub finite_count: u64,
    pub infinite_count: u64,
    pub bound_value: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub family_params: FamilyParams,
    pub seed_derivation: String,
    pub center_condition: ConditionValue,
    pub infinite_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<Vec<TailRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation: Option<ExpectationSummary>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Tail curve as CSV, one row per threshold.
    pub fn write_tail_csv(&self, path: &Path) -> Result<()> {
        let rows = self
            .tail
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("report has no tail curve".into()))?;
        let io = |e: std::io::Error| Error::InvalidParameter(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for row in rows {
            w.serialize(row).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        }
        w.flush().map_err(io)
    }
}

/// Worker count from the config, else from `CONDNUM_THREADS`.
fn worker_count(explicit: Option<usize>) -> Result<Option<usize>> {
    if explicit.is_some() {
        return Ok(explicit);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Run `trial(i)` for `i in 0..trials` in parallel; results in trial order.
pub(crate) fn run_trials<T, F>(trials: u64, threads: Option<usize>, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count(threads)? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| (0..trials).into_par_iter().map(&trial).collect())
}

fn sample_conditions(cfg: &ExperimentConfig) -> Result<(ConditionValue, Vec<ConditionValue>)> {
    let center = cfg.family.center_point(&cfg.center)?;
    let center_condition = cfg.family.condition(&center)?;
    let ball = BallSpec::new(center, cfg.sigma)?;
    let values = run_trials(cfg.trials, cfg.threads, |i| {
        let mut rng = RandomStream::derive(cfg.seed, i);
        let z = sample_uniform_ball(&ball, &mut rng);
        cfg.family.condition(&z)
    })?;
    Ok((center_condition, values))
}

fn report(
    experiment: &str,
    cfg: &ExperimentConfig,
    center_condition: ConditionValue,
    values: &[ConditionValue],
) -> ExperimentReport {
    ExperimentReport {
        experiment: experiment.into(),
        config: cfg.clone(),
        family_params: FamilyParams::from(&cfg.family),
        seed_derivation: DERIVATION_TAG.into(),
        center_condition,
        infinite_count: values.iter().filter(|v| v.ill_posed).count() as u64,
        tail: None,
        expectation: None,
        pass: true,
    }
}

/// Empirical `Prob{C >= t}` on the grid, with Wilson intervals, against the
/// family's tail bounds.
pub fn run_tail_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(true)?;
    let (center_condition, values) = sample_conditions(cfg)?;
    let mut rep = report("tail", cfg, center_condition, &values);
    let floor = wilson_interval(0, cfg.trials, cfg.confidence)?.1;
    let mut rows = Vec::with_capacity(cfg.t_grid.len());
    for &t in &cfg.t_grid {
        let count = values.iter().filter(|v| v.value >= t).count() as u64;
        let (lo, hi) = wilson_interval(count, cfg.trials, cfg.confidence)?;
        let bound = cfg.family.tail_bound(cfg.sigma, t)?;
        let relaxed = cfg.family.relaxed_tail_bound(cfg.sigma, t)?;
        let judged = bound.valid && bound.value < 1.0;
        rows.push(TailRow {
            t,
            exceed_count: count,
            empirical_prob: count as f64 / cfg.trials as f64,
            wilson_lower: lo,
            wilson_upper: hi,
            bound_value: bound.value,
            bound_log_value: bound.log_value,
            bound_valid: bound.valid,
            relaxed_bound_value: relaxed.map(|b| b.value),
            relaxed_bound_valid: relaxed.map(|b| b.valid),
            pass: judged.then_some(hi <= bound.value),
            resolvable: floor <= bound.value,
        });
    }
    rep.pass = rows.iter().all(|r| r.pass != Some(false));
    rep.tail = Some(rows);
    Ok(rep)
}

/// Mean of `ln C` over the finite samples against the family's expectation bound.
pub fn run_expectation_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(false)?;
    let (center_condition, values) = sample_conditions(cfg)?;
    let mut rep = report("expectation", cfg, center_condition, &values);
    let logs: Vec<f64> = values.iter().filter(|v| !v.ill_posed).map(|v| v.log_value).collect();
    let est = mean_estimate(&logs);
    let bound_value = cfg.family.expectation_bound(cfg.sigma)?;
    let pass = rep.infinite_count == 0
        && est.is_some_and(|e| e.mean + cfg.stderr_multiplier * e.std_error <= bound_value);
    rep.expectation = Some(ExpectationSummary {
        mean_log_cond: est.map(|e| e.mean),
        std_error: est.map(|e| e.std_error),
        finite_count: logs.len() as u64,
        infinite_count: rep.infinite_count,
        bound_value,
        pass,
    });
    rep.pass = pass;
    Ok(rep)
}

/// Write `json` followed by a newline.
pub fn write_json(path: &Path, json: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot create {}: {e}", path.display())))?;
    writeln!(f, "{json}").map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_cfg(trials: u64) -> ExperimentConfig {
        ExperimentConfig::new(ProblemFamily::Square { n: 2 }, Center::Identity, 0.5, trials, 42)
            .with_t_grid(vec![5.0, 10.0, 100.0])
    }

    #[test]
    fn validation() {
        assert!(square_cfg(99).validate(true).is_err());
        assert!(square_cfg(100).validate(true).is_ok());
        assert!(square_cfg(100).with_t_grid(vec![]).validate(true).is_err());
        assert!(square_cfg(100).with_t_grid(vec![]).validate(false).is_ok());
        assert!(square_cfg(100).with_t_grid(vec![10.0, 5.0]).validate(true).is_err());
        let mut c = square_cfg(100);
        c.sigma = 0.0;
        assert!(c.validate(true).is_err());
    }

    #[test]
    fn tail_rows_are_monotone_and_consistent() {
        let rep = run_tail_experiment(&square_cfg(2000)).unwrap();
        let rows = rep.tail.as_ref().unwrap();
        assert!(rows.windows(2).all(|w| w[0].exceed_count >= w[1].exceed_count));
        for r in rows {
            assert!(r.wilson_lower <= r.empirical_prob && r.empirical_prob <= r.wilson_upper);
            assert!(r.exceed_count <= 2000);
            if !r.bound_valid || r.bound_value >= 1.0 {
                assert_eq!(r.pass, None);
            }
        }
        // The validity threshold is 3 sqrt 2.
        assert!(rows[0].bound_valid);
        assert!(rep.pass);
    }

    // A zero count at t = 10^6 is consistent with the bound, but the Wilson
    // upper limit at 10^5 trials cannot certify a bound this small.
    #[test]
    fn unresolvable_bound_is_reported() {
        let cfg = ExperimentConfig::new(ProblemFamily::Square { n: 2 }, Center::Identity, 1.0, 100_000, 42)
            .with_t_grid(vec![1e6]);
        let rep = run_tail_experiment(&cfg).unwrap();
        let row = &rep.tail.as_ref().unwrap()[0];
        assert_eq!(row.exceed_count, 0);
        assert!(row.empirical_prob <= row.bound_value);
        let direct = 2.0 * 27.0 * 3f64.exp() * 2.0 * 1e-12 * (1.0 + 3e-6f64).powi(4);
        assert!((row.relaxed_bound_value.unwrap() - direct).abs() <= 1e-12 * direct);
        assert!(!row.resolvable);
        assert_eq!(row.pass, Some(false));
        assert!(!rep.pass);
    }

    #[test]
    fn invalid_threshold_is_not_judged() {
        let rep = run_tail_experiment(&square_cfg(200).with_t_grid(vec![2.0])).unwrap();
        let row = &rep.tail.unwrap()[0];
        assert!(!row.bound_valid);
        assert_eq!(row.pass, None);
    }

    #[test]
    fn reports_do_not_depend_on_threads() {
        let a = run_tail_experiment(&square_cfg(500).with_threads(1)).unwrap();
        let b = run_tail_experiment(&square_cfg(500).with_threads(4)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = run_expectation_experiment(&square_cfg(500).with_threads(3)).unwrap();
        let d = run_expectation_experiment(&square_cfg(500).with_threads(2)).unwrap();
        assert_eq!(c.to_json(), d.to_json());
        assert!(!a.to_json().contains("threads"));
    }

    #[test]
    fn expectation_summary() {
        let rep = run_expectation_experiment(&square_cfg(1000)).unwrap();
        let e = rep.expectation.unwrap();
        assert_eq!(e.finite_count + e.infinite_count, 1000);
        let mean = e.mean_log_cond.unwrap();
        // kappa_F >= sqrt 2 for 2 x 2 matrices.
        assert!(mean >= 0.5 * 2f64.ln());
        assert!(e.pass);
    }

    #[test]
    fn csv_output() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        let rep = run_tail_experiment(&square_cfg(200)).unwrap();
        rep.write_tail_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("t,exceed_count,empirical_prob"));
        assert_eq!(lines.count(), 3);
        let exp = run_expectation_experiment(&square_cfg(200)).unwrap();
        assert!(exp.write_tail_csv(&path).is_err());
    }
}
