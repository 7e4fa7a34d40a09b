//! Command-line front end: condition numbers, bound evaluation and experiments.
//!
//! Exit codes: 0 success, 1 a bound-compliance check failed, 2 input or usage error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use smoothcond::bounds;
use smoothcond::condition::{self, PolySystem};
use smoothcond::experiments::{
    self, patch_volume_via_lines, Center, ExperimentConfig, ProblemFamily, DEFAULT_CONFIDENCE,
    DEFAULT_STDERR_MULTIPLIER,
};
use smoothcond::{ComplexMatrix, Error, ProjectivePoint};

#[derive(Parser)]
#[command(name = "smoothcond", version, about = "Condition numbers and their smoothed analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Condition number of one input read from JSON.
    Condnum {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        input: PathBuf,
        /// Zero of the system (projective point JSON); required when n > 1.
        #[arg(long)]
        zero: Option<PathBuf>,
    },
    /// Evaluate one of the closed-form bounds.
    Bound(BoundArgs),
    /// Run a Monte Carlo experiment.
    Experiment {
        #[command(subcommand)]
        which: ExperimentKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Square,
    Mp,
    Eigen,
    Polysys,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Theorem1,
    Hypersurface,
    PropSquare,
    PropMp,
    MpRemark,
    PropEigen,
    Polysys,
    ShubSmale,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    /// Degree of the ill-posed set.
    #[arg(long)]
    deg: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    l: Option<u64>,
    /// Hypersurface degree, or comma-separated equation degrees for systems.
    #[arg(long, value_delimiter = ',')]
    d: Vec<u64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// Empirical tail probabilities against the tail bounds.
    Tail(RunArgs),
    /// Empirical mean of the log condition number against the expectation bound.
    Expectation(RunArgs),
    /// Volume of a patch of {det = 0} in P^3 via random lines.
    PatchVolume {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 200_000)]
        trials: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
        confidence: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Square,
    Mp,
    Eigen,
    BinaryForm,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    sigma: f64,
    #[arg(long, value_delimiter = ',')]
    t_grid: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// identity, near-singular, random:SEED or file:PATH
    #[arg(long, default_value = "identity")]
    center: String,
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
    confidence: f64,
    #[arg(long, default_value_t = DEFAULT_STDERR_MULTIPLIER)]
    stderr_multiplier: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

type CliResult = Result<bool, Error>;

fn need<T>(name: &str, v: Option<T>) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required here")))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => experiments::write_json(path, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn condnum(kind: Kind, input: &PathBuf, zero: Option<&PathBuf>) -> CliResult {
    let value = match kind {
        Kind::Polysys => {
            let f: PolySystem = read_json(input)?;
            match zero {
                Some(z) => condition::mu_norm_at_zero(&f, &read_json::<ProjectivePoint>(z)?)?,
                None => condition::mu_norm_system(&f)?,
            }
        }
        _ => {
            let a: ComplexMatrix = read_json(input)?;
            match kind {
                Kind::Square => condition::kappa_f(&a)?,
                Kind::Mp => condition::kappa_dagger_f(&a)?,
                _ => condition::kappa_eigen(&a)?,
            }
        }
    };
    println!("{}", serde_json::to_string(&value).expect("serializable"));
    Ok(true)
}

fn bound(a: &BoundArgs) -> CliResult {
    let scalar_d = || -> Result<f64, Error> {
        match a.d.as_slice() {
            [d] => Ok(*d as f64),
            _ => Err(Error::InvalidParameter("--d takes a single degree here".into())),
        }
    };
    let expectation = |v: f64| json!({ "expectation": v });
    let out = match a.which {
        Which::Theorem1 => {
            let (p, m, deg) = (need("p", a.p)?, need("m", a.m)?, need("deg", a.deg)?);
            match a.t {
                Some(t) => json!(bounds::tail_bound_theorem1(&bounds::BoundInput::new(p, m, deg, a.sigma, t)?)),
                None => expectation(bounds::expectation_bound_theorem1(p, m, deg, a.sigma)?),
            }
        }
        Which::Hypersurface => {
            let (p, d) = (need("p", a.p)?, scalar_d()?);
            match a.t {
                Some(t) => json!(bounds::tail_bound_hypersurface(p, d, a.sigma, t)?),
                None => expectation(bounds::expectation_bound_hypersurface(p, d, a.sigma)?),
            }
        }
        Which::PropSquare => expectation(bounds::bound_prop_square(need("n", a.n)?, a.sigma)?),
        Which::PropMp => expectation(bounds::bound_prop_moore_penrose(need("n", a.n)?, a.sigma)?),
        Which::MpRemark => expectation(bounds::bound_mp_remark(need("l", a.l)?, need("n", a.n)?, a.sigma)?),
        Which::PropEigen => expectation(bounds::bound_prop_eigen(need("n", a.n)?, a.sigma)?),
        Which::Polysys => {
            let n = need("n", a.n)?;
            let t = a.t.unwrap_or(f64::INFINITY);
            let (tail, e) = bounds::bound_polysys(n, &a.d, a.sigma, if t.is_finite() { t } else { 1.0 })?;
            if t.is_finite() {
                json!({ "value": tail.value, "log_value": tail.log_value, "valid": tail.valid, "expectation": e })
            } else {
                expectation(e)
            }
        }
        Which::ShubSmale => {
            let eps = match (a.eps, a.t) {
                (Some(e), _) => e,
                (None, Some(t)) => 1.0 / t,
                (None, None) => return Err(Error::InvalidParameter("--eps or --t is required".into())),
            };
            let v = bounds::shub_smale_tail(need("n", a.n)?, &a.d, eps)?;
            json!({ "value": v, "log_value": v.ln() })
        }
    };
    println!("{out}");
    Ok(true)
}

fn family(a: &RunArgs) -> Result<ProblemFamily, Error> {
    Ok(match a.family {
        FamilyKind::Square => ProblemFamily::Square { n: need("n", a.n)? },
        FamilyKind::Mp => ProblemFamily::MoorePenrose { l: need("l", a.l)?, n: need("n", a.n)? },
        FamilyKind::Eigen => ProblemFamily::Eigen { n: need("n", a.n)? },
        FamilyKind::BinaryForm => ProblemFamily::BinaryForm { d: need("d", a.d)? },
    })
}

fn run(a: &RunArgs, tail: bool) -> CliResult {
    let mut cfg = ExperimentConfig::new(family(a)?, a.center.parse::<Center>()?, a.sigma, a.trials, a.seed)
        .with_t_grid(a.t_grid.clone());
    cfg.confidence = a.confidence;
    cfg.stderr_multiplier = a.stderr_multiplier;
    let start = Instant::now();
    let report = if tail {
        experiments::run_tail_experiment(&cfg)?
    } else {
        experiments::run_expectation_experiment(&cfg)?
    };
    eprintln!("runtime: {:.3} s", start.elapsed().as_secs_f64());
    emit(a.out.as_ref(), &report.to_json())?;
    if let Some(path) = &a.csv {
        report.write_tail_csv(path)?;
    }
    Ok(report.pass)
}

fn patch(eps: f64, trials: u64, seed: u64, confidence: f64, out: Option<&PathBuf>) -> CliResult {
    let y = ProjectivePoint::basis(3, 0);
    let start = Instant::now();
    let report = patch_volume_via_lines(&y, eps, trials, seed, confidence, None)?;
    eprintln!("runtime: {:.3} s", start.elapsed().as_secs_f64());
    emit(out, &report.to_json())?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Condnum { kind, input, zero } => condnum(*kind, input, zero.as_ref()),
        Command::Bound(args) => bound(args),
        Command::Experiment { which } => match which {
            ExperimentKind::Tail(args) => run(args, true),
            ExperimentKind::Expectation(args) => run(args, false),
            ExperimentKind::PatchVolume { eps, trials, seed, confidence, out } => {
                patch(*eps, *trials, *seed, *confidence, out.as_ref())
            }
        },
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("bound check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
