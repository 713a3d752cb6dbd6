use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use elliptic_core::limitlaw::SolverOptions;
use elliptic_core::{Complex64, DiagDist, EnsembleSpec, PairDist};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SEED_ENV: &str = "ELLIPTIC_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Sample,
    Spectrum,
    Ellipse,
    Limit,
    Lsv,
    Potential,
    Audit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EllipseParams {
    /// Scale of the ellipse used for the coverage count.
    pub inflation: f64,
    /// Histogram bins per axis.
    pub bins: usize,
}

impl Default for EllipseParams {
    fn default() -> Self {
        EllipseParams { inflation: 1.05, bins: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitParams {
    pub solver: SolverOptions,
    pub x_step: f64,
}

impl Default for LimitParams {
    fn default() -> Self {
        LimitParams {
            solver: SolverOptions::default(),
            x_step: elliptic_core::limitlaw::DEFAULT_X_STEP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LsvParams {
    /// Norm threshold constant: a trial is norm-ok when `||A|| <= 3 K sqrt(n)`.
    pub k: f64,
    /// Points at which the tail probability is reported.
    pub epsilons: Vec<f64>,
}

impl Default for LsvParams {
    fn default() -> Self {
        LsvParams {
            k: 2.0,
            epsilons: vec![1e-6, 1e-3, 1e-2, 0.1, 0.5, 1.0],
        }
    }
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Command,
    pub ensemble: EnsembleSpec,
    pub z: Complex64,
    pub trials: usize,
    pub output: PathBuf,
    pub ellipse: EllipseParams,
    pub limit: LimitParams,
    pub lsv: LsvParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Ellipse,
            ensemble: EnsembleSpec::new(200, 0.5, PairDist::Gaussian, 0).expect("valid default"),
            z: Complex64::new(0.0, 0.0),
            trials: 10,
            output: PathBuf::from("out"),
            ellipse: EllipseParams::default(),
            limit: LimitParams::default(),
            lsv: LsvParams::default(),
        }
    }
}

fn bad(key: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key,
        reason: reason.into(),
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.z.re.is_finite() && self.z.im.is_finite()) {
            return Err(bad("z", "must be finite"));
        }
        if self.trials == 0 {
            return Err(bad("trials", "must be at least 1"));
        }
        if !(self.ellipse.inflation >= 1.0) {
            return Err(bad("ellipse.inflation", "must be at least 1"));
        }
        if self.ellipse.bins == 0 {
            return Err(bad("ellipse.bins", "must be at least 1"));
        }
        self.limit.solver.validate()?;
        if !(self.limit.x_step > 0.0) {
            return Err(bad("limit.x_step", "must be positive"));
        }
        if !(self.lsv.k > 1.0) {
            return Err(bad("lsv.k", "must exceed 1"));
        }
        if self.lsv.epsilons.iter().any(|e| !(*e >= 0.0)) {
            return Err(bad("lsv.epsilons", "must be nonnegative"));
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the config, with the output
    /// path blanked so that the same experiment hashes alike wherever it is
    /// written.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| bad("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `RE,IM`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("real part: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("imaginary part: {e}"))?;
    Ok(Complex64::new(re, im))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistArg {
    Gaussian,
    Rademacher,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DiagArg {
    Gaussian,
    Zero,
    Marginal,
}

#[derive(Debug, Parser)]
#[command(name = "elliptic", version, about = "Elliptic law experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Draw matrices and write their entries.
    Sample(CommonArgs),
    /// Eigenvalues and singular values of X / sqrt(n) - z.
    Spectrum(CommonArgs),
    /// Eigenvalue coverage, quadrant masses and histogram against the ellipse.
    Ellipse(EllipseArgs),
    /// Solve the limiting system at z and invert it to a density.
    Limit(LimitArgs),
    /// Least singular value Monte Carlo.
    Lsv(LsvArgs),
    /// Empirical, limiting and reference log-potentials at z.
    Potential(CommonArgs),
    /// Moment audit of the sampler.
    Audit(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Matrix size [default: 200]
    #[arg(long)]
    n: Option<usize>,
    /// Pair correlation, |rho| < 1 [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    /// Off-diagonal pair law [default: gaussian]
    #[arg(long, value_enum)]
    dist: Option<DistArg>,
    /// Diagonal law [default: gaussian]
    #[arg(long, value_enum)]
    diag: Option<DiagArg>,
    /// Base seed [default: 0]; ELLIPTIC_SEED overrides it
    #[arg(long)]
    seed: Option<u64>,
    /// Shift as RE,IM [default: 0,0]
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Option<Complex64>,
    /// Number of independent draws [default: 10]
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory [default: out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads [default: available parallelism]
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct EllipseArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Coverage inflation factor [default: 1.05]
    #[arg(long)]
    inflation: Option<f64>,
    /// Histogram bins per axis [default: 8]
    #[arg(long)]
    bins: Option<usize>,
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Newton tolerance [default: 1e-12]
    #[arg(long)]
    tol: Option<f64>,
    /// Bottom of the v ladder [default: 1e-4]
    #[arg(long)]
    v_min: Option<f64>,
    /// Density grid spacing [default: 0.002]
    #[arg(long)]
    x_step: Option<f64>,
}

#[derive(Debug, Args)]
struct LsvArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Norm constant K > 1 [default: 2]
    #[arg(long)]
    k: Option<f64>,
}

/// A parsed command line: the config plus settings that do not affect output.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub config: RunConfig,
    pub threads: Option<usize>,
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad("config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| bad("config", e.to_string()))
}

fn apply_common(cfg: &mut RunConfig, a: &CommonArgs, env_seed: Option<&str>) -> Result<(), CliError> {
    let spec = &cfg.ensemble;
    let n = a.n.unwrap_or(spec.n());
    let rho = a.rho.unwrap_or(spec.rho());
    let dist = match a.dist {
        Some(DistArg::Gaussian) => PairDist::Gaussian,
        Some(DistArg::Rademacher) => PairDist::Rademacher,
        None => spec.pair_dist(),
    };
    let diag = match a.diag {
        Some(DiagArg::Gaussian) => DiagDist::StandardGaussian,
        Some(DiagArg::Zero) => DiagDist::Zero,
        Some(DiagArg::Marginal) => DiagDist::SameAsOffdiagMarginal,
        None => spec.diag_dist(),
    };
    let mut seed = a.seed.unwrap_or(spec.seed());
    if let Some(s) = env_seed {
        seed = s
            .trim()
            .parse()
            .map_err(|_| bad("seed", format!("{SEED_ENV}=`{s}` is not an unsigned integer")))?;
    }
    cfg.ensemble = EnsembleSpec::new(n, rho, dist, seed)?.with_diag(diag);
    if let Some(z) = a.z {
        cfg.z = z;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(o) = &a.out {
        cfg.output = o.clone();
    }
    Ok(())
}

/// Parses a command line. `env_seed` is the value of `ELLIPTIC_SEED`, if set.
pub fn parse_args<I, T>(args: I, env_seed: Option<&str>) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Usage)?;
    let (command, common) = match &cli.command {
        Sub::Sample(c) => (Command::Sample, c),
        Sub::Spectrum(c) => (Command::Spectrum, c),
        Sub::Ellipse(e) => (Command::Ellipse, &e.common),
        Sub::Limit(l) => (Command::Limit, &l.common),
        Sub::Lsv(l) => (Command::Lsv, &l.common),
        Sub::Potential(c) => (Command::Potential, c),
        Sub::Audit(c) => (Command::Audit, c),
    };
    let mut cfg = match &common.config {
        Some(path) => load(path)?,
        None => RunConfig::default(),
    };
    cfg.command = command;
    apply_common(&mut cfg, common, env_seed)?;
    match &cli.command {
        Sub::Ellipse(e) => {
            if let Some(v) = e.inflation {
                cfg.ellipse.inflation = v;
            }
            if let Some(v) = e.bins {
                cfg.ellipse.bins = v;
            }
        }
        Sub::Limit(l) => {
            if let Some(v) = l.tol {
                cfg.limit.solver.tol = v;
            }
            if let Some(v) = l.v_min {
                cfg.limit.solver.v_min = v;
            }
            if let Some(v) = l.x_step {
                cfg.limit.x_step = v;
            }
        }
        Sub::Lsv(l) => {
            if let Some(v) = l.k {
                cfg.lsv.k = v;
            }
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(Invocation {
        config: cfg,
        threads: common.threads,
    })
}
