//! Task dispatch and artifact writing.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use darkstate::dynamics::{
    gap_scan_family, numeric_evolve_with, scan_csv, EvolveOptions, RateRule, ScanFamily, ScanOptions,
};
use darkstate::liouvillian::{build_superoperator, spectrum, SpectrumMode, Storage, DENSE_LIMIT};
use darkstate::operator::textio::{fmt_f64, format_matrix};
use darkstate::operator::{DensityMatrix, StateVector};
use darkstate::random;
use darkstate::verification::{
    check_theorem1, dark_space, invariant_subspace_probe_dim, kernel_dimension_certificate, krylov_reachability,
    CertificateMethod, UniquenessCertificate, Verdict,
};
use darkstate::Error;

use crate::build::{build, Built};
use crate::config::{ConfigError, Constructor, Initial, ModeKind, Rates, TaskKind, Validated};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_INVALID_INPUT: u8 = 4;
pub const EXIT_SOLVER: u8 = 5;
pub const EXIT_NO_GAP: u8 = 6;
pub const EXIT_POSITIVITY: u8 = 7;
pub const EXIT_IO: u8 = 8;

pub const EXIT_CODES_HELP: &str = "\
Exit status:
  0  success
  2  bad command line
  3  configuration syntax or schema error
  4  invalid physical input (dimensions, non-unitary or non-hermitian data, basis too large)
  5  solver failure (no convergence, linear algebra error)
  6  no spectral gap
  7  positivity violated during time evolution
  8  cannot write output files";

/// Command-line overrides of the configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Model(Error),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => write!(f, "{e}"),
            Self::Model(e) => write!(f, "{e}"),
            Self::Io(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Model(e)
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Io(..) => EXIT_IO,
            Self::Model(e) => match e {
                Error::NoConvergence { .. } | Error::Linalg(_) => EXIT_SOLVER,
                Error::NoGap => EXIT_NO_GAP,
                Error::PositivityViolation { .. } => EXIT_POSITIVITY,
                Error::Io(_) => EXIT_IO,
                _ => EXIT_INVALID_INPUT,
            },
        }
    }
}

/// What a run wrote and a few summary lines for the terminal.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

struct Sink {
    dir: PathBuf,
    stem: String,
    outcome: Outcome,
}

impl Sink {
    fn write(&mut self, suffix: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(format!("{}_{suffix}", self.stem));
        fs::write(&path, contents).map_err(|e| RunError::Io(path.clone(), e))?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn note(&mut self, line: String) {
        self.outcome.summary.push(line);
    }
}

pub fn apply_overrides(mut v: Validated, ov: &Overrides) -> Result<Validated, ConfigError> {
    if let Some(t) = ov.tol {
        v.config.task.tol = t;
    }
    if let Some(s) = ov.seed {
        v.config.task.seed = s;
    }
    if let Some(d) = &ov.out {
        v.config.output.dir = d.clone();
    }
    if !(v.config.task.tol > 0.0) {
        return Err(ConfigError::Schema {
            path: "task.tol".into(),
            msg: "must be positive".into(),
        });
    }
    Ok(v)
}

/// Runs the configured task. Relative output directories resolve against `base`.
pub fn run(v: &Validated, storage: Storage, base: &Path) -> Result<Outcome, RunError> {
    let dir = base.join(&v.config.output.dir);
    fs::create_dir_all(&dir).map_err(|e| RunError::Io(dir.clone(), e))?;
    let mut sink = Sink {
        dir,
        stem: v.config.output.stem.clone(),
        outcome: Outcome::default(),
    };
    match v.config.task.kind {
        TaskKind::Spectrum => run_spectrum(v, storage, &mut sink)?,
        TaskKind::Verify => run_verify(v, storage, &mut sink)?,
        TaskKind::Evolve => run_evolve(v, storage, &mut sink)?,
        TaskKind::GapScan => run_scan(v, storage, &mut sink)?,
    }
    Ok(sink.outcome)
}

fn run_spectrum(v: &Validated, storage: Storage, sink: &mut Sink) -> Result<(), RunError> {
    let Built { process, .. } = build(v)?;
    let superop = build_superoperator(&process, storage)?;
    let mode = match v.config.task.mode {
        Some(ModeKind::Full) => SpectrumMode::Full,
        Some(ModeKind::GapOnly) => SpectrumMode::GapOnly,
        None if superop.is_sparse() => SpectrumMode::GapOnly,
        None => SpectrumMode::Full,
    };
    let report = spectrum(&superop, mode)?;
    sink.write("spectrum.csv", &report.to_csv())?;
    for (i, k) in report.kernel_basis.iter().enumerate() {
        sink.write(&format!("kernel_{i}.txt"), &format_matrix(k))?;
    }
    let verdict = match report.kernel_dim {
        1 => Verdict::Unique,
        0 => Verdict::Inconclusive,
        _ => Verdict::NotUnique,
    };
    let cert = UniquenessCertificate {
        method: CertificateMethod::KernelDimension,
        verdict,
        total_dim: process.dim(),
        dimension: report.kernel_dim,
        degree: None,
        witness: Vec::new(),
        residual: None,
        notes: report.warnings.clone(),
    };
    let mut text = cert.report();
    let _ = writeln!(text, "kernel_dim: {}", report.kernel_dim);
    match report.gap {
        Some(g) => {
            let _ = writeln!(text, "gap: {}", fmt_f64(g));
            let _ = writeln!(text, "relaxation_time: {}", fmt_f64(1.0 / g));
        }
        None => {
            let _ = writeln!(text, "gap: none");
        }
    }
    sink.write("certificate.txt", &text)?;
    sink.note(format!("kernel_dim: {}", report.kernel_dim));
    if let Some(g) = report.gap {
        sink.note(format!("gap: {}", fmt_f64(g)));
    }
    Ok(())
}

fn run_verify(v: &Validated, storage: Storage, sink: &mut Sink) -> Result<(), RunError> {
    let Built { process, target } = build(v)?;
    let tol = v.config.task.tol;
    let mut text = String::new();

    if let Some(phi) = &target {
        let t = check_theorem1(&process, phi, tol)?;
        let _ = writeln!(text, "[stationarity]");
        let _ = writeln!(text, "stationary: {}", t.stationary);
        let _ = writeln!(text, "consistent: {}", t.consistent());
        let _ = writeln!(text, "lambda: {},{}", fmt_f64(t.lambda.re), fmt_f64(t.lambda.im));
        let _ = writeln!(text, "eigen_residual: {}", fmt_f64(t.eigen_residual));
        let worst = t.jump_residuals.iter().cloned().fold(0.0, f64::max);
        let _ = writeln!(text, "max_jump_residual: {}", fmt_f64(worst));
        let _ = writeln!(text, "balance_residual: {}", fmt_f64(t.balance_residual));
        let _ = writeln!(text, "generator_residual: {}", fmt_f64(t.generator_residual));
        let _ = writeln!(text);
        sink.note(format!("stationary: {}", t.stationary));
    }

    let mut certs = Vec::new();
    let mut kernel_dim = None;
    if process.dim() <= DENSE_LIMIT || storage == Storage::Sparse {
        let c = kernel_dimension_certificate(&process, storage)?;
        kernel_dim = Some(c.dimension);
        certs.push(c);
    }
    if let Some(phi) = &target {
        certs.push(krylov_reachability(&process.jump_operators(), phi, None));
    }
    let dark = dark_space(&process, tol)?;
    certs.push(invariant_subspace_probe_dim(
        process.dim(),
        &process.jump_operators(),
        &dark.states(),
        8,
        v.config.task.seed,
    )?);

    for c in &certs {
        let _ = writeln!(text, "[{}]", c.method.as_str());
        text.push_str(&c.report());
        let _ = writeln!(text);
    }
    let overall = combine(&certs);
    let _ = writeln!(text, "[summary]");
    if let Some(k) = kernel_dim {
        let _ = writeln!(text, "kernel_dim: {k}");
        sink.note(format!("kernel_dim: {k}"));
    }
    let _ = writeln!(text, "dark_dim: {}", dark.dim());
    let _ = writeln!(text, "verdict: {}", overall.as_str());
    sink.write("verify.txt", &text)?;
    sink.note(format!("dark_dim: {}", dark.dim()));
    sink.note(format!("verdict: {}", overall.as_str()));
    Ok(())
}

/// The kernel dimension decides when conclusive, then a spanning Krylov
/// closure, then a probe witness.
fn combine(certs: &[UniquenessCertificate]) -> Verdict {
    let by = |m: CertificateMethod| certs.iter().find(|c| c.method == m).map(|c| c.verdict);
    match by(CertificateMethod::KernelDimension) {
        Some(v) if v != Verdict::Inconclusive => return v,
        _ => {}
    }
    if by(CertificateMethod::KrylovReachability) == Some(Verdict::Unique) {
        return Verdict::Unique;
    }
    if by(CertificateMethod::InvariantProbe) == Some(Verdict::NotUnique) {
        return Verdict::NotUnique;
    }
    Verdict::Inconclusive
}

fn run_evolve(v: &Validated, storage: Storage, sink: &mut Sink) -> Result<(), RunError> {
    let Built { process, target } = build(v)?;
    let task = &v.config.task;
    let target = target.ok_or_else(|| {
        Error::InvalidArgument(format!(
            "`{}` has no unique target state to track",
            v.config.process.constructor.name()
        ))
    })?;
    let space = process.space().clone();
    let initial = task
        .initial
        .as_deref()
        .map(Initial::parse)
        .unwrap_or(Some(Initial::MaximallyMixed));
    let rho0 = match initial.expect("validated initial state") {
        Initial::MaximallyMixed => DensityMatrix::maximally_mixed(&space),
        Initial::Target => target.projector(),
        Initial::Random => random::random_density_matrix(&space, &mut random::rng(task.seed))?,
        Initial::Basis(k) => StateVector::basis(&space, k)?.projector(),
    };
    let mut opts = EvolveOptions::default();
    match storage {
        Storage::Dense => opts.dense_limit = usize::MAX,
        Storage::Sparse => opts.dense_limit = 0,
        Storage::Auto => {}
    }
    let t_max = task.t_max.expect("validated t_max");
    let n_steps = task.n_steps.expect("validated n_steps");
    let traj = numeric_evolve_with(&process, &rho0, &target, t_max, n_steps, &opts)?;
    sink.write("trajectory.csv", &traj.to_csv())?;
    if let Some(f) = traj.fidelity.last() {
        sink.note(format!("final_fidelity: {}", fmt_f64(*f)));
    }
    Ok(())
}

fn run_scan(v: &Validated, storage: Storage, sink: &mut Sink) -> Result<(), RunError> {
    let rule = match &v.config.process.rates {
        Rates::Uniform(g) => RateRule::Uniform(*g),
        Rates::List(list) => RateRule::List(list.clone()),
    };
    let family = match v.config.process.constructor {
        Constructor::SigmaMinus => ScanFamily::SigmaMinus(rule),
        Constructor::Graph => ScanFamily::LinearCluster(rule),
        Constructor::QuditLadder => ScanFamily::QuditLadder {
            d: v.config.system.local_dim.unwrap_or(2),
            rates: rule,
        },
        other => {
            return Err(Error::InvalidArgument(format!("gap-scan does not support `{}`", other.name())).into());
        }
    };
    let mut opts = ScanOptions::default();
    match storage {
        Storage::Dense => opts.dense_max = DENSE_LIMIT,
        Storage::Sparse => opts.dense_max = 0,
        Storage::Auto => {}
    }
    let sizes = v.config.task.sizes.clone().unwrap_or_default();
    let rows = gap_scan_family(&family, &sizes, &opts);
    sink.write("scan.csv", &scan_csv(&rows))?;
    let mut first_err = None;
    for r in rows {
        match r.result {
            Ok((g, _)) => sink.note(format!("n={}: gap {}", r.n, fmt_f64(g))),
            Err(e) => {
                sink.note(format!("n={}: {e}", r.n));
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
