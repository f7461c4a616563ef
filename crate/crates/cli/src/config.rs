//! Run configuration, read from TOML.

use std::fmt;
use std::path::{Path, PathBuf};

use darkstate::constructors::GraphSpec;
use serde::{Deserialize, Serialize};

use crate::build;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub process: ProcessConfig,
    pub task: TaskConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Qubits,
    Qudits,
    Spin1Chain,
    BoseLattice,
    FermiLattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    #[default]
    Periodic,
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub kind: SystemKind,
    /// Qubits, qudits, spins or lattice sites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_dim: Option<usize>,
    /// Bosons, or η pairs on a fermion lattice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particles: Option<usize>,
    #[serde(default)]
    pub boundary: BoundaryKind,
    /// Graph file, resolved against the config file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constructor {
    SigmaMinus,
    ConjugatedSigmaMinus,
    Graph,
    SigmaZ,
    QuditLadder,
    AkltLadder,
    AkltTwirl,
    Bec,
    Eta,
}

impl Constructor {
    pub fn name(self) -> &'static str {
        match self {
            Self::SigmaMinus => "sigma-minus",
            Self::ConjugatedSigmaMinus => "conjugated-sigma-minus",
            Self::Graph => "graph",
            Self::SigmaZ => "sigma-z",
            Self::QuditLadder => "qudit-ladder",
            Self::AkltLadder => "aklt-ladder",
            Self::AkltTwirl => "aklt-twirl",
            Self::Bec => "bec",
            Self::Eta => "eta",
        }
    }

    pub fn system(self) -> SystemKind {
        match self {
            Self::SigmaMinus | Self::ConjugatedSigmaMinus | Self::Graph | Self::SigmaZ => SystemKind::Qubits,
            Self::QuditLadder => SystemKind::Qudits,
            Self::AkltLadder | Self::AkltTwirl => SystemKind::Spin1Chain,
            Self::Bec => SystemKind::BoseLattice,
            Self::Eta => SystemKind::FermiLattice,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rates {
    Uniform(f64),
    List(Vec<f64>),
}

impl Default for Rates {
    fn default() -> Self {
        Rates::Uniform(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    pub constructor: Constructor,
    #[serde(default)]
    pub rates: Rates,
    /// Gate layers of the random unitary for `conjugated-sigma-minus`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Number of twirl unitaries for `aklt-twirl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_twirl: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hopping: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Spectrum,
    Evolve,
    Verify,
    GapScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    Full,
    GapOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub kind: TaskKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    /// `maximally-mixed`, `target`, `random` or `basis:<index>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_stem")]
    pub stem: String,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_stem() -> String {
    "run".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            stem: default_stem(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    MaximallyMixed,
    Target,
    Random,
    Basis(usize),
}

impl Initial {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "maximally-mixed" => Some(Self::MaximallyMixed),
            "target" => Some(Self::Target),
            "random" => Some(Self::Random),
            _ => s.strip_prefix("basis:").and_then(|k| k.parse().ok()).map(Self::Basis),
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, source: std::io::Error },
    Syntax(String),
    Schema { path: String, msg: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            Self::Syntax(msg) => write!(f, "syntax error: {msg}"),
            Self::Schema { path, msg } => write!(f, "schema violation at `{path}`: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn schema(path: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        path: path.into(),
        msg: msg.into(),
    }
}

/// A parsed and validated configuration together with the graph it names.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub config: RunConfig,
    pub graph: Option<GraphSpec>,
}

/// Parses `text`, resolving relative file references against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<Validated, ConfigError> {
    text.parse::<toml::Table>()
        .map_err(|e| ConfigError::Syntax(e.to_string().trim_end().to_string()))?;
    let config: RunConfig = serde_path_to_error::deserialize(toml::Deserializer::new(text))
        .map_err(|e| schema(&e.path().to_string(), e.into_inner().message().to_string()))?;
    validate(config, base)
}

pub fn load_config(path: &Path) -> Result<Validated, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn to_toml(config: &RunConfig) -> String {
    toml::to_string(config).expect("configuration serializes")
}

fn require(v: Option<usize>, path: &str) -> Result<usize, ConfigError> {
    v.ok_or_else(|| schema(path, "required for this system kind"))
}

pub fn validate(config: RunConfig, base: &Path) -> Result<Validated, ConfigError> {
    let sys = &config.system;
    let proc_ = &config.process;
    let task = &config.task;
    if proc_.constructor.system() != sys.kind {
        return Err(schema(
            "process.constructor",
            format!("`{}` is not available for this system kind", proc_.constructor.name()),
        ));
    }

    let graph = match &sys.graph {
        Some(p) if proc_.constructor == Constructor::Graph => {
            let full = base.join(p);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| schema("system.graph", format!("cannot read {}: {e}", full.display())))?;
            let g: GraphSpec = text.parse().map_err(|e| schema("system.graph", format!("{e}")))?;
            if let Some(n) = sys.sites {
                if n != g.n_vertices() {
                    return Err(schema(
                        "system.sites",
                        format!("graph has {} vertices, sites is {n}", g.n_vertices()),
                    ));
                }
            }
            Some(g)
        }
        Some(_) => return Err(schema("system.graph", "only used by the `graph` constructor")),
        None => None,
    };

    let scanning = task.kind == TaskKind::GapScan;
    if !scanning && graph.is_none() {
        let n = require(sys.sites, "system.sites")?;
        if n == 0 {
            return Err(schema("system.sites", "must be positive"));
        }
    }
    match sys.kind {
        SystemKind::Qudits => {
            if require(sys.local_dim, "system.local_dim")? < 2 {
                return Err(schema("system.local_dim", "must be at least 2"));
            }
        }
        SystemKind::BoseLattice | SystemKind::FermiLattice => {
            require(sys.particles, "system.particles")?;
        }
        _ => {
            if sys.local_dim.is_some() {
                return Err(schema("system.local_dim", "only used by qudits"));
            }
        }
    }
    if sys.particles.is_some() && !matches!(sys.kind, SystemKind::BoseLattice | SystemKind::FermiLattice) {
        return Err(schema("system.particles", "only used by lattice systems"));
    }

    match &proc_.rates {
        Rates::Uniform(g) if !(*g >= 0.0) => return Err(schema("process.rates", "rates must be non-negative")),
        Rates::List(v) if v.iter().any(|g| !(*g >= 0.0)) => {
            return Err(schema("process.rates", "rates must be non-negative"))
        }
        _ => {}
    }
    let allowed = |ok: bool, path: &str| {
        if ok {
            Ok(())
        } else {
            Err(schema(path, "not used by this constructor"))
        }
    };
    allowed(
        proc_.depth.is_none() || proc_.constructor == Constructor::ConjugatedSigmaMinus,
        "process.depth",
    )?;
    allowed(
        proc_.n_twirl.is_none() || proc_.constructor == Constructor::AkltTwirl,
        "process.n_twirl",
    )?;
    let lattice = matches!(proc_.constructor, Constructor::Bec | Constructor::Eta);
    allowed(proc_.hopping.is_none() || lattice, "process.hopping")?;
    allowed(proc_.interaction.is_none() || lattice, "process.interaction")?;
    if let Some(t) = proc_.n_twirl {
        if !(1..=81).contains(&t) {
            return Err(schema("process.n_twirl", "must lie in 1..=81"));
        }
    }

    if !(task.tol > 0.0) {
        return Err(schema("task.tol", "must be positive"));
    }
    match task.kind {
        TaskKind::Evolve => {
            match task.t_max {
                Some(t) if t > 0.0 => {}
                _ => return Err(schema("task.t_max", "evolve needs t_max > 0")),
            }
            if task.n_steps.unwrap_or(0) == 0 {
                return Err(schema("task.n_steps", "evolve needs n_steps >= 1"));
            }
            if let Some(s) = &task.initial {
                if Initial::parse(s).is_none() {
                    return Err(schema(
                        "task.initial",
                        "expected maximally-mixed, target, random or basis:<index>",
                    ));
                }
            }
        }
        TaskKind::GapScan => {
            let sizes = task.sizes.as_deref().unwrap_or_default();
            if sizes.is_empty() {
                return Err(schema("task.sizes", "gap-scan needs a non-empty size list"));
            }
            if !matches!(
                proc_.constructor,
                Constructor::SigmaMinus | Constructor::Graph | Constructor::QuditLadder
            ) {
                return Err(schema(
                    "process.constructor",
                    "gap-scan supports sigma-minus, graph and qudit-ladder",
                ));
            }
            if graph.is_some() {
                return Err(schema("system.graph", "gap-scan uses path graphs of each size"));
            }
            if let Rates::List(v) = &proc_.rates {
                let need = sizes.iter().copied().max().unwrap_or(0);
                if v.len() < need {
                    return Err(schema(
                        "process.rates",
                        format!(
                            "expected at least {need} entries for the largest size, found {}",
                            v.len()
                        ),
                    ));
                }
            }
        }
        _ => {}
    }

    let stem = &config.output.stem;
    if stem.is_empty() || stem.contains(['/', '\\']) || stem.starts_with('.') {
        return Err(schema("output.stem", "must be a plain file name"));
    }

    let validated = Validated { config, graph };
    if !scanning {
        if let Rates::List(v) = &validated.config.process.rates {
            let count = build::jump_count(&validated).map_err(|e| schema("system", e.to_string()))?;
            if v.len() != count {
                return Err(schema(
                    "process.rates",
                    format!("expected {count} entries (one per jump), found {}", v.len()),
                ));
            }
        }
    }
    Ok(validated)
}
