//! Scenario configuration: a TOML file describing the system size, the
//! adversary, the weight rule, the initial vectors, and the requested
//! verifier checks. All process indices are 0-based.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use avgsim::adversary::{AdversaryKind, AdversarySpec};
use avgsim::dynamics::StateVector;
use avgsim::graph::CommGraph;
use avgsim::{StateVector64, WeightRule64};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    pub d: usize,
    pub rounds: usize,
    /// Raw rounds composed per averaging round; 1 disables relaying.
    #[serde(default = "default_relay")]
    pub relay_rounds: usize,
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub adversary: AdversaryConfig,
    pub weights: WeightConfig,
    pub initial: InitialConfig,
    #[serde(default)]
    pub verifiers: Vec<VerifierConfig>,
}

fn default_relay() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AdversaryConfig {
    Static { graph: GraphConfig, k: Option<usize> },
    Explicit { graphs: Vec<GraphConfig>, k: Option<usize> },
    RandomKRooted { k: usize },
    RandomKBroadcastable { k: usize },
}

/// Graph literal: process count plus directed edges; self-loops implied.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightConfig {
    EqualNeighbor,
    RandomAlphaSafe { alpha: f64 },
    Custom { table: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Vectors given inline, one row per process.
    Inline { points: Vec<Vec<f64>> },
    /// CSV file with n rows of d comma-separated coordinates.
    File { path: PathBuf },
}

/// One requested check; unknown ids are rejected at load time.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifierConfig {
    pub id: String,
    #[serde(default)]
    pub tol: Option<f64>,
    /// Volume target for the convergence-bound check.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Half-spaces per round for the attraction-zone check.
    #[serde(default)]
    pub trials: Option<usize>,
    /// Offset scale for the attraction-zone check.
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Trailing states pooled by the limit-subspace check.
    #[serde(default)]
    pub window: Option<usize>,
    /// Residual cap for the limit-subspace check.
    #[serde(default)]
    pub residual_max: Option<f64>,
    /// Target subspace dimension for the impossibility check.
    #[serde(default)]
    pub s: Option<usize>,
    /// Graph products tested by the rooted-product check.
    #[serde(default)]
    pub sequences: Option<usize>,
    /// Radius functions tested by the segment-bound check.
    #[serde(default)]
    pub functions: Option<usize>,
    /// Rounds simulated by the impossibility check.
    #[serde(default)]
    pub rounds: Option<usize>,
}

pub const KNOWN_CLAIMS: [&str; 10] = [
    "weights", "lemma2", "lemma6", "lemma7", "lemma9", "lemma13", "theorem1", "theorem2",
    "theorem3", "theorem4",
];

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let config: ScenarioConfig = toml::from_str(&text)
            .with_context(|| format!("malformed config {}", path.display()))?;
        config.validate(path)?;
        Ok(config)
    }

    fn validate(&self, origin: &Path) -> Result<()> {
        if self.n < 2 {
            bail!("n: must be at least 2, got {}", self.n);
        }
        if self.d == 0 {
            bail!("d: must be positive");
        }
        if self.rounds == 0 {
            bail!("rounds: must be positive");
        }
        if self.relay_rounds == 0 {
            bail!("relay_rounds: must be positive");
        }
        if let WeightConfig::RandomAlphaSafe { alpha } = &self.weights {
            if !(*alpha > 0.0 && *alpha <= 1.0) {
                bail!("weights.alpha: must lie in (0, 1], got {alpha}");
            }
        }
        if let WeightConfig::Custom { table } = &self.weights {
            if table.len() != self.n || table.iter().any(|row| row.len() != self.n) {
                bail!("weights.table: must be {n} x {n}", n = self.n);
            }
        }
        match &self.initial {
            InitialConfig::Inline { points } => {
                if points.len() != self.n {
                    bail!("initial.points: expected {} rows, got {}", self.n, points.len());
                }
                if points.iter().any(|p| p.len() != self.d) {
                    bail!("initial.points: every row must have {} coordinates", self.d);
                }
            }
            InitialConfig::File { path } => {
                let resolved = resolve_relative(origin, path);
                if !resolved.exists() {
                    bail!("initial.path: file not found at {}", resolved.display());
                }
            }
        }
        for v in &self.verifiers {
            if !KNOWN_CLAIMS.contains(&v.id.as_str()) {
                bail!(
                    "verifiers.id: unknown verifier id `{}` (known: {})",
                    v.id,
                    KNOWN_CLAIMS.join(", ")
                );
            }
        }
        Ok(())
    }

    /// Declared family bound, when the adversary has one.
    pub fn adversary_k(&self) -> Option<usize> {
        match &self.adversary {
            AdversaryConfig::Static { k, .. } | AdversaryConfig::Explicit { k, .. } => *k,
            AdversaryConfig::RandomKRooted { k } | AdversaryConfig::RandomKBroadcastable { k } => {
                Some(*k)
            }
        }
    }

    pub fn build_adversary(&self) -> Result<AdversarySpec> {
        let (kind, k) = match &self.adversary {
            AdversaryConfig::Static { graph, k } => {
                (AdversaryKind::Static { graph: build_graph(graph, self.n)? }, *k)
            }
            AdversaryConfig::Explicit { graphs, k } => {
                let graphs = graphs
                    .iter()
                    .map(|g| build_graph(g, self.n))
                    .collect::<Result<Vec<_>>>()?;
                (AdversaryKind::Explicit { graphs }, *k)
            }
            AdversaryConfig::RandomKRooted { k } => (AdversaryKind::RandomKRooted, Some(*k)),
            AdversaryConfig::RandomKBroadcastable { k } => {
                (AdversaryKind::RandomKBroadcastable, Some(*k))
            }
        };
        AdversarySpec::new(self.n, kind, k, self.seed).context("adversary: invalid specification")
    }

    pub fn build_rule(&self) -> WeightRule64 {
        match &self.weights {
            WeightConfig::EqualNeighbor => WeightRule64::EqualNeighbor,
            WeightConfig::RandomAlphaSafe { alpha } => {
                WeightRule64::RandomAlphaSafe { alpha: *alpha }
            }
            WeightConfig::Custom { table } => WeightRule64::Custom { table: table.clone() },
        }
    }

    pub fn build_initial(&self, origin: &Path) -> Result<StateVector64> {
        let points = match &self.initial {
            InitialConfig::Inline { points } => points.clone(),
            InitialConfig::File { path } => {
                let resolved = resolve_relative(origin, path);
                read_points_csv(&resolved, self.n, self.d)?
            }
        };
        StateVector::new(points).context("initial: invalid state vector")
    }
}

fn build_graph(config: &GraphConfig, n: usize) -> Result<CommGraph> {
    if config.n != n {
        bail!("adversary graph: n = {} does not match scenario n = {}", config.n, n);
    }
    CommGraph::new(config.n, config.edges.iter().map(|e| (e[0], e[1])))
        .context("adversary graph: invalid edge list")
}

/// Paths in a config are relative to the config file's directory.
fn resolve_relative(origin: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        origin.parent().unwrap_or_else(|| Path::new(".")).join(path)
    }
}

fn read_points_csv(path: &Path, n: usize, d: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read initial vectors from {}", path.display()))?;
    let mut points = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .with_context(|| format!("{}:{}: bad number `{cell}`", path.display(), line_no + 1))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != d {
            bail!("{}:{}: expected {d} coordinates, got {}", path.display(), line_no + 1, row.len());
        }
        points.push(row);
    }
    if points.len() != n {
        bail!("{}: expected {n} rows, got {}", path.display(), points.len());
    }
    Ok(points)
}
