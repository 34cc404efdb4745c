//! Oblivious round schedulers: graph families, seeded per-round draws,
//! designated broadcasting sets, relay (product) macro-rounds, and the
//! isolated-source counterexample construction.
//!
//! A scheduler is a pure function of `(spec, t)`: the graph of round `t` is
//! drawn from an RNG stream derived from the spec seed and `t`, so re-asking
//! for the same round always returns the same answer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::CommGraph;
use crate::{Error, Result};

/// Probability of each optional extra edge in the random constructions.
const EXTRA_EDGE_PROB: f64 = 0.2;

/// How a round graph is produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AdversaryKind {
    /// Uniform draw from a fixed list of graphs.
    Explicit { graphs: Vec<CommGraph> },
    /// The same graph every round.
    Static { graph: CommGraph },
    /// Fresh sample of [`sample_k_rooted`] every round.
    RandomKRooted,
    /// Fresh sample of [`sample_k_broadcastable`] every round.
    RandomKBroadcastable,
}

/// A graph family plus the seed that drives all of its random choices.
///
/// `k` declares the family property: required for the random kinds, optional
/// for explicit lists (where it is validated as `k`-rootedness, the property
/// that determines solvability). The declared `k` is also the cutoff for
/// designating a broadcasting set each round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarySpec {
    pub n: usize,
    pub kind: AdversaryKind,
    pub k: Option<usize>,
    pub seed: u64,
}

/// One scheduled round: the graph plus the designated broadcasting set
/// `M(t)`, empty when no broadcasting set within the declared cutoff exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduledRound {
    pub t: usize,
    pub graph: CommGraph,
    pub m_set: Vec<usize>,
}

impl AdversarySpec {
    pub fn new(n: usize, kind: AdversaryKind, k: Option<usize>, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::ProcessCount { n });
        }
        match &kind {
            AdversaryKind::RandomKRooted | AdversaryKind::RandomKBroadcastable => {
                let k = k.ok_or(Error::MissingK)?;
                if k == 0 || k > n {
                    return Err(Error::KOutOfRange { k, n });
                }
            }
            AdversaryKind::Static { graph } => {
                Self::validate_family(std::slice::from_ref(graph), n, k)?;
            }
            AdversaryKind::Explicit { graphs } => {
                if graphs.is_empty() {
                    return Err(Error::EmptyFamily);
                }
                Self::validate_family(graphs, n, k)?;
            }
        }
        Ok(Self { n, kind, k, seed })
    }

    fn validate_family(graphs: &[CommGraph], n: usize, k: Option<usize>) -> Result<()> {
        for (index, g) in graphs.iter().enumerate() {
            if g.n() != n {
                return Err(Error::MismatchedProcessCount { left: n, right: g.n() });
            }
            if let Some(k) = k {
                if !g.is_k_rooted(k) {
                    return Err(Error::FamilyPropertyViolation { index, k });
                }
            }
        }
        Ok(())
    }

    /// Largest broadcasting-set size the scheduler will designate.
    pub fn designation_cutoff(&self) -> usize {
        self.k.unwrap_or(self.n)
    }

    /// The raw (uncomposed) graph of round `t >= 1`.
    pub fn raw_graph(&self, t: usize) -> Result<CommGraph> {
        if t == 0 {
            return Err(Error::RoundIndex);
        }
        let mut rng = graph_rng(self.seed, t);
        match &self.kind {
            AdversaryKind::Static { graph } => Ok(graph.clone()),
            AdversaryKind::Explicit { graphs } => {
                let idx = rng.gen_range(0..graphs.len());
                Ok(graphs[idx].clone())
            }
            AdversaryKind::RandomKRooted => {
                sample_k_rooted(self.n, self.k.expect("validated"), &mut rng)
            }
            AdversaryKind::RandomKBroadcastable => {
                sample_k_broadcastable(self.n, self.k.expect("validated"), &mut rng)
            }
        }
    }

    /// Draws round `t` and designates its broadcasting set. Deterministic in
    /// `(seed, t)`.
    pub fn next_round(&self, t: usize) -> Result<ScheduledRound> {
        let graph = self.raw_graph(t)?;
        let m_set = designate_m_set(&graph, self.designation_cutoff())?;
        Ok(ScheduledRound { t, graph, m_set })
    }
}

/// Lexicographically least minimum broadcasting set if one of size at most
/// `cutoff` exists, otherwise empty.
pub fn designate_m_set(graph: &CommGraph, cutoff: usize) -> Result<Vec<usize>> {
    let report = graph.broadcast_report()?;
    if report.min_size <= cutoff {
        Ok(report.witness)
    } else {
        Ok(Vec::new())
    }
}

/// Macro-round scheduler: each emitted round is the relay product of
/// `relay_rounds` consecutive raw rounds, with the broadcasting set
/// designated on the composed graph. `relay_rounds = 1` emits raw rounds.
#[derive(Clone, Debug)]
pub struct RelaySchedule {
    spec: AdversarySpec,
    relay_rounds: usize,
}

impl RelaySchedule {
    pub fn new(spec: AdversarySpec, relay_rounds: usize) -> Result<Self> {
        if relay_rounds == 0 {
            return Err(Error::RelayRounds);
        }
        Ok(Self { spec, relay_rounds })
    }

    pub fn spec(&self) -> &AdversarySpec {
        &self.spec
    }

    pub fn relay_rounds(&self) -> usize {
        self.relay_rounds
    }

    /// Macro-round `t >= 1`, composed from raw rounds
    /// `(t-1)*relay_rounds + 1 ..= t*relay_rounds`.
    pub fn round(&self, t: usize) -> Result<ScheduledRound> {
        if t == 0 {
            return Err(Error::RoundIndex);
        }
        if self.relay_rounds == 1 {
            return self.spec.next_round(t);
        }
        let first = (t - 1) * self.relay_rounds + 1;
        let mut graph = self.spec.raw_graph(first)?;
        for raw_t in first + 1..first + self.relay_rounds {
            graph = graph.compose(&self.spec.raw_graph(raw_t)?)?;
        }
        let m_set = designate_m_set(&graph, self.spec.designation_cutoff())?;
        Ok(ScheduledRound { t, graph, m_set })
    }
}

/// Relay length sufficient to turn any sequence of `k`-rooted graphs into a
/// `k`-broadcastable product: `ceil((pi^2 + 6)/6 * n + 1)`.
pub fn default_relay_rounds(n: usize) -> usize {
    let bound = (std::f64::consts::PI.powi(2) + 6.0) / 6.0 * n as f64 + 1.0;
    bound.ceil() as usize
}

/// Samples a `k`-broadcastable graph: a uniform broadcasting set `M` of size
/// `k`, an in-edge from a uniform member of `M` for every process, and
/// independent extra edges.
pub fn sample_k_broadcastable(n: usize, k: usize, rng: &mut impl Rng) -> Result<CommGraph> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let m = sample_distinct(n, k, rng);
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((m[rng.gen_range(0..k)], i));
    }
    add_extra_edges(n, &mut edges, rng);
    CommGraph::new(n, edges)
}

/// Samples a `k`-rooted graph: a root set of size `k`, a random spanning
/// forest of out-arborescences from it, and independent extra edges (which
/// cannot break reachability from the roots).
pub fn sample_k_rooted(n: usize, k: usize, rng: &mut impl Rng) -> Result<CommGraph> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let roots = sample_distinct(n, k, rng);
    let mut attached = roots.clone();
    let mut pending: Vec<usize> = (0..n).filter(|v| !roots.contains(v)).collect();
    shuffle(&mut pending, rng);
    let mut edges = Vec::new();
    for v in pending {
        let parent = attached[rng.gen_range(0..attached.len())];
        edges.push((parent, v));
        attached.push(v);
    }
    add_extra_edges(n, &mut edges, rng);
    CommGraph::new(n, edges)
}

/// Static graph with `k + 1` isolated source processes (self-loop only) and
/// all remaining processes hearing from process 0. Its condensation has
/// `k + 1` source components, so it is not `k`-rooted.
pub fn imposs_graph(n: usize, k: usize) -> Result<CommGraph> {
    if k == 0 {
        return Err(Error::KOutOfRange { k, n });
    }
    if n < k + 1 {
        return Err(Error::TooFewProcesses { n, min: k + 1 });
    }
    CommGraph::new(n, (k + 1..n).map(|j| (0, j)))
}

fn sample_distinct(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.gen_range(0..n - i);
        pool.swap(i, j);
    }
    let mut picked = pool[..k].to_vec();
    picked.sort_unstable();
    picked
}

fn shuffle(values: &mut [usize], rng: &mut impl Rng) {
    for i in (1..values.len()).rev() {
        let j = rng.gen_range(0..=i);
        values.swap(i, j);
    }
}

fn add_extra_edges(n: usize, edges: &mut Vec<(usize, usize)>, rng: &mut impl Rng) {
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen::<f64>() < EXTRA_EDGE_PROB {
                edges.push((u, v));
            }
        }
    }
}

/// RNG stream for the graph draw of raw round `t`.
fn graph_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    rng
}

/// RNG stream for the weight draw of macro-round `t`. Disjoint from the
/// graph streams.
pub(crate) fn weight_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((1 << 63) | t as u64);
    rng
}
