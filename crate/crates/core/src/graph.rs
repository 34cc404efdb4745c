//! Directed communication graphs with mandatory self-loops, the relay
//! product, and the rootedness / broadcastability predicates.
//!
//! A graph edge `(i, j)` means "process `j` receives from process `i`".
//! Rootedness is decided through the condensation: a graph is `k`-rooted
//! exactly when its condensation has at most `k` source components.
//! Broadcastability is a minimum dominating set over reversed edges and is
//! decided by exact subset enumeration, which is exponential in the worst
//! case; the search is capped at [`MAX_EXACT_SEARCH`] processes.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest process count accepted by the exact broadcasting-set search.
pub const MAX_EXACT_SEARCH: usize = 24;

/// A directed communication graph on processes `0..n` with self-loops on
/// every process.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

/// Source-component count of the condensation together with a witness root
/// set (one process per source component).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootReport {
    /// Number of strongly connected components with no incoming edge.
    pub source_scc_count: usize,
    /// Smallest-index process of each source component, ascending.
    pub root_witness: Vec<usize>,
}

/// Minimum broadcasting-set size together with the lexicographically least
/// witness of that size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BroadcastReport {
    /// Size of a minimum set covering every in-neighborhood.
    pub min_size: usize,
    /// Lexicographically least covering set of size `min_size`.
    pub witness: Vec<usize>,
}

impl CommGraph {
    /// Builds a graph on `n >= 2` processes. Self-loops are added if absent;
    /// endpoints outside `0..n` are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::ProcessCount { n });
        }
        let mut set: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::EdgeEndpoint { edge: (i, j), n });
            }
            set.insert((i, j));
        }
        for i in 0..n {
            set.insert((i, i));
        }
        Ok(Self { n, edges: set })
    }

    /// Graph with self-loops only: the identity of the relay product.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    /// Complete graph: every process hears every other.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                edges.push((i, j));
            }
        }
        Self::new(n, edges)
    }

    /// Star from `center`: every process hears the center.
    pub fn star(n: usize, center: usize) -> Result<Self> {
        if center >= n {
            return Err(Error::EdgeEndpoint { edge: (center, center), n });
        }
        Self::new(n, (0..n).map(|j| (center, j)))
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn cycle(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Processes `j` with an edge `(j, i)`, ascending. Contains `i` itself.
    pub fn in_neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.has_edge(j, i)).collect()
    }

    /// Processes `j` with an edge `(i, j)`, ascending.
    pub fn out_neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.has_edge(i, j)).collect()
    }

    /// Relay product: `(i, j)` is an edge iff some `u` has `(i, u)` here and
    /// `(u, j)` in `other`. Models two consecutive rounds of forwarding.
    pub fn compose(&self, other: &CommGraph) -> Result<CommGraph> {
        if self.n != other.n {
            return Err(Error::MismatchedProcessCount { left: self.n, right: other.n });
        }
        let mut edges = Vec::new();
        for i in 0..self.n {
            let mut reach = vec![false; self.n];
            for u in self.out_neighbors(i) {
                for j in other.out_neighbors(u) {
                    reach[j] = true;
                }
            }
            for (j, hit) in reach.iter().enumerate() {
                if *hit {
                    edges.push((i, j));
                }
            }
        }
        CommGraph::new(self.n, edges)
    }

    /// Counts source components of the condensation and extracts a witness
    /// root set. The graph is `k`-rooted iff `source_scc_count <= k`.
    pub fn root_report(&self) -> RootReport {
        let comps = self.sccs();
        let mut comp_of = vec![usize::MAX; self.n];
        for (cid, comp) in comps.iter().enumerate() {
            for &v in comp {
                comp_of[v] = cid;
            }
        }
        let mut is_source = vec![true; comps.len()];
        for &(u, v) in &self.edges {
            if comp_of[u] != comp_of[v] {
                is_source[comp_of[v]] = false;
            }
        }
        let mut root_witness: Vec<usize> = comps
            .iter()
            .enumerate()
            .filter(|(cid, _)| is_source[*cid])
            .map(|(_, comp)| *comp.iter().min().expect("components are non-empty"))
            .collect();
        root_witness.sort_unstable();
        RootReport { source_scc_count: root_witness.len(), root_witness }
    }

    /// Finds a minimum set `M` such that every process has an in-edge from
    /// `M`, by enumerating subsets in increasing size. The graph is
    /// `k`-broadcastable iff `min_size <= k`. Ties are broken
    /// lexicographically so witnesses are reproducible.
    pub fn broadcast_report(&self) -> Result<BroadcastReport> {
        if self.n > MAX_EXACT_SEARCH {
            return Err(Error::SearchTooLarge { n: self.n, max: MAX_EXACT_SEARCH });
        }
        let in_masks: Vec<u32> = (0..self.n)
            .map(|i| self.in_neighbors(i).iter().fold(0u32, |m, &j| m | (1 << j)))
            .collect();
        for size in 1..=self.n {
            for combo in (0..self.n).combinations(size) {
                let mask = combo.iter().fold(0u32, |m, &j| m | (1 << j));
                if in_masks.iter().all(|&im| im & mask != 0) {
                    return Ok(BroadcastReport { min_size: size, witness: combo });
                }
            }
        }
        unreachable!("self-loops make the full process set a covering set")
    }

    /// `true` iff some set of at most `k` processes reaches every process.
    pub fn is_k_rooted(&self, k: usize) -> bool {
        self.root_report().source_scc_count <= k
    }

    /// `true` iff some set of at most `k` processes covers every
    /// in-neighborhood in one hop.
    pub fn is_k_broadcastable(&self, k: usize) -> Result<bool> {
        Ok(self.broadcast_report()?.min_size <= k)
    }

    /// Set of processes reachable from `sources` (including themselves).
    pub fn reachable_from(&self, sources: &[usize]) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = sources.iter().copied().collect();
        let mut queue: Vec<usize> = sources.to_vec();
        while let Some(u) = queue.pop() {
            for v in self.out_neighbors(u) {
                if seen.insert(v) {
                    queue.push(v);
                }
            }
        }
        seen
    }

    /// Tarjan's strongly connected components.
    fn sccs(&self) -> Vec<Vec<usize>> {
        struct State {
            index: usize,
            idx: Vec<Option<usize>>,
            low: Vec<usize>,
            stack: Vec<usize>,
            on_stack: Vec<bool>,
            comps: Vec<Vec<usize>>,
        }

        fn strongconnect(v: usize, adj: &[Vec<usize>], st: &mut State) {
            st.idx[v] = Some(st.index);
            st.low[v] = st.index;
            st.index += 1;
            st.stack.push(v);
            st.on_stack[v] = true;

            for &w in &adj[v] {
                if st.idx[w].is_none() {
                    strongconnect(w, adj, st);
                    st.low[v] = st.low[v].min(st.low[w]);
                } else if st.on_stack[w] {
                    st.low[v] = st.low[v].min(st.idx[w].unwrap());
                }
            }

            if st.low[v] == st.idx[v].unwrap() {
                let mut comp = Vec::new();
                loop {
                    let w = st.stack.pop().expect("stack underflow");
                    st.on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                st.comps.push(comp);
            }
        }

        let adj: Vec<Vec<usize>> = (0..self.n).map(|i| self.out_neighbors(i)).collect();
        let mut st = State {
            index: 0,
            idx: vec![None; self.n],
            low: vec![0; self.n],
            stack: Vec::new(),
            on_stack: vec![false; self.n],
            comps: Vec::new(),
        };
        for v in 0..self.n {
            if st.idx[v].is_none() {
                strongconnect(v, &adj, &mut st);
            }
        }
        st.comps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> CommGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        CommGraph::new(n, edges).unwrap()
    }

    /// Boolean matrix multiplication, the composition oracle.
    fn compose_oracle(a: &CommGraph, b: &CommGraph) -> CommGraph {
        let n = a.n();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if (0..n).any(|u| a.has_edge(i, u) && b.has_edge(u, j)) {
                    edges.push((i, j));
                }
            }
        }
        CommGraph::new(n, edges).unwrap()
    }

    /// Smallest set size reaching all processes, by subset enumeration.
    fn min_reaching_set_oracle(g: &CommGraph) -> usize {
        for size in 1..=g.n() {
            for combo in (0..g.n()).combinations(size) {
                if g.reachable_from(&combo).len() == g.n() {
                    return size;
                }
            }
        }
        unreachable!()
    }

    /// Smallest covering set size, by bitmask enumeration (independent of
    /// the size-ordered search in `broadcast_report`).
    fn min_cover_oracle(g: &CommGraph) -> usize {
        let n = g.n();
        let masks: Vec<u32> =
            (0..n).map(|i| g.in_neighbors(i).iter().fold(0u32, |m, &j| m | (1 << j))).collect();
        let mut best = n;
        for set in 1u32..(1 << n) {
            if masks.iter().all(|&im| im & set != 0) {
                best = best.min(set.count_ones() as usize);
            }
        }
        best
    }

    #[test]
    fn self_loops_added() {
        let g = CommGraph::new(2, std::iter::empty()).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn star_edges() {
        let g = CommGraph::new(3, [(0, 1), (0, 2)]).unwrap();
        assert!(g.has_edge(0, 1) && g.has_edge(0, 2));
        assert!(g.has_edge(0, 0) && g.has_edge(1, 1) && g.has_edge(2, 2));
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn rejects_single_process() {
        assert!(matches!(CommGraph::new(1, std::iter::empty()), Err(Error::ProcessCount { n: 1 })));
    }

    #[test]
    fn rejects_out_of_range_edge() {
        assert!(CommGraph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn identity_is_neutral_for_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_graph(5, 0.3, &mut rng);
        let id = CommGraph::identity(5).unwrap();
        assert_eq!(id.compose(&g).unwrap(), g);
        assert_eq!(g.compose(&id).unwrap(), g);
    }

    #[test]
    fn compose_relays_chains() {
        let g1 = CommGraph::new(4, [(0, 1)]).unwrap();
        let g2 = CommGraph::new(4, [(1, 2)]).unwrap();
        assert!(g1.compose(&g2).unwrap().has_edge(0, 2));
    }

    #[test]
    fn compose_rejects_mismatched_sizes() {
        let g1 = CommGraph::identity(3).unwrap();
        let g2 = CommGraph::identity(4).unwrap();
        assert!(g1.compose(&g2).is_err());
    }

    #[test]
    fn compose_matches_boolean_matrix_oracle_and_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_graph(4, 0.35, &mut rng);
            let b = random_graph(4, 0.35, &mut rng);
            let c = random_graph(4, 0.35, &mut rng);
            assert_eq!(a.compose(&b).unwrap(), compose_oracle(&a, &b));
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn self_composition_never_loses_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let g = random_graph(5, 0.25, &mut rng);
            let gg = g.compose(&g).unwrap();
            for e in g.edges() {
                assert!(gg.has_edge(e.0, e.1));
            }
        }
    }

    #[test]
    fn cycle_is_strongly_connected() {
        let report = CommGraph::cycle(4).unwrap().root_report();
        assert_eq!(report.source_scc_count, 1);
    }

    #[test]
    fn disjoint_cliques_have_two_sources() {
        let g = CommGraph::new(4, [(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let report = g.root_report();
        assert_eq!(report.source_scc_count, 2);
        assert_eq!(report.root_witness, vec![0, 2]);
    }

    #[test]
    fn root_count_matches_subset_enumeration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let g = random_graph(5, 0.2, &mut rng);
            assert_eq!(g.root_report().source_scc_count, min_reaching_set_oracle(&g));
        }
    }

    #[test]
    fn root_witness_reaches_everyone() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let g = random_graph(6, 0.2, &mut rng);
            let report = g.root_report();
            assert_eq!(g.reachable_from(&report.root_witness).len(), g.n());
            assert_eq!(report.root_witness.len(), report.source_scc_count);
        }
    }

    #[test]
    fn star_broadcasts_from_its_center() {
        let report = CommGraph::star(5, 0).unwrap().broadcast_report().unwrap();
        assert_eq!(report.min_size, 1);
        assert_eq!(report.witness, vec![0]);
    }

    #[test]
    fn cycle_needs_two_broadcasters() {
        let report = CommGraph::cycle(4).unwrap().broadcast_report().unwrap();
        assert_eq!(report.min_size, 2);
        assert_eq!(report.witness, vec![0, 2]);
    }

    #[test]
    fn complete_graph_broadcasts_from_any_single_process() {
        let report = CommGraph::complete(3).unwrap().broadcast_report().unwrap();
        assert_eq!(report.min_size, 1);
        assert_eq!(report.witness, vec![0]);
    }

    #[test]
    fn broadcast_matches_bitmask_oracle_and_witness_covers() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let g = random_graph(6, 0.25, &mut rng);
            let report = g.broadcast_report().unwrap();
            assert_eq!(report.min_size, min_cover_oracle(&g));
            for i in 0..g.n() {
                assert!(report.witness.iter().any(|&m| g.has_edge(m, i)));
            }
        }
    }

    #[test]
    fn broadcastable_implies_rooted() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..200 {
            let g = random_graph(6, 0.2, &mut rng);
            let b = g.broadcast_report().unwrap().min_size;
            let r = g.root_report().source_scc_count;
            assert!(b >= r, "covering set of size {b} must also reach everyone ({r})");
        }
    }

    #[test]
    fn search_cap_is_enforced() {
        let g = CommGraph::identity(MAX_EXACT_SEARCH + 1).unwrap();
        assert!(matches!(g.broadcast_report(), Err(Error::SearchTooLarge { .. })));
    }
}
