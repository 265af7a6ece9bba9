//! Node-labeled causal graphs where every unordered pair of nodes carries
//! exactly one of four states: absent, directed either way, or symmetric.
//!
//! The symmetric state covers both "mere association" answers from pairwise
//! probing and the confounding edges induced by shared exogenous parents.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Most orientation enumerations are exponential in the number of symmetric
/// edges; anything past this is refused rather than attempted.
pub const MAX_SYMMETRIC_EDGES: usize = 20;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate node label `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("a pair must name two distinct nodes, got `{0}` twice")]
    SelfPair(String),
    #[error("graphs have different node sets ({left:?} vs {right:?})")]
    NodeMismatch { left: Vec<String>, right: Vec<String> },
    #[error("{0} symmetric edges exceed the enumeration limit of {MAX_SYMMETRIC_EDGES}")]
    TooManySymmetricEdges(usize),
    #[error("graph is not a DAG: {0}")]
    NotADag(String),
}

/// State of one unordered node pair, oriented relative to the pair's
/// canonical (lower index, higher index) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeState {
    Absent,
    /// first → second
    Forward,
    /// first ← second
    Backward,
    /// first ↔ second (association / confounding, no direction committed)
    Symmetric,
}

impl EdgeState {
    pub fn is_present(self) -> bool {
        self != EdgeState::Absent
    }

    pub fn is_directed(self) -> bool {
        matches!(self, EdgeState::Forward | EdgeState::Backward)
    }

    fn flipped(self) -> EdgeState {
        match self {
            EdgeState::Forward => EdgeState::Backward,
            EdgeState::Backward => EdgeState::Forward,
            other => other,
        }
    }
}

/// A graph over labeled nodes with one [`EdgeState`] per unordered pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalGraph {
    nodes: Vec<String>,
    /// Pair states in canonical order; index via `pair_index`.
    states: Vec<EdgeState>,
}

impl CausalGraph {
    /// Builds an edgeless graph over the given node labels.
    pub fn new<I, S>(nodes: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if !seen.insert(n.clone()) {
                return Err(GraphError::DuplicateNode(n.clone()));
            }
        }
        let pairs = nodes.len().saturating_mul(nodes.len().saturating_sub(1)) / 2;
        Ok(CausalGraph { nodes, states: vec![EdgeState::Absent; pairs] })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == label)
    }

    fn require_index(&self, label: &str) -> Result<usize, GraphError> {
        self.node_index(label).ok_or_else(|| GraphError::UnknownNode(label.to_string()))
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.nodes.len());
        let n = self.nodes.len();
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    /// State of the pair `(i, j)` oriented from `i`'s perspective:
    /// `Forward` means i → j regardless of index order.
    pub fn state(&self, i: usize, j: usize) -> EdgeState {
        assert!(i != j, "state() takes two distinct node indices");
        let (a, b) = (i.min(j), i.max(j));
        let s = self.states[self.pair_index(a, b)];
        if i < j {
            s
        } else {
            s.flipped()
        }
    }

    /// Sets the pair `(i, j)` to `state` as seen from `i`'s perspective.
    pub fn set_state(&mut self, i: usize, j: usize, state: EdgeState) {
        assert!(i != j, "set_state() takes two distinct node indices");
        let (a, b) = (i.min(j), i.max(j));
        let idx = self.pair_index(a, b);
        self.states[idx] = if i < j { state } else { state.flipped() };
    }

    pub fn state_by_label(&self, a: &str, b: &str) -> Result<EdgeState, GraphError> {
        let i = self.require_index(a)?;
        let j = self.require_index(b)?;
        if i == j {
            return Err(GraphError::SelfPair(a.to_string()));
        }
        Ok(self.state(i, j))
    }

    pub fn set_state_by_label(
        &mut self,
        a: &str,
        b: &str,
        state: EdgeState,
    ) -> Result<(), GraphError> {
        let i = self.require_index(a)?;
        let j = self.require_index(b)?;
        if i == j {
            return Err(GraphError::SelfPair(a.to_string()));
        }
        self.set_state(i, j, state);
        Ok(())
    }

    pub fn set_directed(&mut self, from: &str, to: &str) -> Result<(), GraphError> {
        self.set_state_by_label(from, to, EdgeState::Forward)
    }

    pub fn set_symmetric(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        self.set_state_by_label(a, b, EdgeState::Symmetric)
    }

    /// All unordered pairs `(i, j)` with `i < j` and their states.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, EdgeState)> + '_ {
        let n = self.nodes.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.state(i, j))))
    }

    pub fn present_edge_count(&self) -> usize {
        self.pairs().filter(|(_, _, s)| s.is_present()).count()
    }

    pub fn symmetric_edge_count(&self) -> usize {
        self.pairs().filter(|(_, _, s)| *s == EdgeState::Symmetric).count()
    }

    pub fn directed_edge_count(&self) -> usize {
        self.pairs().filter(|(_, _, s)| s.is_directed()).count()
    }

    /// Nodes `k` with a directed edge k → i.
    pub fn parents(&self, i: usize) -> BTreeSet<usize> {
        (0..self.nodes.len())
            .filter(|&k| k != i && self.state(k, i) == EdgeState::Forward)
            .collect()
    }

    /// Nodes `k` with a directed edge i → k.
    pub fn children(&self, i: usize) -> BTreeSet<usize> {
        (0..self.nodes.len())
            .filter(|&k| k != i && self.state(i, k) == EdgeState::Forward)
            .collect()
    }

    /// Nodes reachable from `i` by directed edges, including `i` itself.
    pub fn descendants(&self, i: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([i]);
        let mut queue = VecDeque::from([i]);
        while let Some(v) = queue.pop_front() {
            for c in self.children(v) {
                if seen.insert(c) {
                    queue.push_back(c);
                }
            }
        }
        seen
    }

    /// Nodes with a directed path to `i`, including `i` itself.
    pub fn ancestors(&self, i: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([i]);
        let mut queue = VecDeque::from([i]);
        while let Some(v) = queue.pop_front() {
            for p in self.parents(v) {
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    pub fn has_directed_path(&self, from: usize, to: usize) -> bool {
        from != to && self.descendants(from).contains(&to)
    }

    /// Whether the directed part of the graph contains a cycle. Symmetric
    /// edges are ignored here.
    pub fn directed_part_has_cycle(&self) -> bool {
        self.topological_order().is_none()
    }

    /// Topological order of the directed part, `None` if it is cyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.parents(i).len()).collect();
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for c in self.children(v) {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// True when the graph has no symmetric edges and no directed cycle.
    pub fn is_dag(&self) -> bool {
        self.symmetric_edge_count() == 0 && !self.directed_part_has_cycle()
    }

    /// d-separation of `x` and `y` given `z` in the directed part of the
    /// graph, via the classic active-trail reachability over (node, entry
    /// direction) states. Callers are expected to pass a DAG.
    pub fn d_separated(&self, x: usize, y: usize, z: &BTreeSet<usize>) -> bool {
        debug_assert!(self.symmetric_edge_count() == 0);
        if x == y {
            return false;
        }
        // Ancestors of the conditioning set decide whether colliders open.
        let mut z_ancestors = BTreeSet::new();
        for &v in z {
            z_ancestors.extend(self.ancestors(v));
        }
        // Entry direction: true = entered along an edge pointing at the node
        // (i.e. we arrived at the arrowhead side).
        let mut visited: BTreeSet<(usize, bool)> = BTreeSet::new();
        let mut queue: VecDeque<(usize, bool)> = VecDeque::new();
        // Leaving the source in either direction.
        queue.push_back((x, false));
        queue.push_back((x, true));
        while let Some((v, entered_at_head)) = queue.pop_front() {
            if !visited.insert((v, entered_at_head)) {
                continue;
            }
            if v == y && v != x {
                return false;
            }
            let in_z = z.contains(&v);
            if v == x {
                // From the source we may leave along any edge; x in z would be
                // degenerate and is not produced by callers.
                for p in self.parents(v) {
                    queue.push_back((p, false));
                }
                for c in self.children(v) {
                    queue.push_back((c, true));
                }
                continue;
            }
            if entered_at_head {
                // Arrived at an arrowhead: v acts as collider for parent
                // continuations and as a chain node for child continuations.
                if z_ancestors.contains(&v) {
                    for p in self.parents(v) {
                        queue.push_back((p, false));
                    }
                }
                if !in_z {
                    for c in self.children(v) {
                        queue.push_back((c, true));
                    }
                }
            } else {
                // Arrived against the arrow (from a child): v is a chain or
                // fork node; blocked exactly when v is conditioned on.
                if !in_z {
                    for p in self.parents(v) {
                        queue.push_back((p, false));
                    }
                    for c in self.children(v) {
                        queue.push_back((c, true));
                    }
                }
            }
        }
        true
    }

    /// Every DAG obtained by replacing each symmetric edge with one of its
    /// two orientations. Orientation tuples are enumerated in ascending
    /// binary-counter order (bit 0 = first symmetric pair, 0 = forward), so
    /// the output order is deterministic. Candidates whose directed part is
    /// cyclic are dropped.
    pub fn orientation_extensions(&self) -> Result<Vec<CausalGraph>, GraphError> {
        let sym_pairs: Vec<(usize, usize)> = self
            .pairs()
            .filter(|(_, _, s)| *s == EdgeState::Symmetric)
            .map(|(i, j, _)| (i, j))
            .collect();
        if sym_pairs.len() > MAX_SYMMETRIC_EDGES {
            return Err(GraphError::TooManySymmetricEdges(sym_pairs.len()));
        }
        Ok(self
            .orientation_candidates(&sym_pairs)
            .into_iter()
            .filter(|g| !g.directed_part_has_cycle())
            .collect())
    }

    /// Same enumeration as [`orientation_extensions`](Self::orientation_extensions)
    /// but without the acyclicity filter. Used as a fallback when the
    /// directed part of a prediction is itself cyclic and no extension can
    /// be acyclic; parent sets stay well defined either way.
    pub fn orientation_candidates_unfiltered(&self) -> Result<Vec<CausalGraph>, GraphError> {
        let sym_pairs: Vec<(usize, usize)> = self
            .pairs()
            .filter(|(_, _, s)| *s == EdgeState::Symmetric)
            .map(|(i, j, _)| (i, j))
            .collect();
        if sym_pairs.len() > MAX_SYMMETRIC_EDGES {
            return Err(GraphError::TooManySymmetricEdges(sym_pairs.len()));
        }
        Ok(self.orientation_candidates(&sym_pairs))
    }

    fn orientation_candidates(&self, sym_pairs: &[(usize, usize)]) -> Vec<CausalGraph> {
        let mut out = Vec::with_capacity(1usize << sym_pairs.len());
        for mask in 0u64..(1u64 << sym_pairs.len()) {
            let mut g = self.clone();
            for (bit, &(i, j)) in sym_pairs.iter().enumerate() {
                let state = if mask >> bit & 1 == 0 {
                    EdgeState::Forward
                } else {
                    EdgeState::Backward
                };
                g.set_state(i, j, state);
            }
            out.push(g);
        }
        out
    }

    /// Checks that `other` is over exactly the same node list.
    pub fn require_same_nodes(&self, other: &CausalGraph) -> Result<(), GraphError> {
        if self.nodes != other.nodes {
            return Err(GraphError::NodeMismatch {
                left: self.nodes.clone(),
                right: other.nodes.clone(),
            });
        }
        Ok(())
    }

    /// Renders the graph in DOT format. Symmetric edges use `dir=none`.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("digraph \"{}\" {{\n", name));
        for n in &self.nodes {
            out.push_str(&format!("  \"{}\";\n", n));
        }
        for (i, j, s) in self.pairs() {
            match s {
                EdgeState::Absent => {}
                EdgeState::Forward => {
                    out.push_str(&format!("  \"{}\" -> \"{}\";\n", self.nodes[i], self.nodes[j]));
                }
                EdgeState::Backward => {
                    out.push_str(&format!("  \"{}\" -> \"{}\";\n", self.nodes[j], self.nodes[i]));
                }
                EdgeState::Symmetric => {
                    out.push_str(&format!(
                        "  \"{}\" -> \"{}\" [dir=none];\n",
                        self.nodes[i], self.nodes[j]
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
