//! Graph-comparison and decisiveness metrics for predicted causal graphs:
//! structural Hamming distance, structural intervention distance, skeleton
//! F1, sparsity over half-edges, decisiveness, and the asymmetric decision
//! score.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CausalGraph, EdgeState, GraphError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("truth graph must be a DAG (directed edges only, acyclic)")]
    CyclicTruth,
    #[error("sparsity needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("node count {given} does not match the graph's {actual} nodes")]
    NodeCountMismatch { given: usize, actual: usize },
    #[error("decisiveness groups need at least one graph each (symmetric templates 1-3, asymmetric 4-5)")]
    MissingTemplateGroup,
}

/// Structural Hamming distance: over unordered pairs, one unit whenever the
/// two graphs disagree on the pair's state. A reversal or a
/// directed-vs-symmetric mismatch costs 1, the same as a missing or extra
/// edge.
pub fn shd(pred: &CausalGraph, truth: &CausalGraph) -> Result<usize, MetricsError> {
    pred.require_same_nodes(truth)?;
    Ok(pred
        .pairs()
        .zip(truth.pairs())
        .filter(|((_, _, a), (_, _, b))| a != b)
        .count())
}

/// Structural intervention distance of one fully oriented prediction:
/// ordered pairs (i, j) whose interventional effect i → j is falsely
/// inferred when adjusting for the prediction's parents of i in `truth`.
fn sid_of_extension(extension: &CausalGraph, truth: &CausalGraph) -> usize {
    let n = truth.node_count();
    let mut count = 0;
    for i in 0..n {
        let z = extension.parents(i);
        for j in 0..n {
            if i != j && !parent_adjustment_valid(truth, i, j, &z) {
                count += 1;
            }
        }
    }
    count
}

/// Whether `z` is a valid adjustment set for the effect of `i` on `j` in the
/// DAG `truth`.
///
/// When `j ∈ z` the adjustment formula collapses to the plain marginal of
/// `j`, which is correct exactly when the true effect is null. Otherwise the
/// standard adjustment criterion applies: `z` must avoid descendants of
/// nodes on proper causal paths from `i` to `j`, and must block every proper
/// non-causal path, checked as d-separation in the proper back-door graph
/// (the graph with the first edge of every causal path removed).
pub fn parent_adjustment_valid(
    truth: &CausalGraph,
    i: usize,
    j: usize,
    z: &BTreeSet<usize>,
) -> bool {
    if z.contains(&j) {
        return !truth.has_directed_path(i, j);
    }
    let de_i = truth.descendants(i);
    let an_j = truth.ancestors(j);
    let on_causal_path: Vec<usize> =
        de_i.intersection(&an_j).copied().filter(|&w| w != i).collect();
    let mut forbidden = BTreeSet::new();
    for &w in &on_causal_path {
        forbidden.extend(truth.descendants(w));
    }
    if z.intersection(&forbidden).next().is_some() {
        return false;
    }
    let mut back_door = truth.clone();
    for &c in &on_causal_path {
        if back_door.state(i, c) == EdgeState::Forward {
            back_door.set_state(i, c, EdgeState::Absent);
        }
    }
    back_door.d_separated(i, j, z)
}

/// SID summary over the acyclic orientation extensions of a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidValue {
    pub min: usize,
    pub mean: f64,
    pub max: usize,
    /// How many orientation extensions were scored.
    pub extensions: usize,
}

/// Structural intervention distance. Symmetric edges in `pred` are scored
/// over all acyclic orientation extensions, reported as min/mean/max; for a
/// DAG prediction the three coincide. If the directed part of `pred` is
/// already cyclic no acyclic extension exists, and the orientations are
/// scored without the acyclicity filter so parent sets stay defined.
pub fn sid(pred: &CausalGraph, truth: &CausalGraph) -> Result<SidValue, MetricsError> {
    pred.require_same_nodes(truth)?;
    if !truth.is_dag() {
        return Err(MetricsError::CyclicTruth);
    }
    let mut extensions = pred.orientation_extensions()?;
    if extensions.is_empty() {
        extensions = pred.orientation_candidates_unfiltered()?;
    }
    let scores: Vec<usize> = extensions.iter().map(|e| sid_of_extension(e, truth)).collect();
    let min = *scores.iter().min().expect("at least one orientation");
    let max = *scores.iter().max().expect("at least one orientation");
    let mean = scores.iter().sum::<usize>() as f64 / scores.len() as f64;
    Ok(SidValue { min, mean, max, extensions: scores.len() })
}

/// Skeleton F1: an edge counts as predicted/true when its pair state is
/// anything but absent; orientation is ignored. Returns 0.0 whenever either
/// side has no edges at all (empty-denominator convention).
pub fn f1(pred: &CausalGraph, truth: &CausalGraph) -> Result<f64, MetricsError> {
    pred.require_same_nodes(truth)?;
    let pred_edges: BTreeSet<(usize, usize)> = pred
        .pairs()
        .filter(|(_, _, s)| s.is_present())
        .map(|(i, j, _)| (i, j))
        .collect();
    let true_edges: BTreeSet<(usize, usize)> = truth
        .pairs()
        .filter(|(_, _, s)| s.is_present())
        .map(|(i, j, _)| (i, j))
        .collect();
    if pred_edges.is_empty() || true_edges.is_empty() {
        return Ok(0.0);
    }
    let hits = pred_edges.intersection(&true_edges).count() as f64;
    let precision = hits / pred_edges.len() as f64;
    let recall = hits / true_edges.len() as f64;
    if precision + recall == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Number of half-edges in a graph: directed pairs count 1, symmetric pairs
/// count 2 (both directions predicted).
pub fn half_edge_count(g: &CausalGraph) -> usize {
    g.pairs()
        .map(|(_, _, s)| match s {
            EdgeState::Absent => 0,
            EdgeState::Forward | EdgeState::Backward => 1,
            EdgeState::Symmetric => 2,
        })
        .sum()
}

/// 1 − (predicted half-edges) / (2·C(N,2)).
pub fn sparsity(node_count: usize, pred: &CausalGraph) -> Result<f64, MetricsError> {
    if node_count < 2 {
        return Err(MetricsError::TooFewNodes(node_count));
    }
    if node_count != pred.node_count() {
        return Err(MetricsError::NodeCountMismatch {
            given: node_count,
            actual: pred.node_count(),
        });
    }
    let max_half_edges = node_count * (node_count - 1);
    Ok(1.0 - half_edge_count(pred) as f64 / max_half_edges as f64)
}

/// Fraction of predicted edges that are directed rather than symmetric;
/// 0.0 for a graph with no predicted edges.
pub fn decisiveness(pred: &CausalGraph) -> f64 {
    let asym = pred.directed_edge_count();
    let sym = pred.symmetric_edge_count();
    let count = asym + sym;
    if count == 0 {
        return 0.0;
    }
    asym as f64 / count as f64
}

/// Change in decisiveness when switching from prediction `a` to `b`.
pub fn delta_decisiveness(a: &CausalGraph, b: &CausalGraph) -> f64 {
    decisiveness(b) - decisiveness(a)
}

/// Identifiers of the query templates whose wording expects a mere
/// association, versus those expecting a direction. Kept consistent with
/// the prompt templates by a cross-module test.
pub const SYMMETRIC_TEMPLATE_IDS: [u8; 3] = [1, 2, 3];
pub const ASYMMETRIC_TEMPLATE_IDS: [u8; 2] = [4, 5];

/// Asymmetric decision score over per-template graph predictions: mean
/// decisiveness under asymmetric wordings minus mean decisiveness under
/// symmetric wordings, in [-1, 1].
pub fn ads(per_template: &BTreeMap<u8, CausalGraph>) -> Result<f64, MetricsError> {
    let group = |ids: &[u8]| -> Vec<f64> {
        ids.iter()
            .filter_map(|id| per_template.get(id))
            .map(decisiveness)
            .collect()
    };
    ads_from_decisiveness(&group(&SYMMETRIC_TEMPLATE_IDS), &group(&ASYMMETRIC_TEMPLATE_IDS))
}

/// ADS from already-computed per-template decisiveness values.
pub fn ads_from_decisiveness(
    symmetric: &[f64],
    asymmetric: &[f64],
) -> Result<f64, MetricsError> {
    if symmetric.is_empty() || asymmetric.is_empty() {
        return Err(MetricsError::MissingTemplateGroup);
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Ok(mean(asymmetric) - mean(symmetric))
}

/// One differing pair between two graphs over the same nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDifference {
    pub first: String,
    pub second: String,
    pub state_a: EdgeState,
    pub state_b: EdgeState,
}

/// All pairs on which the two graphs disagree, in canonical pair order.
pub fn graph_difference(
    a: &CausalGraph,
    b: &CausalGraph,
) -> Result<Vec<EdgeDifference>, MetricsError> {
    a.require_same_nodes(b)?;
    Ok(a.pairs()
        .zip(b.pairs())
        .filter(|((_, _, sa), (_, _, sb))| sa != sb)
        .map(|((i, j, sa), (_, _, sb))| EdgeDifference {
            first: a.nodes()[i].clone(),
            second: a.nodes()[j].clone(),
            state_a: sa,
            state_b: sb,
        })
        .collect())
}

/// Mean and population standard deviation (divide by the count, not n−1).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One metric summarized over the templates of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: String,
    pub dataset: String,
    pub model: String,
    pub per_template: BTreeMap<u8, f64>,
    pub mean: f64,
    pub std: f64,
}

impl MetricReport {
    pub fn from_values(
        metric: impl Into<String>,
        dataset: impl Into<String>,
        model: impl Into<String>,
        per_template: BTreeMap<u8, f64>,
    ) -> MetricReport {
        let values: Vec<f64> = per_template.values().copied().collect();
        let (mean, std) = mean_std(&values);
        MetricReport {
            metric: metric.into(),
            dataset: dataset.into(),
            model: model.into(),
            per_template,
            mean,
            std,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::IndexedRandom;
    use rand::Rng;
    use rand::SeedableRng;

    fn graph(nodes: &[&str], edges: &[(&str, &str, EdgeState)]) -> CausalGraph {
        let mut g = CausalGraph::new(nodes.iter().copied()).unwrap();
        for (a, b, s) in edges {
            g.set_state_by_label(a, b, *s).unwrap();
        }
        g
    }

    fn random_graph(nodes: usize, rng: &mut impl Rng) -> CausalGraph {
        let labels: Vec<String> = (0..nodes).map(|i| format!("n{i}")).collect();
        let mut g = CausalGraph::new(labels).unwrap();
        let states = [
            EdgeState::Absent,
            EdgeState::Forward,
            EdgeState::Backward,
            EdgeState::Symmetric,
        ];
        for i in 0..nodes {
            for j in i + 1..nodes {
                g.set_state(i, j, *states.choose(rng).unwrap());
            }
        }
        g
    }

    use EdgeState::{Backward as B, Forward as F, Symmetric as S};

    #[test]
    fn shd_identity_missing_and_mixed() {
        let truth = graph(&["a", "t"], &[("a", "t", F)]);
        assert_eq!(shd(&truth, &truth).unwrap(), 0);

        let empty = graph(&["a", "t"], &[]);
        assert_eq!(shd(&empty, &truth).unwrap(), 1);

        // truth a→b→c against prediction a←b, b→c, a→c:
        // pair (a,b) reversed (1), pair (a,c) extra (1), pair (b,c) equal.
        let truth = graph(&["a", "b", "c"], &[("a", "b", F), ("b", "c", F)]);
        let pred = graph(&["a", "b", "c"], &[("a", "b", B), ("b", "c", F), ("a", "c", F)]);
        assert_eq!(shd(&pred, &truth).unwrap(), 2);
        assert_eq!(shd(&truth, &pred).unwrap(), 2);
    }

    #[test]
    fn shd_node_mismatch_is_an_error() {
        let a = graph(&["a", "b"], &[]);
        let b = graph(&["a", "c"], &[]);
        assert!(shd(&a, &b).is_err());
    }

    #[test]
    fn shd_triangle_inequality_and_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g1 = random_graph(4, &mut rng);
            let g2 = random_graph(4, &mut rng);
            let g3 = random_graph(4, &mut rng);
            let d12 = shd(&g1, &g2).unwrap();
            let d23 = shd(&g2, &g3).unwrap();
            let d13 = shd(&g1, &g3).unwrap();
            assert!(d13 <= d12 + d23);
            assert!(d13 <= 6); // C(4,2)
        }
    }

    #[test]
    fn sid_zero_on_itself() {
        let truth = graph(&["a", "b", "c"], &[("a", "b", F), ("b", "c", F), ("a", "c", F)]);
        let v = sid(&truth, &truth).unwrap();
        assert_eq!((v.min, v.max, v.extensions), (0, 0, 1));
        assert_eq!(v.mean, 0.0);
    }

    #[test]
    fn sid_two_node_truth_vs_empty_prediction() {
        // One ordered pair is falsely inferred: the empty parent set
        // estimates the effect of t on a as the plain conditional, but the
        // true effect is null. The a→t direction is matched because a's true
        // parent set is also empty.
        let truth = graph(&["a", "t"], &[("a", "t", F)]);
        let pred = graph(&["a", "t"], &[]);
        let v = sid(&pred, &truth).unwrap();
        assert_eq!((v.min, v.max), (1, 1));
    }

    #[test]
    fn sid_reversed_chain_counts_all_pairs() {
        // truth a→b→c, prediction fully reversed; every ordered pair is
        // falsely inferred (worked through the adjustment rules by hand).
        let truth = graph(&["a", "b", "c"], &[("a", "b", F), ("b", "c", F)]);
        let pred = graph(&["a", "b", "c"], &[("a", "b", B), ("b", "c", B)]);
        let v = sid(&pred, &truth).unwrap();
        assert_eq!((v.min, v.max), (6, 6));
    }

    #[test]
    fn sid_symmetric_prediction_reports_extension_range() {
        let truth = graph(&["a", "b"], &[("a", "b", F)]);
        let pred = graph(&["a", "b"], &[("a", "b", S)]);
        let v = sid(&pred, &truth).unwrap();
        assert_eq!(v.extensions, 2);
        // The a→b orientation gets both ordered pairs right. Under a←b,
        // (a,b) adjusts for the claimed parent b and degenerates to b's
        // marginal (wrong, b is a's descendant), and (b,a) uses the empty
        // parent set, leaving the true edge unblocked on a null effect.
        assert_eq!(v.min, 0);
        assert_eq!(v.max, 2);
        assert!((v.mean - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sid_rejects_cyclic_truth() {
        let truth = graph(&["a", "b", "c"], &[("a", "b", F), ("b", "c", F), ("a", "c", B)]);
        let pred = graph(&["a", "b", "c"], &[]);
        assert!(matches!(sid(&pred, &truth), Err(MetricsError::CyclicTruth)));
    }

    #[test]
    fn sid_min_equals_max_for_dag_predictions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 50 {
            let truth = random_graph(4, &mut rng);
            let pred = random_graph(4, &mut rng);
            if !truth.is_dag() || !pred.is_dag() {
                continue;
            }
            let v = sid(&pred, &truth).unwrap();
            assert_eq!(v.min, v.max);
            assert_eq!(v.extensions, 1);
            checked += 1;
        }
    }

    #[test]
    fn sid_handles_cyclic_directed_predictions() {
        // No acyclic extension exists; parent sets are scored as declared.
        let truth = graph(&["a", "b", "c"], &[("a", "b", F), ("b", "c", F)]);
        let pred = graph(&["a", "b", "c"], &[("a", "b", F), ("b", "c", F), ("a", "c", B)]);
        let v = sid(&pred, &truth).unwrap();
        assert_eq!(v.extensions, 1);
    }

    #[test]
    fn f1_examples() {
        let truth = graph(&["a", "b", "c"], &[("a", "b", F), ("b", "c", F)]);
        // Same skeleton, different orientations: still 1.0.
        let pred = graph(&["a", "b", "c"], &[("a", "b", B), ("b", "c", S)]);
        assert_eq!(f1(&pred, &truth).unwrap(), 1.0);

        let empty = graph(&["a", "b", "c"], &[]);
        assert_eq!(f1(&empty, &truth).unwrap(), 0.0);
        assert_eq!(f1(&empty, &empty).unwrap(), 0.0);

        // Truth has 2 edges; prediction hits one of them plus one wrong:
        // precision 0.5, recall 0.5.
        let pred = graph(&["a", "b", "c"], &[("a", "b", F), ("a", "c", F)]);
        assert!((f1(&pred, &truth).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sparsity_examples() {
        let empty = graph(&["a", "b"], &[]);
        assert_eq!(sparsity(2, &empty).unwrap(), 1.0);

        let single = graph(&["a", "b"], &[("a", "b", F)]);
        assert_eq!(sparsity(2, &single).unwrap(), 0.5);

        let mut all_sym = CausalGraph::new(["a", "b", "c"]).unwrap();
        for i in 0..3 {
            for j in i + 1..3 {
                all_sym.set_state(i, j, S);
            }
        }
        assert_eq!(sparsity(3, &all_sym).unwrap(), 0.0);

        assert!(matches!(sparsity(1, &empty), Err(MetricsError::TooFewNodes(1))));
        assert!(matches!(sparsity(3, &empty), Err(MetricsError::NodeCountMismatch { .. })));
    }

    #[test]
    fn sparsity_strictly_decreases_with_added_half_edges() {
        let mut g = CausalGraph::new(["a", "b", "c", "d"]).unwrap();
        let mut last = sparsity(4, &g).unwrap();
        for (i, j, s) in [(0, 1, F), (0, 2, S), (1, 2, B), (2, 3, S)] {
            g.set_state(i, j, s);
            let now = sparsity(4, &g).unwrap();
            assert!(now < last);
            last = now;
        }
    }

    #[test]
    fn decisiveness_examples() {
        let empty = graph(&["a", "b", "c"], &[]);
        assert_eq!(decisiveness(&empty), 0.0);

        let directed = graph(&["a", "b", "c"], &[("a", "b", F), ("b", "c", B)]);
        assert_eq!(decisiveness(&directed), 1.0);

        let mixed = graph(&["a", "b", "c"], &[("a", "b", F), ("b", "c", S)]);
        assert_eq!(decisiveness(&mixed), 0.5);
    }

    #[test]
    fn decisiveness_matches_direct_recount_on_random_graphs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..300 {
            let g = random_graph(5, &mut rng);
            let mut asym = 0usize;
            let mut sym = 0usize;
            for (_, _, s) in g.pairs() {
                match s {
                    F | B => asym += 1,
                    S => sym += 1,
                    EdgeState::Absent => {}
                }
            }
            let expected = if asym + sym == 0 { 0.0 } else { asym as f64 / (asym + sym) as f64 };
            assert_eq!(decisiveness(&g), expected);
        }
    }

    #[test]
    fn ads_examples_and_errors() {
        // Identical graphs in both groups: no change.
        let g = graph(&["a", "b"], &[("a", "b", F)]);
        let map: BTreeMap<u8, CausalGraph> = (1..=5).map(|id| (id, g.clone())).collect();
        assert_eq!(ads(&map).unwrap(), 0.0);

        // Extremes: symmetric group fully undecided, asymmetric fully decided.
        let sym = graph(&["a", "b"], &[("a", "b", S)]);
        let dir = graph(&["a", "b"], &[("a", "b", F)]);
        let map: BTreeMap<u8, CausalGraph> = [
            (1, sym.clone()),
            (2, sym.clone()),
            (3, sym.clone()),
            (4, dir.clone()),
            (5, dir.clone()),
        ]
        .into();
        assert_eq!(ads(&map).unwrap(), 1.0);

        assert!(matches!(
            ads(&BTreeMap::from([(1, sym.clone())])),
            Err(MetricsError::MissingTemplateGroup)
        ));

        // Plain arithmetic: {0.2, 0.2, 0.2} vs {0.6, 0.8} gives 0.5.
        let v = ads_from_decisiveness(&[0.2, 0.2, 0.2], &[0.6, 0.8]).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ads_is_antisymmetric_under_group_swap() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let b: Vec<f64> = (0..2).map(|_| rng.random::<f64>()).collect();
            let fwd = ads_from_decisiveness(&a, &b).unwrap();
            let rev = ads_from_decisiveness(&b, &a).unwrap();
            assert!((fwd + rev).abs() < 1e-12);
        }
    }

    #[test]
    fn graph_difference_examples() {
        let a = graph(&["a", "b", "c"], &[("a", "b", F)]);
        assert!(graph_difference(&a, &a).unwrap().is_empty());

        let reversed = graph(&["a", "b", "c"], &[("a", "b", B)]);
        let diff = graph_difference(&a, &reversed).unwrap();
        assert_eq!(diff.len(), 1);
        assert_eq!((diff[0].state_a, diff[0].state_b), (F, B));

        // Disjoint edge sets of sizes 1 and 2 differ on 3 pairs.
        let other = graph(&["a", "b", "c"], &[("a", "c", F), ("b", "c", S)]);
        assert_eq!(graph_difference(&a, &other).unwrap().len(), 3);
    }

    #[test]
    fn metrics_invariant_under_consistent_node_permutation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let pred = random_graph(4, &mut rng);
            let truth = loop {
                let t = random_graph(4, &mut rng);
                if t.is_dag() {
                    break t;
                }
            };
            // Permute node order in both graphs the same way.
            let perm = [2usize, 0, 3, 1];
            let permute = |g: &CausalGraph| {
                let labels: Vec<String> = perm.iter().map(|&i| g.nodes()[i].clone()).collect();
                let mut out = CausalGraph::new(labels).unwrap();
                for a in 0..4 {
                    for b in 0..4 {
                        if a < b {
                            let (pa, pb) = (perm[a], perm[b]);
                            out.set_state(a, b, g.state(pa, pb));
                        }
                    }
                }
                out
            };
            let (pred_p, truth_p) = (permute(&pred), permute(&truth));
            assert_eq!(shd(&pred, &truth).unwrap(), shd(&pred_p, &truth_p).unwrap());
            assert_eq!(f1(&pred, &truth).unwrap(), f1(&pred_p, &truth_p).unwrap());
            assert_eq!(sid(&pred, &truth).unwrap(), sid(&pred_p, &truth_p).unwrap());
            assert_eq!(decisiveness(&pred), decisiveness(&pred_p));
            assert_eq!(sparsity(4, &pred).unwrap(), sparsity(4, &pred_p).unwrap());
        }
    }

    #[test]
    fn population_std_matches_reported_pattern() {
        // Five per-template values {1,1,1,1,0}: mean 0.8, population std 0.4.
        let (mean, std) = mean_std(&[1.0, 1.0, 1.0, 1.0, 0.0]);
        assert!((mean - 0.8).abs() < 1e-15);
        assert!((std - 0.4).abs() < 1e-15);

        let report = MetricReport::from_values(
            "shd",
            "altitude",
            "mock",
            BTreeMap::from([(1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0), (5, 0.0)]),
        );
        assert!((report.mean - 0.8).abs() < 1e-15);
        assert!((report.std - 0.4).abs() < 1e-15);
    }
}
