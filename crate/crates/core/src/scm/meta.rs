//! Answering interventional queries from an observational table plus a
//! directed acyclic graph over the same variables, by truncated
//! factorization: factorize the joint along the graph, delete the factors of
//! intervened variables, pin their values, and re-marginalize.

use std::collections::BTreeMap;

use super::{CausalQuery, JointTable, ScmError, Value};
use crate::graph::CausalGraph;

/// Computes an interventional probability from `graph` and `observational`
/// alone.
///
/// Requires a Markovian setup: `graph` must be a DAG over exactly the
/// table's variables with no symmetric edges. If the table assigns zero
/// probability to a parent configuration whose conditional the factorization
/// needs, the quantity is not identified from the inputs and a positivity
/// error is returned.
pub fn answer_l2_via_meta(
    graph: &CausalGraph,
    observational: &JointTable,
    query: &CausalQuery,
) -> Result<f64, ScmError> {
    let (event, interventions) = match query {
        CausalQuery::Interventional { event, interventions } => (event, interventions),
        CausalQuery::Observational { .. } => return Err(ScmError::WrongQueryLevel),
    };

    let vars = observational.variables();
    let mut graph_nodes: Vec<String> = graph.nodes().to_vec();
    let mut table_vars: Vec<String> = vars.to_vec();
    graph_nodes.sort();
    table_vars.sort();
    if graph_nodes != table_vars {
        return Err(ScmError::GraphTableMismatch { graph: graph_nodes, table: table_vars });
    }
    if graph.symmetric_edge_count() > 0 {
        return Err(ScmError::SymmetricEdgesUnsupported);
    }
    if graph.directed_part_has_cycle() {
        return Err(ScmError::CyclicGraph);
    }

    // Everything below works in table index space.
    let resolve = |conj: &[(String, Value)]| -> Result<Vec<(usize, Value)>, ScmError> {
        conj.iter()
            .map(|(name, value)| {
                let i = observational
                    .index_of(name)
                    .ok_or_else(|| ScmError::UnknownVariable(name.clone()))?;
                if !observational.domains()[i].contains(value) {
                    return Err(ScmError::OutOfDomain { variable: name.clone(), value: *value });
                }
                Ok((i, *value))
            })
            .collect()
    };
    let event = resolve(event)?;
    let interventions = resolve(interventions)?;
    let mut pinned: BTreeMap<usize, Value> = BTreeMap::new();
    for &(i, v) in &interventions {
        if pinned.insert(i, v).is_some() {
            return Err(ScmError::DuplicateIntervention(vars[i].clone()));
        }
    }

    // Graph parent sets mapped into table indices.
    let parents_of: Vec<Vec<usize>> = (0..vars.len())
        .map(|ti| {
            let gi = graph.node_index(&vars[ti]).expect("node sets match");
            graph
                .parents(gi)
                .into_iter()
                .map(|gp| {
                    observational.index_of(&graph.nodes()[gp]).expect("node sets match")
                })
                .collect()
        })
        .collect();

    // Family and parent marginals per non-intervened variable, keyed by
    // values in (parents..., self) order.
    struct Family {
        variable: usize,
        parents: Vec<usize>,
        family_probs: BTreeMap<Vec<Value>, f64>,
        parent_probs: BTreeMap<Vec<Value>, f64>,
    }
    let mut families = Vec::new();
    for v in 0..vars.len() {
        if pinned.contains_key(&v) {
            continue;
        }
        let parents = parents_of[v].clone();
        let mut family_probs: BTreeMap<Vec<Value>, f64> = BTreeMap::new();
        let mut parent_probs: BTreeMap<Vec<Value>, f64> = BTreeMap::new();
        for (cfg, p) in observational.entries() {
            let parent_key: Vec<Value> = parents.iter().map(|&i| cfg[i]).collect();
            let mut family_key = parent_key.clone();
            family_key.push(cfg[v]);
            *family_probs.entry(family_key).or_insert(0.0) += p;
            *parent_probs.entry(parent_key).or_insert(0.0) += p;
        }
        families.push(Family { variable: v, parents, family_probs, parent_probs });
    }

    // Enumerate configurations with intervened variables pinned and sum the
    // truncated product over those satisfying the event.
    let domains = observational.domains();
    let mut answer = 0.0;
    let mut config: Vec<Value> = (0..vars.len())
        .map(|i| pinned.get(&i).copied().unwrap_or(domains[i][0]))
        .collect();
    let free: Vec<usize> = (0..vars.len()).filter(|i| !pinned.contains_key(i)).collect();
    let mut counters = vec![0usize; free.len()];
    loop {
        for (slot, &i) in free.iter().enumerate() {
            config[i] = domains[i][counters[slot]];
        }
        let mut product = 1.0;
        let mut undefined: Option<(usize, Vec<Value>)> = None;
        for fam in &families {
            let parent_key: Vec<Value> = fam.parents.iter().map(|&i| config[i]).collect();
            let parent_p = fam.parent_probs.get(&parent_key).copied().unwrap_or(0.0);
            if parent_p == 0.0 {
                undefined.get_or_insert((fam.variable, parent_key));
                continue;
            }
            let mut family_key = parent_key;
            family_key.push(config[fam.variable]);
            let family_p = fam.family_probs.get(&family_key).copied().unwrap_or(0.0);
            product *= family_p / parent_p;
        }
        if product != 0.0 {
            if let Some((variable, parent_cfg)) = undefined {
                return Err(ScmError::PositivityViolated {
                    variable: vars[variable].clone(),
                    config: parent_cfg,
                });
            }
            if event.iter().all(|&(i, v)| config[i] == v) {
                answer += product;
            }
        }
        // Advance the mixed-radix counter over the free variables.
        let mut pos = free.len();
        loop {
            if pos == 0 {
                return Ok(answer);
            }
            pos -= 1;
            counters[pos] += 1;
            if counters[pos] < domains[free[pos]].len() {
                break;
            }
            counters[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{CausalQuery, JointTable};
    use super::*;
    use crate::graph::{CausalGraph, EdgeState};

    const TOL: f64 = 1e-12;

    fn fork_graph() -> CausalGraph {
        let mut g = CausalGraph::new(["x", "y", "z"]).unwrap();
        g.set_directed("z", "x").unwrap();
        g.set_directed("z", "y").unwrap();
        g
    }

    #[test]
    fn fork_intervention_matches_observational_marginal() {
        // With x ← z → y, intervening on x cannot move y, so the answer must
        // equal the plain marginal 1/4.
        let m = confounder_observed();
        let table = m.joint_distribution().unwrap();
        let q = CausalQuery::interventional(vec![("y".into(), 1)], vec![("x".into(), 1)]);
        let meta = answer_l2_via_meta(&fork_graph(), &table, &q).unwrap();
        assert!((meta - 0.25).abs() <= TOL);
        let marginal = table.event_prob(&vec![("y".into(), 1)]).unwrap();
        assert!((meta - marginal).abs() <= TOL);
    }

    #[test]
    fn leaf_intervention_leaves_other_marginals_unchanged() {
        let m = confounder_observed();
        let table = m.joint_distribution().unwrap();
        // y is a leaf of the fork graph.
        for (var, val) in [("x", 0), ("x", 1), ("z", 0), ("z", 1)] {
            for target in [0, 1] {
                let q = CausalQuery::interventional(
                    vec![(var.into(), target)],
                    vec![("y".into(), val)],
                );
                let meta = answer_l2_via_meta(&fork_graph(), &table, &q).unwrap();
                let marginal = table.event_prob(&vec![(var.to_string(), target)]).unwrap();
                assert!((meta - marginal).abs() <= TOL, "do(y={val}) moved P({var}={target})");
            }
        }
    }

    #[test]
    fn chain_truncation_matches_direct_answer() {
        // Hand-built 3-chain a → b → c with private noise on each node, so
        // both routes (truncated factorization vs. intervening in the model)
        // are defined everywhere and must agree to enumeration accuracy.
        use super::super::spec::*;
        let noisy_or = |parents: Vec<String>| RuleSpec::Table {
            parents,
            rows: vec![
                TableRow { when: vec![0, 0], value: 0 },
                TableRow { when: vec![0, 1], value: 1 },
                TableRow { when: vec![1, 0], value: 1 },
                TableRow { when: vec![1, 1], value: 1 },
            ],
        };
        let spec = ScmSpec {
            name: "chain".into(),
            endogenous: vec![
                EndoSpec {
                    name: "a".into(),
                    domain: vec![0, 1],
                    assignment: RuleSpec::Affine {
                        terms: vec![AffineTerm { coef: 1, var: "u1".into() }],
                        intercept: 0,
                    },
                },
                EndoSpec {
                    name: "b".into(),
                    domain: vec![0, 1],
                    assignment: noisy_or(vec!["a".into(), "u2".into()]),
                },
                EndoSpec {
                    name: "c".into(),
                    domain: vec![0, 1],
                    assignment: noisy_or(vec!["b".into(), "u3".into()]),
                },
            ],
            exogenous: vec![
                ExoSpec { name: "u1".into(), domain: vec![0, 1], probs: vec![0.6, 0.4] },
                ExoSpec { name: "u2".into(), domain: vec![0, 1], probs: vec![0.7, 0.3] },
                ExoSpec { name: "u3".into(), domain: vec![0, 1], probs: vec![0.8, 0.2] },
            ],
        };
        let m = super::super::StructuralCausalModel::from_spec(&spec).unwrap();
        let table = m.joint_distribution().unwrap();
        let mut g = CausalGraph::new(["a", "b", "c"]).unwrap();
        g.set_directed("a", "b").unwrap();
        g.set_directed("b", "c").unwrap();

        for a_val in [0, 1] {
            for c_val in [0, 1] {
                let q = CausalQuery::interventional(
                    vec![("c".into(), c_val)],
                    vec![("a".into(), a_val)],
                );
                let meta = answer_l2_via_meta(&g, &table, &q).unwrap();
                let direct = m.answer_query(&q).unwrap();
                assert!(
                    (meta - direct).abs() <= TOL,
                    "do(a={a_val}) → c={c_val}: meta {meta} vs direct {direct}"
                );
            }
        }
    }

    #[test]
    fn symmetric_edges_are_unsupported() {
        let m = confounder_observed();
        let table = m.joint_distribution().unwrap();
        let mut g = fork_graph();
        g.set_state_by_label("x", "y", EdgeState::Symmetric).unwrap();
        let q = CausalQuery::interventional(vec![("y".into(), 1)], vec![("x".into(), 1)]);
        assert!(matches!(
            answer_l2_via_meta(&g, &table, &q),
            Err(ScmError::SymmetricEdgesUnsupported)
        ));
    }

    #[test]
    fn variable_mismatch_is_an_input_error() {
        let m = confounded_pair();
        let table = m.joint_distribution().unwrap(); // x, y only
        let q = CausalQuery::interventional(vec![("y".into(), 1)], vec![("x".into(), 1)]);
        assert!(matches!(
            answer_l2_via_meta(&fork_graph(), &table, &q),
            Err(ScmError::GraphTableMismatch { .. })
        ));
    }

    #[test]
    fn observational_query_is_the_wrong_level() {
        let m = confounder_observed();
        let table = m.joint_distribution().unwrap();
        let q = CausalQuery::marginal(vec![("y".into(), 1)]);
        assert!(matches!(
            answer_l2_via_meta(&fork_graph(), &table, &q),
            Err(ScmError::WrongQueryLevel)
        ));
    }

    #[test]
    fn positivity_violation_is_reported() {
        // b deterministically copies a, so the parent configuration
        // (a=0, b=1) of c has zero mass; pinning b to 1 forces the
        // factorization to need P(c | a=0, b=1), which the table cannot give.
        let table = JointTable::from_entries(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![0, 1], vec![0, 1]],
            vec![
                (vec![0, 0, 0], 0.25),
                (vec![0, 0, 1], 0.25),
                (vec![1, 1, 0], 0.25),
                (vec![1, 1, 1], 0.25),
            ],
        );
        let mut g = CausalGraph::new(["a", "b", "c"]).unwrap();
        g.set_directed("a", "b").unwrap();
        g.set_directed("a", "c").unwrap();
        g.set_directed("b", "c").unwrap();
        let q = CausalQuery::interventional(vec![("c".into(), 1)], vec![("b".into(), 1)]);
        match answer_l2_via_meta(&g, &table, &q) {
            Err(ScmError::PositivityViolated { variable, config }) => {
                assert_eq!(variable, "c");
                assert_eq!(config, vec![0, 1]);
            }
            other => panic!("expected positivity violation, got {other:?}"),
        }
    }
}
