//! Exact representation and inference for finite-domain acyclic structural
//! causal models.
//!
//! A model has disjoint endogenous and exogenous variable sets, explicit
//! finite domains (integer-valued; real-valued models are represented on a
//! user-chosen integer grid), one structural assignment per endogenous
//! variable with a declared parent list, and mutually independent exogenous
//! probability tables. All inference is exact enumeration over the exogenous
//! product space; cyclic models and non-finite domains are unsupported.

mod inference;
mod meta;
mod spec;

pub use inference::JointTable;
pub use meta::answer_l2_via_meta;
pub use spec::{load_scm, AffineTerm, EndoSpec, ExoSpec, RuleSpec, ScmSpec, TableRow};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{CausalGraph, EdgeState};

/// Domain values are integers; a "finite grid" over the reals is represented
/// by its integer grid indices or scaled values.
pub type Value = i64;

/// Enumerating more exogenous configurations than this is refused by default.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

/// Tolerance for probability-table validity checks.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ScmError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("`{0}` is declared both endogenous and exogenous")]
    EndoExoOverlap(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("duplicate domain value {1} for variable `{0}`")]
    DuplicateDomainValue(String, Value),
    #[error("exogenous table for `{name}` sums to {sum}, expected 1 within {PROBABILITY_TOLERANCE}")]
    BadProbabilitySum { name: String, sum: f64 },
    #[error("exogenous table for `{name}` has negative probability {p}")]
    NegativeProbability { name: String, p: f64 },
    #[error("exogenous table for `{name}` has {got} probabilities for {expected} domain values")]
    ProbabilityArity { name: String, got: usize, expected: usize },
    #[error("assignment of `{child}` names `{parent}` which is not a declared variable")]
    UnknownParent { child: String, parent: String },
    #[error("assignment of `{child}` lists parent `{parent}` twice")]
    DuplicateParent { child: String, parent: String },
    #[error("lookup table for `{child}` is missing a row for parent values {missing:?}")]
    IncompleteTable { child: String, missing: Vec<Value> },
    #[error("lookup table for `{child}` has a row {row:?} that does not match the parent domains")]
    ForeignTableRow { child: String, row: Vec<Value> },
    #[error("lookup table for `{child}` defines parent values {row:?} twice")]
    DuplicateTableRow { child: String, row: Vec<Value> },
    #[error("assignment of `{child}` produces {value}, outside its declared domain")]
    ValueOutsideDomain { child: String, value: Value },
    #[error("endogenous dependencies contain a cycle: {}", cycle.join(" -> "))]
    CycleDetected { cycle: Vec<String> },
    #[error("enumeration needs {needed} configurations, over the cap of {cap}; exact inference refuses, consider a smaller model (sampling is out of scope)")]
    EnumerationCapExceeded { needed: u128, cap: u128 },
    #[error("conditioning event has probability zero; the conditional is undefined")]
    ZeroProbabilityCondition,
    #[error("`{0}` is exogenous; only endogenous variables can be intervened on or queried")]
    NotEndogenous(String),
    #[error("value {value} is not in the domain of `{variable}`")]
    OutOfDomain { variable: String, value: Value },
    #[error("query is observational but an interventional one was required (or vice versa)")]
    WrongQueryLevel,
    #[error("graph nodes {graph:?} do not match table variables {table:?}")]
    GraphTableMismatch { graph: Vec<String>, table: Vec<String> },
    #[error("graph has symmetric edges; interventional answers from an observational table require a fully directed acyclic graph")]
    SymmetricEdgesUnsupported,
    #[error("graph over the observational variables is cyclic")]
    CyclicGraph,
    #[error("observational table gives zero probability to parent configuration {config:?} of `{variable}`; the required conditional is undefined")]
    PositivityViolated { variable: String, config: Vec<Value> },
    #[error("duplicate assignment to `{0}` in an intervention")]
    DuplicateIntervention(String),
    #[error("reading model description: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing model description: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Reference to a resolved parent variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parent {
    Endogenous(usize),
    Exogenous(usize),
}

/// The total function attached to one endogenous variable.
#[derive(Debug, Clone, PartialEq)]
pub enum AssignmentRule {
    /// Explicit finite lookup table keyed by parent values in declared order.
    Table(BTreeMap<Vec<Value>, Value>),
    /// Integer-affine combination of the parents, in declared order.
    Affine { coefficients: Vec<i64>, intercept: i64 },
    /// A constant with an empty parent list (also what interventions produce).
    Constant(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub parents: Vec<Parent>,
    pub rule: AssignmentRule,
}

impl Assignment {
    fn evaluate(&self, parent_values: &[Value]) -> Option<Value> {
        match &self.rule {
            AssignmentRule::Table(rows) => rows.get(parent_values).copied(),
            AssignmentRule::Affine { coefficients, intercept } => {
                let mut acc = *intercept;
                for (c, v) in coefficients.iter().zip(parent_values) {
                    acc += c * v;
                }
                Some(acc)
            }
            AssignmentRule::Constant(v) => Some(*v),
        }
    }
}

/// A validated finite-domain acyclic SCM.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralCausalModel {
    pub(crate) name: String,
    pub(crate) endo_names: Vec<String>,
    pub(crate) endo_domains: Vec<Vec<Value>>,
    pub(crate) exo_names: Vec<String>,
    pub(crate) exo_domains: Vec<Vec<Value>>,
    pub(crate) exo_probs: Vec<Vec<f64>>,
    pub(crate) assignments: Vec<Assignment>,
    /// Endogenous indices in a valid evaluation order.
    pub(crate) topo: Vec<usize>,
}

impl StructuralCausalModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn endogenous_names(&self) -> &[String] {
        &self.endo_names
    }

    pub fn exogenous_names(&self) -> &[String] {
        &self.exo_names
    }

    pub fn endogenous_domain(&self, name: &str) -> Option<&[Value]> {
        self.endo_index(name).map(|i| self.endo_domains[i].as_slice())
    }

    pub(crate) fn endo_index(&self, name: &str) -> Option<usize> {
        self.endo_names.iter().position(|n| n == name)
    }

    /// The graph implied by the declared parent lists: a directed edge for
    /// every endogenous parent and a symmetric edge between every pair of
    /// endogenous variables sharing an exogenous parent. A pair that is both
    /// directly connected and confounded keeps the directed edge, since the
    /// four-state graph holds one state per pair and direct parenthood is the
    /// stronger claim. Cycles are impossible here: construction already
    /// rejects them (naming the cycle).
    pub fn induced_graph(&self) -> CausalGraph {
        self.induced_graph_of(&self.assignments)
    }

    /// Like [`induced_graph`](Self::induced_graph) but with declared parents
    /// that the minimality audit proves non-essential removed first. Only the
    /// parent lists are pruned; the assignment rules themselves are left
    /// alone, which is all the graph construction reads.
    pub fn induced_graph_pruned(&self) -> Result<CausalGraph, ScmError> {
        let audit = self.non_essential_parents()?;
        let mut pruned = self.assignments.clone();
        for (child, parent) in &audit {
            let c = self.endo_index(child).expect("audit names a declared child");
            pruned[c].parents.retain(|p| self.parent_name(*p) != *parent);
        }
        Ok(self.induced_graph_of(&pruned))
    }

    fn parent_name(&self, p: Parent) -> String {
        match p {
            Parent::Endogenous(i) => self.endo_names[i].clone(),
            Parent::Exogenous(j) => self.exo_names[j].clone(),
        }
    }

    fn induced_graph_of(&self, assignments: &[Assignment]) -> CausalGraph {
        let mut g = CausalGraph::new(self.endo_names.clone())
            .expect("validated names are unique");
        // Symmetric edges first so that directed edges overwrite them.
        let mut exo_children: Vec<Vec<usize>> = vec![Vec::new(); self.exo_names.len()];
        for (child, a) in assignments.iter().enumerate() {
            for p in &a.parents {
                if let Parent::Exogenous(j) = p {
                    exo_children[*j].push(child);
                }
            }
        }
        for children in &exo_children {
            for (a_pos, &i) in children.iter().enumerate() {
                for &j in &children[a_pos + 1..] {
                    if i != j {
                        g.set_state(i, j, EdgeState::Symmetric);
                    }
                }
            }
        }
        for (child, a) in assignments.iter().enumerate() {
            for p in &a.parents {
                if let Parent::Endogenous(i) = p {
                    g.set_state(*i, child, EdgeState::Forward);
                }
            }
        }
        g
    }

    /// Declared (child, parent) pairs that are provably non-essential: over
    /// the full product of the child's parent domains, no change of the
    /// parent's value ever changes the assignment output. Exhaustive, so it
    /// is subject to the enumeration cap.
    pub fn non_essential_parents(&self) -> Result<Vec<(String, String)>, ScmError> {
        let mut out = Vec::new();
        for (c, a) in self.assignments.iter().enumerate() {
            let domains: Vec<&[Value]> =
                a.parents.iter().map(|p| self.parent_domain(*p)).collect();
            let mut size: u128 = 1;
            for d in &domains {
                size = size.saturating_mul(d.len() as u128);
            }
            if size > DEFAULT_ENUMERATION_CAP {
                return Err(ScmError::EnumerationCapExceeded {
                    needed: size,
                    cap: DEFAULT_ENUMERATION_CAP,
                });
            }
            for (k, parent) in a.parents.iter().enumerate() {
                let mut essential = false;
                'outer: for cfg in CartesianProduct::new(&domains) {
                    let base = a.evaluate(&cfg).expect("tables are total after validation");
                    for &alt in domains[k] {
                        if alt == cfg[k] {
                            continue;
                        }
                        let mut changed = cfg.clone();
                        changed[k] = alt;
                        let v = a.evaluate(&changed).expect("tables are total");
                        if v != base {
                            essential = true;
                            break 'outer;
                        }
                    }
                }
                if !essential {
                    out.push((self.endo_names[c].clone(), self.parent_name(*parent)));
                }
            }
        }
        Ok(out)
    }

    fn parent_domain(&self, p: Parent) -> &[Value] {
        match p {
            Parent::Endogenous(i) => &self.endo_domains[i],
            Parent::Exogenous(j) => &self.exo_domains[j],
        }
    }

    /// Returns a new model in which each assigned variable becomes a
    /// constant with an empty parent list. The original is unchanged.
    pub fn intervene(&self, assignments: &[(String, Value)]) -> Result<Self, ScmError> {
        let mut seen = BTreeSet::new();
        let mut out = self.clone();
        for (name, value) in assignments {
            let i = self
                .endo_index(name)
                .ok_or_else(|| self.missing_endogenous(name))?;
            if !seen.insert(i) {
                return Err(ScmError::DuplicateIntervention(name.clone()));
            }
            if !self.endo_domains[i].contains(value) {
                return Err(ScmError::OutOfDomain { variable: name.clone(), value: *value });
            }
            out.assignments[i] =
                Assignment { parents: Vec::new(), rule: AssignmentRule::Constant(*value) };
        }
        // Interventions only remove dependencies, so the existing order
        // remains a valid evaluation order.
        Ok(out)
    }

    fn missing_endogenous(&self, name: &str) -> ScmError {
        if self.exo_names.iter().any(|n| n == name) {
            ScmError::NotEndogenous(name.to_string())
        } else {
            ScmError::UnknownVariable(name.to_string())
        }
    }

    /// Endogenous values under one exogenous configuration, in declaration
    /// order.
    pub(crate) fn evaluate(&self, exo_values: &[Value]) -> Vec<Value> {
        let mut endo = vec![0; self.endo_names.len()];
        for &i in &self.topo {
            let a = &self.assignments[i];
            let args: Vec<Value> = a
                .parents
                .iter()
                .map(|p| match p {
                    Parent::Endogenous(k) => endo[*k],
                    Parent::Exogenous(j) => exo_values[*j],
                })
                .collect();
            endo[i] = a.evaluate(&args).expect("tables are total after validation");
        }
        endo
    }
}

/// Iterator over the cartesian product of value slices.
pub(crate) struct CartesianProduct<'a> {
    domains: &'a [&'a [Value]],
    indices: Vec<usize>,
    done: bool,
}

impl<'a> CartesianProduct<'a> {
    pub(crate) fn new(domains: &'a [&'a [Value]]) -> Self {
        let done = domains.iter().any(|d| d.is_empty());
        CartesianProduct { domains, indices: vec![0; domains.len()], done }
    }
}

impl Iterator for CartesianProduct<'_> {
    type Item = Vec<Value>;

    fn next(&mut self) -> Option<Vec<Value>> {
        if self.done {
            return None;
        }
        let current: Vec<Value> = self
            .indices
            .iter()
            .zip(self.domains)
            .map(|(&i, d)| d[i])
            .collect();
        // Advance the mixed-radix counter, least significant position last.
        let mut pos = self.domains.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.indices[pos] += 1;
            if self.indices[pos] < self.domains[pos].len() {
                break;
            }
            self.indices[pos] = 0;
        }
        Some(current)
    }
}

/// One half of a causal query: a conjunction of variable = value literals.
pub type EventConjunction = Vec<(String, Value)>;

/// An observational (L1) or interventional (L2) probability query.
/// Counterfactual queries are out of scope.
#[derive(Debug, Clone, PartialEq)]
pub enum CausalQuery {
    Observational { event: EventConjunction, given: EventConjunction },
    Interventional { event: EventConjunction, interventions: EventConjunction },
}

impl CausalQuery {
    pub fn marginal(event: EventConjunction) -> Self {
        CausalQuery::Observational { event, given: Vec::new() }
    }

    pub fn conditional(event: EventConjunction, given: EventConjunction) -> Self {
        CausalQuery::Observational { event, given }
    }

    pub fn interventional(event: EventConjunction, interventions: EventConjunction) -> Self {
        CausalQuery::Interventional { event, interventions }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::spec::*;
    use super::*;

    #[test]
    fn induced_graph_direct_cause_and_isolated_node() {
        let g = linear_grid().induced_graph();
        assert_eq!(g.nodes(), &["x", "y", "z"]);
        assert_eq!(g.state_by_label("x", "y").unwrap(), EdgeState::Forward);
        assert_eq!(g.state_by_label("x", "z").unwrap(), EdgeState::Absent);
        assert_eq!(g.state_by_label("y", "z").unwrap(), EdgeState::Absent);
    }

    #[test]
    fn induced_graph_confounding_is_symmetric() {
        let g = confounded_pair().induced_graph();
        assert_eq!(g.state_by_label("x", "y").unwrap(), EdgeState::Symmetric);
    }

    #[test]
    fn induced_graph_of_empty_model_is_empty() {
        let spec = ScmSpec { name: "empty".into(), endogenous: vec![], exogenous: vec![] };
        let m = StructuralCausalModel::from_spec(&spec).unwrap();
        let g = m.induced_graph();
        assert_eq!(g.node_count(), 0);
    }

    #[test]
    fn cycle_is_rejected_naming_the_cycle() {
        let spec = ScmSpec {
            name: "cyclic".into(),
            endogenous: vec![
                EndoSpec {
                    name: "a".into(),
                    domain: vec![0, 1],
                    assignment: RuleSpec::Affine {
                        terms: vec![AffineTerm { coef: 1, var: "b".into() }],
                        intercept: 0,
                    },
                },
                EndoSpec {
                    name: "b".into(),
                    domain: vec![0, 1],
                    assignment: RuleSpec::Affine {
                        terms: vec![AffineTerm { coef: 1, var: "a".into() }],
                        intercept: 0,
                    },
                },
            ],
            exogenous: vec![],
        };
        match StructuralCausalModel::from_spec(&spec) {
            Err(ScmError::CycleDetected { cycle }) => {
                assert!(cycle.len() >= 2, "cycle should be named, got {cycle:?}");
                assert!(cycle.contains(&"a".to_string()));
                assert!(cycle.contains(&"b".to_string()));
            }
            other => panic!("expected cycle error, got {other:?}"),
        }
    }

    #[test]
    fn minimality_audit_finds_ignored_parent() {
        // y declares x as a parent but its table ignores it.
        let spec = ScmSpec {
            name: "ignored".into(),
            endogenous: vec![
                EndoSpec {
                    name: "x".into(),
                    domain: vec![0, 1],
                    assignment: RuleSpec::Affine {
                        terms: vec![AffineTerm { coef: 1, var: "e1".into() }],
                        intercept: 0,
                    },
                },
                EndoSpec {
                    name: "y".into(),
                    domain: vec![0, 1],
                    assignment: RuleSpec::Table {
                        parents: vec!["x".into(), "e2".into()],
                        rows: vec![
                            TableRow { when: vec![0, 0], value: 0 },
                            TableRow { when: vec![0, 1], value: 1 },
                            TableRow { when: vec![1, 0], value: 0 },
                            TableRow { when: vec![1, 1], value: 1 },
                        ],
                    },
                },
            ],
            exogenous: vec![
                ExoSpec { name: "e1".into(), domain: vec![0, 1], probs: vec![0.5, 0.5] },
                ExoSpec { name: "e2".into(), domain: vec![0, 1], probs: vec![0.5, 0.5] },
            ],
        };
        let m = StructuralCausalModel::from_spec(&spec).unwrap();
        assert_eq!(m.non_essential_parents().unwrap(), vec![("y".into(), "x".into())]);
        assert_eq!(
            m.induced_graph().state_by_label("x", "y").unwrap(),
            EdgeState::Forward
        );
        assert_eq!(
            m.induced_graph_pruned().unwrap().state_by_label("x", "y").unwrap(),
            EdgeState::Absent
        );
    }

    #[test]
    fn essential_parents_are_kept_by_audit() {
        let m = confounder_observed();
        assert!(m.non_essential_parents().unwrap().is_empty());
    }

    #[test]
    fn intervention_severs_incoming_edges_and_leaves_original_unchanged() {
        let m = confounded_pair();
        let before = m.clone();
        let done = m.intervene(&[("x".into(), 1)]).unwrap();
        assert_eq!(m, before);
        let g = done.induced_graph();
        assert_eq!(g.state_by_label("x", "y").unwrap(), EdgeState::Absent);
        let xi = done.endo_index("x").unwrap();
        assert!(g.parents(xi).is_empty());
    }

    #[test]
    fn intervention_is_idempotent_and_validates_inputs() {
        let m = confounded_pair();
        let once = m.intervene(&[("x".into(), 1)]).unwrap();
        let twice = once.intervene(&[("x".into(), 1)]).unwrap();
        assert_eq!(once, twice);

        assert!(matches!(
            m.intervene(&[("nope".into(), 1)]),
            Err(ScmError::UnknownVariable(_))
        ));
        assert!(matches!(
            m.intervene(&[("e1".into(), 1)]),
            Err(ScmError::NotEndogenous(_))
        ));
        assert!(matches!(
            m.intervene(&[("x".into(), 7)]),
            Err(ScmError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn cartesian_product_covers_all_configurations() {
        let doms: Vec<&[Value]> = vec![&[0, 1], &[10, 20, 30]];
        let all: Vec<Vec<Value>> = CartesianProduct::new(&doms).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 10]);
        assert_eq!(all[5], vec![1, 30]);
    }
}
