//! On-disk description format for structural causal models.
//!
//! A model file is a JSON document listing endogenous variables (name,
//! explicit domain, assignment), and exogenous variables (name, domain,
//! probability table). Assignments are finite lookup tables, integer-affine
//! expressions over parents, or constants. Unknown fields are rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    Assignment, AssignmentRule, CartesianProduct, Parent, ScmError, StructuralCausalModel, Value,
    PROBABILITY_TOLERANCE,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScmSpec {
    pub name: String,
    pub endogenous: Vec<EndoSpec>,
    pub exogenous: Vec<ExoSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndoSpec {
    pub name: String,
    pub domain: Vec<Value>,
    pub assignment: RuleSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExoSpec {
    pub name: String,
    pub domain: Vec<Value>,
    /// One probability per domain value, same order; must sum to 1.
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleSpec {
    /// Total lookup table over the declared parents.
    Table { parents: Vec<String>, rows: Vec<TableRow> },
    /// intercept + Σ coef·var; the parent list is the terms' variables.
    Affine { terms: Vec<AffineTerm>, intercept: i64 },
    Constant { value: Value },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub when: Vec<Value>,
    pub value: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineTerm {
    pub coef: i64,
    pub var: String,
}

/// Loads and validates a model description file.
pub fn load_scm(path: impl AsRef<Path>) -> Result<StructuralCausalModel, ScmError> {
    let text = std::fs::read_to_string(path)?;
    let spec: ScmSpec = serde_json::from_str(&text)?;
    StructuralCausalModel::from_spec(&spec)
}

impl StructuralCausalModel {
    /// Validates a description and builds the model. Checks, in order: name
    /// uniqueness and endo/exo disjointness, domain validity, probability
    /// tables, parent resolution, table totality, assignment range, and
    /// acyclicity of the endogenous dependency relation.
    pub fn from_spec(spec: &ScmSpec) -> Result<Self, ScmError> {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for e in &spec.endogenous {
            if !seen.insert(&e.name) {
                return Err(ScmError::DuplicateVariable(e.name.clone()));
            }
        }
        for x in &spec.exogenous {
            if spec.endogenous.iter().any(|e| e.name == x.name) {
                return Err(ScmError::EndoExoOverlap(x.name.clone()));
            }
            if !seen.insert(&x.name) {
                return Err(ScmError::DuplicateVariable(x.name.clone()));
            }
        }

        let check_domain = |name: &str, domain: &[Value]| -> Result<(), ScmError> {
            if domain.is_empty() {
                return Err(ScmError::EmptyDomain(name.to_string()));
            }
            let mut seen = BTreeSet::new();
            for &v in domain {
                if !seen.insert(v) {
                    return Err(ScmError::DuplicateDomainValue(name.to_string(), v));
                }
            }
            Ok(())
        };
        for e in &spec.endogenous {
            check_domain(&e.name, &e.domain)?;
        }
        for x in &spec.exogenous {
            check_domain(&x.name, &x.domain)?;
            if x.probs.len() != x.domain.len() {
                return Err(ScmError::ProbabilityArity {
                    name: x.name.clone(),
                    got: x.probs.len(),
                    expected: x.domain.len(),
                });
            }
            if let Some(&p) = x.probs.iter().find(|&&p| p < 0.0) {
                return Err(ScmError::NegativeProbability { name: x.name.clone(), p });
            }
            let sum: f64 = x.probs.iter().sum();
            if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
                return Err(ScmError::BadProbabilitySum { name: x.name.clone(), sum });
            }
        }

        let endo_index: BTreeMap<&str, usize> =
            spec.endogenous.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect();
        let exo_index: BTreeMap<&str, usize> =
            spec.exogenous.iter().enumerate().map(|(i, x)| (x.name.as_str(), i)).collect();

        let resolve = |child: &str, name: &str| -> Result<Parent, ScmError> {
            if let Some(&i) = endo_index.get(name) {
                Ok(Parent::Endogenous(i))
            } else if let Some(&j) = exo_index.get(name) {
                Ok(Parent::Exogenous(j))
            } else {
                Err(ScmError::UnknownParent { child: child.to_string(), parent: name.to_string() })
            }
        };

        let mut assignments = Vec::with_capacity(spec.endogenous.len());
        for e in &spec.endogenous {
            let (parent_names, rule) = match &e.assignment {
                RuleSpec::Table { parents, rows } => {
                    let mut table = BTreeMap::new();
                    for row in rows {
                        if row.when.len() != parents.len() {
                            return Err(ScmError::ForeignTableRow {
                                child: e.name.clone(),
                                row: row.when.clone(),
                            });
                        }
                        if table.insert(row.when.clone(), row.value).is_some() {
                            return Err(ScmError::DuplicateTableRow {
                                child: e.name.clone(),
                                row: row.when.clone(),
                            });
                        }
                    }
                    (parents.clone(), AssignmentRule::Table(table))
                }
                RuleSpec::Affine { terms, intercept } => (
                    terms.iter().map(|t| t.var.clone()).collect(),
                    AssignmentRule::Affine {
                        coefficients: terms.iter().map(|t| t.coef).collect(),
                        intercept: *intercept,
                    },
                ),
                RuleSpec::Constant { value } => (Vec::new(), AssignmentRule::Constant(*value)),
            };
            let mut parents = Vec::with_capacity(parent_names.len());
            let mut seen_parents = BTreeSet::new();
            for name in &parent_names {
                if !seen_parents.insert(name.clone()) {
                    return Err(ScmError::DuplicateParent {
                        child: e.name.clone(),
                        parent: name.clone(),
                    });
                }
                parents.push(resolve(&e.name, name)?);
            }
            assignments.push(Assignment { parents, rule });
        }

        let model = StructuralCausalModel {
            name: spec.name.clone(),
            endo_names: spec.endogenous.iter().map(|e| e.name.clone()).collect(),
            endo_domains: spec.endogenous.iter().map(|e| e.domain.clone()).collect(),
            exo_names: spec.exogenous.iter().map(|x| x.name.clone()).collect(),
            exo_domains: spec.exogenous.iter().map(|x| x.domain.clone()).collect(),
            exo_probs: spec.exogenous.iter().map(|x| x.probs.clone()).collect(),
            assignments,
            topo: Vec::new(),
        };

        let mut model = model;
        model.topo = endogenous_topological_order(&model)?;
        validate_totality_and_range(&model)?;
        Ok(model)
    }

    /// The description this model round-trips through.
    pub fn to_spec(&self) -> ScmSpec {
        ScmSpec {
            name: self.name.clone(),
            endogenous: self
                .endo_names
                .iter()
                .zip(&self.endo_domains)
                .zip(&self.assignments)
                .map(|((name, domain), a)| EndoSpec {
                    name: name.clone(),
                    domain: domain.clone(),
                    assignment: match &a.rule {
                        AssignmentRule::Table(rows) => RuleSpec::Table {
                            parents: a.parents.iter().map(|p| self.parent_name(*p)).collect(),
                            rows: rows
                                .iter()
                                .map(|(when, value)| TableRow { when: when.clone(), value: *value })
                                .collect(),
                        },
                        AssignmentRule::Affine { coefficients, intercept } => RuleSpec::Affine {
                            terms: coefficients
                                .iter()
                                .zip(&a.parents)
                                .map(|(c, p)| AffineTerm { coef: *c, var: self.parent_name(*p) })
                                .collect(),
                            intercept: *intercept,
                        },
                        AssignmentRule::Constant(v) => RuleSpec::Constant { value: *v },
                    },
                })
                .collect(),
            exogenous: self
                .exo_names
                .iter()
                .zip(&self.exo_domains)
                .zip(&self.exo_probs)
                .map(|((name, domain), probs)| ExoSpec {
                    name: name.clone(),
                    domain: domain.clone(),
                    probs: probs.clone(),
                })
                .collect(),
        }
    }
}

/// Topological order of the endogenous dependency relation, or a structural
/// error naming one cycle.
fn endogenous_topological_order(m: &StructuralCausalModel) -> Result<Vec<usize>, ScmError> {
    let n = m.endo_names.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (child, a) in m.assignments.iter().enumerate() {
        for p in &a.parents {
            if let Parent::Endogenous(i) = p {
                children[*i].push(child);
                indegree[child] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    let mut pos = 0;
    while pos < queue.len() {
        let v = queue[pos];
        pos += 1;
        order.push(v);
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                queue.push(c);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Walk parent links among the leftover nodes until one repeats.
    let leftover: BTreeSet<usize> = (0..n).filter(|i| !order.contains(i)).collect();
    let start = *leftover.iter().next().expect("cycle exists");
    let mut path = vec![start];
    let mut current = start;
    loop {
        let next = m.assignments[current]
            .parents
            .iter()
            .find_map(|p| match p {
                Parent::Endogenous(i) if leftover.contains(i) => Some(*i),
                _ => None,
            })
            .expect("every leftover node has a leftover parent");
        if let Some(found) = path.iter().position(|&v| v == next) {
            let mut cycle: Vec<String> =
                path[found..].iter().map(|&i| m.endo_names[i].clone()).collect();
            cycle.push(m.endo_names[next].clone());
            return Err(ScmError::CycleDetected { cycle });
        }
        path.push(next);
        current = next;
    }
}

/// Every lookup table must cover the full parent domain product exactly, and
/// every assignment output must land in the child's declared domain.
fn validate_totality_and_range(m: &StructuralCausalModel) -> Result<(), ScmError> {
    for (c, a) in m.assignments.iter().enumerate() {
        let child = &m.endo_names[c];
        let domains: Vec<&[Value]> = a.parents.iter().map(|p| m.parent_domain(*p)).collect();
        let mut size: u128 = 1;
        for d in &domains {
            size = size.saturating_mul(d.len() as u128);
        }
        if size > super::DEFAULT_ENUMERATION_CAP {
            return Err(ScmError::EnumerationCapExceeded {
                needed: size,
                cap: super::DEFAULT_ENUMERATION_CAP,
            });
        }
        if let AssignmentRule::Table(rows) = &a.rule {
            for key in rows.keys() {
                let fits = key.len() == domains.len()
                    && key.iter().zip(&domains).all(|(v, d)| d.contains(v));
                if !fits {
                    return Err(ScmError::ForeignTableRow { child: child.clone(), row: key.clone() });
                }
            }
        }
        for cfg in CartesianProduct::new(&domains) {
            match a.evaluate(&cfg) {
                None => {
                    return Err(ScmError::IncompleteTable { child: child.clone(), missing: cfg })
                }
                Some(v) if !m.endo_domains[c].contains(&v) => {
                    return Err(ScmError::ValueOutsideDomain { child: child.clone(), value: v })
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_spec_json() -> String {
        r#"{
            "name": "tiny",
            "endogenous": [
                {"name": "x", "domain": [0, 1],
                 "assignment": {"kind": "affine",
                                "terms": [{"coef": 1, "var": "e"}],
                                "intercept": 0}}
            ],
            "exogenous": [
                {"name": "e", "domain": [0, 1], "probs": [0.25, 0.75]}
            ]
        }"#
        .to_string()
    }

    #[test]
    fn loads_minimal_model_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.json");
        std::fs::write(&path, minimal_spec_json()).unwrap();
        let m = load_scm(&path).unwrap();
        assert_eq!(m.name(), "tiny");
        assert_eq!(m.endogenous_names(), &["x"]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = minimal_spec_json().replace("\"name\": \"tiny\",", "\"name\": \"tiny\", \"extra\": 1,");
        let err = serde_json::from_str::<ScmSpec>(&text).unwrap_err();
        assert!(err.to_string().contains("extra"));
    }

    #[test]
    fn bad_probability_sum_is_rejected() {
        let text = minimal_spec_json().replace("[0.25, 0.75]", "[0.25, 0.7]");
        let spec: ScmSpec = serde_json::from_str(&text).unwrap();
        assert!(matches!(
            StructuralCausalModel::from_spec(&spec),
            Err(ScmError::BadProbabilitySum { .. })
        ));
    }

    #[test]
    fn incomplete_table_is_rejected() {
        let spec = ScmSpec {
            name: "partial".into(),
            endogenous: vec![EndoSpec {
                name: "x".into(),
                domain: vec![0, 1],
                assignment: RuleSpec::Table {
                    parents: vec!["e".into()],
                    rows: vec![TableRow { when: vec![0], value: 0 }],
                },
            }],
            exogenous: vec![ExoSpec {
                name: "e".into(),
                domain: vec![0, 1],
                probs: vec![0.5, 0.5],
            }],
        };
        assert!(matches!(
            StructuralCausalModel::from_spec(&spec),
            Err(ScmError::IncompleteTable { .. })
        ));
    }

    #[test]
    fn out_of_domain_assignment_output_is_rejected() {
        let text = minimal_spec_json().replace("\"intercept\": 0", "\"intercept\": 5");
        let spec: ScmSpec = serde_json::from_str(&text).unwrap();
        assert!(matches!(
            StructuralCausalModel::from_spec(&spec),
            Err(ScmError::ValueOutsideDomain { .. })
        ));
    }

    #[test]
    fn endo_exo_overlap_is_rejected() {
        let text = minimal_spec_json().replace("\"name\": \"e\", \"domain\": [0, 1]", "\"name\": \"x\", \"domain\": [0, 1]");
        let spec: ScmSpec = serde_json::from_str(&text).unwrap();
        // The assignment now references `e` which no longer exists, but the
        // overlap check fires first.
        assert!(matches!(
            StructuralCausalModel::from_spec(&spec),
            Err(ScmError::EndoExoOverlap(_))
        ));
    }

    #[test]
    fn spec_round_trip_preserves_model() {
        let spec: ScmSpec = serde_json::from_str(&minimal_spec_json()).unwrap();
        let m = StructuralCausalModel::from_spec(&spec).unwrap();
        let again = StructuralCausalModel::from_spec(&m.to_spec()).unwrap();
        assert_eq!(m, again);
    }
}
