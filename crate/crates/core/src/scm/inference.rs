//! Exact enumeration over the exogenous product space: joint distributions
//! over the endogenous variables and observational/interventional query
//! answering.

use std::collections::BTreeMap;

use super::{
    CartesianProduct, CausalQuery, EventConjunction, ScmError, StructuralCausalModel, Value,
    DEFAULT_ENUMERATION_CAP,
};

/// A probability table over a set of variables with explicit finite domains.
/// Only configurations with nonzero probability are stored; anything absent
/// has probability exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    variables: Vec<String>,
    domains: Vec<Vec<Value>>,
    probs: BTreeMap<Vec<Value>, f64>,
}

impl JointTable {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn domains(&self) -> &[Vec<Value>] {
        &self.domains
    }

    pub fn index_of(&self, variable: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == variable)
    }

    /// Probability of one full configuration (in table variable order).
    pub fn prob(&self, config: &[Value]) -> f64 {
        self.probs.get(config).copied().unwrap_or(0.0)
    }

    /// Nonzero entries in deterministic (lexicographic) order.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<Value>, f64)> {
        self.probs.iter().map(|(k, &v)| (k, v))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Probability of a conjunction of variable = value literals. An empty
    /// conjunction is the certain event.
    pub fn event_prob(&self, event: &EventConjunction) -> Result<f64, ScmError> {
        let literals = self.resolve(event)?;
        Ok(self
            .probs
            .iter()
            .filter(|(cfg, _)| literals.iter().all(|&(i, v)| cfg[i] == v))
            .map(|(_, p)| p)
            .sum())
    }

    fn resolve(&self, event: &EventConjunction) -> Result<Vec<(usize, Value)>, ScmError> {
        event
            .iter()
            .map(|(name, value)| {
                let i = self
                    .index_of(name)
                    .ok_or_else(|| ScmError::UnknownVariable(name.clone()))?;
                if !self.domains[i].contains(value) {
                    return Err(ScmError::OutOfDomain { variable: name.clone(), value: *value });
                }
                Ok((i, *value))
            })
            .collect()
    }

    /// Marginal table over a subset of variables, in the order given.
    pub fn marginal(&self, variables: &[String]) -> Result<JointTable, ScmError> {
        let idx: Vec<usize> = variables
            .iter()
            .map(|v| self.index_of(v).ok_or_else(|| ScmError::UnknownVariable(v.clone())))
            .collect::<Result<_, _>>()?;
        let mut probs: BTreeMap<Vec<Value>, f64> = BTreeMap::new();
        for (cfg, p) in &self.probs {
            let key: Vec<Value> = idx.iter().map(|&i| cfg[i]).collect();
            *probs.entry(key).or_insert(0.0) += p;
        }
        Ok(JointTable {
            variables: variables.to_vec(),
            domains: idx.iter().map(|&i| self.domains[i].clone()).collect(),
            probs,
        })
    }

    /// Builds a table directly from explicit entries; zero-probability
    /// entries are dropped. Used where an observational table arrives from
    /// outside a model.
    pub fn from_entries(
        variables: Vec<String>,
        domains: Vec<Vec<Value>>,
        entries: impl IntoIterator<Item = (Vec<Value>, f64)>,
    ) -> JointTable {
        let probs = entries.into_iter().filter(|(_, p)| *p != 0.0).collect();
        JointTable { variables, domains, probs }
    }
}

impl StructuralCausalModel {
    /// Product of the exogenous domain sizes: how many configurations exact
    /// enumeration must visit.
    pub fn exogenous_configuration_count(&self) -> u128 {
        self.exo_domains
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    /// Every exogenous configuration with its endogenous valuation and
    /// probability weight. The backbone of all exact inference here.
    pub fn enumerate_configurations(
        &self,
        cap: u128,
    ) -> Result<Vec<(Vec<Value>, Vec<Value>, f64)>, ScmError> {
        let needed = self.exogenous_configuration_count();
        if needed > cap {
            return Err(ScmError::EnumerationCapExceeded { needed, cap });
        }
        let domains: Vec<&[Value]> = self.exo_domains.iter().map(|d| d.as_slice()).collect();
        let mut out = Vec::new();
        for exo_cfg in CartesianProduct::new(&domains) {
            let mut weight = 1.0;
            for (j, v) in exo_cfg.iter().enumerate() {
                let k = self.exo_domains[j].iter().position(|d| d == v).expect("value from domain");
                weight *= self.exo_probs[j][k];
            }
            let endo = self.evaluate(&exo_cfg);
            out.push((exo_cfg, endo, weight));
        }
        Ok(out)
    }

    /// Exact joint distribution over the endogenous variables, computed with
    /// the default enumeration cap.
    pub fn joint_distribution(&self) -> Result<JointTable, ScmError> {
        self.joint_distribution_capped(DEFAULT_ENUMERATION_CAP)
    }

    pub fn joint_distribution_capped(&self, cap: u128) -> Result<JointTable, ScmError> {
        let mut probs: BTreeMap<Vec<Value>, f64> = BTreeMap::new();
        for (_, endo, weight) in self.enumerate_configurations(cap)? {
            if weight != 0.0 {
                *probs.entry(endo).or_insert(0.0) += weight;
            }
        }
        Ok(JointTable {
            variables: self.endo_names.clone(),
            domains: self.endo_domains.clone(),
            probs,
        })
    }

    /// Answers an observational or interventional query exactly.
    ///
    /// Observational events and conditions are marginals of the joint;
    /// interventional queries are marginals of the intervened model's joint,
    /// so `answer_query(m, P(e | do(x)))` and
    /// `answer_query(m.intervene(x), P(e))` run the identical computation.
    pub fn answer_query(&self, query: &CausalQuery) -> Result<f64, ScmError> {
        match query {
            CausalQuery::Observational { event, given } => {
                let joint = self.joint_distribution()?;
                if given.is_empty() {
                    return joint.event_prob(event);
                }
                let given_p = joint.event_prob(given)?;
                if given_p == 0.0 {
                    return Err(ScmError::ZeroProbabilityCondition);
                }
                let mut both = event.clone();
                both.extend(given.iter().cloned());
                Ok(joint.event_prob(&both)? / given_p)
            }
            CausalQuery::Interventional { event, interventions } => {
                let done = self.intervene(interventions)?;
                done.joint_distribution()?.event_prob(event)
            }
        }
    }
}
