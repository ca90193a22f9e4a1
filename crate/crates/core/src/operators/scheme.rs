use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How vertex and edge weights are attached to a Cayley graph.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorWeightScheme<S> {
    /// Simple random walk: `m_V = 1`, `m_E = 1/deg`, so `Δ = I - M`.
    Combinatorial,
    /// `m_V = m_E = 1`, so `Δ = D - A`.
    Unit,
    /// Reversible walk with `w = 1` and a transition probability per neighbor
    /// step, keyed by the canonical string of the step element.
    Markov { probabilities: BTreeMap<String, S> },
}

impl<S: Scalar> OperatorWeightScheme<S> {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorWeightScheme::Combinatorial => "combinatorial",
            OperatorWeightScheme::Unit => "unit",
            OperatorWeightScheme::Markov { .. } => "markov",
        }
    }

    /// Edge weight of one edge and the vertex weight, given the steps of a
    /// vertex-transitive graph as `(step key, inverse step key, multiplicity)`.
    ///
    /// Returns the per-step single-edge weights and `m_V`.
    pub fn weights(&self, steps: &[(String, String, u32)]) -> Result<(Vec<S>, S)> {
        let total: u32 = steps.iter().map(|s| s.2).sum();
        if total == 0 {
            return Err(Error::Consistency("vertex without edges".into()));
        }
        match self {
            OperatorWeightScheme::Combinatorial => {
                let w = S::from_ratio(1, total as i64);
                Ok((vec![w; steps.len()], S::one()))
            }
            OperatorWeightScheme::Unit => Ok((vec![S::one(); steps.len()], S::one())),
            OperatorWeightScheme::Markov { probabilities } => {
                let mut weights = Vec::with_capacity(steps.len());
                let mut sum = S::zero();
                for (key, inv_key, mult) in steps {
                    let p = probabilities
                        .get(key)
                        .ok_or_else(|| Error::Consistency(format!("no transition probability for step {}", key)))?;
                    let q = probabilities
                        .get(inv_key)
                        .ok_or_else(|| Error::Consistency(format!("no transition probability for step {}", inv_key)))?;
                    if *p <= S::zero() {
                        return Err(Error::Consistency(format!("probability of step {} is not positive", key)));
                    }
                    // Reversibility with w = 1 forces p(s) = p(s^-1).
                    if !p.approx_eq(q) {
                        return Err(Error::Consistency(format!(
                            "walk is not reversible: p({}) = {} but p({}) = {}",
                            key,
                            p.to_exact_string(),
                            inv_key,
                            q.to_exact_string()
                        )));
                    }
                    sum = sum + p.clone();
                    weights.push(p.clone() / S::from_ratio(*mult as i64, 1));
                }
                for key in probabilities.keys() {
                    if !steps.iter().any(|s| &s.0 == key) {
                        return Err(Error::Consistency(format!("probability given for non-step {}", key)));
                    }
                }
                if !sum.approx_eq(&S::one()) {
                    return Err(Error::Consistency(format!(
                        "transition probabilities sum to {} instead of 1",
                        sum.to_exact_string()
                    )));
                }
                Ok((weights, S::one()))
            }
        }
    }
}
