use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{CausalGraph, GraphBuilder};
use crate::bits::{bits_from_probability, BitLength};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BayesCause<S> {
    pub id: String,
    pub prior: S,
    pub likelihood: S,
}

/// One observation with competing single-step causes, in raw probabilities.
///
/// File form: `{"observation", "evidence"?, "causes": [{"id", "prior", "likelihood"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BayesModel<S> {
    pub observation: String,
    /// `P(O)`; defaults to `sum_k P(M_k) P(O|M_k)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<S>,
    pub causes: Vec<BayesCause<S>>,
}

fn probability<S: Scalar>(p: S, what: &str) -> Result<S> {
    if p.is_nan() || p < S::zero() || p > S::one() {
        log::debug!("{what} out of range");
        return Err(Error::InvalidProbability {
            value: p.to_f64_lossy(),
        });
    }
    Ok(p)
}

impl<S: Scalar> BayesModel<S> {
    /// Total probability `sum_k P(M_k) P(O|M_k)`.
    pub fn marginal(&self) -> S {
        compensated_sum(self.causes.iter().map(|c| c.prior * c.likelihood))
    }

    /// Exact posteriors `P(M_k|O)` in cause order.
    pub fn posteriors(&self) -> Result<Vec<S>> {
        let evidence = self.evidence_or_marginal()?;
        Ok(self
            .causes
            .iter()
            .map(|c| c.prior * c.likelihood / evidence)
            .collect())
    }

    fn evidence_or_marginal(&self) -> Result<S> {
        let e = match self.evidence {
            Some(e) => probability(e, "evidence")?,
            None => self.marginal(),
        };
        if e <= S::zero() {
            return Err(Error::InvalidDistribution(
                "evidence P(O) must be positive".into(),
            ));
        }
        Ok(e)
    }
}

/// Graph with a root per cause (prior `log2(1/P(M))`) and an edge to the
/// observation (`log2(1/P(O|M))`), plus the description cost `log2(1/P(O))`.
///
/// Causes with zero prior are left out; zero likelihoods leave out the edge.
pub fn from_probabilities<S: Scalar>(model: &BayesModel<S>) -> Result<(CausalGraph<S>, BitLength<S>)> {
    let mut seen = HashSet::new();
    let mut prior_total = Vec::with_capacity(model.causes.len());
    for c in &model.causes {
        probability(c.prior, "prior")?;
        probability(c.likelihood, "likelihood")?;
        if c.id == model.observation {
            return Err(Error::InvalidDistribution(format!(
                "cause {:?} is the observation itself",
                c.id
            )));
        }
        if !seen.insert(c.id.as_str()) {
            return Err(Error::InvalidDistribution(format!("duplicate cause {:?}", c.id)));
        }
        prior_total.push(c.prior);
    }
    let total = compensated_sum(prior_total);
    if total > S::one() + S::tolerance() {
        return Err(Error::ImproperDistribution {
            sum: total.to_f64_lossy(),
        });
    }
    let evidence = model.evidence_or_marginal()?;

    let mut b = GraphBuilder::new().node(model.observation.as_str(), None);
    for c in model.causes.iter().filter(|c| c.prior > S::zero()) {
        b = b.root(c.id.as_str(), bits_from_probability(c.prior)?.value());
        if c.likelihood > S::zero() {
            b = b.edge(
                c.id.as_str(),
                model.observation.as_str(),
                bits_from_probability(c.likelihood)?.value(),
            );
        }
    }
    Ok((b.build()?, bits_from_probability(evidence)?))
}
