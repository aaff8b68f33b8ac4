//! Weighted cause graphs: node priors and edge costs in bits.
//!
//! The generation cost of a node is the cheapest root prior plus edge costs
//! along any chain reaching it. [`explain`] returns that chain and the
//! unexpectedness against a supplied description cost.

mod bayes;

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};

pub use bayes::{from_probabilities, BayesCause, BayesModel};

use crate::bits::{BitLength, Unexpectedness};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symbol::SymbolId;

/// Immutable cause graph. Build with [`GraphBuilder`].
#[derive(Debug, Clone, PartialEq)]
pub struct CausalGraph<S> {
    ids: Vec<SymbolId>,
    index: HashMap<SymbolId, usize>,
    prior: Vec<Option<S>>,
    /// Outgoing edges `(to, bits)`, one per target (cheapest kept).
    out: Vec<Vec<(usize, S)>>,
    /// Incoming edges `(from, bits)`.
    inc: Vec<Vec<(usize, S)>>,
}

#[derive(Debug, Clone, Default)]
pub struct GraphBuilder<S> {
    nodes: Vec<(SymbolId, Option<S>)>,
    edges: Vec<(SymbolId, SymbolId, S)>,
}

fn finite_cost<S: Scalar>(bits: S) -> Result<S> {
    let b = BitLength::new(bits)?;
    if !b.is_finite() {
        return Err(Error::InvalidBitLength {
            value: bits.to_f64_lossy(),
        });
    }
    Ok(bits)
}

impl<S: Scalar> GraphBuilder<S> {
    pub fn new() -> Self {
        GraphBuilder {
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Adds a node; `prior_bits` makes it a root.
    pub fn node(mut self, id: impl Into<SymbolId>, prior_bits: Option<S>) -> Self {
        self.nodes.push((id.into(), prior_bits));
        self
    }

    pub fn root(self, id: impl Into<SymbolId>, prior_bits: S) -> Self {
        self.node(id, Some(prior_bits))
    }

    pub fn edge(mut self, from: impl Into<SymbolId>, to: impl Into<SymbolId>, bits: S) -> Self {
        self.edges.push((from.into(), to.into(), bits));
        self
    }

    pub fn build(self) -> Result<CausalGraph<S>> {
        let mut g = CausalGraph {
            ids: Vec::with_capacity(self.nodes.len()),
            index: HashMap::with_capacity(self.nodes.len()),
            prior: Vec::with_capacity(self.nodes.len()),
            out: Vec::new(),
            inc: Vec::new(),
        };
        for (id, prior) in self.nodes {
            if g.index.contains_key(&id) {
                return Err(Error::InvalidDistribution(format!("duplicate node {id:?}")));
            }
            let prior = prior.map(finite_cost).transpose()?;
            g.index.insert(id.clone(), g.ids.len());
            g.ids.push(id);
            g.prior.push(prior);
        }
        if g.prior.iter().all(Option::is_none) {
            return Err(Error::InvalidDistribution(
                "causal graph needs at least one root with a prior".into(),
            ));
        }
        g.out = vec![Vec::new(); g.ids.len()];
        g.inc = vec![Vec::new(); g.ids.len()];
        for (from, to, bits) in self.edges {
            let bits = finite_cost(bits)?;
            let u = g.node_index(from.as_str())?;
            let v = g.node_index(to.as_str())?;
            match g.out[u].iter_mut().find(|(t, _)| *t == v) {
                Some(e) if bits < e.1 => e.1 = bits,
                Some(_) => continue,
                None => g.out[u].push((v, bits)),
            }
            match g.inc[v].iter_mut().find(|(f, _)| *f == u) {
                Some(e) => e.1 = bits,
                None => g.inc[v].push((u, bits)),
            }
        }
        Ok(g)
    }
}

/// Heap entry ordered as a min-heap on `(cost, id)`.
struct Entry<'a, S> {
    cost: S,
    id: &'a SymbolId,
    node: usize,
}

impl<S: Scalar> PartialEq for Entry<'_, S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<'_, S> {}

impl<S: Scalar> PartialOrd for Entry<'_, S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Entry<'_, S> {
    fn cmp(&self, other: &Self) -> Ordering {
        // costs are finite, so partial_cmp never fails
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.id.cmp(self.id))
    }
}

/// Result of one search toward a target.
struct Search<S> {
    dist: Vec<S>,
    pred: Vec<Option<usize>>,
}

impl<S: Scalar> CausalGraph<S> {
    pub fn builder() -> GraphBuilder<S> {
        GraphBuilder::new()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn nodes(&self) -> &[SymbolId] {
        &self.ids
    }

    pub fn prior(&self, id: &str) -> Result<Option<S>> {
        Ok(self.prior[self.node_index(id)?])
    }

    /// Outgoing edges of `id` as `(to, bits)`.
    pub fn edges_from(&self, id: &str) -> Result<Vec<(&SymbolId, S)>> {
        let u = self.node_index(id)?;
        Ok(self.out[u].iter().map(|&(v, b)| (&self.ids[v], b)).collect())
    }

    fn node_index(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Dijkstra from all roots at once. Edges out of `target` are never
    /// relaxed, so a cause always precedes its effect.
    fn search(&self, target: usize) -> Search<S> {
        let n = self.ids.len();
        let mut dist = vec![S::infinity(); n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for (i, p) in self.prior.iter().enumerate() {
            if let Some(p) = *p {
                dist[i] = p;
                heap.push(Entry {
                    cost: p,
                    id: &self.ids[i],
                    node: i,
                });
            }
        }
        while let Some(Entry { cost, node: u, .. }) = heap.pop() {
            if done[u] || cost > dist[u] {
                continue;
            }
            done[u] = true;
            if u == target {
                continue;
            }
            for &(v, w) in &self.out[u] {
                if done[v] {
                    continue;
                }
                let nd = cost + w;
                let better = nd < dist[v]
                    || (nd == dist[v]
                        && pred[v].is_some_and(|p| self.ids[u] < self.ids[p]));
                if better {
                    let improved = nd < dist[v];
                    dist[v] = nd;
                    pred[v] = Some(u);
                    if improved {
                        heap.push(Entry {
                            cost: nd,
                            id: &self.ids[v],
                            node: v,
                        });
                    }
                }
            }
        }
        Search { dist, pred }
    }

    /// Cheapest root prior plus edge costs over every chain reaching `s`;
    /// infinite when no root reaches it.
    pub fn generation_complexity(&self, s: &str) -> Result<BitLength<S>> {
        let t = self.node_index(s)?;
        let found = self.search(t);
        Ok(BitLength::new(found.dist[t]).expect("costs are nonnegative"))
    }

    /// Generation costs of every node.
    pub fn all_generation_complexities(&self) -> Vec<(SymbolId, BitLength<S>)> {
        (0..self.ids.len())
            .map(|t| {
                let d = self.search(t).dist[t];
                (self.ids[t].clone(), BitLength::new(d).expect("costs are nonnegative"))
            })
            .collect()
    }

    /// Best explanation of `s` given its description cost `c_d`.
    ///
    /// Among equal-cost causes the smallest id wins; a root explained by its
    /// own prior is its own best cause.
    pub fn explain(&self, s: &str, c_d: BitLength<S>) -> Result<Explanation<S>> {
        if !c_d.is_finite() {
            return Err(Error::param("cd", "description cost must be finite"));
        }
        let t = self.node_index(s)?;
        let Search { dist, pred } = self.search(t);
        let cost = dist[t];
        if !cost.is_finite() {
            return Err(Error::Unreachable(s.to_string()));
        }

        // every candidate achieving the minimum, then the smallest id
        let mut best: Option<usize> = match self.prior[t] {
            Some(p) if p == cost => Some(t),
            _ => None,
        };
        for &(u, w) in &self.inc[t] {
            if u != t && dist[u] + w == cost && best.is_none_or(|b| self.ids[u] < self.ids[b]) {
                best = Some(u);
            }
        }
        let best = best.or(pred[t]).expect("reachable target has an origin");

        let mut chain = vec![t];
        if best != t {
            let mut cur = Some(best);
            while let Some(c) = cur {
                chain.push(c);
                cur = pred[c];
            }
        }
        chain.reverse();
        let chain: Vec<SymbolId> = chain.into_iter().map(|i| self.ids[i].clone()).collect();
        let generation_cost = BitLength::new(cost).expect("costs are nonnegative");
        Ok(Explanation {
            target: self.ids[t].clone(),
            best_cause: self.ids[best].clone(),
            chain,
            generation_cost,
            u: Unexpectedness::from_raw(cost - c_d.value()),
        })
    }

    /// Cost of a given chain: the first node's prior plus the edges along it.
    pub fn chain_cost(&self, chain: &[SymbolId]) -> Result<BitLength<S>> {
        let first = chain
            .first()
            .ok_or_else(|| Error::InvalidDistribution("empty chain".into()))?;
        let mut u = self.node_index(first.as_str())?;
        let mut cost = self.prior[u]
            .ok_or_else(|| Error::Unreachable(format!("{first} has no prior")))?;
        for next in &chain[1..] {
            let v = self.node_index(next.as_str())?;
            let (_, w) = self.out[u]
                .iter()
                .find(|(t, _)| *t == v)
                .ok_or_else(|| Error::Unreachable(format!("no edge {} -> {next}", self.ids[u])))?;
            cost += *w;
            u = v;
        }
        BitLength::new(cost)
    }
}

/// Minimal causal chain for one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation<S> {
    pub target: SymbolId,
    /// Immediate predecessor of the target on the chain, or the target itself
    /// when its own prior is the cheapest origin.
    pub best_cause: SymbolId,
    /// Root first, target last.
    pub chain: Vec<SymbolId>,
    pub generation_cost: BitLength<S>,
    pub u: Unexpectedness<S>,
}

/// Free-function forms of the graph queries.
pub fn generation_complexity<S: Scalar>(g: &CausalGraph<S>, s: &str) -> Result<BitLength<S>> {
    g.generation_complexity(s)
}

pub fn explain<S: Scalar>(g: &CausalGraph<S>, s: &str, c_d: BitLength<S>) -> Result<Explanation<S>> {
    g.explain(s, c_d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_bits: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub from: String,
    pub to: String,
    pub bits: f64,
}

/// On-disk graph: `{"nodes": [{"id", "prior_bits"?}], "edges": [{"from", "to", "bits"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub nodes: Vec<NodeEntry>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
}

impl GraphFile {
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn to_graph<S: Scalar>(&self) -> Result<CausalGraph<S>> {
        let mut b = GraphBuilder::new();
        for n in &self.nodes {
            b = b.node(n.id.as_str(), n.prior_bits.map(S::of));
        }
        for e in &self.edges {
            b = b.edge(e.from.as_str(), e.to.as_str(), S::of(e.bits));
        }
        b.build()
    }
}
