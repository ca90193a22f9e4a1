use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Canonical serialization of a vertex. Equal vertices have equal keys.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexKey(String);

impl VertexKey {
    pub fn new(s: impl Into<String>) -> Self {
        VertexKey(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

impl fmt::Debug for VertexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for VertexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// All oriented edges from `origin` to `terminus`, collapsed into one record.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeBundle<S> {
    pub origin: VertexKey,
    pub terminus: VertexKey,
    /// Weight of each single edge in the bundle.
    pub weight: S,
    pub multiplicity: u32,
}

impl<S: Scalar> EdgeBundle<S> {
    /// `weight * multiplicity`.
    pub fn mass(&self) -> S {
        self.weight.clone() * S::from_ratio(self.multiplicity as i64, 1)
    }
}

/// Lazy local description of a (possibly infinite) weighted graph.
///
/// Implementations must be pure: the same query returns the same list in the
/// same order. Edge weights are symmetric, and the reverse bundle of every
/// reported bundle is reported at its terminus.
pub trait GraphOracle<S: Scalar>: Send + Sync {
    fn out_edges(&self, x: &VertexKey) -> Result<Vec<EdgeBundle<S>>>;

    fn vertex_weight(&self, x: &VertexKey) -> Result<S>;

    /// Certified sup over vertices of `(1/m_V(x)) * sum of edge masses at x`.
    fn degree_bound(&self) -> S;

    /// Short human readable description recorded in exchange files.
    fn descriptor(&self) -> String;
}

impl<S: Scalar, O: GraphOracle<S> + ?Sized> GraphOracle<S> for &O {
    fn out_edges(&self, x: &VertexKey) -> Result<Vec<EdgeBundle<S>>> {
        (**self).out_edges(x)
    }
    fn vertex_weight(&self, x: &VertexKey) -> Result<S> {
        (**self).vertex_weight(x)
    }
    fn degree_bound(&self) -> S {
        (**self).degree_bound()
    }
    fn descriptor(&self) -> String {
        (**self).descriptor()
    }
}

impl<S: Scalar, O: GraphOracle<S> + ?Sized> GraphOracle<S> for Box<O> {
    fn out_edges(&self, x: &VertexKey) -> Result<Vec<EdgeBundle<S>>> {
        (**self).out_edges(x)
    }
    fn vertex_weight(&self, x: &VertexKey) -> Result<S> {
        (**self).vertex_weight(x)
    }
    fn degree_bound(&self) -> S {
        (**self).degree_bound()
    }
    fn descriptor(&self) -> String {
        (**self).descriptor()
    }
}

/// Multiplies every vertex and edge weight of an oracle by the same constant.
/// The Laplacian is unchanged by this rescaling.
pub struct ScaledOracle<O, S> {
    pub inner: O,
    pub factor: S,
}

impl<S: Scalar, O: GraphOracle<S>> GraphOracle<S> for ScaledOracle<O, S> {
    fn out_edges(&self, x: &VertexKey) -> Result<Vec<EdgeBundle<S>>> {
        Ok(self
            .inner
            .out_edges(x)?
            .into_iter()
            .map(|mut b| {
                b.weight = b.weight * self.factor.clone();
                b
            })
            .collect())
    }
    fn vertex_weight(&self, x: &VertexKey) -> Result<S> {
        Ok(self.inner.vertex_weight(x)? * self.factor.clone())
    }
    fn degree_bound(&self) -> S {
        self.inner.degree_bound()
    }
    fn descriptor(&self) -> String {
        format!("{} scaled by {}", self.inner.descriptor(), self.factor.to_exact_string())
    }
}

/// `(1/m_V(x)) * sum over bundles of weight * multiplicity`.
pub fn weighted_degree<S: Scalar>(oracle: &impl GraphOracle<S>, x: &VertexKey) -> Result<S> {
    let mass = oracle
        .out_edges(x)?
        .iter()
        .fold(S::zero(), |acc, b| acc + b.mass());
    Ok(mass / oracle.vertex_weight(x)?)
}

/// Checks the local invariants of an oracle at `x`: positive weights, symmetric
/// reverse bundles, and the Sunada-Sy degree bound.
pub fn audit_vertex<S: Scalar>(oracle: &impl GraphOracle<S>, x: &VertexKey) -> Result<()> {
    let mv = oracle.vertex_weight(x)?;
    if mv <= S::zero() {
        return Err(Error::Consistency(format!("vertex weight at {} is not positive", x)));
    }
    for bundle in oracle.out_edges(x)? {
        if bundle.weight <= S::zero() || bundle.multiplicity == 0 {
            return Err(Error::Consistency(format!(
                "bundle {} -> {} has non-positive weight or zero multiplicity",
                bundle.origin, bundle.terminus
            )));
        }
        let back = oracle.out_edges(&bundle.terminus)?;
        let reverse = back.iter().find(|b| b.terminus == *x).ok_or_else(|| {
            Error::Consistency(format!("no reverse bundle {} -> {}", bundle.terminus, x))
        })?;
        if reverse.multiplicity != bundle.multiplicity || !reverse.weight.approx_eq(&bundle.weight) {
            return Err(Error::Consistency(format!(
                "asymmetric bundle between {} and {}",
                x, bundle.terminus
            )));
        }
    }
    let deg = weighted_degree(oracle, x)?;
    let bound = oracle.degree_bound();
    if deg > bound.clone() + S::check_tolerance() * S::max_of(S::one(), bound.abs()) {
        return Err(Error::Consistency(format!(
            "Sunada-Sy bound violated at {}: {} > {}",
            x,
            deg.to_exact_string(),
            bound.to_exact_string()
        )));
    }
    Ok(())
}

/// Breadth-first ball around `center` directly on the oracle. Returns keys with distances.
pub fn oracle_ball<S: Scalar>(
    oracle: &impl GraphOracle<S>,
    center: &VertexKey,
    radius: usize,
    cap: usize,
) -> Result<HashMap<VertexKey, usize>> {
    let mut dist = HashMap::new();
    dist.insert(center.clone(), 0usize);
    let mut queue = VecDeque::from([center.clone()]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for b in oracle.out_edges(&v)? {
            if !dist.contains_key(&b.terminus) {
                if dist.len() >= cap {
                    return Err(Error::ResourceLimit {
                        what: format!("ball of radius {} around {}", radius, center),
                        cap,
                    });
                }
                dist.insert(b.terminus.clone(), d + 1);
                queue.push_back(b.terminus);
            }
        }
    }
    Ok(dist)
}

/// `Vol(r) = max over orbit representatives of |B(rep, r)|`.
pub fn growth_volume<S: Scalar>(
    oracle: &impl GraphOracle<S>,
    orbit_reps: &[VertexKey],
    r: usize,
    cap: usize,
) -> Result<usize> {
    if orbit_reps.is_empty() {
        return Err(Error::Precondition("growth_volume needs at least one orbit representative".into()));
    }
    let mut best = 0;
    for rep in orbit_reps {
        best = best.max(oracle_ball(oracle, rep, r, cap)?.len());
    }
    Ok(best)
}

/// Distinct neighbors of `x` (bundle termini), in oracle order.
pub fn neighbor_keys<S: Scalar>(oracle: &impl GraphOracle<S>, x: &VertexKey) -> Result<Vec<VertexKey>> {
    let mut seen = HashSet::new();
    Ok(oracle
        .out_edges(x)?
        .into_iter()
        .filter_map(|b| seen.insert(b.terminus.clone()).then_some(b.terminus))
        .collect())
}
