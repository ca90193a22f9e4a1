use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_core::{Patch, Region, VertexKey};
use crate::scalar::Scalar;

/// Ordered `(witness, removed)` pairs. Replaying from `R = Ω`, each witness
/// lies outside `R` and its closed 1-ball meets `R` exactly in the removed vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionCertificate {
    pub steps: Vec<(VertexKey, VertexKey)>,
}

impl ExhaustionCertificate {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ViolationReason {
    /// The removed vertex is not in the remaining set.
    RemovedNotRemaining,
    WitnessInRemaining,
    /// `|B(x, 1) ∩ R| = count`, which is not 1.
    WitnessSees { count: usize },
    /// The witness sees one remaining vertex, but not the removed one.
    WitnessSeesOther { other: VertexKey },
    /// Steps ran out with vertices left.
    Incomplete { remaining: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExhaustionVerdict {
    Ok { steps: usize },
    Violation { step: usize, reason: ViolationReason },
}

impl ExhaustionVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, ExhaustionVerdict::Ok { .. })
    }
}

/// Members of `R` adjacent to the vertex `x`, computed from the region side
/// so that witnesses on the patch frontier are handled exactly.
pub(crate) struct RegionAdjacency {
    /// For every vertex adjacent to the region: its region neighbors.
    pub(crate) seen_by: HashMap<usize, Vec<usize>>,
}

impl RegionAdjacency {
    pub(crate) fn new<S: Scalar>(patch: &Patch<S>, region: &Region) -> Self {
        let mut seen_by: HashMap<usize, Vec<usize>> = HashMap::new();
        for r in region.iter() {
            for x in patch.neighbors(r) {
                if x != r {
                    seen_by.entry(x).or_default().push(r);
                }
            }
        }
        for v in seen_by.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        RegionAdjacency { seen_by }
    }

    pub(crate) fn of(&self, x: usize) -> &[usize] {
        self.seen_by.get(&x).map_or(&[], |v| v.as_slice())
    }
}

/// Replays a certificate against the window.
pub fn verify_exhaustion<S: Scalar>(
    patch: &Patch<S>,
    region: &Region,
    cert: &ExhaustionCertificate,
) -> Result<ExhaustionVerdict> {
    patch.require_complete(region)?;
    let adj = RegionAdjacency::new(patch, region);
    let mut remaining: BTreeSet<usize> = region.members().clone();
    for (step, (x_key, w_key)) in cert.steps.iter().enumerate() {
        let violation = |reason| Ok(ExhaustionVerdict::Violation { step, reason });
        let Some(w) = patch.index_of(w_key).filter(|w| remaining.contains(w)) else {
            return violation(ViolationReason::RemovedNotRemaining);
        };
        let x = match patch.index_of(x_key) {
            Some(x) => x,
            // Outside the window, hence at distance >= 2 from the region.
            None => return violation(ViolationReason::WitnessSees { count: 0 }),
        };
        if remaining.contains(&x) {
            return violation(ViolationReason::WitnessInRemaining);
        }
        let seen: Vec<usize> = adj.of(x).iter().copied().filter(|r| remaining.contains(r)).collect();
        if seen.len() != 1 {
            return violation(ViolationReason::WitnessSees { count: seen.len() });
        }
        if seen[0] != w {
            return violation(ViolationReason::WitnessSeesOther { other: patch.key(seen[0]).clone() });
        }
        remaining.remove(&w);
    }
    if !remaining.is_empty() {
        return Ok(ExhaustionVerdict::Violation {
            step: cert.steps.len(),
            reason: ViolationReason::Incomplete { remaining: remaining.len() },
        });
    }
    Ok(ExhaustionVerdict::Ok { steps: cert.steps.len() })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    #[default]
    Greedy,
    Backtracking,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: SearchStrategy,
    pub node_limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { strategy: SearchStrategy::Greedy, node_limit: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { certificate: ExhaustionCertificate, strategy: SearchStrategy, nodes: usize },
    /// No certificate exists; `stuck` is a remainder in which no vertex can be removed.
    None { strategy: SearchStrategy, nodes: usize, stuck: Vec<VertexKey> },
    Unknown { strategy: SearchStrategy, nodes: usize },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&ExhaustionCertificate> {
        match self {
            SearchOutcome::Found { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

/// Removable vertices of `R` with their canonically smallest witness, sorted by
/// the witness key.
fn moves<S: Scalar>(patch: &Patch<S>, adj: &RegionAdjacency, remaining: &BTreeSet<usize>) -> Vec<(usize, usize)> {
    let mut best: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, seen) in &adj.seen_by {
        if remaining.contains(&x) {
            continue;
        }
        let mut it = seen.iter().filter(|r| remaining.contains(r));
        if let (Some(&w), None) = (it.next(), it.next()) {
            let e = best.entry(w).or_insert(x);
            if patch.key(x) < patch.key(*e) {
                *e = x;
            }
        }
    }
    let mut out: Vec<(usize, usize)> = best.into_iter().map(|(w, x)| (x, w)).collect();
    out.sort_by(|a, b| patch.key(a.0).cmp(patch.key(b.0)).then(patch.key(a.1).cmp(patch.key(b.1))));
    out
}

/// Searches for a one-by-one exhaustion of a finite region.
///
/// Removability is monotone: if `w` can be removed from `R` then it can be
/// removed from any `R' ⊆ R` containing `w`. Hence greedy removal never
/// blocks a completion, and a greedy dead end proves that no certificate exists.
/// The backtracking strategy explores all orders with memoized dead ends and
/// serves as an independent check.
pub fn search_exhaustion<S: Scalar>(patch: &Patch<S>, region: &Region, config: &SearchConfig) -> Result<SearchOutcome> {
    patch.require_complete(region)?;
    let adj = RegionAdjacency::new(patch, region);
    let strategy = config.strategy;
    let mut remaining: BTreeSet<usize> = region.members().clone();
    let to_cert = |steps: &[(usize, usize)]| ExhaustionCertificate {
        steps: steps.iter().map(|&(x, w)| (patch.key(x).clone(), patch.key(w).clone())).collect(),
    };
    match strategy {
        SearchStrategy::Greedy => {
            let mut steps = Vec::new();
            let mut nodes = 0;
            while !remaining.is_empty() {
                nodes += 1;
                if nodes > config.node_limit {
                    return Ok(SearchOutcome::Unknown { strategy, nodes });
                }
                let Some(&(x, w)) = moves(patch, &adj, &remaining).first() else {
                    return Ok(SearchOutcome::None {
                        strategy,
                        nodes,
                        stuck: remaining.iter().map(|&i| patch.key(i).clone()).collect(),
                    });
                };
                steps.push((x, w));
                remaining.remove(&w);
            }
            Ok(SearchOutcome::Found { certificate: to_cert(&steps), strategy, nodes })
        }
        SearchStrategy::Backtracking => {
            let mut dead: HashSet<Vec<usize>> = HashSet::new();
            let mut steps = Vec::new();
            let mut nodes = 0;
            let mut stuck = None;
            let found = backtrack(patch, &adj, &mut remaining, &mut steps, &mut dead, &mut nodes, config.node_limit, &mut stuck);
            match found {
                Some(true) => Ok(SearchOutcome::Found { certificate: to_cert(&steps), strategy, nodes }),
                Some(false) => Ok(SearchOutcome::None {
                    strategy,
                    nodes,
                    stuck: stuck.unwrap_or_default().iter().map(|&i| patch.key(i).clone()).collect(),
                }),
                None => Ok(SearchOutcome::Unknown { strategy, nodes }),
            }
        }
    }
}

/// `Some(true)` on success, `Some(false)` on exhaustive failure, `None` on node limit.
#[allow(clippy::too_many_arguments)]
fn backtrack<S: Scalar>(
    patch: &Patch<S>,
    adj: &RegionAdjacency,
    remaining: &mut BTreeSet<usize>,
    steps: &mut Vec<(usize, usize)>,
    dead: &mut HashSet<Vec<usize>>,
    nodes: &mut usize,
    limit: usize,
    stuck: &mut Option<Vec<usize>>,
) -> Option<bool> {
    if remaining.is_empty() {
        return Some(true);
    }
    let key: Vec<usize> = remaining.iter().copied().collect();
    if dead.contains(&key) {
        return Some(false);
    }
    *nodes += 1;
    if *nodes > limit {
        return None;
    }
    let options = moves(patch, adj, remaining);
    if options.is_empty() && stuck.is_none() {
        *stuck = Some(key.clone());
    }
    for (x, w) in options {
        remaining.remove(&w);
        steps.push((x, w));
        match backtrack(patch, adj, remaining, steps, dead, nodes, limit, stuck) {
            Some(true) => return Some(true),
            None => return None,
            Some(false) => {}
        }
        steps.pop();
        remaining.insert(w);
    }
    dead.insert(key);
    Some(false)
}

/// Builds a certificate from a height: repeatedly remove a lowest vertex `y`
/// of `R`, witnessed by a neighbor one level below it.
pub fn exhaustion_from_height<S: Scalar>(
    patch: &Patch<S>,
    h: &dyn Fn(&VertexKey) -> Result<i64>,
    region: &Region,
) -> Result<ExhaustionCertificate> {
    patch.require_complete(region)?;
    let adj = RegionAdjacency::new(patch, region);
    let mut heights: HashMap<usize, i64> = HashMap::new();
    let mut height = |i: usize| -> Result<i64> {
        if let Some(&v) = heights.get(&i) {
            return Ok(v);
        }
        let v = h(patch.key(i))?;
        heights.insert(i, v);
        Ok(v)
    };
    let mut order: Vec<(i64, usize)> = Vec::with_capacity(region.len());
    for i in region.iter() {
        order.push((height(i)?, i));
    }
    order.sort_by(|a, b| a.0.cmp(&b.0).then(patch.key(a.1).cmp(patch.key(b.1))));
    let mut remaining: BTreeSet<usize> = region.members().clone();
    let mut steps = Vec::with_capacity(order.len());
    for (hy, y) in order {
        let mut witness: Option<usize> = None;
        for x in patch.neighbors(y) {
            if height(x)? == hy - 1 && witness.map_or(true, |w| patch.key(x) < patch.key(w)) {
                witness = Some(x);
            }
        }
        let x = witness.ok_or_else(|| {
            Error::Consistency(format!("height axiom C fails at {}: no neighbor one level down", patch.key(y)))
        })?;
        let seen: Vec<usize> = adj.of(x).iter().copied().filter(|r| remaining.contains(r)).collect();
        if seen != [y] {
            return Err(Error::Consistency(format!(
                "height axiom B fails at {}: it has {} remaining neighbors",
                patch.key(x),
                seen.len()
            )));
        }
        remaining.remove(&y);
        steps.push((patch.key(x).clone(), patch.key(y).clone()));
    }
    Ok(ExhaustionCertificate { steps })
}
