use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use super::oracle::VertexKey;
use super::patch::{Patch, Region};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Multi-source BFS distances inside the patch. `None` for unreached vertices.
/// When `allowed` is given, propagation only enters vertices it contains.
pub(crate) fn bfs_from<S: Scalar>(
    patch: &Patch<S>,
    sources: impl IntoIterator<Item = usize>,
    max_dist: usize,
    allowed: Option<&Region>,
) -> Vec<Option<usize>> {
    let mut dist = vec![None; patch.len()];
    let mut queue = VecDeque::new();
    for s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        if d == max_dist {
            continue;
        }
        for w in patch.neighbors(v) {
            if dist[w].is_none() && allowed.map_or(true, |a| a.contains(w)) {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `∂_r Ω = {x ∈ Ω : d(x, V ∖ Ω) ≤ r}`.
///
/// A shortest path from `x ∈ Ω` to the complement stays in Ω until its last
/// step, so BFS from the exterior neighbors through Ω gives exact distances.
pub fn r_boundary<S: Scalar>(patch: &Patch<S>, region: &Region, r: usize) -> Result<Region> {
    if r == 0 {
        return Err(Error::Precondition("thick boundary needs r >= 1".into()));
    }
    patch.require_complete(region)?;
    let exterior = patch.exterior_neighbors(region);
    let dist = bfs_from(patch, exterior.iter(), r, Some(&region.union(&exterior)));
    Ok(region.iter().filter(|&i| dist[i].is_some()).collect())
}

/// `I(Ω, r) = Ω ∖ ∂_r Ω`.
pub fn r_interior<S: Scalar>(patch: &Patch<S>, region: &Region, r: usize) -> Result<Region> {
    Ok(region.difference(&r_boundary(patch, region, r)?))
}

/// Greedy maximal `r`-net of the region in patch-index order, using the path
/// metric of the whole patch.
pub fn maximal_net<S: Scalar>(patch: &Patch<S>, region: &Region, r: usize) -> Region {
    let mut covered = vec![false; patch.len()];
    let mut net = BTreeSet::new();
    for i in region.iter() {
        if covered[i] {
            continue;
        }
        net.insert(i);
        for (j, d) in bfs_from(patch, [i], r, None).into_iter().enumerate() {
            if d.is_some() {
                covered[j] = true;
            }
        }
    }
    Region::new(net)
}

/// Family of all transversals (fundamental domains) of a group action with
/// finitely many vertex orbits, given by an orbit labeling.
#[derive(Clone)]
pub struct TransversalFamily {
    name: String,
    orbit_count: usize,
    label: Arc<dyn Fn(&VertexKey) -> Result<usize> + Send + Sync>,
}

impl fmt::Debug for TransversalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransversalFamily")
            .field("name", &self.name)
            .field("orbit_count", &self.orbit_count)
            .finish()
    }
}

impl TransversalFamily {
    pub fn new(
        name: impl Into<String>,
        orbit_count: usize,
        label: impl Fn(&VertexKey) -> Result<usize> + Send + Sync + 'static,
    ) -> Self {
        TransversalFamily { name: name.into(), orbit_count, label: Arc::new(label) }
    }

    /// Every vertex in one orbit: singletons are the fundamental domains.
    pub fn simply_transitive() -> Self {
        TransversalFamily::new("simply transitive", 1, |_| Ok(0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    pub fn orbit_of(&self, key: &VertexKey) -> Result<usize> {
        let o = (self.label)(key)?;
        if o >= self.orbit_count {
            return Err(Error::Data(format!("orbit label {} of {} out of range", o, key)));
        }
        Ok(o)
    }
}

/// Maximal number of disjoint transversals inside Ω. Any choice of one vertex
/// per orbit is a transversal, so this is the smallest orbit count in Ω.
pub fn packing_number<S: Scalar>(patch: &Patch<S>, region: &Region, family: &TransversalFamily) -> Result<usize> {
    let mut counts = vec![0usize; family.orbit_count()];
    for i in region.iter() {
        counts[family.orbit_of(patch.key(i))?] += 1;
    }
    Ok(counts.into_iter().min().unwrap_or(0))
}

/// Smallest `r` with some transversal inside `B(x, r)`, i.e. the largest
/// distance from `x` to the nearest vertex of each orbit.
pub fn inclusive_radius<S: Scalar>(patch: &Patch<S>, x: usize, family: &TransversalFamily) -> Result<usize> {
    let dist = bfs_from(patch, [x], usize::MAX, None);
    let mut nearest = vec![None::<usize>; family.orbit_count()];
    for (j, d) in dist.into_iter().enumerate() {
        if let Some(d) = d {
            let o = family.orbit_of(patch.key(j))?;
            nearest[o] = Some(nearest[o].map_or(d, |e: usize| e.min(d)));
        }
    }
    nearest
        .into_iter()
        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
        .ok_or_else(|| Error::IncompleteWindow(format!("some orbit is not visible from {}", patch.key(x))))
}
