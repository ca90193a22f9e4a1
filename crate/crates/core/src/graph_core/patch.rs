use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::oracle::{GraphOracle, VertexKey};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default limit on materialized vertices.
pub const DEFAULT_VERTEX_CAP: usize = 200_000;

/// One adjacency entry of a patch vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchEdge<S> {
    pub neighbor: usize,
    pub weight: S,
    pub multiplicity: u32,
}

/// Finite, immutable window onto a weighted graph: the union of closed balls of a
/// given radius around the seeds, plus the ring of vertices at distance `radius + 1`.
///
/// Every vertex stores its full weighted degree (including edges that leave the
/// patch), so operator rows are exact at every vertex whose neighbors are present.
#[derive(Clone, Debug)]
pub struct Patch<S> {
    pub(crate) vertices: Vec<VertexKey>,
    pub(crate) index: HashMap<VertexKey, usize>,
    pub(crate) adjacency: Vec<Vec<PatchEdge<S>>>,
    pub(crate) vertex_weights: Vec<S>,
    pub(crate) out_mass: Vec<S>,
    pub(crate) frontier: Vec<bool>,
    pub(crate) depth: Vec<usize>,
    pub(crate) radius: usize,
    pub(crate) descriptor: String,
}

/// A set of patch indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    members: BTreeSet<usize>,
}

impl Region {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        Region { members: members.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Region::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    /// Members in ascending patch-index order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn union(&self, other: &Region) -> Region {
        Region { members: self.members.union(&other.members).copied().collect() }
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region { members: self.members.difference(&other.members).copied().collect() }
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.members.is_disjoint(&other.members)
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.members.is_subset(&other.members)
    }
}

impl FromIterator<usize> for Region {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Region::new(iter)
    }
}

/// Materializes `B(seeds, radius)` plus its exterior ring.
///
/// Vertices are numbered breadth-first from the seeds; within one layer they are
/// sorted by canonical key.
pub fn build_patch<S: Scalar>(
    oracle: &impl GraphOracle<S>,
    seeds: &[VertexKey],
    radius: usize,
    cap: usize,
) -> Result<Patch<S>> {
    if seeds.is_empty() {
        return Err(Error::Precondition("build_patch needs at least one seed".into()));
    }
    let mut vertices: Vec<VertexKey> = Vec::new();
    let mut index: HashMap<VertexKey, usize> = HashMap::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut edges_cache: Vec<Vec<super::oracle::EdgeBundle<S>>> = Vec::new();

    let mut layer: Vec<VertexKey> = seeds.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let push = |key: VertexKey, d: usize, vertices: &mut Vec<VertexKey>, index: &mut HashMap<VertexKey, usize>, depth: &mut Vec<usize>| -> Result<()> {
        if vertices.len() >= cap {
            return Err(Error::ResourceLimit { what: format!("patch of radius {}", radius), cap });
        }
        index.insert(key.clone(), vertices.len());
        vertices.push(key);
        depth.push(d);
        Ok(())
    };
    for key in &layer {
        push(key.clone(), 0, &mut vertices, &mut index, &mut depth)?;
    }
    // Layers 1..=radius+1; the last one is the frontier ring.
    for d in 1..=radius + 1 {
        let mut next: BTreeSet<VertexKey> = BTreeSet::new();
        for key in &layer {
            let bundles = oracle.out_edges(key)?;
            for b in &bundles {
                if !index.contains_key(&b.terminus) {
                    next.insert(b.terminus.clone());
                }
            }
            edges_cache.push(bundles);
        }
        layer = next.into_iter().collect();
        for key in &layer {
            push(key.clone(), d, &mut vertices, &mut index, &mut depth)?;
        }
    }
    // Ring vertices still need their bundles for degrees and frontier flags.
    for key in &layer {
        edges_cache.push(oracle.out_edges(key)?);
    }
    debug_assert_eq!(edges_cache.len(), vertices.len());

    let n = vertices.len();
    let mut adjacency = Vec::with_capacity(n);
    let mut vertex_weights = Vec::with_capacity(n);
    let mut out_mass = Vec::with_capacity(n);
    let mut frontier = Vec::with_capacity(n);
    for (i, bundles) in edges_cache.into_iter().enumerate() {
        let mut adj = Vec::new();
        let mut mass = S::zero();
        let mut leaves = false;
        for b in bundles {
            mass = mass + b.mass();
            match index.get(&b.terminus) {
                Some(&j) => adj.push(PatchEdge { neighbor: j, weight: b.weight, multiplicity: b.multiplicity }),
                None => leaves = true,
            }
        }
        adjacency.push(adj);
        out_mass.push(mass);
        frontier.push(leaves);
        vertex_weights.push(oracle.vertex_weight(&vertices[i])?);
    }

    Ok(Patch {
        vertices,
        index,
        adjacency,
        vertex_weights,
        out_mass,
        frontier,
        depth,
        radius,
        descriptor: oracle.descriptor(),
    })
}

impl<S: Scalar> Patch<S> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn key(&self, i: usize) -> &VertexKey {
        &self.vertices[i]
    }

    pub fn keys(&self) -> &[VertexKey] {
        &self.vertices
    }

    pub fn index_of(&self, key: &VertexKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn adjacency(&self, i: usize) -> &[PatchEdge<S>] {
        &self.adjacency[i]
    }

    /// Distinct neighbor indices present in the patch.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i].iter().map(|e| e.neighbor)
    }

    pub fn vertex_weight(&self, i: usize) -> &S {
        &self.vertex_weights[i]
    }

    /// Sum of `weight * multiplicity` over every out-edge, including those leaving the patch.
    pub fn out_mass(&self, i: usize) -> &S {
        &self.out_mass[i]
    }

    /// True iff some out-edge of vertex `i` leaves the patch.
    pub fn is_frontier(&self, i: usize) -> bool {
        self.frontier[i]
    }

    /// Distance from the seed set.
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    /// Region from keys; unknown keys are a data error.
    pub fn region_from_keys<'a>(&self, keys: impl IntoIterator<Item = &'a VertexKey>) -> Result<Region> {
        keys.into_iter()
            .map(|k| self.index_of(k).ok_or_else(|| Error::Data(format!("vertex {} is not in the patch", k))))
            .collect()
    }

    pub fn region_keys(&self, region: &Region) -> Vec<VertexKey> {
        region.iter().map(|i| self.vertices[i].clone()).collect()
    }

    /// Vertices at depth `<= r` from the seeds.
    pub fn ball_region(&self, r: usize) -> Region {
        (0..self.len()).filter(|&i| self.depth[i] <= r).collect()
    }

    /// Every patch vertex adjacent to the region but outside it.
    pub fn exterior_neighbors(&self, region: &Region) -> Region {
        let mut out = BTreeSet::new();
        for i in region.iter() {
            for j in self.neighbors(i) {
                if !region.contains(j) {
                    out.insert(j);
                }
            }
        }
        Region { members: out }
    }

    /// Fails unless all neighbors of every region vertex are inside the patch.
    pub fn require_complete(&self, region: &Region) -> Result<()> {
        for i in region.iter() {
            if i >= self.len() {
                return Err(Error::Data(format!("region index {} outside a patch of {} vertices", i, self.len())));
            }
            if self.frontier[i] {
                return Err(Error::IncompleteWindow(format!(
                    "region vertex {} touches the patch frontier",
                    self.vertices[i]
                )));
            }
        }
        Ok(())
    }
}
