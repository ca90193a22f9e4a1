use std::collections::{BTreeSet, HashSet};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::cayley::GeneratingSet;
use super::element::{Element, GroupSpec};
use crate::error::{Error, Result};
use crate::graph_core::{TransversalFamily, VertexKey};

/// A member of a built-in Følner family with its exact isoperimetric ratio.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolnerSet {
    pub n: usize,
    /// Canonical keys, sorted.
    pub keys: Vec<VertexKey>,
    /// `∂_1 Ω`: members with a neighbor outside.
    pub boundary: Vec<VertexKey>,
    /// `|∂_1 Ω| / |Ω|` as `p/q`.
    pub ratio: String,
}

impl FolnerSet {
    pub fn size(&self) -> usize {
        self.keys.len()
    }

    pub fn ratio_value(&self) -> Rational64 {
        Rational64::new(self.boundary.len() as i64, self.keys.len() as i64)
    }
}

fn int_range(n: usize) -> std::ops::RangeInclusive<i64> {
    -(n as i64)..=n as i64
}

/// Members of the `n`-th set of the built-in family.
///
/// - lattice: the box `[-n, n]^d`
/// - `Z x Z/2`: the strip `|k| <= n`
/// - lamplighter: lamps supported in `[-n, n]` and cursor in `[-n, n]`
/// - Baumslag-Solitar: `0 <= k <= n` and integer translation `0 <= b < 4^n`
pub fn folner_members(spec: &GroupSpec, n: usize) -> Result<Vec<Element>> {
    let out = match spec {
        GroupSpec::IntLattice { dim } => {
            let mut pts: Vec<Vec<i64>> = vec![vec![]];
            for _ in 0..*dim {
                pts = pts
                    .into_iter()
                    .flat_map(|p| int_range(n).map(move |x| [p.clone(), vec![x]].concat()))
                    .collect();
            }
            pts.into_iter().map(Element::Lattice).collect()
        }
        GroupSpec::IntCrossC2 => int_range(n).flat_map(|k| [0u8, 1].map(|x| Element::Cross { k, x })).collect(),
        GroupSpec::Lamplighter => {
            let width = 2 * n + 1;
            if width > 20 {
                return Err(Error::ResourceLimit { what: format!("lamplighter Følner set n = {}", n), cap: 1 << 20 });
            }
            let mut out = Vec::new();
            for k in int_range(n) {
                for mask in 0u32..(1 << width) {
                    let lamps: BTreeSet<i64> =
                        (0..width).filter(|b| mask >> b & 1 == 1).map(|b| b as i64 - n as i64).collect();
                    out.push(Element::Lamp { lamps, cursor: k });
                }
            }
            out
        }
        GroupSpec::BaumslagSolitar12 => {
            if n > 9 {
                return Err(Error::ResourceLimit { what: format!("Baumslag-Solitar Følner set n = {}", n), cap: 1 << 20 });
            }
            let width = 1i128 << (2 * n);
            (0..=n as i64).flat_map(|k| (0..width).map(move |b| Element::Affine { k, num: b, exp: 0 })).collect()
        }
        GroupSpec::RegularTree { .. } => {
            return Err(Error::Unsupported(format!("{} is a non-amenable built-in: no Følner family", spec.name())))
        }
    };
    Ok(out)
}

/// The `n`-th Følner set with its exact ratio `|∂_1 Ω| / |Ω|`.
pub fn folner_set(spec: &GroupSpec, gens: &GeneratingSet, n: usize) -> Result<FolnerSet> {
    if n == 0 && !matches!(spec, GroupSpec::IntCrossC2) {
        return Err(Error::Precondition("Følner index must be positive".into()));
    }
    let members = folner_members(spec, n)?;
    let steps = gens.steps(spec)?;
    let set: HashSet<&Element> = members.iter().collect();
    let mut boundary = Vec::new();
    for g in &members {
        for st in &steps {
            if !set.contains(&spec.mul(g, &st.element)?) {
                boundary.push(spec.key(g));
                break;
            }
        }
    }
    let mut keys: Vec<VertexKey> = members.iter().map(|g| spec.key(g)).collect();
    keys.sort();
    boundary.sort();
    let r = Rational64::new(boundary.len() as i64, keys.len() as i64);
    Ok(FolnerSet { n, keys, boundary, ratio: format!("{}/{}", r.numer(), r.denom()) })
}

/// Orbits of the subgroup `m Z^d` acting on `Z^d` by translation: labels are
/// coordinates mod `m`.
pub fn lattice_mod_family(dim: usize, m: i64) -> TransversalFamily {
    let spec = GroupSpec::IntLattice { dim };
    TransversalFamily::new(format!("{}Z^{} on Z^{}", m, dim, dim), (m as usize).pow(dim as u32), move |key| {
        match spec.parse_key(key)? {
            Element::Lattice(v) => Ok(v.iter().fold(0usize, |acc, x| acc * m as usize + x.rem_euclid(m) as usize)),
            _ => unreachable!(),
        }
    })
}

/// Orbits of `Z x {0}` acting on `Z x Z/2`: labeled by the `Z/2` fibre.
pub fn cross_fibre_family() -> TransversalFamily {
    let spec = GroupSpec::IntCrossC2;
    TransversalFamily::new("Z x 0 on Z x Z/2", 2, move |key| match spec.parse_key(key)? {
        Element::Cross { x, .. } => Ok(x as usize),
        _ => unreachable!(),
    })
}

/// The whole group acting on itself: every singleton is a fundamental domain.
pub fn whole_group_family(spec: &GroupSpec) -> TransversalFamily {
    let spec = spec.clone();
    TransversalFamily::new(format!("{} on itself", spec.name()), 1, move |key| {
        spec.parse_key(key)?;
        Ok(0)
    })
}
