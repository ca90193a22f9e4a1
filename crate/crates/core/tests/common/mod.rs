#![allow(dead_code)]

use cayley_spectra::graph_core::{build_patch, Patch, Region, VertexKey, DEFAULT_VERTEX_CAP};
use cayley_spectra::groups::{CayleyOracle, Convention, GeneratingSet, GroupSpec};
use cayley_spectra::operators::OperatorWeightScheme;
use cayley_spectra::Scalar;

pub fn k(s: &str) -> VertexKey {
    VertexKey::new(s)
}

pub fn keys(list: &[&str]) -> Vec<VertexKey> {
    list.iter().map(|s| k(s)).collect()
}

pub fn oracle<S: Scalar>(spec: GroupSpec, preset: &str, conv: Convention, scheme: OperatorWeightScheme<S>) -> CayleyOracle<S> {
    let gens = GeneratingSet::preset(&spec, preset, conv).unwrap();
    CayleyOracle::new(spec, gens, scheme).unwrap()
}

pub fn line<S: Scalar>() -> CayleyOracle<S> {
    oracle(GroupSpec::IntLattice { dim: 1 }, "standard", Convention::Simple, OperatorWeightScheme::Combinatorial)
}

pub fn cross<S: Scalar>(preset: &str) -> CayleyOracle<S> {
    oracle(GroupSpec::IntCrossC2, preset, Convention::Simple, OperatorWeightScheme::Combinatorial)
}

pub fn patch_around<S: Scalar>(o: &CayleyOracle<S>, radius: usize) -> Patch<S> {
    build_patch(o, &[o.identity_key()], radius, DEFAULT_VERTEX_CAP).unwrap()
}

pub fn int_keys(range: impl IntoIterator<Item = i64>) -> Vec<VertexKey> {
    range.into_iter().map(|i| k(&i.to_string())).collect()
}

pub fn region<S: Scalar>(p: &Patch<S>, ks: &[VertexKey]) -> Region {
    p.region_from_keys(ks).unwrap()
}

/// `Ω_n = {(k, x) : |k| <= n}` on `Z x Z/2`.
pub fn strip(n: i64) -> Vec<VertexKey> {
    (-n..=n).flat_map(|i| [k(&format!("{}|0", i)), k(&format!("{}|1", i))]).collect()
}

pub fn sorted_keys<S: Scalar>(p: &Patch<S>, r: &Region) -> Vec<String> {
    let mut v: Vec<String> = p.region_keys(r).iter().map(|x| x.to_string()).collect();
    v.sort();
    v
}
pub mod random;
