use cayley_spectra::graph_core::{Patch, Region};
use cayley_spectra::groups::{Convention, Element, GeneratingSet, GroupSpec};
use cayley_spectra::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Built-in graphs used by the randomized suites: (group, preset).
pub fn builtins() -> Vec<(GroupSpec, &'static str)> {
    vec![
        (GroupSpec::IntLattice { dim: 1 }, "standard"),
        (GroupSpec::IntLattice { dim: 2 }, "standard"),
        (GroupSpec::IntCrossC2, "two"),
        (GroupSpec::IntCrossC2, "figure3"),
        (GroupSpec::Lamplighter, "ac"),
        (GroupSpec::Lamplighter, "ab"),
        (GroupSpec::BaumslagSolitar12, "ab"),
        (GroupSpec::RegularTree { degree: 3 }, "letters"),
    ]
}

pub fn amenable_builtins() -> Vec<(GroupSpec, &'static str)> {
    builtins().into_iter().filter(|(s, _)| s.is_amenable()).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Product of `len` random generator steps.
pub fn random_word(spec: &GroupSpec, preset: &str, len: usize, rng: &mut impl Rng) -> Element {
    let gens = GeneratingSet::preset(spec, preset, Convention::Simple).unwrap();
    let steps = gens.steps(spec).unwrap();
    let mut g = spec.identity();
    for _ in 0..len {
        let s = &steps[rng.gen_range(0..steps.len())].element;
        g = spec.mul(&g, s).unwrap();
    }
    g
}

/// Random subset of the ball of radius `r` around the first seed, each member
/// kept with probability `p`.
pub fn random_region<S: Scalar>(patch: &Patch<S>, r: usize, p: f64, rng: &mut impl Rng) -> Region {
    patch.ball_region(r).iter().filter(|_| rng.gen_bool(p)).collect()
}

/// Random connected region grown from the seed inside the ball of radius `r`.
pub fn random_blob<S: Scalar>(patch: &Patch<S>, r: usize, size: usize, rng: &mut impl Rng) -> Region {
    let ball = patch.ball_region(r);
    let mut members = vec![0usize];
    let mut frontier: Vec<usize> = patch.neighbors(0).filter(|j| ball.contains(*j)).collect();
    while members.len() < size && !frontier.is_empty() {
        let j = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        if members.contains(&j) {
            continue;
        }
        members.push(j);
        frontier.extend(patch.neighbors(j).filter(|x| ball.contains(*x) && !members.contains(x)));
    }
    Region::new(members)
}
