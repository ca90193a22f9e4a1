mod common;

use std::collections::BTreeMap;

use cayley_spectra::graph_core::{build_patch, ScaledOracle, DEFAULT_VERTEX_CAP};
use cayley_spectra::groups::{Convention, GroupSpec};
use cayley_spectra::operators::{
    compress, compress_keys, local_moment, local_moments, lp_transform, operator_row, CompressedOperator,
    OperatorWeightScheme, PotentialSpec,
};
use cayley_spectra::Error;
use common::*;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn line_rows() {
    let o = line::<BigRational>();
    let row = operator_row(&o, &PotentialSpec::zero(), &k("0")).unwrap();
    let want = BTreeMap::from([(k("-1"), q(-1, 2)), (k("0"), q(1, 1)), (k("1"), q(-1, 2))]);
    assert_eq!(row, want);

    let u = common::oracle::<BigRational>(GroupSpec::IntLattice { dim: 1 }, "standard", Convention::Simple, OperatorWeightScheme::Unit);
    let row = operator_row(&u, &PotentialSpec::zero(), &k("0")).unwrap();
    let want = BTreeMap::from([(k("-1"), q(-1, 1)), (k("0"), q(2, 1)), (k("1"), q(-1, 1))]);
    assert_eq!(row, want);
}

#[test]
fn figure3_row() {
    let o = cross::<BigRational>("figure3");
    let row = operator_row(&o, &PotentialSpec::zero(), &k("0|0")).unwrap();
    assert_eq!(row.len(), 6);
    assert_eq!(row[&k("0|0")], q(1, 1));
    assert!(row.iter().filter(|(x, _)| x.as_str() != "0|0").all(|(_, v)| *v == q(-1, 5)));
}

#[test]
fn markov_rows() {
    let probs = BTreeMap::from([("1".to_string(), q(1, 2)), ("-1".to_string(), q(1, 2))]);
    let o = common::oracle::<BigRational>(
        GroupSpec::IntLattice { dim: 1 },
        "standard",
        Convention::Simple,
        OperatorWeightScheme::Markov { probabilities: probs },
    );
    let row = operator_row(&o, &PotentialSpec::zero(), &k("3")).unwrap();
    assert_eq!(row[&k("3")], q(1, 1));
    assert_eq!(row[&k("4")], q(-1, 2));

    let bad = BTreeMap::from([("1".to_string(), q(1, 3)), ("-1".to_string(), q(2, 3))]);
    let spec = GroupSpec::IntLattice { dim: 1 };
    let gens = cayley_spectra::groups::GeneratingSet::preset(&spec, "standard", Convention::Simple).unwrap();
    let r = cayley_spectra::groups::CayleyOracle::<BigRational>::new(spec, gens, OperatorWeightScheme::Markov { probabilities: bad });
    assert!(matches!(r, Err(Error::Consistency(_))));
}

#[test]
fn compressions_on_the_line() {
    let o = line::<BigRational>();
    let c = compress_keys(&o, &PotentialSpec::zero(), &[k("0")], DEFAULT_VERTEX_CAP).unwrap();
    assert_eq!(c.interior.to_dense::<BigRational>(), vec![vec![q(1, 1)]]);
    assert_eq!(c.coupling.nrows(), 2);
    assert!(c.coupling.rows.iter().all(|r| r == &vec![(0, q(-1, 2))]));

    let e = compress_keys(&o, &PotentialSpec::zero(), &[], DEFAULT_VERTEX_CAP).unwrap();
    assert!(e.is_empty() && e.coupling.nrows() == 0);
}

#[test]
fn figure3_omega0_compression() {
    let o = cross::<BigRational>("figure3");
    let p = patch_around(&o, 2);
    let c = compress(&p, &PotentialSpec::zero(), &region(&p, &keys(&["0|0", "0|1"]))).unwrap();
    let m = c.interior.to_dense::<BigRational>();
    assert_eq!(m, vec![vec![q(1, 1), q(-1, 5)], vec![q(-1, 5), q(1, 1)]]);
    // Four exterior neighbors, each adjacent to both members: eight coupling entries.
    assert_eq!(c.coupling.nrows(), 4);
    let entries: Vec<&BigRational> = c.coupling.rows.iter().flatten().map(|(_, v)| v).collect();
    assert_eq!(entries.len(), 8);
    assert!(entries.iter().all(|v| **v == q(-1, 5)));
    assert_eq!(c.symmetry_defect(), q(0, 1));
    let back = CompressedOperator::<BigRational>::from_document(&c.to_document()).unwrap();
    assert_eq!(back.interior, c.interior);
    assert_eq!(back.coupling, c.coupling);
}

#[test]
fn lp_examples() {
    let o = line::<BigRational>();
    let (l, p) = lp_transform(&o, &PotentialSpec::zero(), &q(0, 1), &k("0")).unwrap();
    assert_eq!(l, BTreeMap::from([(k("-1"), q(1, 2)), (k("1"), q(1, 2))]));
    assert_eq!(p, q(1, 1));

    let c = cross::<BigRational>("figure3");
    for x in ["0|0", "5|1", "-2|0"] {
        let (_, p) = lp_transform(&c, &PotentialSpec::zero(), &q(6, 5), &k(x)).unwrap();
        assert_eq!(p, q(-1, 5));
    }
}

#[test]
fn moments_on_the_line() {
    let o = line::<BigRational>();
    let m = local_moments(&o, &PotentialSpec::zero(), &k("4"), 2, DEFAULT_VERTEX_CAP).unwrap();
    assert_eq!(m, vec![q(1, 1), q(1, 1), q(3, 2)]);
    assert_eq!(local_moment(&o, &PotentialSpec::zero(), &k("0"), 0, DEFAULT_VERTEX_CAP).unwrap(), q(1, 1));
    // Central binomial: <Δ^k δ_0, δ_0> = C(2k, k) / 2^k.
    assert_eq!(local_moment(&o, &PotentialSpec::zero(), &k("0"), 4, DEFAULT_VERTEX_CAP).unwrap(), q(70, 16));
}

#[test]
fn potentials_and_bounds() {
    let o = line::<BigRational>();
    let pot = PotentialSpec::tabulated(BTreeMap::from([(k("0"), q(3, 1))]));
    let row = operator_row(&o, &pot, &k("0")).unwrap();
    assert_eq!(row[&k("0")], q(4, 1));
    let mut lying = PotentialSpec::constant(q(2, 1));
    lying.bound = q(1, 1);
    assert!(matches!(operator_row(&o, &lying, &k("0")), Err(Error::Consistency(_))));
}

#[test]
fn scaled_weights_leave_rows_unchanged() {
    let o = cross::<BigRational>("figure3");
    let scaled = ScaledOracle { inner: o.clone(), factor: q(1, 3) };
    for x in ["0|0", "2|1"] {
        assert_eq!(
            operator_row(&o, &PotentialSpec::zero(), &k(x)).unwrap(),
            operator_row(&scaled, &PotentialSpec::zero(), &k(x)).unwrap()
        );
    }
    let p = build_patch(&scaled, &[k("0|0")], 2, DEFAULT_VERTEX_CAP).unwrap();
    let c = compress(&p, &PotentialSpec::zero(), &p.ball_region(1)).unwrap();
    assert!(c.vertex_weights.iter().all(|w| *w == q(1, 3)));
}
