mod common;

use cayley_spectra::exhaustion::{
    decide_uniqueness, exhaustion_from_height, find_supported_eigenfunctions, search_exhaustion, verify_exhaustion,
    window_residual, ExhaustionCertificate, ExhaustionVerdict, SearchConfig, SearchOutcome, SearchStrategy,
    UniquenessStatus, ViolationReason, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL, DEFAULT_UNIQUENESS_TOL,
};
use cayley_spectra::graph_core::{Region, VertexKey};
use cayley_spectra::groups::{certify_height, Convention, GeneratingSet, GroupSpec, HeightSpec};
use cayley_spectra::operators::{compress, OperatorWeightScheme, PotentialSpec};
use common::*;

/// The order drawn in Figures 1–2, continued to the end.
fn figure_order() -> ExhaustionCertificate {
    let pairs = [("2|1", "1|1"), ("2|0", "1|0"), ("1|1", "0|1"), ("1|0", "0|0"), ("0|1", "-1|1"), ("0|0", "-1|0")];
    ExhaustionCertificate { steps: pairs.iter().map(|(x, w)| (k(x), k(w))).collect() }
}

#[test]
fn empty_region_empty_certificate() {
    let o = line::<f64>();
    let p = patch_around(&o, 2);
    let v = verify_exhaustion(&p, &Region::empty(), &ExhaustionCertificate::default()).unwrap();
    assert_eq!(v, ExhaustionVerdict::Ok { steps: 0 });
    let id = |x: &VertexKey| Ok(x.as_str().parse::<i64>().unwrap());
    assert!(exhaustion_from_height(&p, &id, &Region::empty()).unwrap().is_empty());
}

#[test]
fn figures_one_two_order_verifies() {
    let o = cross::<f64>("two");
    let p = patch_around(&o, 4);
    let omega = region(&p, &strip(1));
    assert_eq!(verify_exhaustion(&p, &omega, &figure_order()).unwrap(), ExhaustionVerdict::Ok { steps: 6 });
}

#[test]
fn swapped_steps_fail_at_the_second_step() {
    let o = cross::<f64>("two");
    let p = patch_around(&o, 4);
    let omega = region(&p, &strip(1));
    let mut cert = figure_order();
    // Swapping the first two steps is still legal: (2, 0) sees only (1, 0).
    cert.steps.swap(0, 1);
    assert!(verify_exhaustion(&p, &omega, &cert).unwrap().is_ok());
    let mut cert = figure_order();
    cert.steps.swap(1, 2);
    assert_eq!(
        verify_exhaustion(&p, &omega, &cert).unwrap(),
        ExhaustionVerdict::Violation { step: 1, reason: ViolationReason::WitnessSees { count: 2 } }
    );
}

#[test]
fn other_violations() {
    let o = line::<f64>();
    let p = patch_around(&o, 5);
    let omega = region(&p, &int_keys(0..=1));
    let c = |pairs: &[(&str, &str)]| ExhaustionCertificate { steps: pairs.iter().map(|(x, w)| (k(x), k(w))).collect() };
    let v = |cert| verify_exhaustion(&p, &omega, &cert).unwrap();
    assert!(matches!(v(c(&[("-1", "7")])), ExhaustionVerdict::Violation { step: 0, reason: ViolationReason::RemovedNotRemaining }));
    assert!(matches!(v(c(&[("1", "0")])), ExhaustionVerdict::Violation { step: 0, reason: ViolationReason::WitnessInRemaining }));
    assert!(matches!(v(c(&[("-1", "1")])), ExhaustionVerdict::Violation { step: 0, reason: ViolationReason::WitnessSeesOther { .. } }));
    assert!(matches!(v(c(&[("-1", "0")])), ExhaustionVerdict::Violation { step: 1, reason: ViolationReason::Incomplete { remaining: 1 } }));
    assert!(matches!(v(c(&[("40", "0")])), ExhaustionVerdict::Violation { step: 0, reason: ViolationReason::WitnessSees { count: 0 } }));
    assert!(v(c(&[("-1", "0"), ("0", "1")])).is_ok());
}

#[test]
fn searches_on_the_cross_graphs() {
    let two = cross::<f64>("two");
    let p = patch_around(&two, 12);
    for n in 1..=10 {
        let omega = region(&p, &strip(n));
        let out = search_exhaustion(&p, &omega, &SearchConfig::default()).unwrap();
        let cert = out.certificate().expect("certificate");
        assert_eq!(cert.len(), omega.len());
        assert!(verify_exhaustion(&p, &omega, cert).unwrap().is_ok());
    }

    let fig = cross::<f64>("figure3");
    let p = patch_around(&fig, 3);
    let omega = region(&p, &strip(1));
    for strategy in [SearchStrategy::Greedy, SearchStrategy::Backtracking] {
        let out = search_exhaustion(&p, &omega, &SearchConfig { strategy, node_limit: 1_000_000 }).unwrap();
        assert!(matches!(out, SearchOutcome::None { .. }), "{:?}", out);
    }
}

#[test]
fn backtracking_respects_the_node_limit() {
    let two = cross::<f64>("two");
    let p = patch_around(&two, 6);
    let omega = region(&p, &strip(4));
    let out = search_exhaustion(&p, &omega, &SearchConfig { strategy: SearchStrategy::Backtracking, node_limit: 3 }).unwrap();
    assert!(matches!(out, SearchOutcome::Unknown { .. }));
}

#[test]
fn singleton_on_the_line() {
    let o = line::<f64>();
    let p = patch_around(&o, 3);
    let out = search_exhaustion(&p, &region(&p, &int_keys([0])), &SearchConfig::default()).unwrap();
    assert_eq!(out.certificate().unwrap().steps, vec![(k("-1"), k("0"))]);
}

#[test]
fn height_exhaustions() {
    let o = line::<f64>();
    let p = patch_around(&o, 4);
    let id = |x: &VertexKey| Ok(x.as_str().parse::<i64>().unwrap());
    let cert = exhaustion_from_height(&p, &id, &region(&p, &int_keys(-1..=1))).unwrap();
    assert_eq!(cert.steps, vec![(k("-2"), k("-1")), (k("-1"), k("0")), (k("0"), k("1"))]);

    let spec = GroupSpec::Lamplighter;
    let gens = GeneratingSet::preset(&spec, "ac", Convention::Simple).unwrap();
    let h = certify_height(&spec, &gens, &HeightSpec::Homomorphism { values: vec![1, 0] }).unwrap().height_function();
    let lo = common::oracle::<f64>(spec, "ac", Convention::Simple, OperatorWeightScheme::Combinatorial);
    let p = patch_around(&lo, 5);
    let ball = p.ball_region(4);
    let omega: Region = ball.iter().filter(|i| i % 3 != 1).collect();
    let hf = |x: &VertexKey| h.eval(x);
    let cert = exhaustion_from_height(&p, &hf, &omega).unwrap();
    assert!(verify_exhaustion(&p, &omega, &cert).unwrap().is_ok());
}

#[test]
fn uniqueness_examples() {
    let o = cross::<f64>("figure3");
    let p = patch_around(&o, 3);
    let empty = compress(&p, &PotentialSpec::zero(), &Region::empty()).unwrap();
    assert_eq!(decide_uniqueness::<f64, f64>(&empty, 0.3, DEFAULT_UNIQUENESS_TOL).unwrap().status, UniquenessStatus::Unique);

    let omega1 = region(&p, &strip(1));
    let c = compress(&p, &PotentialSpec::zero(), &omega1).unwrap();
    let v = decide_uniqueness::<f64, f64>(&c, 1.2, DEFAULT_UNIQUENESS_TOL).unwrap();
    assert_eq!(v.status, UniquenessStatus::Witness);
    // The three vertical dipoles at k = -1, 0, 1 all live in Ω_1.
    assert_eq!(v.basis.len(), 3);
    let at = |phi: &[f64], key: &str| phi[c.region_keys.iter().position(|x| x.as_str() == key).unwrap()];
    for phi in &v.basis {
        for kk in -1..=1 {
            assert!((at(phi, &format!("{}|0", kk)) + at(phi, &format!("{}|1", kk))).abs() < 1e-9);
        }
        assert!(window_residual(&c, 1.2, phi) < 1e-12);
    }
    // The Ω_0 dipole lies in the span: its projection onto the (orthonormal) basis has norm 1.
    let dipole: Vec<f64> = c
        .region_keys
        .iter()
        .map(|x| match x.as_str() {
            "0|0" => std::f64::consts::FRAC_1_SQRT_2,
            "0|1" => -std::f64::consts::FRAC_1_SQRT_2,
            _ => 0.0,
        })
        .collect();
    let proj: f64 = v.basis.iter().map(|b| b.iter().zip(&dipole).map(|(a, d)| a * d).sum::<f64>().powi(2)).sum();
    assert!((proj - 1.0).abs() < 1e-9, "{}", proj);

    let line = line::<f64>();
    let p = patch_around(&line, 7);
    let c = compress(&p, &PotentialSpec::zero(), &region(&p, &int_keys(-5..=5))).unwrap();
    let v = decide_uniqueness::<f64, f64>(&c, 0.7, DEFAULT_UNIQUENESS_TOL).unwrap();
    assert_eq!(v.status, UniquenessStatus::Unique);
    assert!(v.min_singular_value.unwrap() > 1e-8);
}

#[test]
fn eigensearch_examples() {
    let o = cross::<f64>("figure3");
    let p = patch_around(&o, 2);
    let c = compress(&p, &PotentialSpec::zero(), &region(&p, &strip(0))).unwrap();
    let s = find_supported_eigenfunctions::<f64, f64>(&c, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL).unwrap();
    assert_eq!(s.hits.len(), 1);
    let hit = &s.hits[0];
    assert!((hit.lambda - 1.2).abs() < 1e-9);
    assert_eq!(hit.multiplicity, 1);
    let phi = &hit.basis[0];
    assert!((phi[0] + phi[1]).abs() < 1e-9 && (phi[0].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);

    let line = line::<f64>();
    let p = patch_around(&line, 52);
    for n in [1, 7, 50] {
        let c = compress(&p, &PotentialSpec::zero(), &region(&p, &int_keys(-n..=n))).unwrap();
        let s = find_supported_eigenfunctions::<f64, f64>(&c, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL).unwrap();
        assert!(s.hits.is_empty());
        assert!(s.min_rejected_residual.unwrap() > 1e-6);
    }

    let lamp = common::oracle::<f64>(GroupSpec::Lamplighter, "ab", Convention::Simple, OperatorWeightScheme::Combinatorial);
    let p = patch_around(&lamp, 5);
    let c = compress(&p, &PotentialSpec::zero(), &p.ball_region(4)).unwrap();
    let s = find_supported_eigenfunctions::<f64, f64>(&c, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL).unwrap();
    assert!(!s.hits.is_empty());
    for hit in &s.hits {
        assert!(hit.window_residual <= 1e-9, "{:?}", (hit.lambda, hit.window_residual));
        let v = decide_uniqueness::<f64, f64>(&c, hit.lambda, DEFAULT_UNIQUENESS_TOL).unwrap();
        assert_eq!(v.status, UniquenessStatus::Witness, "{}", hit.lambda);
    }
}
