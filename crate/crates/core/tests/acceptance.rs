//! Acceptance criteria, each run at its stated tolerance. Prints one line per
//! criterion and exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use cayley_spectra::exhaustion::{
    exhaustion_from_height, find_supported_eigenfunctions, search_exhaustion, verify_exhaustion, SearchConfig,
    SearchOutcome, SearchStrategy, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL,
};
use cayley_spectra::graph_core::{
    build_patch, growth_volume, inclusive_radius, maximal_net, packing_number, r_boundary, r_interior,
    TransversalFamily, VertexKey,
};
use cayley_spectra::groups::{
    certify_height, cross_fibre_family, folner_members, folner_set, lattice_mod_family, whole_group_family, Convention,
    GeneratingSet, GroupSpec, HeightSpec,
};
use cayley_spectra::operators::{compress, compress_keys, lp_transform, operator_row, OperatorWeightScheme, PotentialSpec};
use cayley_spectra::spectral::{
    detect_jumps, eigensolve, empirical_ids, exact_ids_line, moment_of_distribution, uniform_grid, vn_bound_check,
    vn_trace_poly, BoundStatus, IDSCurve,
};
use cayley_spectra::Result;
use common::random::*;
use common::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn ids_of_the_line() -> Result<Outcome> {
    let o = line::<f64>();
    let m = 2001;
    let c = compress_keys(&o, &PotentialSpec::zero(), &int_keys(1..=m), 10_000)?;
    let r = eigensolve::<f64, f64>(&c, false)?;
    let grid = uniform_grid(0.0, 2.0, 0.01)?;
    let curve = empirical_ids(&r, &grid, 1, BTreeMap::new())?;
    let sup = grid.iter().zip(&curve.values).map(|(l, v)| (v - exact_ids_line(*l)).abs()).fold(0.0, f64::max);
    outcome(sup <= 0.005, format!("m = {}, sup deviation {:.3e} (tol 5e-3)", m, sup))
}

fn figure3_eigenvalue() -> Result<Outcome> {
    let o = cross::<f64>("figure3");
    let p = patch_around(&o, 2);
    let c = compress(&p, &PotentialSpec::zero(), &region(&p, &strip(0)))?;
    let s = find_supported_eigenfunctions::<f64, f64>(&c, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL)?;
    let Some(hit) = s.hits.first().filter(|_| s.hits.len() == 1) else {
        return outcome(false, format!("{} hits", s.hits.len()));
    };
    let phi = &hit.basis[0];
    let at = |key: &str| phi[c.region_keys.iter().position(|x| x.as_str() == key).unwrap()];
    let scale = at("0|0");
    let shape = (at("0|0") / scale - 1.0).abs().max((at("0|1") / scale + 1.0).abs());
    let pass = (hit.lambda - 1.2).abs() <= 1e-9 && hit.multiplicity == 1 && shape <= 1e-9 && hit.window_residual <= 1e-12;
    outcome(
        pass,
        format!(
            "λ = {:.15} (|λ - 6/5| = {:.1e}), multiplicity {}, shape error {:.1e}, window residual {:.1e}",
            hit.lambda,
            (hit.lambda - 1.2).abs(),
            hit.multiplicity,
            shape,
            hit.window_residual
        ),
    )
}

fn exhaustion_dichotomy() -> Result<Outcome> {
    let start = Instant::now();
    let two = cross::<f64>("two");
    let p = patch_around(&two, 12);
    let mut found = 0;
    for n in 1..=10 {
        let omega = region(&p, &strip(n));
        if let Some(cert) = search_exhaustion(&p, &omega, &SearchConfig::default())?.certificate() {
            if verify_exhaustion(&p, &omega, cert)?.is_ok() {
                found += 1;
            }
        }
    }
    let fig = cross::<f64>("figure3");
    let p = patch_around(&fig, 3);
    let omega = region(&p, &strip(1));
    let cfg = SearchConfig { strategy: SearchStrategy::Backtracking, node_limit: 1_000_000 };
    let none = matches!(search_exhaustion(&p, &omega, &cfg)?, SearchOutcome::None { .. });
    let secs = start.elapsed().as_secs_f64();
    outcome(
        found == 10 && none && secs < 10.0,
        format!("{}/10 verified certificates on the 2-generator graph, exhaustive none on Figure-3 Ω_1: {}, {:.2} s", found, none, secs),
    )
}

fn exhaustion_implies_uniqueness() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut pass = true;
    for (idx, (spec, preset)) in amenable_builtins().into_iter().enumerate() {
        let o = common::oracle::<f64>(spec.clone(), preset, Convention::Simple, OperatorWeightScheme::Combinatorial);
        let p = patch_around(&o, 5);
        let mut r = rng(4000 + idx as u64);
        let (mut certified, mut tries, mut hits) = (0, 0, 0);
        let mut min_residual = f64::INFINITY;
        while certified < 50 && tries < 5000 {
            tries += 1;
            let size = r.gen_range(1..60);
            let omega = if r.gen_bool(0.5) { random_blob(&p, 4, size, &mut r) } else { random_region(&p, 3, r.gen_range(0.2..0.9), &mut r) };
            if omega.is_empty() {
                continue;
            }
            let Some(cert) = search_exhaustion(&p, &omega, &SearchConfig::default())?.certificate().cloned() else {
                continue;
            };
            if !verify_exhaustion(&p, &omega, &cert)?.is_ok() {
                pass = false;
            }
            certified += 1;
            let c = compress(&p, &PotentialSpec::zero(), &omega)?;
            let s = find_supported_eigenfunctions::<f64, f64>(&c, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL)?;
            hits += s.hits.len();
            min_residual = min_residual.min(s.min_rejected_residual.unwrap_or(f64::INFINITY));
        }
        pass &= certified >= 50 && hits == 0 && min_residual > 1e-6;
        lines.push(format!("{} {}: {} regions, {} hits, min residual {:.2e}", spec.name(), preset, certified, hits, min_residual));
    }
    outcome(pass, lines.join("; "))
}

fn height_exhaustions() -> Result<Outcome> {
    let cases: Vec<(GroupSpec, &str, HeightSpec)> = vec![
        (GroupSpec::IntLattice { dim: 1 }, "standard", HeightSpec::Homomorphism { values: vec![1] }),
        (GroupSpec::IntLattice { dim: 2 }, "standard", HeightSpec::Homomorphism { values: vec![1, 0] }),
        (GroupSpec::Lamplighter, "ac", HeightSpec::Homomorphism { values: vec![1, 0] }),
        (GroupSpec::BaumslagSolitar12, "ab", HeightSpec::Homomorphism { values: vec![1, 0] }),
        (GroupSpec::RegularTree { degree: 3 }, "letters", HeightSpec::BusemannTree),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for (idx, (spec, preset, hs)) in cases.into_iter().enumerate() {
        let gens = GeneratingSet::preset(&spec, preset, Convention::Simple)?;
        let h = match certify_height(&spec, &gens, &hs) {
            Ok(c) => c.height_function(),
            Err(e) => return outcome(false, e.to_string()),
        };
        let hf = |x: &VertexKey| h.eval(x);
        let o = common::oracle::<f64>(spec.clone(), preset, Convention::Simple, OperatorWeightScheme::Combinatorial);
        let p = patch_around(&o, 6);
        let mut r = rng(5000 + idx as u64);
        let mut ok = 0;
        for _ in 0..50 {
            let omega = random_region(&p, 5, r.gen_range(0.05..0.95), &mut r);
            let good = match exhaustion_from_height(&p, &hf, &omega) {
                Ok(cert) => verify_exhaustion(&p, &omega, &cert)?.is_ok(),
                Err(_) => false,
            };
            ok += good as usize;
        }
        pass &= ok == 50;
        lines.push(format!("{}: {}/50", spec.name(), ok));
    }
    outcome(pass, lines.join("; "))
}

fn lamplighter_dichotomy() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut counts = BTreeMap::new();
    for preset in ["ab", "ac"] {
        let o = common::oracle::<f64>(GroupSpec::Lamplighter, preset, Convention::Simple, OperatorWeightScheme::Combinatorial);
        let p = patch_around(&o, 6);
        let mut good = 0;
        let mut lambdas: Vec<f64> = Vec::new();
        for radius in 1..=5 {
            let c = compress(&p, &PotentialSpec::zero(), &p.ball_region(radius))?;
            let s = find_supported_eigenfunctions::<f64, f64>(&c, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL)?;
            for hit in s.hits.iter().filter(|h| h.window_residual <= 1e-9) {
                good += 1;
                if !lambdas.iter().any(|l| (l - hit.lambda).abs() < 1e-9) {
                    lambdas.push(hit.lambda);
                }
            }
        }
        counts.insert(preset, good);
        lines.push(format!("{{{}}} balls r <= 5: {} hits at λ = {:?}", preset.chars().collect::<Vec<_>>().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","), good, lambdas.iter().map(|l| format!("{:.6}", l)).collect::<Vec<_>>()));
    }
    let grid = uniform_grid(0.0, 2.0, 0.01)?;
    let mut stable = BTreeMap::new();
    for preset in ["ab", "ac"] {
        let spec = GroupSpec::Lamplighter;
        let o = common::oracle::<f64>(spec.clone(), preset, Convention::Simple, OperatorWeightScheme::Combinatorial);
        let mut curves: Vec<IDSCurve> = Vec::new();
        for n in 1..=3 {
            let keys: Vec<VertexKey> = folner_members(&spec, n)?.iter().map(|g| spec.key(g)).collect();
            let c = compress_keys(&o, &PotentialSpec::zero(), &keys, 100_000)?;
            curves.push(empirical_ids(&eigensolve::<f64, f64>(&c, false)?, &grid, 1, BTreeMap::new())?);
        }
        let rep = detect_jumps(&curves, 0.002, 0.02)?;
        let s: Vec<f64> = rep.stable().map(|c| c.lambda).collect();
        lines.push(format!("{} jump candidates {:?} ({} stable)", preset, rep.candidates.iter().map(|c| c.lambda).collect::<Vec<_>>(), s.len()));
        stable.insert(preset, (rep.candidates.len(), s.len()));
    }
    let pass = counts["ab"] > 0 && counts["ac"] == 0 && stable["ab"].1 >= 1 && stable["ac"].0 == 0;
    outcome(pass, lines.join("; "))
}

fn schrodinger_adjacency_identity() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut rows = 0;
    let mut r = rng(7000);
    for (idx, (spec, preset)) in builtins().into_iter().enumerate() {
        let gens = GeneratingSet::preset(&spec, preset, Convention::Serre)?;
        let steps = gens.steps(&spec)?;
        let probs: BTreeMap<String, f64> =
            steps.iter().map(|s| (spec.canonical(&s.element), 1.0 / steps.len() as f64)).collect();
        let schemes = [OperatorWeightScheme::Combinatorial, OperatorWeightScheme::Unit, OperatorWeightScheme::Markov { probabilities: probs }];
        for (si, scheme) in schemes.into_iter().enumerate() {
            let o = common::oracle::<f64>(spec.clone(), preset, Convention::Serre, scheme);
            let p = patch_around(&o, 2);
            let table: BTreeMap<VertexKey, f64> = p.keys().iter().map(|x| (x.clone(), r.gen_range(-2.0..2.0))).collect();
            let pots = [PotentialSpec::zero(), PotentialSpec::constant(r.gen_range(-1.0..1.0)), PotentialSpec::tabulated(table)];
            for (pi, q) in pots.iter().enumerate() {
                let _ = (idx, si, pi);
                for x in p.keys().iter().take(40) {
                    let lam: f64 = r.gen_range(-3.0..3.0);
                    let row = operator_row(&o, q, x)?;
                    let (l, pl) = lp_transform(&o, q, &lam, x)?;
                    let mut keys: Vec<&VertexKey> = row.keys().chain(l.keys()).collect();
                    keys.sort();
                    keys.dedup();
                    for key in keys {
                        let h = row.get(key).copied().unwrap_or(0.0) - if key == x { lam } else { 0.0 };
                        let rhs = if key == x { pl } else { 0.0 } - l.get(key).copied().unwrap_or(0.0);
                        worst = worst.max((h - rhs).abs());
                    }
                    rows += 1;
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("{} rows, max |(H - λ) - (p_λ - L)| = {:.2e}", rows, worst))
}

fn trace_rank_norm_lemma() -> Result<Outcome> {
    let mut r = rng(8000);
    let mut failures = 0;
    let mut tight = 0.0f64;
    for _ in 0..500 {
        let n = r.gen_range(2..16);
        let rank = r.gen_range(0..=n);
        let mut a = vec![vec![0.0f64; n]; n];
        for _ in 0..rank {
            let v: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
            let s = if r.gen_bool(0.5) { 1.0 } else { -1.0 } * r.gen_range(0.1..3.0);
            for i in 0..n {
                for j in 0..n {
                    a[i][j] += s * v[i] * v[j];
                }
            }
        }
        let (tr, rk, norm) = cayley_spectra::spectral::trace_rank_norm(&a, 1e-10)?;
        // Round-off slack only: a few ulps of the right-hand side.
        if rk > rank || tr > rk as f64 * norm * (1.0 + 64.0 * f64::EPSILON) {
            failures += 1;
        }
        if rk > 0 && norm > 0.0 {
            tight = tight.max(tr / (rk as f64 * norm));
        }
    }
    outcome(failures == 0, format!("500 matrices, {} failures, max |Tr A| / (rank ||A||) = {:.6}", failures, tight))
}

struct LemmaTally {
    regions: usize,
    failures: usize,
}

fn geometry_lemmas() -> Result<Outcome> {
    let mut net = LemmaTally { regions: 0, failures: 0 };
    let mut bnd = LemmaTally { regions: 0, failures: 0 };
    let mut pack = LemmaTally { regions: 0, failures: 0 };
    let mut fol = LemmaTally { regions: 0, failures: 0 };
    let cap = 200_000;
    for (idx, (spec, preset)) in builtins().into_iter().enumerate() {
        let o = common::oracle::<f64>(spec.clone(), preset, Convention::Simple, OperatorWeightScheme::Combinatorial);
        let id = o.identity_key();
        let vol = |r: usize| growth_volume(&o, &[id.clone()], r, cap);
        let p = patch_around(&o, 7);
        let family: TransversalFamily = match &spec {
            GroupSpec::IntLattice { dim } => lattice_mod_family(*dim, 2),
            GroupSpec::IntCrossC2 => cross_fibre_family(),
            _ => whole_group_family(&spec),
        };
        let incl = inclusive_radius(&p, 0, &family)?;
        let mut r = rng(9000 + idx as u64);
        for _ in 0..15 {
            let omega = if r.gen_bool(0.5) {
                random_blob(&p, 5, r.gen_range(1..150), &mut r)
            } else {
                random_region(&p, 4, r.gen_range(0.3..1.0), &mut r)
            };
            for rr in 0..=2 {
                let n = maximal_net(&p, &omega, rr);
                net.regions += (rr == 0) as usize;
                if omega.len() > vol(rr)? * n.len() {
                    net.failures += 1;
                }
            }
            let b1 = r_boundary(&p, &omega, 1)?.len();
            bnd.regions += 1;
            for rr in 2..=4 {
                if r_boundary(&p, &omega, rr)?.len() > vol(rr - 1)? * b1 {
                    bnd.failures += 1;
                }
            }
            let rr = incl.max(1);
            pack.regions += 1;
            if r_interior(&p, &omega, rr)?.len() > vol(2 * rr)? * packing_number(&p, &omega, &family)? {
                pack.failures += 1;
            }
            fol.regions += 1;
            for rr in 1..=2 {
                let eps = (vol(rr)? * b1) as f64 / omega.len() as f64;
                if (r_interior(&p, &omega, rr)?.len() as f64) < (1.0 - eps) * omega.len() as f64 {
                    fol.failures += 1;
                }
            }
        }
        // Følner sets of the amenable built-ins.
        if spec.is_amenable() {
            let gens = GeneratingSet::preset(&spec, preset, Convention::Simple)?;
            let max_n = if matches!(spec, GroupSpec::Lamplighter) { 3 } else { 5 };
            for n in 1..=max_n {
                let f = folner_set(&spec, &gens, n)?;
                let fp = build_patch(&o, &f.keys, 0, cap)?;
                let omega = fp.region_from_keys(&f.keys)?;
                fol.regions += 1;
                for rr in 1..=2 {
                    let eps = (vol(rr)? * f.boundary.len()) as f64 / f.size() as f64;
                    if (r_interior(&fp, &omega, rr)?.len() as f64) < (1.0 - eps) * f.size() as f64 {
                        fol.failures += 1;
                    }
                }
            }
        }
    }
    let all = [&net, &bnd, &pack, &fol];
    let pass = all.iter().all(|t| t.regions >= 100 && t.failures == 0);
    outcome(
        pass,
        format!(
            "net {}/{}, boundaries {}/{}, packing {}/{}, Følner interior {}/{} (regions/failures)",
            net.regions, net.failures, bnd.regions, bnd.failures, pack.regions, pack.failures, fol.regions, fol.failures
        ),
    )
}

fn fundamental_domains() -> Result<Outcome> {
    let o = line::<f64>();
    let q = PotentialSpec::zero();
    let mut worst_domain = 0.0f64;
    let mut worst_moment = 0.0f64;
    for k in 0..=6usize {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        let a = vn_trace_poly(&o, &q, &keys(&["0", "1"]), &coeffs, 10_000)?;
        let b = vn_trace_poly(&o, &q, &keys(&["0", "3"]), &coeffs, 10_000)?;
        worst_domain = worst_domain.max((a - b).abs());
        let m = moment_of_distribution(&exact_ids_line, k as u32, 0.0, 2.0, 1e-11)?;
        worst_moment = worst_moment.max((a - m).abs());
    }
    outcome(
        worst_domain <= 1e-12 && worst_moment <= 1e-8,
        format!("transversals {{0,1}} vs {{0,3}}: {:.1e}; moments vs quadrature: {:.1e}", worst_domain, worst_moment),
    )
}

fn boundary_bound() -> Result<Outcome> {
    let o = line::<f64>();
    let p = patch_around(&o, 102);
    let n = 50;
    let omega = region(&p, &int_keys(-n..=n));
    let window = compress(&p, &PotentialSpec::zero(), &region(&p, &int_keys(-2 * n..=2 * n)))?;
    let report = eigensolve::<f64, f64>(&window, false)?;
    let eps = 1e-3 * report.norm();
    let mut lines = Vec::new();
    let mut pass = true;
    for lambda in [0.3, 0.7, 1.0, 1.5] {
        let r = vn_bound_check::<f64, f64>(&p, &omega, &TransversalFamily::simply_transitive(), &PotentialSpec::zero(), &report, lambda, eps, 1e-12)?;
        pass &= r.status == BoundStatus::Pass;
        lines.push(format!("λ = {}: τ̂ = {:.4} <= {:.4}", lambda, r.tau_hat, r.bound));
    }
    let c = cross::<f64>("figure3");
    let p = patch_around(&c, 12);
    let window = compress(&p, &PotentialSpec::zero(), &region(&p, &strip(10)))?;
    let report = eigensolve::<f64, f64>(&window, false)?;
    let r = vn_bound_check::<f64, f64>(&p, &region(&p, &strip(1)), &cross_fibre_family(), &PotentialSpec::zero(), &report, 1.2, 1e-3 * report.norm(), 1e-12)?;
    pass &= r.status == BoundStatus::NotApplicable;
    lines.push(format!("Figure-3 Ω_1 at 6/5: {:?}", r.status));
    outcome(pass, lines.join("; "))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Result<Outcome>)> = vec![
        ("IDS of Z against arccos(1 - λ)/π", ids_of_the_line),
        ("Figure 3 eigenvalue 6/5", figure3_eigenvalue),
        ("exhaustion dichotomy on Z x Z/2", exhaustion_dichotomy),
        ("exhaustion implies λ-uniqueness", exhaustion_implies_uniqueness),
        ("height functions give exhaustions", height_exhaustions),
        ("lamplighter dichotomy", lamplighter_dichotomy),
        ("Schrödinger to adjacency identity", schrodinger_adjacency_identity),
        ("trace bounded by rank times norm", trace_rank_norm_lemma),
        ("large-scale geometry lemmas", geometry_lemmas),
        ("fundamental domain independence", fundamental_domains),
        ("boundary bound on von Neumann traces", boundary_bound),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {}", e)),
        };
        failed += !pass as usize;
        println!(
            "criterion {:>2} {}: {} ({}) [{:.2} s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            name,
            detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{} criteria failed", failed);
        std::process::exit(1);
    }
}
