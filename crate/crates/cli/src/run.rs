use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use cayley_spectra::exhaustion::{
    decide_uniqueness, exhaustion_from_height, find_supported_eigenfunctions, search_exhaustion, verify_exhaustion,
    SearchConfig, SearchOutcome, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL, DEFAULT_UNIQUENESS_TOL,
};
use cayley_spectra::graph_core::{build_patch, Patch, Region, TransversalFamily, VertexKey, DEFAULT_VERTEX_CAP};
use cayley_spectra::groups::{
    certify_height, cross_fibre_family, folner_members, folner_set, lattice_mod_family, verify_height_axioms,
    CayleyOracle, GeneratingSet, GroupSpec, HeightFunction, HeightSpec,
};
use cayley_spectra::operators::{compress, OperatorWeightScheme, PotentialSpec};
use cayley_spectra::spectral::{
    detect_jumps, eigensolve, empirical_ids, exact_ids_line, moment_of_distribution, uniform_grid, vn_bound_check,
    vn_trace_poly, IDSCurve,
};
use cayley_spectra::Error;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    group_spec, Diagnostic, ExperimentConfig, FamilyConfig, HeightConfig, PotentialConfig, RegionSpec, SchemeConfig,
};
use crate::output::{sha256_hex, to_json_text, ArtifactWriter, ManifestEntry};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_WINDOW: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

#[derive(Debug)]
pub enum RunError {
    Validation(Vec<Diagnostic>),
    Core(Error),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => EXIT_VALIDATION,
            RunError::Core(e) => match e {
                Error::IncompleteWindow(_) => EXIT_WINDOW,
                Error::ResourceLimit { .. } => EXIT_RESOURCE,
                Error::Numerical(_) => EXIT_NUMERICAL,
                _ => EXIT_VALIDATION,
            },
            RunError::Io(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Validation(d) => {
                writeln!(f, "invalid configuration ({} problems):", d.len())?;
                for x in d {
                    writeln!(f, "  {}", x)?;
                }
                Ok(())
            }
            RunError::Core(e) => write!(f, "{}", e),
            RunError::Io(e) => write!(f, "i/o error: {}", e),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Core(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

type Result<T> = std::result::Result<T, RunError>;

fn invalid(path: &str, message: impl Into<String>) -> RunError {
    RunError::Validation(vec![Diagnostic { path: path.into(), message: message.into() }])
}

#[derive(Serialize)]
pub struct RunReport {
    pub task: String,
    pub config: ExperimentConfig,
    pub versions: BTreeMap<String, String>,
    pub vertex_cap: usize,
    pub wall_clock_seconds: f64,
    pub result: Value,
    /// Every artifact except this report, with its digest.
    pub manifest: Vec<ManifestEntry>,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    spec: GroupSpec,
    gens: GeneratingSet,
    oracle: CayleyOracle<f64>,
    cap: usize,
    rng: ChaCha8Rng,
}

pub fn run(cfg: &ExperimentConfig, cap_override: Option<usize>) -> Result<RunReport> {
    let start = Instant::now();
    let spec = group_spec(&cfg.group).map_err(|e| invalid("group", e))?;
    let gens = match &cfg.group.generators {
        Some(g) => GeneratingSet::from_strings(&spec, g, cfg.group.convention)?,
        None => {
            let preset = cfg.group.preset.clone().unwrap_or_else(|| GeneratingSet::default_preset(&spec).into());
            GeneratingSet::preset(&spec, &preset, cfg.group.convention)?
        }
    };
    let scheme = match &cfg.scheme {
        SchemeConfig::Combinatorial => OperatorWeightScheme::Combinatorial,
        SchemeConfig::Unit => OperatorWeightScheme::Unit,
        SchemeConfig::Markov { probabilities } => {
            let mut canon = BTreeMap::new();
            for (k, p) in probabilities {
                canon.insert(spec.canonical(&spec.parse(k)?), *p);
            }
            OperatorWeightScheme::Markov { probabilities: canon }
        }
    };
    let oracle = CayleyOracle::new(spec.clone(), gens.clone(), scheme)?;
    let cap = cap_override.or(cfg.vertex_cap).unwrap_or(DEFAULT_VERTEX_CAP);
    let mut ctx = Context { cfg, spec, gens, oracle, cap, rng: ChaCha8Rng::seed_from_u64(cfg.seed) };
    let mut out = ArtifactWriter::new(&cfg.output)?;
    let result = match cfg.task.as_str() {
        "patch" => ctx.patch(&mut out)?,
        "exhaust" => ctx.exhaust(&mut out)?,
        "uniqueness" => ctx.uniqueness(&mut out)?,
        "eigensearch" => ctx.eigensearch(&mut out)?,
        "ids" => ctx.ids(&mut out)?,
        "jumps" => ctx.jumps(&mut out)?,
        "bounds" => ctx.bounds(&mut out)?,
        "heightcheck" => ctx.heightcheck(&mut out)?,
        "folner" => ctx.folner(&mut out)?,
        "moments" => ctx.moments(&mut out)?,
        other => return Err(invalid("task", format!("unknown task {:?}", other))),
    };
    let versions = BTreeMap::from([
        ("cayley-spectra".to_string(), cayley_spectra::VERSION.to_string()),
        ("cayley-spectra-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ]);
    let report = RunReport {
        task: cfg.task.clone(),
        config: cfg.clone(),
        versions,
        vertex_cap: cap,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        result,
        manifest: out.manifest.clone(),
    };
    let text = to_json_text(&serde_json::to_value(&report).map_err(std::io::Error::other)?);
    std::fs::write(out.root().join("run_report.json"), text)?;
    Ok(report)
}

/// Uniform value in `[-1, 1]` fixed by the seed and the vertex, independent of the patch.
fn keyed_uniform(seed: u64, key: &VertexKey) -> f64 {
    let digest = sha256_hex(format!("{}:{}", seed, key).as_bytes());
    let bits = u64::from_str_radix(&digest[..16], 16).unwrap();
    (bits >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn lambdas(p: &crate::config::Params) -> Vec<f64> {
    p.lambdas.clone().unwrap_or_else(|| p.lambda.into_iter().collect())
}

impl Context<'_> {
    fn key(&self, s: &str) -> Result<VertexKey> {
        Ok(self.spec.key(&self.spec.parse(s)?))
    }

    fn center(&self, c: &Option<String>) -> Result<VertexKey> {
        match c {
            Some(s) => self.key(s),
            None => Ok(self.oracle.identity_key()),
        }
    }

    fn margin(&self) -> usize {
        self.cfg.params.margin.unwrap_or(2) as usize
    }

    fn region_keys(&mut self, r: &RegionSpec) -> Result<Vec<VertexKey>> {
        let mut keys: Vec<VertexKey> = match r {
            RegionSpec::Ball { radius, center } => {
                let p = build_patch(&self.oracle, &[self.center(center)?], *radius as usize, self.cap)?;
                p.region_keys(&p.ball_region(*radius as usize))
            }
            RegionSpec::Keys { keys } => keys.iter().map(|k| self.key(k)).collect::<Result<_>>()?,
            RegionSpec::Interval { from, to } => (*from..=*to).map(|k| self.key(&k.to_string())).collect::<Result<_>>()?,
            RegionSpec::Strip { n } => (-*n..=*n)
                .flat_map(|k| [0, 1].map(move |x| format!("{}|{}", k, x)))
                .map(|s| self.key(&s))
                .collect::<Result<_>>()?,
            RegionSpec::Folner { n } => folner_members(&self.spec, *n as usize)?.iter().map(|g| self.spec.key(g)).collect(),
            RegionSpec::RandomBlob { radius, size, center } => {
                let radius = *radius as usize;
                let p = build_patch(&self.oracle, &[self.center(center)?], radius, self.cap)?;
                let mut members: BTreeSet<usize> = BTreeSet::from([0]);
                while members.len() < *size as usize {
                    let mut grow: Vec<usize> = members
                        .iter()
                        .flat_map(|&v| p.neighbors(v).collect::<Vec<_>>())
                        .filter(|&u| p.depth(u) <= radius && !members.contains(&u))
                        .collect();
                    grow.sort_unstable();
                    grow.dedup();
                    match grow.choose(&mut self.rng) {
                        Some(&u) => members.insert(u),
                        None => break,
                    };
                }
                p.region_keys(&Region::new(members))
            }
        };
        keys.sort();
        keys.dedup();
        Ok(keys)
    }

    /// Patch around the keys with the configured margin, and the region they form.
    fn window(&self, keys: &[VertexKey]) -> Result<(Patch<f64>, Region)> {
        let patch = build_patch(&self.oracle, keys, self.margin(), self.cap)?;
        let region = patch.region_from_keys(keys)?;
        Ok((patch, region))
    }

    fn region(&mut self) -> Result<(Vec<VertexKey>, Patch<f64>, Region)> {
        let spec = self.cfg.region.clone().ok_or_else(|| invalid("region", "missing"))?;
        let keys = self.region_keys(&spec)?;
        let (p, r) = self.window(&keys)?;
        Ok((keys, p, r))
    }

    fn height(&self) -> Result<HeightFunction> {
        let h = match self.cfg.height.as_ref().ok_or_else(|| invalid("height", "missing"))? {
            HeightConfig::Homomorphism { values } => HeightSpec::Homomorphism { values: values.clone() },
            HeightConfig::BusemannTree => HeightSpec::BusemannTree,
        };
        certify_height(&self.spec, &self.gens, &h)
            .map(|c| c.height_function())
            .map_err(|e| invalid("height", e.to_string()))
    }

    fn potential(&self, patch: &Patch<f64>) -> Result<PotentialSpec<f64>> {
        Ok(match &self.cfg.potential {
            PotentialConfig::Zero => PotentialSpec::zero(),
            PotentialConfig::Constant { value } => PotentialSpec::constant(*value),
            PotentialConfig::HeightTable { table } => PotentialSpec::height_table(self.height()?, table.clone())?,
            PotentialConfig::Tabulated { values } => {
                let mut t = BTreeMap::new();
                for (k, v) in values {
                    t.insert(self.key(k)?, *v);
                }
                PotentialSpec::tabulated(t)
            }
            PotentialConfig::Random { amplitude } => PotentialSpec::tabulated(
                patch.keys().iter().map(|k| (k.clone(), amplitude * keyed_uniform(self.cfg.seed, k))).collect(),
            ),
        })
    }

    fn family(&self) -> Result<TransversalFamily> {
        Ok(match (&self.cfg.params.family, &self.spec) {
            (Some(FamilyConfig::SimplyTransitive), _) => TransversalFamily::simply_transitive(),
            (Some(FamilyConfig::LatticeMod { m }), GroupSpec::IntLattice { dim }) => lattice_mod_family(*dim, *m),
            (Some(FamilyConfig::LatticeMod { .. }), _) => {
                return Err(invalid("params.family", "lattice_mod needs int_lattice"))
            }
            (Some(FamilyConfig::CrossFibre), GroupSpec::IntCrossC2) | (None, GroupSpec::IntCrossC2) => {
                cross_fibre_family()
            }
            (Some(FamilyConfig::CrossFibre), _) => return Err(invalid("params.family", "cross_fibre needs int_cross_c2")),
            (None, _) => TransversalFamily::simply_transitive(),
        })
    }

    /// The exact IDS of `Z` applies to the combinatorial Laplacian on the standard line.
    fn exact_line(&self) -> bool {
        self.spec == GroupSpec::IntLattice { dim: 1 }
            && self.cfg.scheme == SchemeConfig::Combinatorial
            && self.cfg.potential == PotentialConfig::Zero
            && self.oracle.total_multiplicity() == 2
    }

    fn grid(&self) -> Result<Vec<f64>> {
        let g = self.cfg.params.grid.as_ref();
        Ok(uniform_grid(g.map_or(0.0, |g| g.start), g.map_or(2.0, |g| g.end), g.map_or(0.01, |g| g.step))?)
    }

    fn n_range(&self) -> Result<std::ops::RangeInclusive<usize>> {
        let [a, b] = self.cfg.params.n_range.ok_or_else(|| invalid("params.n_range", "missing"))?;
        Ok(a as usize..=b as usize)
    }

    fn patch(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let (keys, patch, region) = self.region()?;
        out.write_text("patch.json", &patch.to_json())?;
        out.write_json("region.json", &keys)?;
        let frontier = (0..patch.len()).filter(|&i| patch.is_frontier(i)).count();
        Ok(json!({
            "descriptor": patch.descriptor(),
            "vertices": patch.len(),
            "frontier": frontier,
            "region_size": region.len(),
            "patch_radius": patch.radius(),
        }))
    }

    fn exhaust(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let (keys, patch, region) = self.region()?;
        let p = &self.cfg.params;
        let (outcome, method) = if p.method.as_deref() == Some("height") {
            let h = self.height()?;
            let cert = exhaustion_from_height(&patch, &|k| h.eval(k), &region)?;
            (SearchOutcome::Found { certificate: cert, strategy: Default::default(), nodes: 0 }, "height")
        } else {
            let config = SearchConfig {
                strategy: p.strategy.unwrap_or_default(),
                node_limit: p.node_limit.map_or(SearchConfig::default().node_limit, |n| n as usize),
            };
            (search_exhaustion(&patch, &region, &config)?, "search")
        };
        let verdict = match outcome.certificate() {
            Some(c) => Some(verify_exhaustion(&patch, &region, c)?),
            None => None,
        };
        out.write_json("certificate.json", &json!({ "region": keys, "outcome": outcome, "verdict": verdict }))?;
        let kind = match &outcome {
            SearchOutcome::Found { .. } => "found",
            SearchOutcome::None { .. } => "none",
            SearchOutcome::Unknown { .. } => "unknown",
        };
        Ok(json!({
            "method": method,
            "region_size": region.len(),
            "outcome": kind,
            "steps": outcome.certificate().map(|c| c.len()),
            "verified": verdict.map(|v| v.is_ok()),
        }))
    }

    fn uniqueness(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let (keys, patch, region) = self.region()?;
        let q = self.potential(&patch)?;
        let op = compress(&patch, &q, &region)?;
        let tol = self.cfg.params.tol.unwrap_or(DEFAULT_UNIQUENESS_TOL);
        let verdicts = lambdas(&self.cfg.params)
            .into_iter()
            .map(|l| decide_uniqueness::<f64, f64>(&op, l, tol))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        out.write_json("uniqueness.json", &json!({ "region": keys, "verdicts": verdicts }))?;
        Ok(json!({
            "region_size": region.len(),
            "verdicts": verdicts.iter().map(|v| json!({
                "lambda": v.lambda,
                "status": v.status,
                "kernel_dimension": v.basis.len(),
                "min_singular_value": v.min_singular_value,
            })).collect::<Vec<_>>(),
        }))
    }

    fn eigensearch(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let (keys, patch, region) = self.region()?;
        let q = self.potential(&patch)?;
        let op = compress(&patch, &q, &region)?;
        let p = &self.cfg.params;
        let search = find_supported_eigenfunctions::<f64, f64>(
            &op,
            p.cluster_tol.unwrap_or(DEFAULT_CLUSTER_TOL),
            p.residual_tol.unwrap_or(DEFAULT_RESIDUAL_TOL),
        )?;
        out.write_json("eigensearch.json", &json!({ "region": op.region_keys, "search": search }))?;
        Ok(json!({
            "region_size": keys.len(),
            "clusters": search.clusters,
            "min_rejected_residual": search.min_rejected_residual,
            "hits": search.hits.iter().map(|h| json!({
                "lambda": h.lambda,
                "multiplicity": h.multiplicity,
                "coupling_residual": h.coupling_residual,
                "window_residual": h.window_residual,
            })).collect::<Vec<_>>(),
        }))
    }

    /// Curves for the configured region, or one per Følner index.
    fn curves(&mut self, grid: &[f64]) -> Result<Vec<(String, IDSCurve)>> {
        let sets: Vec<(String, Vec<VertexKey>)> = if self.cfg.params.n_range.is_some() {
            let mut v = Vec::new();
            for n in self.n_range()? {
                let keys = self.region_keys(&RegionSpec::Folner { n: n as i64 })?;
                v.push((format!("n{}", n), keys));
            }
            v
        } else {
            let spec = self.cfg.region.clone().ok_or_else(|| invalid("region", "missing"))?;
            vec![("region".to_string(), self.region_keys(&spec)?)]
        };
        let orbits = self.family()?.orbit_count();
        let mut out = Vec::new();
        for (label, keys) in sets {
            let (patch, region) = self.window(&keys)?;
            let op = compress(&patch, &self.potential(&patch)?, &region)?;
            let report = eigensolve::<f64, f64>(&op, false)?;
            let provenance = BTreeMap::from([
                ("descriptor".to_string(), op.descriptor.clone()),
                ("region".to_string(), label.clone()),
            ]);
            out.push((label, empirical_ids(&report, grid, orbits, provenance)?));
        }
        Ok(out)
    }

    fn ids(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let grid = self.grid()?;
        let mut records = Vec::new();
        for (label, curve) in self.curves(&grid)? {
            let file = format!("ids_{}.tsv", label);
            out.write_text(&file, &curve.to_tsv())?;
            let sup = self.exact_line().then(|| {
                grid.iter().zip(&curve.values).map(|(l, v)| (v - exact_ids_line(*l)).abs()).fold(0.0, f64::max)
            });
            records.push(json!({ "curve": file, "region_size": curve.region_size, "sup_deviation_from_exact": sup }));
        }
        Ok(json!({ "grid_points": grid.len(), "curves": records }))
    }

    fn jumps(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let grid = self.grid()?;
        let curves = self.curves(&grid)?;
        for (label, c) in &curves {
            out.write_text(&format!("ids_{}.tsv", label), &c.to_tsv())?;
        }
        let norm = curves.iter().flat_map(|(_, c)| c.spectrum.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        let eps = self.cfg.params.eps.unwrap_or(1e-3 * norm);
        let threshold = self.cfg.params.threshold.unwrap_or(0.02);
        let curves: Vec<IDSCurve> = curves.into_iter().map(|(_, c)| c).collect();
        let report = detect_jumps(&curves, eps, threshold)?;
        out.write_json("jumps.json", &report)?;
        Ok(json!({
            "eps": eps,
            "threshold": threshold,
            "sizes": report.sizes,
            "candidates": report.candidates.iter().map(|c| json!({
                "lambda": c.lambda, "masses": c.masses, "stable": c.stable,
            })).collect::<Vec<_>>(),
            "stable_count": report.stable().count(),
        }))
    }

    fn bounds(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let omega_spec = self.cfg.region.clone().ok_or_else(|| invalid("region", "missing"))?;
        let window_spec = self.cfg.params.window.clone().ok_or_else(|| invalid("params.window", "missing"))?;
        let omega = self.region_keys(&omega_spec)?;
        let window = self.region_keys(&window_spec)?;
        let all: Vec<VertexKey> = omega.iter().chain(&window).cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let patch = build_patch(&self.oracle, &all, self.margin(), self.cap)?;
        let q = self.potential(&patch)?;
        let wop = compress(&patch, &q, &patch.region_from_keys(&window)?)?;
        let report = eigensolve::<f64, f64>(&wop, false)?;
        let eps = self.cfg.params.eps.unwrap_or(1e-3 * report.norm());
        let tol = self.cfg.params.tol.unwrap_or(1e-12);
        let region = patch.region_from_keys(&omega)?;
        let family = self.family()?;
        let checks = lambdas(&self.cfg.params)
            .into_iter()
            .map(|l| vn_bound_check::<f64, f64>(&patch, &region, &family, &q, &report, l, eps, tol))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        out.write_json("bounds.json", &json!({ "family": family.name(), "checks": checks }))?;
        Ok(json!({
            "region_size": omega.len(),
            "window_size": window.len(),
            "eps": eps,
            "checks": checks.iter().map(|c| json!({
                "lambda": c.lambda, "status": c.status, "tau_hat": c.tau_hat, "bound": c.bound,
            })).collect::<Vec<_>>(),
        }))
    }

    fn heightcheck(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let h = match self.cfg.height.as_ref().ok_or_else(|| invalid("height", "missing"))? {
            HeightConfig::Homomorphism { values } => HeightSpec::Homomorphism { values: values.clone() },
            HeightConfig::BusemannTree => HeightSpec::BusemannTree,
        };
        let cert = match certify_height(&self.spec, &self.gens, &h) {
            Ok(c) => c,
            Err(rejection) => {
                out.write_json("height_rejection.json", &rejection)?;
                return Ok(json!({ "accepted": false, "reason": rejection.to_string() }));
            }
        };
        let f = cert.height_function();
        let r = self.cfg.params.sample_radius.unwrap_or(3) as usize;
        let patch = build_patch(&self.oracle, &[self.oracle.identity_key()], r + 2, self.cap)?;
        let axioms = verify_height_axioms(&patch, &|k| f.eval(k), &patch.ball_region(r))?;
        out.write_json("height_certificate.json", &json!({ "certificate": cert, "axioms": axioms }))?;
        Ok(json!({
            "accepted": true,
            "raising_generator": cert.raising_generator,
            "checked": axioms.checked,
            "violations": axioms.violations.len(),
        }))
    }

    fn folner(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let sets = self.n_range()?.map(|n| folner_set(&self.spec, &self.gens, n)).collect::<std::result::Result<Vec<_>, _>>()?;
        out.write_json("folner.json", &sets)?;
        Ok(json!({
            "sets": sets.iter().map(|s| json!({
                "n": s.n, "size": s.size(), "boundary": s.boundary.len(), "ratio": s.ratio,
            })).collect::<Vec<_>>(),
        }))
    }

    fn moments(&mut self, out: &mut ArtifactWriter) -> Result<Value> {
        let k_max = self.cfg.params.max_power.unwrap_or(6) as usize;
        let transversals: Vec<Vec<VertexKey>> = match &self.cfg.params.transversals {
            Some(ts) => ts.iter().map(|t| t.iter().map(|k| self.key(k)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?,
            None => vec![vec![self.oracle.identity_key()]],
        };
        let seeds: Vec<VertexKey> = transversals.iter().flatten().cloned().collect();
        let patch = build_patch(&self.oracle, &seeds, k_max, self.cap)?;
        let q = self.potential(&patch)?;
        let mut table = Vec::new();
        for t in &transversals {
            let mut row = Vec::new();
            for k in 0..=k_max {
                let mut coeffs = vec![0.0; k + 1];
                coeffs[k] = 1.0;
                row.push(vn_trace_poly(&self.oracle, &q, t, &coeffs, self.cap)?);
            }
            table.push(row);
        }
        let spread = (0..=k_max)
            .map(|k| table.iter().map(|r| r[k]).fold(f64::NEG_INFINITY, f64::max) - table.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        let quad_tol = self.cfg.params.quadrature_tol.unwrap_or(1e-11);
        let exact = if self.exact_line() {
            Some((0..=k_max).map(|k| moment_of_distribution(&exact_ids_line, k as u32, 0.0, 2.0, quad_tol)).collect::<std::result::Result<Vec<_>, _>>()?)
        } else {
            None
        };
        let deviation = exact.as_ref().map(|e| table.iter().flat_map(|r| r.iter().zip(e).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max));
        out.write_json("moments.json", &json!({ "transversals": transversals, "moments": table, "quadrature": exact }))?;
        Ok(json!({
            "max_power": k_max,
            "transversal_spread": spread,
            "max_deviation_from_quadrature": deviation,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_distinct_exit_codes() {
        let codes = [
            RunError::Validation(vec![]).exit_code(),
            RunError::Core(Error::IncompleteWindow("w".into())).exit_code(),
            RunError::Core(Error::ResourceLimit { what: "p".into(), cap: 1 }).exit_code(),
            RunError::Core(Error::Numerical("n".into())).exit_code(),
        ];
        assert_eq!(codes, [2, 3, 4, 5]);
        assert_eq!(RunError::Core(Error::Data("d".into())).exit_code(), EXIT_VALIDATION);
    }

    #[test]
    fn keyed_potential_does_not_depend_on_the_patch() {
        let k = VertexKey::new("3,4");
        let a = keyed_uniform(7, &k);
        assert_eq!(a, keyed_uniform(7, &k));
        assert_ne!(a, keyed_uniform(8, &k));
        assert!((-1.0..=1.0).contains(&a));
    }
}
