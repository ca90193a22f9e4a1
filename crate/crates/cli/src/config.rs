use std::collections::BTreeMap;
use std::fmt;

use cayley_spectra::exhaustion::SearchStrategy;
use cayley_spectra::groups::{Convention, GroupSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const TASKS: &[&str] =
    &["patch", "exhaust", "uniqueness", "eigensearch", "ids", "jumps", "bounds", "heightcheck", "folner", "moments"];

/// One experiment: a group, an operator on it, and one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: String,
    pub seed: u64,
    pub output: String,
    pub vertex_cap: Option<usize>,
    pub group: GroupConfig,
    pub scheme: SchemeConfig,
    pub potential: PotentialConfig,
    pub region: Option<RegionSpec>,
    pub params: Params,
    pub height: Option<HeightConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// int_lattice, int_cross_c2, lamplighter, baumslag_solitar_1_2 or regular_tree.
    pub kind: String,
    pub dim: Option<i64>,
    pub degree: Option<i64>,
    /// Named generating set; ignored when `generators` is given.
    pub preset: Option<String>,
    pub generators: Option<Vec<String>>,
    #[serde(default)]
    pub convention: Convention,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeConfig {
    #[default]
    Combinatorial,
    Unit,
    /// Transition probability per step, keyed by the canonical step element.
    Markov { probabilities: BTreeMap<String, f64> },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    #[default]
    Zero,
    Constant { value: f64 },
    /// `q(x) = table[h(x) mod len]` with `h` from the `[height]` section.
    HeightTable { table: Vec<f64> },
    Tabulated { values: BTreeMap<String, f64> },
    /// Independent uniform values in `[-amplitude, amplitude]` on the patch, drawn from the seed.
    Random { amplitude: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Ball { radius: i64, center: Option<String> },
    Keys { keys: Vec<String> },
    /// `{from, ..., to}` in `Z`.
    Interval { from: i64, to: i64 },
    /// `{(k, x) : |k| <= n}` in `Z x Z/2`.
    Strip { n: i64 },
    Folner { n: i64 },
    /// A connected random region of `size` vertices inside the ball of `radius`.
    RandomBlob { radius: i64, size: i64, center: Option<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HeightConfig {
    Homomorphism { values: Vec<i64> },
    BusemannTree,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    SimplyTransitive,
    LatticeMod { m: i64 },
    CrossFibre,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Patch layers kept around the region.
    pub margin: Option<i64>,
    pub lambda: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub grid: Option<GridConfig>,
    /// Inclusive Følner index range.
    pub n_range: Option<[i64; 2]>,
    pub eps: Option<f64>,
    pub threshold: Option<f64>,
    pub tol: Option<f64>,
    pub cluster_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub strategy: Option<SearchStrategy>,
    pub node_limit: Option<i64>,
    /// `search` or `height`.
    pub method: Option<String>,
    pub max_power: Option<i64>,
    pub transversals: Option<Vec<Vec<String>>>,
    pub window: Option<RegionSpec>,
    pub family: Option<FamilyConfig>,
    pub sample_radius: Option<i64>,
    pub quadrature_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn diag(path: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic { path: path.into(), message: message.into() }
}

/// Applies `a.b.c=value` overrides; the value is read as TOML, else as a string.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<(), Diagnostic> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| diag("--set", format!("expected key=value, got {:?}", assignment)))?;
    let value = match toml::from_str::<toml::Table>(&format!("v = {}", raw.trim())) {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let parts: Vec<&str> = path.trim().split('.').collect();
    let mut table = doc;
    for p in &parts[..parts.len() - 1] {
        let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| diag(path, format!("{} is not a table", p)))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn section<T: DeserializeOwned>(doc: &toml::Table, key: &str, diags: &mut Vec<Diagnostic>) -> Option<T> {
    let value = doc.get(key)?;
    match value.clone().try_into::<T>() {
        Ok(v) => Some(v),
        Err(e) => {
            diags.push(diag(key, e.message().trim().to_string()));
            None
        }
    }
}

/// Schema checks section by section, then semantic checks; every violation is reported.
pub fn parse_config(doc: &toml::Table) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    const KNOWN: &[&str] =
        &["task", "seed", "output", "vertex_cap", "group", "scheme", "potential", "region", "params", "height"];
    for k in doc.keys() {
        if !KNOWN.contains(&k.as_str()) {
            diags.push(diag(k, "unknown field"));
        }
    }
    let task = match doc.get("task").map(|v| v.as_str()) {
        Some(Some(t)) => t.to_string(),
        Some(None) => {
            diags.push(diag("task", "must be a string"));
            String::new()
        }
        None => {
            diags.push(diag("task", "missing"));
            String::new()
        }
    };
    let seed = match doc.get("seed") {
        None => 0,
        Some(toml::Value::Integer(s)) if *s >= 0 => *s as u64,
        Some(_) => {
            diags.push(diag("seed", "must be a non-negative integer"));
            0
        }
    };
    let output = match doc.get("output") {
        None => "output".to_string(),
        Some(toml::Value::String(s)) => s.clone(),
        Some(_) => {
            diags.push(diag("output", "must be a string"));
            String::new()
        }
    };
    let vertex_cap = match doc.get("vertex_cap") {
        None => None,
        Some(toml::Value::Integer(c)) if *c > 0 => Some(*c as usize),
        Some(_) => {
            diags.push(diag("vertex_cap", "must be a positive integer"));
            None
        }
    };
    if doc.get("group").is_none() {
        diags.push(diag("group", "missing"));
    }
    let group: Option<GroupConfig> = section(doc, "group", &mut diags);
    let scheme: Option<SchemeConfig> = section(doc, "scheme", &mut diags);
    let potential: Option<PotentialConfig> = section(doc, "potential", &mut diags);
    let region: Option<RegionSpec> = section(doc, "region", &mut diags);
    let params: Option<Params> = section(doc, "params", &mut diags);
    let height: Option<HeightConfig> = section(doc, "height", &mut diags);

    let schema_ok = diags.is_empty();
    let config = ExperimentConfig {
        task,
        seed,
        output,
        vertex_cap,
        group: group.unwrap_or(GroupConfig {
            kind: String::new(),
            dim: None,
            degree: None,
            preset: None,
            generators: None,
            convention: Convention::Simple,
        }),
        scheme: scheme.unwrap_or_default(),
        potential: potential.unwrap_or_default(),
        region,
        params: params.unwrap_or_default(),
        height,
    };
    if schema_ok || doc.get("group").is_some() {
        diags.extend(semantic_checks(&config));
    }
    if diags.is_empty() {
        Ok(config)
    } else {
        diags.dedup();
        Err(diags)
    }
}

pub fn group_spec(g: &GroupConfig) -> Result<GroupSpec, String> {
    let spec = match g.kind.as_str() {
        "int_lattice" => {
            let dim = g.dim.ok_or("int_lattice needs dim")?;
            if dim <= 0 {
                return Err(format!("dim must be positive, got {}", dim));
            }
            GroupSpec::IntLattice { dim: dim as usize }
        }
        "int_cross_c2" => GroupSpec::IntCrossC2,
        "lamplighter" => GroupSpec::Lamplighter,
        "baumslag_solitar_1_2" => GroupSpec::BaumslagSolitar12,
        "regular_tree" => {
            let degree = g.degree.ok_or("regular_tree needs degree")?;
            if degree <= 0 {
                return Err(format!("degree must be positive, got {}", degree));
            }
            GroupSpec::RegularTree { degree: degree as usize }
        }
        other => return Err(format!("unknown group kind {:?}", other)),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn check_nonneg(diags: &mut Vec<Diagnostic>, path: &str, v: i64) {
    if v < 0 {
        diags.push(diag(path, format!("must be non-negative, got {}", v)));
    }
}

fn check_region(diags: &mut Vec<Diagnostic>, path: &str, r: &RegionSpec, spec: Option<&GroupSpec>) {
    match r {
        RegionSpec::Ball { radius, .. } => check_nonneg(diags, &format!("{}.radius", path), *radius),
        RegionSpec::Keys { keys } => {
            if keys.is_empty() {
                diags.push(diag(&format!("{}.keys", path), "empty region"));
            }
            if let Some(spec) = spec {
                for k in keys {
                    if let Err(e) = spec.parse(k) {
                        diags.push(diag(&format!("{}.keys", path), e.to_string()));
                    }
                }
            }
        }
        RegionSpec::Interval { from, to } => {
            if from > to {
                diags.push(diag(path, format!("empty interval {}..{}", from, to)));
            }
            if spec.is_some_and(|s| *s != GroupSpec::IntLattice { dim: 1 }) {
                diags.push(diag(path, "interval regions need int_lattice with dim = 1"));
            }
        }
        RegionSpec::Strip { n } => {
            check_nonneg(diags, &format!("{}.n", path), *n);
            if spec.is_some_and(|s| *s != GroupSpec::IntCrossC2) {
                diags.push(diag(path, "strip regions need int_cross_c2"));
            }
        }
        RegionSpec::Folner { n } => {
            check_nonneg(diags, &format!("{}.n", path), *n);
            if let Some(s) = spec {
                check_amenable(diags, path, s);
            }
        }
        RegionSpec::RandomBlob { radius, size, .. } => {
            check_nonneg(diags, &format!("{}.radius", path), *radius);
            if *size <= 0 {
                diags.push(diag(&format!("{}.size", path), format!("must be positive, got {}", size)));
            }
        }
    }
}

fn check_amenable(diags: &mut Vec<Diagnostic>, path: &str, spec: &GroupSpec) {
    if let GroupSpec::RegularTree { .. } = spec {
        let why = if spec.is_amenable() { "no built-in Følner family" } else { "non-amenable built-in" };
        diags.push(diag(path, format!("{} is a {}: no Følner sequence", spec.name(), why)));
    }
}

fn semantic_checks(c: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut d = Vec::new();
    if !c.task.is_empty() && !TASKS.contains(&c.task.as_str()) {
        d.push(diag("task", format!("unknown task {:?}; expected one of {}", c.task, TASKS.join(", "))));
    }
    if c.output.is_empty() {
        d.push(diag("output", "empty output directory"));
    }
    let spec = match group_spec(&c.group) {
        Ok(s) => Some(s),
        Err(e) => {
            if !c.group.kind.is_empty() {
                d.push(diag("group", e));
            }
            None
        }
    };
    if let (Some(spec), None) = (&spec, &c.group.generators) {
        if let Some(p) = &c.group.preset {
            if let Err(e) = cayley_spectra::groups::GeneratingSet::preset(spec, p, c.group.convention) {
                d.push(diag("group.preset", e.to_string()));
            }
        }
    }
    if let (Some(spec), Some(gens)) = (&spec, &c.group.generators) {
        if let Err(e) = cayley_spectra::groups::GeneratingSet::from_strings(spec, gens, c.group.convention) {
            d.push(diag("group.generators", e.to_string()));
        }
    }
    if let SchemeConfig::Markov { probabilities } = &c.scheme {
        if probabilities.values().any(|p| !(*p > 0.0 && *p <= 1.0)) {
            d.push(diag("scheme.probabilities", "probabilities must lie in (0, 1]"));
        }
    }
    match &c.potential {
        PotentialConfig::HeightTable { table } => {
            if table.is_empty() {
                d.push(diag("potential.table", "empty table"));
            }
            if c.height.is_none() {
                d.push(diag("potential", "height_table needs a [height] section"));
            }
        }
        PotentialConfig::Random { amplitude } if !(*amplitude >= 0.0) => {
            d.push(diag("potential.amplitude", "must be non-negative"));
        }
        _ => {}
    }
    if let Some(r) = &c.region {
        check_region(&mut d, "region", r, spec.as_ref());
    }
    let p = &c.params;
    if let Some(m) = p.margin {
        check_nonneg(&mut d, "params.margin", m);
    }
    if let Some(r) = p.sample_radius {
        check_nonneg(&mut d, "params.sample_radius", r);
    }
    if let Some(w) = &p.window {
        check_region(&mut d, "params.window", w, spec.as_ref());
    }
    if let Some([a, b]) = p.n_range {
        if a < 0 || b < a {
            d.push(diag("params.n_range", format!("expected 0 <= start <= end, got [{}, {}]", a, b)));
        }
    }
    if let Some(g) = &p.grid {
        if !(g.step > 0.0) || !(g.end >= g.start) {
            d.push(diag("params.grid", "expected start <= end and step > 0"));
        }
    }
    for (name, v) in [
        ("params.eps", p.eps),
        ("params.threshold", p.threshold),
        ("params.tol", p.tol),
        ("params.cluster_tol", p.cluster_tol),
        ("params.residual_tol", p.residual_tol),
        ("params.quadrature_tol", p.quadrature_tol),
    ] {
        if let Some(v) = v {
            if !(v > 0.0) {
                d.push(diag(name, format!("must be positive, got {}", v)));
            }
        }
    }
    if let Some(n) = p.node_limit {
        if n <= 0 {
            d.push(diag("params.node_limit", "must be positive"));
        }
    }
    if let Some(k) = p.max_power {
        check_nonneg(&mut d, "params.max_power", k);
    }
    if let Some(m) = &p.method {
        if m != "search" && m != "height" {
            d.push(diag("params.method", format!("expected search or height, got {:?}", m)));
        }
    }
    if let Some(FamilyConfig::LatticeMod { m }) = &p.family {
        if *m <= 0 {
            d.push(diag("params.family.m", "must be positive"));
        }
    }
    if let (Some(spec), Some(ts)) = (&spec, &p.transversals) {
        for t in ts.iter().flatten() {
            if let Err(e) = spec.parse(t) {
                d.push(diag("params.transversals", e.to_string()));
            }
        }
    }

    let needs_region = ["patch", "exhaust", "uniqueness", "eigensearch", "bounds"];
    if needs_region.contains(&c.task.as_str()) && c.region.is_none() {
        d.push(diag("region", format!("task {} needs a [region]", c.task)));
    }
    match c.task.as_str() {
        "folner" | "jumps" => {
            if let Some(s) = &spec {
                check_amenable(&mut d, "task", s);
            }
            match p.n_range {
                None => d.push(diag("params.n_range", format!("task {} needs n_range", c.task))),
                Some([a, b]) if c.task == "jumps" && b - a < 2 => {
                    d.push(diag("params.n_range", "jump detection needs at least 3 Følner sets"))
                }
                _ => {}
            }
        }
        "ids" => {
            if c.region.is_none() && p.n_range.is_none() {
                d.push(diag("region", "task ids needs a [region] or params.n_range"));
            }
            if let (Some(s), Some(_)) = (&spec, p.n_range) {
                check_amenable(&mut d, "task", s);
            }
        }
        "uniqueness" => {
            if p.lambda.is_none() && p.lambdas.is_none() {
                d.push(diag("params.lambda", "task uniqueness needs lambda or lambdas"));
            }
        }
        "bounds" => {
            if p.lambda.is_none() && p.lambdas.is_none() {
                d.push(diag("params.lambda", "task bounds needs lambda or lambdas"));
            }
            if p.window.is_none() {
                d.push(diag("params.window", "task bounds needs a window region"));
            }
        }
        "heightcheck" => {
            if c.height.is_none() {
                d.push(diag("height", "task heightcheck needs a [height] section"));
            }
        }
        "exhaust" => {
            if p.method.as_deref() == Some("height") && c.height.is_none() {
                d.push(diag("height", "method = height needs a [height] section"));
            }
        }
        _ => {}
    }
    d
}

/// Published schema of the configuration file.
pub const SCHEMA: &str = r#"# Experiment configuration (TOML). One file describes one task.

task = "ids"            # patch | exhaust | uniqueness | eigensearch | ids | jumps
                        # | bounds | heightcheck | folner | moments
seed = 0                # fixes every randomized choice
output = "out/run"      # artifact directory
vertex_cap = 200000     # optional; env CAYLEY_SPECTRA_VERTEX_CAP and --vertex-cap override

[group]
kind = "int_lattice"    # int_lattice | int_cross_c2 | lamplighter
                        # | baumslag_solitar_1_2 | regular_tree
dim = 1                 # int_lattice only
# degree = 3            # regular_tree only
preset = "standard"     # standard | two | figure3 | ac | ab | letters
# generators = ["1|0", "0|1"]   # canonical element strings, replaces preset
convention = "simple"   # simple | serre

[scheme]
kind = "combinatorial"  # combinatorial | unit | markov
# probabilities = { "1" = 0.5, "-1" = 0.5 }   # markov: per canonical step

[potential]
kind = "zero"           # zero | constant {value} | height_table {table}
                        # | tabulated {values} | random {amplitude}

[region]                # ball {radius, center?} | keys {keys} | interval {from, to}
kind = "interval"       # | strip {n} | folner {n} | random_blob {radius, size, center?}
from = 1
to = 1000

[params]                # all optional, task dependent
# margin = 2            # patch layers kept around the region
# lambda = 1.2 / lambdas = [0.3, 0.7]
# grid = { start = 0.0, end = 2.0, step = 0.01 }
# n_range = [1, 3]      # inclusive Følner indices
# eps, threshold, tol, cluster_tol, residual_tol, quadrature_tol
# strategy = "greedy"   # greedy | backtracking
# node_limit = 1000000
# method = "search"     # exhaust: search | height
# max_power = 6         # moments
# transversals = [["0"], ["1"]]
# window = { kind = "interval", from = -100, to = 100 }   # bounds
# family = { kind = "simply_transitive" }  # | lattice_mod {m} | cross_fibre
# sample_radius = 3     # heightcheck

[height]                # homomorphism {values} | busemann_tree
kind = "homomorphism"
values = [1]
"#;
