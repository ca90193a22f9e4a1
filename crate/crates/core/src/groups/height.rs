use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::cayley::GeneratingSet;
use super::element::{busemann, Element, GroupSpec};
use crate::error::{Error, Result};
use crate::graph_core::{bfs_from, Patch, Region, VertexKey};
use crate::scalar::Scalar;

/// Integer heights on a Cayley graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeightSpec {
    /// A homomorphism to `Z`, given by its values on the generators (same order).
    Homomorphism { values: Vec<i64> },
    /// Busemann function of a fixed end of the regular tree.
    BusemannTree,
}

/// Structural proof that a height satisfies the three axioms everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightCertificate {
    pub group: String,
    pub kind: String,
    /// The generator `t` with `|h(t)| = 1`.
    pub raising_generator: Option<String>,
    /// Generators in the kernel.
    pub kernel_generators: Vec<String>,
    /// Coefficients of `h` on the coordinate functions of the group, exact.
    pub coefficients: Vec<String>,
    pub axioms: Vec<String>,
    pub scope: String,
    #[serde(skip)]
    function: Option<HeightFunction>,
}

impl HeightCertificate {
    pub fn height_function(&self) -> HeightFunction {
        self.function.clone().expect("certificates are built with their function")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightRejection {
    pub violating_generator: Option<String>,
    pub reason: String,
}

impl fmt::Display for HeightRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violating_generator {
            Some(g) => write!(f, "height rejected at generator {}: {}", g, self.reason),
            None => write!(f, "height rejected: {}", self.reason),
        }
    }
}

/// A height evaluated on vertex keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeightFunction {
    /// `h(g) = sum_i c_i * coord_i(g)`.
    Linear { spec: GroupSpec, coefficients: Vec<BigRational> },
    Busemann { spec: GroupSpec },
}

/// Integer coordinates through which every homomorphism to `Z` factors.
pub fn hom_coordinates(g: &Element) -> Vec<i64> {
    match g {
        Element::Lattice(v) => v.clone(),
        Element::Cross { k, .. } => vec![*k],
        Element::Lamp { cursor, .. } => vec![*cursor],
        Element::Affine { k, .. } => vec![*k],
        Element::Tree(_) => vec![],
    }
}

fn coordinate_count(spec: &GroupSpec) -> usize {
    match spec {
        GroupSpec::IntLattice { dim } => *dim,
        GroupSpec::RegularTree { .. } => 0,
        _ => 1,
    }
}

impl HeightFunction {
    pub fn eval_element(&self, g: &Element) -> Result<i64> {
        match self {
            HeightFunction::Linear { coefficients, .. } => {
                let v = hom_coordinates(g)
                    .iter()
                    .zip(coefficients)
                    .fold(BigRational::zero(), |acc, (x, c)| acc + c * BigRational::from_integer(BigInt::from(*x)));
                if !v.is_integer() {
                    return Err(Error::Data(format!("height {} is not an integer", v)));
                }
                v.to_integer().to_i64().ok_or_else(|| Error::Numerical("height overflow".into()))
            }
            HeightFunction::Busemann { .. } => match g {
                Element::Tree(w) => Ok(busemann(w)),
                _ => Err(Error::Data("Busemann height needs a tree element".into())),
            },
        }
    }

    pub fn eval(&self, key: &VertexKey) -> Result<i64> {
        let spec = match self {
            HeightFunction::Linear { spec, .. } | HeightFunction::Busemann { spec } => spec,
        };
        self.eval_element(&spec.parse_key(key)?)
    }
}

/// Solves `A c = b` over the rationals; `None` if inconsistent. Free variables are set to zero.
fn solve_rational(rows: Vec<Vec<BigRational>>, rhs: Vec<BigRational>, n: usize) -> Option<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.into_iter().zip(rhs).map(|(mut r, b)| {
        r.push(b);
        r
    }).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = BigRational::one() / m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..=n {
                    let d = &f * &m[row][j];
                    m[i][j] = &m[i][j] - d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut c = vec![BigRational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        c[col] = m[i][n].clone();
    }
    Some(c)
}

/// Accepts a height iff it realizes a split `S = {t} ∪ K` with `|h(t)| = 1`
/// and `h = 0` on `K` (up to inverses). Then for every vertex `g`:
/// (A) generator heights are at most 1 in absolute value, so `h` is 1-Lipschitz;
/// (B) `g t^{±1}` is the only neighbor one level up;
/// (C) `g t^{∓1}` is one level down.
pub fn certify_height(
    spec: &GroupSpec,
    gens: &GeneratingSet,
    h: &HeightSpec,
) -> std::result::Result<HeightCertificate, HeightRejection> {
    let reject = |g: Option<&Element>, reason: String| HeightRejection {
        violating_generator: g.map(|g| spec.canonical(g)),
        reason,
    };
    let axioms = vec![
        "A: |h(x) - h(y)| <= d(x, y)".to_string(),
        "B: exactly one neighbor one level up".to_string(),
        "C: at least one neighbor one level down".to_string(),
    ];
    match h {
        HeightSpec::BusemannTree => {
            let GroupSpec::RegularTree { degree } = spec else {
                return Err(reject(None, format!("Busemann height needs a regular tree, not {}", spec.name())));
            };
            let mut letters: Vec<u8> = Vec::new();
            for g in &gens.generators {
                match g {
                    Element::Tree(w) if w.len() == 1 => letters.push(w[0]),
                    _ => return Err(reject(Some(g), "generator is not a single letter".into())),
                }
            }
            letters.sort_unstable();
            letters.dedup();
            if letters.len() != *degree || *degree < 2 {
                return Err(reject(None, "generators must be all letters of the tree".into()));
            }
            Ok(HeightCertificate {
                group: spec.name(),
                kind: "busemann_tree".into(),
                raising_generator: None,
                kernel_generators: vec![],
                coefficients: vec![],
                axioms,
                scope: "structural".into(),
                function: Some(HeightFunction::Busemann { spec: spec.clone() }),
            })
        }
        HeightSpec::Homomorphism { values } => {
            if values.len() != gens.generators.len() {
                return Err(reject(
                    None,
                    format!("{} height values for {} generators", values.len(), gens.generators.len()),
                ));
            }
            let n = coordinate_count(spec);
            let rows = gens
                .generators
                .iter()
                .map(|g| hom_coordinates(g).into_iter().map(|x| BigRational::from_integer(x.into())).collect())
                .collect();
            let rhs = values.iter().map(|&v| BigRational::from_integer(v.into())).collect();
            let coefficients = solve_rational(rows, rhs, n).ok_or_else(|| {
                reject(None, "generator heights do not extend to a homomorphism to Z".into())
            })?;
            let f = HeightFunction::Linear { spec: spec.clone(), coefficients: coefficients.clone() };
            for (g, &v) in gens.generators.iter().zip(values) {
                if f.eval_element(g).ok() != Some(v) {
                    return Err(reject(Some(g), "generator height does not extend to a homomorphism to Z".into()));
                }
                if v.abs() > 1 {
                    return Err(reject(Some(g), format!("|h| = {} exceeds 1", v.abs())));
                }
            }
            let mut raising: Option<&Element> = None;
            let mut kernel = Vec::new();
            for (g, &v) in gens.generators.iter().zip(values) {
                if v == 0 {
                    kernel.push(spec.canonical(g));
                    continue;
                }
                match raising {
                    None => raising = Some(g),
                    Some(t) if spec.inv(t).ok().as_ref() == Some(g) => {}
                    Some(_) => return Err(reject(Some(g), "a second generator changes the height".into())),
                }
            }
            let Some(t) = raising else {
                return Err(reject(None, "no generator changes the height".into()));
            };
            Ok(HeightCertificate {
                group: spec.name(),
                kind: "homomorphism".into(),
                raising_generator: Some(spec.canonical(t)),
                kernel_generators: kernel,
                coefficients: coefficients.iter().map(|c| format!("{}", c)).collect(),
                axioms,
                scope: "structural".into(),
                function: Some(f),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightViolation {
    pub vertex: VertexKey,
    /// `'A'`, `'B'` or `'C'`.
    pub axiom: char,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightAxiomReport {
    pub checked: usize,
    pub violations: Vec<HeightViolation>,
}

impl HeightAxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the three height axioms at every sampled vertex of the window.
/// (A) is checked against all vertices within distance 2.
pub fn verify_height_axioms<S: Scalar>(
    patch: &Patch<S>,
    h: &dyn Fn(&VertexKey) -> Result<i64>,
    sample: &Region,
) -> Result<HeightAxiomReport> {
    patch.require_complete(sample)?;
    let heights: Vec<Option<i64>> = vec![None; patch.len()];
    let mut heights = heights;
    let mut height = |i: usize| -> Result<i64> {
        if let Some(v) = heights[i] {
            return Ok(v);
        }
        let v = h(patch.key(i))?;
        heights[i] = Some(v);
        Ok(v)
    };
    let mut report = HeightAxiomReport::default();
    for b in sample.iter() {
        report.checked += 1;
        let hb = height(b)?;
        let key = patch.key(b).clone();
        for (y, d) in bfs_from(patch, [b], 2, None).into_iter().enumerate() {
            if let Some(d) = d {
                let hy = height(y)?;
                if (hb - hy).unsigned_abs() > d as u64 {
                    report.violations.push(HeightViolation {
                        vertex: key.clone(),
                        axiom: 'A',
                        detail: format!("|h - h({})| = {} > {}", patch.key(y), (hb - hy).abs(), d),
                    });
                }
            }
        }
        let mut up = Vec::new();
        let mut down = 0;
        let neighbors: Vec<usize> = patch.neighbors(b).collect();
        for j in neighbors {
            let hj = height(j)?;
            if hj == hb + 1 {
                up.push(patch.key(j).to_string());
            } else if hj == hb - 1 {
                down += 1;
            }
        }
        if up.len() != 1 {
            report.violations.push(HeightViolation {
                vertex: key.clone(),
                axiom: 'B',
                detail: format!("{} neighbors one level up [{}]", up.len(), up.join("; ")),
            });
        }
        if down == 0 {
            report.violations.push(HeightViolation {
                vertex: key,
                axiom: 'C',
                detail: "no neighbor one level down".into(),
            });
        }
    }
    Ok(report)
}
