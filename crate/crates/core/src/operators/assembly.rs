use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::potential::PotentialSpec;
use crate::error::{Error, Result};
use crate::graph_core::{build_patch, GraphOracle, Patch, Region, VertexKey};
use crate::scalar::{convert, RealScalar, Scalar};

/// Sparse operator row keyed by column vertex.
pub type SparseRow<S> = BTreeMap<VertexKey, S>;

/// Row of `H = Δ + q` at `x`:
/// `Hφ(x) = (1/m_V) Σ m_E (φ(x) - φ(t(e))) + q(x) φ(x)`.
pub fn operator_row<S: Scalar>(oracle: &impl GraphOracle<S>, q: &PotentialSpec<S>, x: &VertexKey) -> Result<SparseRow<S>> {
    let (l, p0) = lp_transform(oracle, q, &S::zero(), x)?;
    let mut row: SparseRow<S> = l.into_iter().map(|(k, v)| (k, -v)).collect();
    let d = row.entry(x.clone()).or_insert_with(S::zero);
    *d = d.clone() + p0;
    row.retain(|_, v| !v.is_zero());
    Ok(row)
}

/// Returns the row of `L φ(x) = (1/m_V) Σ m_E φ(t(e))` and
/// `p_λ(x) = q(x) - λ + (1/m_V) Σ m_E`, so that `H - λ = p_λ - L`.
pub fn lp_transform<S: Scalar>(
    oracle: &impl GraphOracle<S>,
    q: &PotentialSpec<S>,
    lambda: &S,
    x: &VertexKey,
) -> Result<(SparseRow<S>, S)> {
    let mv = oracle.vertex_weight(x)?;
    let mut l = SparseRow::new();
    let mut mass = S::zero();
    for b in oracle.out_edges(x)? {
        let m = b.mass();
        mass = mass + m.clone();
        let e = l.entry(b.terminus).or_insert_with(S::zero);
        *e = e.clone() + m / mv.clone();
    }
    let p = q.eval(x)? - lambda.clone() + mass / mv;
    Ok((l, p))
}

/// Sparse matrix in row-major form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<S> {
    pub ncols: usize,
    pub rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> SparseMatrix<S> {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.rows[i].iter().find(|(c, _)| *c == j).map(|(_, v)| v.clone()).unwrap_or_else(S::zero)
    }

    pub fn to_dense<T: Scalar>(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.ncols]; self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                out[i][*j] = convert(v);
            }
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|row| row.iter().fold(S::zero(), |acc, (j, a)| acc + a.clone() * v[*j].clone()))
            .collect()
    }
}

/// `U*_Ω H U_Ω` together with the rows of `H` at the exterior neighbors,
/// restricted to columns in Ω.
#[derive(Clone, Debug)]
pub struct CompressedOperator<S> {
    pub region_keys: Vec<VertexKey>,
    pub exterior_keys: Vec<VertexKey>,
    pub interior: SparseMatrix<S>,
    pub coupling: SparseMatrix<S>,
    pub vertex_weights: Vec<S>,
    /// The matrices do not depend on a spectral parameter.
    pub lambda_independent: bool,
    pub descriptor: String,
}

/// Compresses `H = Δ + q` to a region of the patch.
pub fn compress<S: Scalar>(patch: &Patch<S>, q: &PotentialSpec<S>, region: &Region) -> Result<CompressedOperator<S>> {
    patch.require_complete(region)?;
    let order: Vec<usize> = region.iter().collect();
    let pos: HashMap<usize, usize> = order.iter().enumerate().map(|(a, &i)| (i, a)).collect();
    let exterior: Vec<usize> = patch.exterior_neighbors(region).iter().collect();
    let n = order.len();

    let mut rows = Vec::with_capacity(n);
    for &i in &order {
        let mv = patch.vertex_weight(i).clone();
        let mut row: BTreeMap<usize, S> = BTreeMap::new();
        row.insert(pos[&i], patch.out_mass(i).clone() / mv.clone() + q.eval(patch.key(i))?);
        for e in patch.adjacency(i) {
            if let Some(&c) = pos.get(&e.neighbor) {
                let entry = row.entry(c).or_insert_with(S::zero);
                *entry = entry.clone() - e.weight.clone() * S::from_ratio(e.multiplicity as i64, 1) / mv.clone();
            }
        }
        rows.push(row.into_iter().filter(|(_, v)| !v.is_zero()).collect());
    }
    let mut coupling = Vec::with_capacity(exterior.len());
    for &x in &exterior {
        let mv = patch.vertex_weight(x).clone();
        let mut row: BTreeMap<usize, S> = BTreeMap::new();
        for e in patch.adjacency(x) {
            if let Some(&c) = pos.get(&e.neighbor) {
                let entry = row.entry(c).or_insert_with(S::zero);
                *entry = entry.clone() - e.weight.clone() * S::from_ratio(e.multiplicity as i64, 1) / mv.clone();
            }
        }
        coupling.push(row.into_iter().collect());
    }
    Ok(CompressedOperator {
        region_keys: order.iter().map(|&i| patch.key(i).clone()).collect(),
        exterior_keys: exterior.iter().map(|&i| patch.key(i).clone()).collect(),
        interior: SparseMatrix { ncols: n, rows },
        coupling: SparseMatrix { ncols: n, rows: coupling },
        vertex_weights: order.iter().map(|&i| patch.vertex_weight(i).clone()).collect(),
        lambda_independent: true,
        descriptor: patch.descriptor().to_string(),
    })
}

/// Builds the minimal window around `keys` on the oracle and compresses.
pub fn compress_keys<S: Scalar>(
    oracle: &impl GraphOracle<S>,
    q: &PotentialSpec<S>,
    keys: &[VertexKey],
    cap: usize,
) -> Result<CompressedOperator<S>> {
    if keys.is_empty() {
        return Ok(CompressedOperator {
            region_keys: vec![],
            exterior_keys: vec![],
            interior: SparseMatrix { ncols: 0, rows: vec![] },
            coupling: SparseMatrix { ncols: 0, rows: vec![] },
            vertex_weights: vec![],
            lambda_independent: true,
            descriptor: oracle.descriptor(),
        });
    }
    let patch = build_patch(oracle, keys, 0, cap)?;
    let region = patch.region_from_keys(keys)?;
    compress(&patch, q, &region)
}

impl<S: Scalar> CompressedOperator<S> {
    pub fn len(&self) -> usize {
        self.region_keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.region_keys.is_empty()
    }

    /// Max over pairs of `|m_V(x) M[x,y] - m_V(y) M[y,x]|`.
    pub fn symmetry_defect(&self) -> S {
        let mut worst = S::zero();
        for (i, row) in self.interior.rows.iter().enumerate() {
            for (j, v) in row {
                let a = self.vertex_weights[i].clone() * v.clone();
                let b = self.vertex_weights[*j].clone() * self.interior.get(*j, i);
                worst = S::max_of(worst, (a - b).abs());
            }
        }
        worst
    }

    /// `W^{1/2} M W^{-1/2}` as a dense symmetric matrix.
    pub fn symmetrized_dense<T: RealScalar>(&self) -> Vec<Vec<T>> {
        let w: Vec<T> = self.vertex_weights.iter().map(|v| convert::<S, T>(v).sqrt()).collect();
        let mut m: Vec<Vec<T>> = self.interior.to_dense();
        for i in 0..m.len() {
            for j in 0..m.len() {
                if i != j {
                    m[i][j] = m[i][j] * w[i] / w[j];
                }
            }
        }
        // Exact symmetry: average the two triangles.
        for i in 0..m.len() {
            for j in 0..i {
                let v = (m[i][j] + m[j][i]) / T::lit(2.0);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    }

    /// Coupling block scaled to act on symmetrized coordinates: `C W^{-1/2}`.
    pub fn symmetrized_coupling<T: RealScalar>(&self) -> Vec<Vec<T>> {
        let w: Vec<T> = self.vertex_weights.iter().map(|v| convert::<S, T>(v).sqrt()).collect();
        let mut c: Vec<Vec<T>> = self.coupling.to_dense();
        for row in c.iter_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = *v / w[j];
            }
        }
        c
    }

    pub fn to_document(&self) -> CompressedDocument {
        let dense = |m: &SparseMatrix<S>| -> Vec<Vec<String>> {
            (0..m.nrows()).map(|i| (0..m.ncols).map(|j| m.get(i, j).to_exact_string()).collect()).collect()
        };
        CompressedDocument {
            version: crate::graph_core::EXCHANGE_VERSION,
            descriptor: self.descriptor.clone(),
            region: self.region_keys.clone(),
            exterior: self.exterior_keys.clone(),
            vertex_weights: self.vertex_weights.iter().map(Scalar::to_exact_string).collect(),
            lambda_independent: self.lambda_independent,
            interior: dense(&self.interior),
            coupling: dense(&self.coupling),
        }
    }

    pub fn from_document(doc: &CompressedDocument) -> Result<Self> {
        let parse = |s: &String| S::parse_exact(s).ok_or_else(|| Error::Data(format!("bad matrix entry {:?}", s)));
        let n = doc.region.len();
        let sparse = |rows: &Vec<Vec<String>>| -> Result<SparseMatrix<S>> {
            let mut out = Vec::new();
            for r in rows {
                if r.len() != n {
                    return Err(Error::Data("matrix row length differs from the region size".into()));
                }
                let mut row = Vec::new();
                for (j, s) in r.iter().enumerate() {
                    let v = parse(s)?;
                    if !v.is_zero() {
                        row.push((j, v));
                    }
                }
                out.push(row);
            }
            Ok(SparseMatrix { ncols: n, rows: out })
        };
        let interior = sparse(&doc.interior)?;
        let coupling = sparse(&doc.coupling)?;
        if interior.nrows() != n || coupling.nrows() != doc.exterior.len() || doc.vertex_weights.len() != n {
            return Err(Error::Data("compressed operator blocks have inconsistent shapes".into()));
        }
        Ok(CompressedOperator {
            region_keys: doc.region.clone(),
            exterior_keys: doc.exterior.clone(),
            interior,
            coupling,
            vertex_weights: doc.vertex_weights.iter().map(parse).collect::<Result<_>>()?,
            lambda_independent: doc.lambda_independent,
            descriptor: doc.descriptor.clone(),
        })
    }
}

/// Text form of a compressed operator: region and exterior keys plus dense
/// row-major blocks of exact strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressedDocument {
    pub version: u32,
    pub descriptor: String,
    pub region: Vec<VertexKey>,
    pub exterior: Vec<VertexKey>,
    pub vertex_weights: Vec<String>,
    pub lambda_independent: bool,
    pub interior: Vec<Vec<String>>,
    pub coupling: Vec<Vec<String>>,
}

/// `⟨H^k δ_x, δ_x⟩ = m_V(x) (H^k δ_x)(x)` by `k` sparse row applications on `B(x, k)`.
pub fn local_moment<S: Scalar>(
    oracle: &impl GraphOracle<S>,
    q: &PotentialSpec<S>,
    x: &VertexKey,
    k: usize,
    cap: usize,
) -> Result<S> {
    local_moments(oracle, q, x, k, cap).map(|mut v| v.pop().unwrap())
}

/// All moments `⟨H^j δ_x, δ_x⟩` for `j = 0..=k`.
pub fn local_moments<S: Scalar>(
    oracle: &impl GraphOracle<S>,
    q: &PotentialSpec<S>,
    x: &VertexKey,
    k: usize,
    cap: usize,
) -> Result<Vec<S>> {
    let mv = oracle.vertex_weight(x)?;
    let mut rows: HashMap<VertexKey, SparseRow<S>> = HashMap::new();
    let mut v: BTreeMap<VertexKey, S> = BTreeMap::from([(x.clone(), S::one())]);
    let mut out = vec![mv.clone()];
    for _ in 0..k {
        // Rows are local, so the support grows by one ring per step.
        let mut targets: Vec<VertexKey> = Vec::new();
        for z in v.keys() {
            if !rows.contains_key(z) {
                rows.insert(z.clone(), operator_row(oracle, q, z)?);
            }
            targets.extend(rows[z].keys().cloned());
        }
        targets.sort();
        targets.dedup();
        if targets.len() > cap {
            return Err(Error::ResourceLimit { what: format!("moment propagation around {}", x), cap });
        }
        let mut next = BTreeMap::new();
        for y in targets {
            if !rows.contains_key(&y) {
                rows.insert(y.clone(), operator_row(oracle, q, &y)?);
            }
            let val = rows[&y]
                .iter()
                .filter_map(|(z, a)| v.get(z).map(|vz| a.clone() * vz.clone()))
                .fold(S::zero(), |acc, t| acc + t);
            if !val.is_zero() {
                next.insert(y, val);
            }
        }
        v = next;
        out.push(v.get(x).cloned().unwrap_or_else(S::zero) * mv.clone());
    }
    Ok(out)
}
