use serde::{Deserialize, Serialize};

use super::linalg::{symmetric_eigen, symmetric_tridiagonal_eigen, Dense};
use crate::error::Result;
use crate::operators::CompressedOperator;
use crate::scalar::{convert, RealScalar, Scalar};

/// Eigen-decomposition of a compressed operator.
#[derive(Clone, Debug)]
pub struct EigenReport<T> {
    /// Ascending, one per region vertex.
    pub eigenvalues: Vec<T>,
    /// Distinct values with multiplicities after clustering.
    pub multiplicities: Vec<(T, usize)>,
    /// Eigenvectors as columns, in the original (unsymmetrized) coordinates,
    /// normalized in the `m_V`-weighted inner product.
    pub vectors: Option<Dense<T>>,
    /// Bound on `||A v - λ v|| / ||A||` over returned pairs.
    pub residual_bound: T,
    /// Solver used per connected component.
    pub paths: usize,
    pub dense_blocks: usize,
}

/// Serializable summary of an [`EigenReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub size: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<(f64, usize)>,
    pub residual_bound: f64,
}

impl<T: RealScalar> EigenReport<T> {
    pub fn summary(&self) -> EigenSummary {
        EigenSummary {
            size: self.eigenvalues.len(),
            eigenvalues: self.eigenvalues.iter().map(|x| x.to_f64().unwrap()).collect(),
            multiplicities: self.multiplicities.iter().map(|(x, m)| (x.to_f64().unwrap(), *m)).collect(),
            residual_bound: self.residual_bound.to_f64().unwrap(),
        }
    }

    /// Spectral norm of the compression.
    pub fn norm(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

/// Chains sorted values whose consecutive gaps are at most `tol`.
pub fn cluster_sorted<T: RealScalar>(values: &[T], tol: T) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Connected components of the off-diagonal pattern.
fn components<S: Scalar>(op: &CompressedOperator<S>) -> Vec<Vec<usize>> {
    let n = op.len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut k = 0;
        while k < members.len() {
            let v = members[k];
            k += 1;
            for (j, _) in &op.interior.rows[v] {
                if comp[*j] == usize::MAX {
                    comp[*j] = id;
                    members.push(*j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Orders a component as a simple path if its pattern is one.
fn as_path<S: Scalar>(op: &CompressedOperator<S>, members: &[usize]) -> Option<Vec<usize>> {
    let nbrs = |v: usize| op.interior.rows[v].iter().map(|(j, _)| *j).filter(move |&j| j != v);
    let mut ends = Vec::new();
    for &v in members {
        match nbrs(v).count() {
            0 | 1 => ends.push(v),
            2 => {}
            _ => return None,
        }
    }
    if members.len() == 1 {
        return Some(members.to_vec());
    }
    if ends.len() != 2 {
        return None;
    }
    let mut order = vec![ends[0]];
    let mut prev = usize::MAX;
    let mut cur = ends[0];
    while order.len() < members.len() {
        let next = nbrs(cur).find(|&j| j != prev)?;
        prev = cur;
        cur = next;
        order.push(cur);
    }
    Some(order)
}

/// Symmetrizes by square-root vertex weights and solves the symmetric
/// eigenproblem per connected component: path components by tridiagonal QL,
/// the others by dense Householder + QL.
pub fn eigensolve<S: Scalar, T: RealScalar>(op: &CompressedOperator<S>, want_vectors: bool) -> Result<EigenReport<T>> {
    let n = op.len();
    let sqrt_w: Vec<T> = op.vertex_weights.iter().map(|w| convert::<S, T>(w).sqrt()).collect();
    let entry = |i: usize, j: usize| -> T {
        let v: T = convert(&op.interior.get(i, j));
        if i == j {
            v
        } else {
            v * sqrt_w[i] / sqrt_w[j]
        }
    };
    let sym = |i: usize, j: usize| -> T { (entry(i, j) + entry(j, i)) / T::lit(2.0) };

    let mut pairs: Vec<(T, Option<Vec<T>>)> = Vec::with_capacity(n);
    let (mut paths, mut dense_blocks) = (0, 0);
    for members in components(op) {
        let (order, values, vecs) = if let Some(order) = as_path(op, &members) {
            paths += 1;
            let diag: Vec<T> = order.iter().map(|&i| entry(i, i)).collect();
            let off: Vec<T> = order.windows(2).map(|w| sym(w[0], w[1])).collect();
            let (d, v) = symmetric_tridiagonal_eigen(&diag, &off, want_vectors)?;
            (order, d, v)
        } else {
            dense_blocks += 1;
            let a: Dense<T> = members.iter().map(|&i| members.iter().map(|&j| sym(i, j)).collect()).collect();
            let (d, v) = symmetric_eigen(&a)?;
            (members, d, want_vectors.then_some(v))
        };
        for (k, val) in values.into_iter().enumerate() {
            let vec = vecs.as_ref().map(|v| {
                let mut full = vec![T::zero(); n];
                for (r, &i) in order.iter().enumerate() {
                    // Undo the symmetrization: φ = W^{-1/2} y.
                    full[i] = v[r][k] / sqrt_w[i];
                }
                full
            });
            pairs.push((val, vec));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<T> = pairs.iter().map(|p| p.0).collect();
    let norm = eigenvalues.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let tol = T::lit(1e-8) * norm.max(T::one());
    let multiplicities = cluster_sorted(&eigenvalues, tol)
        .into_iter()
        .map(|r| (eigenvalues[r.clone()].iter().fold(T::zero(), |s, x| s + *x) / <T as Scalar>::from_usize(r.len()), r.len()))
        .collect();

    let vectors: Option<Dense<T>> = want_vectors.then(|| {
        (0..n).map(|i| pairs.iter().map(|p| p.1.as_ref().unwrap()[i]).collect()).collect()
    });
    let residual_bound = match &vectors {
        Some(v) => {
            let mut worst = T::zero();
            for (k, lam) in eigenvalues.iter().enumerate() {
                for i in 0..n {
                    let av = op.interior.rows[i].iter().fold(T::zero(), |s, (j, a)| s + convert::<S, T>(a) * v[*j][k]);
                    worst = worst.max((av - *lam * v[i][k]).abs());
                }
            }
            worst / norm.max(T::epsilon())
        }
        None => T::epsilon() * <T as Scalar>::from_usize(n.max(1)) * T::lit(4.0),
    };
    Ok(EigenReport { eigenvalues, multiplicities, vectors, residual_bound, paths, dense_blocks })
}
