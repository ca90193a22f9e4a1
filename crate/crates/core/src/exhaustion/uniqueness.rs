use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::CompressedOperator;
use crate::scalar::{convert, RealScalar, Scalar};
use crate::spectral::eigen::cluster_sorted;
use crate::spectral::linalg::{jacobi_svd, symmetric_eigen, Dense};

pub const DEFAULT_UNIQUENESS_TOL: f64 = 1e-9;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessStatus {
    Unique,
    Witness,
    NumericallyMarginal,
}

/// Outcome of the rank test for `λ`-uniqueness on a finite region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessVerdict {
    pub status: UniquenessStatus,
    pub lambda: f64,
    /// Smallest singular value of `[M - λ; C]` (symmetrized); absent for the empty region.
    pub min_singular_value: Option<f64>,
    pub max_singular_value: Option<f64>,
    pub tol: f64,
    /// Kernel vectors over the region order, unit weighted norm (witness only).
    pub basis: Vec<Vec<f64>>,
}

fn sqrt_weights<S: Scalar, T: RealScalar>(op: &CompressedOperator<S>) -> Vec<T> {
    op.vertex_weights.iter().map(|w| convert::<S, T>(w).sqrt()).collect()
}

/// Maps a symmetrized vector `y` to `φ = W^{-1/2} y`, with the largest entry positive.
fn desymmetrize<T: RealScalar>(y: &[T], sqrt_w: &[T]) -> Vec<f64> {
    let mut phi: Vec<f64> = y.iter().zip(sqrt_w).map(|(a, s)| (*a / *s).to_f64().unwrap()).collect();
    let lead = phi.iter().cloned().fold(0.0f64, |m, v| if v.abs() > m.abs() + 1e-12 { v } else { m });
    if lead < 0.0 {
        for v in phi.iter_mut() {
            *v = -*v;
        }
    }
    phi
}

/// Decides `λ`-uniqueness on the region: a `λ`-eigenfunction supported in Ω
/// must satisfy `(M - λ) φ = 0` on Ω and `C φ = 0` at the exterior neighbors;
/// rows farther out vanish identically.
pub fn decide_uniqueness<S: Scalar, T: RealScalar>(op: &CompressedOperator<S>, lambda: f64, tol: f64) -> Result<UniquenessVerdict> {
    let n = op.len();
    if n == 0 {
        return Ok(UniquenessVerdict {
            status: UniquenessStatus::Unique,
            lambda,
            min_singular_value: None,
            max_singular_value: None,
            tol,
            basis: vec![],
        });
    }
    let lam = T::lit(lambda);
    let mut stacked: Dense<T> = op.symmetrized_dense();
    for (i, row) in stacked.iter_mut().enumerate() {
        row[i] = row[i] - lam;
    }
    stacked.extend(op.symmetrized_coupling::<T>());
    let svd = jacobi_svd(&stacked, n)?;
    let (smin, smax) = (svd.min(), svd.max());
    let scale = if smax > T::zero() { smax } else { T::one() };
    let t = T::lit(tol) * scale;
    let status = if smin <= t {
        UniquenessStatus::Witness
    } else if smin <= T::lit(10.0) * t {
        UniquenessStatus::NumericallyMarginal
    } else {
        UniquenessStatus::Unique
    };
    let sqrt_w = sqrt_weights::<S, T>(op);
    let basis = if status == UniquenessStatus::Witness {
        (0..n).filter(|&j| svd.values[j] <= t).map(|j| desymmetrize(&svd.right_vector(j), &sqrt_w)).collect()
    } else {
        vec![]
    };
    Ok(UniquenessVerdict {
        status,
        lambda,
        min_singular_value: Some(smin.to_f64().unwrap()),
        max_singular_value: Some(smax.to_f64().unwrap()),
        tol,
        basis,
    })
}

/// An eigenfunction of the infinite operator supported in the region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportedEigenfunction {
    pub lambda: f64,
    pub multiplicity: usize,
    /// Over the region order, unit weighted norm.
    pub basis: Vec<Vec<f64>>,
    /// Largest `||C φ||` over the basis.
    pub coupling_residual: f64,
    /// Largest residual of the zero extension over every window row.
    pub window_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSearch {
    pub hits: Vec<SupportedEigenfunction>,
    pub clusters: usize,
    /// Smallest coupling residual among clusters that were not emitted.
    pub min_rejected_residual: Option<f64>,
    pub cluster_tol: f64,
    pub residual_tol: f64,
}

/// Largest absolute residual of the zero extension of `phi` over all rows of
/// the window: `(M - λ) φ` on Ω and `C φ` on the exterior neighbors.
pub fn window_residual<S: Scalar>(op: &CompressedOperator<S>, lambda: f64, phi: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in op.interior.rows.iter().enumerate() {
        let v: f64 = row.iter().map(|(j, a)| a.to_f64_lossy() * phi[*j]).sum::<f64>() - lambda * phi[i];
        worst = worst.max(v.abs());
    }
    for row in &op.coupling.rows {
        let v: f64 = row.iter().map(|(j, a)| a.to_f64_lossy() * phi[*j]).sum();
        worst = worst.max(v.abs());
    }
    worst
}

/// Eigenvalues `λ` of the compression whose eigenspace meets the kernel of the
/// coupling block, i.e. exactly where `λ`-uniqueness on the region fails.
/// `cluster_tol` is relative to the spectral norm of the compression.
pub fn find_supported_eigenfunctions<S: Scalar, T: RealScalar>(
    op: &CompressedOperator<S>,
    cluster_tol: f64,
    residual_tol: f64,
) -> Result<EigenSearch> {
    let n = op.len();
    let mut out = EigenSearch { hits: vec![], clusters: 0, min_rejected_residual: None, cluster_tol, residual_tol };
    if n == 0 {
        return Ok(out);
    }
    let a: Dense<T> = op.symmetrized_dense();
    let c: Dense<T> = op.symmetrized_coupling();
    let (values, vectors) = symmetric_eigen(&a)?;
    let norm = values.iter().fold(T::zero(), |m, x| m.max(x.abs())).max(T::one());
    let sqrt_w = sqrt_weights::<S, T>(op);
    let clusters = cluster_sorted(&values, T::lit(cluster_tol) * norm);
    out.clusters = clusters.len();
    for range in clusters {
        let k = range.len();
        // Columns of the eigenbasis for this cluster.
        let q: Dense<T> = (0..n).map(|i| range.clone().map(|j| vectors[i][j]).collect()).collect();
        let b: Dense<T> = c
            .iter()
            .map(|row| (0..k).map(|j| row.iter().zip(&q).fold(T::zero(), |s, (x, qi)| s + *x * qi[j])).collect())
            .collect();
        let (sigmas, rights): (Vec<T>, Vec<Vec<T>>) = if b.is_empty() {
            (vec![T::zero(); k], (0..k).map(|j| (0..k).map(|i| if i == j { T::one() } else { T::zero() }).collect()).collect())
        } else {
            let svd = jacobi_svd(&b, k)?;
            let rights = (0..k).map(|j| svd.right_vector(j)).collect();
            (svd.values, rights)
        };
        let tol = T::lit(residual_tol);
        let mut basis = Vec::new();
        let mut worst = 0.0f64;
        let mut best_rejected: Option<f64> = None;
        let mut rayleigh = 0.0;
        for (s, v) in sigmas.iter().zip(&rights) {
            let s64 = s.to_f64().unwrap();
            if *s <= tol {
                let y: Vec<T> = q.iter().map(|qi| qi.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + *a * *b)).collect();
                let ay: Vec<T> = a.iter().map(|r| r.iter().zip(&y).fold(T::zero(), |acc, (p, q)| acc + *p * *q)).collect();
                let yy = y.iter().fold(T::zero(), |acc, v| acc + *v * *v);
                rayleigh += (y.iter().zip(&ay).fold(T::zero(), |acc, (p, q)| acc + *p * *q) / yy).to_f64().unwrap();
                basis.push(desymmetrize(&y, &sqrt_w));
                worst = worst.max(s64);
            } else {
                best_rejected = Some(best_rejected.map_or(s64, |b: f64| b.min(s64)));
            }
        }
        if let Some(r) = best_rejected {
            out.min_rejected_residual = Some(out.min_rejected_residual.map_or(r, |m| m.min(r)));
        }
        if !basis.is_empty() {
            let lambda = rayleigh / basis.len() as f64;
            let window = basis.iter().map(|phi| window_residual(op, lambda, phi)).fold(0.0, f64::max);
            out.hits.push(SupportedEigenfunction {
                lambda,
                multiplicity: basis.len(),
                basis,
                coupling_residual: worst,
                window_residual: window,
            });
        }
    }
    if out.hits.iter().any(|h| !h.lambda.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue in supported eigenfunction search".into()));
    }
    Ok(out)
}
