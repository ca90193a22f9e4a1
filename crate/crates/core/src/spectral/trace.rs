use serde::{Deserialize, Serialize};

use super::eigen::EigenReport;
use super::linalg::{jacobi_svd, Dense};
use crate::error::{Error, Result};
use crate::exhaustion::{decide_uniqueness, UniquenessStatus};
use crate::graph_core::{packing_number, r_boundary, GraphOracle, Patch, Region, TransversalFamily, VertexKey};
use crate::operators::{compress, local_moments, PotentialSpec};
use crate::scalar::{RealScalar, Scalar};

/// `τ₁(p(H)) = (1/|D|) Σ_{x ∈ D} ⟨p(H) δ_x, δ_x⟩` with `coeffs[k]` the
/// coefficient of `t^k`. Finite propagation makes this exact up to round-off.
pub fn vn_trace_poly<S: Scalar>(
    oracle: &impl GraphOracle<S>,
    q: &PotentialSpec<S>,
    transversal: &[VertexKey],
    coeffs: &[S],
    cap: usize,
) -> Result<S> {
    if transversal.is_empty() {
        return Err(Error::Precondition("empty transversal".into()));
    }
    let degree = coeffs.len().saturating_sub(1);
    let mut total = S::zero();
    for x in transversal {
        let moments = local_moments(oracle, q, x, degree, cap)?;
        for (c, m) in coeffs.iter().zip(moments) {
            total = total + c.clone() * m;
        }
    }
    Ok(total / S::from_usize(transversal.len()))
}

/// `|Tr A| <= rank(A) ||A||` for a symmetric matrix; returns `(|Tr A|, rank, ||A||)`
/// with the numerical rank taken at `rank_tol * ||A||`.
pub fn trace_rank_norm<T: RealScalar>(a: &Dense<T>, rank_tol: T) -> Result<(T, usize, T)> {
    let n = a.len();
    let trace = (0..n).fold(T::zero(), |s, i| s + a[i][i]).abs();
    let svd = jacobi_svd(a, n)?;
    let norm = svd.max();
    let rank = svd.values.iter().filter(|s| **s > rank_tol * norm).count();
    Ok((trace, rank, norm))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// Comparison of an empirical eigenvalue mass with `|∂₂Ω| / P(Ω, 𝓕)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VnBoundReport {
    pub status: BoundStatus,
    pub lambda: f64,
    pub uniqueness: UniquenessStatus,
    pub region_size: usize,
    pub boundary_2: usize,
    pub packing: usize,
    pub orbit_count: usize,
    /// `|∂₂Ω| / P(Ω, 𝓕)`.
    pub bound: f64,
    /// Eigenvalues of the larger window in `[λ - ε, λ + ε]`.
    pub window_count: usize,
    pub window_size: usize,
    pub eps: f64,
    /// Unnormalized trace estimate `|D| · count / window size`.
    pub tau_hat: f64,
    /// Normalized trace estimate `count / window size`.
    pub tau1_hat: f64,
    pub tol: f64,
}

/// Checks `τ(E_{λ}) <= |∂₂Ω| / P(Ω, 𝓕)` with `τ(E_{λ})` estimated from the
/// spectrum of a larger window. Not applicable when uniqueness fails on Ω.
#[allow(clippy::too_many_arguments)]
pub fn vn_bound_check<S: Scalar, T: RealScalar>(
    patch: &Patch<S>,
    region: &Region,
    family: &TransversalFamily,
    q: &PotentialSpec<S>,
    window: &EigenReport<T>,
    lambda: f64,
    eps: f64,
    tol: f64,
) -> Result<VnBoundReport> {
    let packing = packing_number(patch, region, family)?;
    if packing == 0 {
        return Err(Error::Precondition(
            "bound undefined: the region contains no fundamental domain (packing number 0)".into(),
        ));
    }
    let boundary_2 = r_boundary(patch, region, 2)?.len();
    let verdict = decide_uniqueness::<S, T>(&compress(patch, q, region)?, lambda, crate::exhaustion::DEFAULT_UNIQUENESS_TOL)?;
    let spectrum: Vec<f64> = window.eigenvalues.iter().map(|x| x.to_f64().unwrap()).collect();
    let count = spectrum.iter().filter(|&&e| (e - lambda).abs() <= eps).count();
    let window_size = spectrum.len().max(1);
    let tau1_hat = count as f64 / window_size as f64;
    let tau_hat = tau1_hat * family.orbit_count() as f64;
    let bound = boundary_2 as f64 / packing as f64;
    let status = if verdict.status != UniquenessStatus::Unique {
        BoundStatus::NotApplicable
    } else if tau_hat <= bound + tol {
        BoundStatus::Pass
    } else {
        BoundStatus::Fail
    };
    Ok(VnBoundReport {
        status,
        lambda,
        uniqueness: verdict.status,
        region_size: region.len(),
        boundary_2,
        packing,
        orbit_count: family.orbit_count(),
        bound,
        window_count: count,
        window_size,
        eps,
        tau_hat,
        tau1_hat,
        tol,
    })
}
