use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::eigen::EigenReport;
use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Empirical integrated density of states of one compression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IDSCurve {
    pub grid: Vec<f64>,
    /// `#{eigenvalues <= λ} / |Ω|`.
    pub values: Vec<f64>,
    pub region_size: usize,
    /// Number of vertex orbits `|D|`; `τ = |D| τ₁`.
    pub orbit_count: usize,
    pub provenance: BTreeMap<String, String>,
    /// Full sorted spectrum, for evaluation off the grid.
    pub spectrum: Vec<f64>,
}

/// Uniform grid `start, start + step, ...` up to `end` inclusive (with slack for round-off).
pub fn uniform_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
        return Err(Error::Precondition("grid needs finite start <= end and step > 0".into()));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

pub fn empirical_ids<T: RealScalar>(
    report: &EigenReport<T>,
    grid: &[f64],
    orbit_count: usize,
    provenance: BTreeMap<String, String>,
) -> Result<IDSCurve> {
    if report.eigenvalues.is_empty() {
        return Err(Error::Precondition("empty eigenvalue report".into()));
    }
    if orbit_count == 0 {
        return Err(Error::Precondition("orbit count must be positive".into()));
    }
    let spectrum: Vec<f64> = report.eigenvalues.iter().map(|x| x.to_f64().unwrap()).collect();
    let mut curve = IDSCurve {
        grid: grid.to_vec(),
        values: Vec::new(),
        region_size: spectrum.len(),
        orbit_count,
        provenance,
        spectrum,
    };
    curve.values = grid.iter().map(|&l| curve.value_at(l)).collect();
    Ok(curve)
}

impl IDSCurve {
    /// `N̂(λ)`, right-continuous.
    pub fn value_at(&self, lambda: f64) -> f64 {
        self.spectrum.partition_point(|&e| e <= lambda) as f64 / self.region_size as f64
    }

    /// `N̂(λ + ε) - N̂(λ - ε)`.
    pub fn window_mass(&self, lambda: f64, eps: f64) -> f64 {
        self.value_at(lambda + eps) - self.value_at(lambda - eps)
    }

    /// Tab separated `λ  N̂` table after a `#` metadata header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {}: {}", k, v);
        }
        let _ = writeln!(out, "# region_size: {}", self.region_size);
        let _ = writeln!(out, "# orbit_count: {}", self.orbit_count);
        let _ = writeln!(out, "lambda\tids");
        for (l, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{:.16e}\t{:.16e}", l, v);
        }
        out
    }

    /// Reads the grid and values back from [`IDSCurve::to_tsv`] output.
    /// The spectrum is not stored in the table and comes back empty.
    pub fn from_tsv(text: &str) -> Result<IDSCurve> {
        let mut provenance = BTreeMap::new();
        let mut grid = Vec::new();
        let mut values = Vec::new();
        let (mut size, mut orbits) = (0usize, 1usize);
        let bad = |l: &str| Error::Data(format!("bad IDS table line {:?}", l));
        for line in text.lines() {
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta.split_once(": ").ok_or_else(|| bad(line))?;
                match k {
                    "region_size" => size = v.parse().map_err(|_| bad(line))?,
                    "orbit_count" => orbits = v.parse().map_err(|_| bad(line))?,
                    _ => {
                        provenance.insert(k.to_string(), v.to_string());
                    }
                }
            } else if line == "lambda\tids" || line.is_empty() {
                continue;
            } else {
                let (a, b) = line.split_once('\t').ok_or_else(|| bad(line))?;
                grid.push(a.parse().map_err(|_| bad(line))?);
                values.push(b.parse().map_err(|_| bad(line))?);
            }
        }
        Ok(IDSCurve { grid, values, region_size: size, orbit_count: orbits, provenance, spectrum: vec![] })
    }
}

/// Integrated density of states of the combinatorial Laplacian on `Z`.
pub fn exact_ids_line(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        0.0
    } else if lambda >= 2.0 {
        1.0
    } else {
        (1.0 - lambda).acos() / std::f64::consts::PI
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpCandidate {
    pub lambda: f64,
    /// Window mass for each curve, in input order.
    pub masses: Vec<f64>,
    /// `(max mass - last mass) / max mass`.
    pub drift: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    pub eps: f64,
    pub threshold: f64,
    /// Region sizes of the curves, in input order.
    pub sizes: Vec<usize>,
    pub candidates: Vec<JumpCandidate>,
}

impl JumpReport {
    pub fn stable(&self) -> impl Iterator<Item = &JumpCandidate> {
        self.candidates.iter().filter(|c| c.stable)
    }
}

/// Flags grid points where every curve carries at least `threshold` mass in
/// `(λ - ε, λ + ε]` and still does in `(λ - ε/2, λ + ε/2]`. A candidate is stable when the mass along the sequence
/// does not fall by half or more from its maximum. Runs of adjacent flagged
/// grid points are merged into the point with the largest minimal mass.
pub fn detect_jumps(curves: &[IDSCurve], eps: f64, threshold: f64) -> Result<JumpReport> {
    if curves.len() < 3 {
        return Err(Error::Precondition("jump detection needs at least 3 curves".into()));
    }
    let grid = &curves[0].grid;
    if curves.iter().any(|c| c.grid.len() != grid.len() || c.grid.iter().zip(grid).any(|(a, b)| (a - b).abs() > 1e-12)) {
        return Err(Error::Data("IDS curves have mismatched grids".into()));
    }
    let eval = |c: &IDSCurve, l: f64, e: f64| -> f64 {
        if c.spectrum.is_empty() {
            // Table-only curve: fall back to the nearest grid values.
            let lo = c.grid.partition_point(|&g| g <= l - e);
            let hi = c.grid.partition_point(|&g| g <= l + e);
            // Below the grid the table is taken to be flat.
            let at = |i: usize| c.values[i.max(1) - 1];
            at(hi) - at(lo)
        } else {
            c.window_mass(l, e)
        }
    };
    let mut flagged: Vec<(usize, JumpCandidate, f64)> = Vec::new();
    for (i, &l) in grid.iter().enumerate() {
        let masses: Vec<f64> = curves.iter().map(|c| eval(c, l, eps)).collect();
        let min = masses.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < threshold {
            continue;
        }
        // An atom keeps its mass when the window shrinks; a steep continuous
        // part (such as a band-edge singularity) does not.
        if curves.iter().any(|c| eval(c, l, 0.5 * eps) < threshold) {
            continue;
        }
        let max = masses.iter().cloned().fold(0.0, f64::max);
        let drift = (max - masses[masses.len() - 1]) / max;
        flagged.push((i, JumpCandidate { lambda: l, masses, drift, stable: drift < 0.5 }, min));
    }
    let mut candidates: Vec<JumpCandidate> = Vec::new();
    let mut last_index: Option<usize> = None;
    let mut best_min = 0.0;
    for (i, cand, min) in flagged {
        if last_index.is_some_and(|j| j + 1 == i) {
            if min > best_min {
                *candidates.last_mut().unwrap() = cand;
                best_min = min;
            }
        } else {
            candidates.push(cand);
            best_min = min;
        }
        last_index = Some(i);
    }
    Ok(JumpReport { eps, threshold, sizes: curves.iter().map(|c| c.region_size).collect(), candidates })
}
