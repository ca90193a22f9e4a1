use crate::error::{Error, Result};

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!("adaptive quadrature did not reach tolerance on [{}, {}]", a, b)));
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 60)
}

/// `∫ λ^k dN(λ)` for a distribution function `N` supported in `[lo, hi]`,
/// integrated by parts: `hi^k - ∫_lo^hi k λ^(k-1) N(λ) dλ`.
pub fn moment_of_distribution(n: &dyn Fn(f64) -> f64, k: u32, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let f = |l: f64| k as f64 * l.powi(k as i32 - 1) * n(l);
    Ok(hi.powi(k as i32) - lo.powi(k as i32) * n(lo) - adaptive_simpson(&f, lo, hi, tol)?)
}
