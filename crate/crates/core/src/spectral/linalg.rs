//! Dense symmetric eigensolver (Householder tridiagonalization followed by
//! implicit QL) and a one-sided Jacobi SVD, generic over the float type.

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

const MAX_QL_ITERATIONS: usize = 64;
const MAX_JACOBI_SWEEPS: usize = 80;

/// Row-major dense matrix.
pub type Dense<T> = Vec<Vec<T>>;

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// On return `v` holds the orthogonal transform, `d` the diagonal and
/// `e[1..]` the subdiagonal.
fn tred2<T: RealScalar>(v: &mut Dense<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for k in 0..i {
            scale = scale + d[k].abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = zero;
                v[j][i] = zero;
            }
        } else {
            for k in 0..i {
                d[k] = d[k] / scale;
                h = h + d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g = g + v[k][j] * d[k];
                    e[k] = e[k] + v[k][j] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] = v[k][j] - (f * e[k] + g * d[k]);
                }
                d[j] = v[i - 1][j];
                v[i][j] = zero;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g = g + v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] = v[k][j] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = zero;
    }
    if n > 0 {
        v[n - 1][n - 1] = T::one();
        e[0] = zero;
    }
}

/// Implicit QL on a symmetric tridiagonal matrix (`e[i]` couples `i-1` and `i`).
/// Accumulates rotations into `v` when given. Output is sorted ascending.
fn tql2<T: RealScalar>(d: &mut [T], e: &mut [T], mut v: Option<&mut Dense<T>>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;
    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::Numerical(format!(
                        "QL iteration did not converge for eigenvalue {} of {} (|e| = {:e})",
                        l,
                        n,
                        e[l].to_f64().unwrap_or(f64::NAN)
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;
                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for row in v.iter_mut() {
                            let hk = row[i + 1];
                            row[i + 1] = s * row[i] + c * hk;
                            row[i] = c * row[i] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = zero;
    }
    // Selection sort keeps eigenvector columns aligned.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            if let Some(v) = v.as_deref_mut() {
                for row in v.iter_mut() {
                    row.swap(i, k);
                }
            }
        }
    }
    Ok(())
}

/// Eigenvalues (ascending) of a symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (`off[i]` couples `i` and `i+1`). With
/// `vectors`, also returns eigenvectors as columns of a row-major matrix.
pub fn symmetric_tridiagonal_eigen<T: RealScalar>(
    diag: &[T],
    off: &[T],
    vectors: bool,
) -> Result<(Vec<T>, Option<Dense<T>>)> {
    let n = diag.len();
    if n > 0 && off.len() + 1 != n {
        return Err(Error::Precondition("off-diagonal length must be n - 1".into()));
    }
    let mut d = diag.to_vec();
    let mut e = vec![T::zero(); n];
    for i in 1..n {
        e[i] = off[i - 1];
    }
    let mut v = vectors.then(|| identity::<T>(n));
    tql2(&mut d, &mut e, v.as_mut())?;
    Ok((d, v))
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a dense symmetric matrix.
pub fn symmetric_eigen<T: RealScalar>(a: &Dense<T>) -> Result<(Vec<T>, Dense<T>)> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Precondition("matrix is not square".into()));
    }
    if a.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let mut v = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut d, &mut e, Some(&mut v))?;
    Ok((d, v))
}

pub fn identity<T: RealScalar>(n: usize) -> Dense<T> {
    (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

/// Singular value decomposition data: singular values (descending) and the
/// matching right singular vectors as columns of `v`.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub values: Vec<T>,
    pub v: Dense<T>,
}

impl<T: RealScalar> Svd<T> {
    pub fn max(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn min(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    /// Column `j` of `v`.
    pub fn right_vector(&self, j: usize) -> Vec<T> {
        self.v.iter().map(|row| row[j]).collect()
    }
}

/// Householder QR of an `m x n` matrix (`m >= n`); returns the `n x n` factor `R`.
fn householder_r<T: RealScalar>(a: &Dense<T>, n: usize) -> Dense<T> {
    let m = a.len();
    // Column-major working copy.
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.iter().map(|r| r[j]).collect()).collect();
    for k in 0..n.min(m) {
        let norm = cols[k][k..].iter().fold(T::zero(), |s, x| s + *x * *x).sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if cols[k][k] > T::zero() { -norm } else { norm };
        let mut u: Vec<T> = cols[k][k..].to_vec();
        u[0] = u[0] - alpha;
        let unorm2 = u.iter().fold(T::zero(), |s, x| s + *x * *x);
        if unorm2 == T::zero() {
            continue;
        }
        for col in cols.iter_mut().skip(k) {
            let dot = u.iter().zip(&col[k..]).fold(T::zero(), |s, (a, b)| s + *a * *b);
            let f = T::lit(2.0) * dot / unorm2;
            for (x, ui) in col[k..].iter_mut().zip(&u) {
                *x = *x - f * *ui;
            }
        }
    }
    (0..n).map(|i| (0..n).map(|j| if i <= j && i < m { cols[j][i] } else { T::zero() }).collect()).collect()
}

/// One-sided Jacobi SVD. Tall inputs are first reduced to their `R` factor,
/// which has the same singular values and right singular vectors.
pub fn jacobi_svd<T: RealScalar>(a: &Dense<T>, ncols: usize) -> Result<Svd<T>> {
    let n = ncols;
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Precondition("ragged matrix".into()));
    }
    if a.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let work: Dense<T> = if a.len() > n { householder_r(a, n) } else { a.clone() };
    let mut u: Vec<Vec<T>> = (0..n).map(|j| work.iter().map(|r| r[j]).collect()).collect();
    let mut v: Vec<Vec<T>> = (0..n).map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect()).collect();
    let eps = T::epsilon();
    let norm2: T = u.iter().flatten().fold(T::zero(), |s, x| s + *x * *x);
    // Columns below eps * ||A||_F count as zero; orthogonality to sqrt(n) eps.
    let tiny = norm2 * eps * eps;
    let tol = eps * <T as Scalar>::from_usize(n.max(1)).sqrt();
    let dot = |x: &[T], y: &[T]| x.iter().zip(y).fold(T::zero(), |s, (a, b)| s + *a * *b);
    let mut converged = n < 2;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if alpha <= tiny || beta <= tiny || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for vecs in [&mut u, &mut v] {
                    let (lo, hi) = vecs.split_at_mut(q);
                    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let xp = *x;
                        let yq = *y;
                        *x = c * xp - s * yq;
                        *y = s * xp + c * yq;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!("Jacobi SVD did not converge in {} sweeps", MAX_JACOBI_SWEEPS)));
    }
    let mut order: Vec<(T, usize)> = u.iter().enumerate().map(|(j, c)| (dot(c, c).sqrt(), j)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|o| o.0).collect();
    let vmat = (0..n).map(|i| order.iter().map(|&(_, j)| v[j][i]).collect()).collect();
    Ok(Svd { values, v: vmat })
}

pub fn mat_vec<T: RealScalar>(a: &Dense<T>, x: &[T]) -> Vec<T> {
    a.iter().map(|r| r.iter().zip(x).fold(T::zero(), |s, (p, q)| s + *p * *q)).collect()
}

pub fn norm<T: RealScalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |s, v| s + *v * *v).sqrt()
}
