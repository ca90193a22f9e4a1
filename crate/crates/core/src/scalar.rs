//! Scalar abstraction shared by graph weights, operator assembly and traces.
//!
//! Assembly (patches, operator rows, compressions, local moments) is generic over
//! [`Scalar`], so the same code runs in `f64`, `f32`, or exact rational arithmetic.
//! Eigensolves need a [`RealScalar`] (a floating point type).

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio, Rational64};
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Field element used for weights, potentials and matrix entries.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Send + Sync + 'static
{
    /// `num / den`, exactly when the type allows it.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64_lossy(&self) -> f64;

    /// Canonical text form: shortest round-trip decimal for floats, `p/q` for rationals.
    fn to_exact_string(&self) -> String;

    /// Inverse of [`Scalar::to_exact_string`]; also accepts `p/q` and decimals.
    fn parse_exact(s: &str) -> Option<Self>;

    /// Absolute slack used by consistency checks (zero for exact types).
    fn check_tolerance() -> Self;

    fn is_exact() -> bool {
        false
    }

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    /// `|self - other| <= check_tolerance() * max(1, |self|, |other|)`.
    fn approx_eq(&self, other: &Self) -> bool {
        let diff = (self.clone() - other.clone()).abs();
        let scale = Self::max_of(Self::one(), Self::max_of(self.abs(), other.abs()));
        diff <= Self::check_tolerance() * scale
    }
}

/// Floating point scalars usable by the eigensolvers.
pub trait RealScalar: Scalar + Float + FromPrimitive + ToPrimitive + Copy {
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }
}

impl RealScalar for f64 {}
impl RealScalar for f32 {}

fn parse_rational_parts(s: &str) -> Option<(BigInt, BigInt)> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some((p, q));
    }
    // Plain decimal, optionally with exponent-free fractional part.
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    Some((num, den))
}

macro_rules! impl_float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }
            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
            fn to_exact_string(&self) -> String {
                // Rust's Display is the shortest string that round-trips.
                format!("{}", self)
            }
            fn parse_exact(s: &str) -> Option<Self> {
                let s = s.trim();
                if let Some((p, q)) = s.split_once('/') {
                    let p: $t = p.trim().parse().ok()?;
                    let q: $t = q.trim().parse().ok()?;
                    return Some(p / q);
                }
                s.parse().ok()
            }
            fn check_tolerance() -> Self {
                $tol
            }
        }
    };
}

impl_float_scalar!(f64, 1e-12);
impl_float_scalar!(f32, 1e-5);

impl Scalar for Rational64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn to_exact_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn parse_exact(s: &str) -> Option<Self> {
        let (p, q) = parse_rational_parts(s)?;
        let r = BigRational::new(p, q);
        Some(Ratio::new(r.numer().to_i64()?, r.denom().to_i64()?))
    }
    fn check_tolerance() -> Self {
        Self::zero()
    }
    fn is_exact() -> bool {
        true
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn to_exact_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn parse_exact(s: &str) -> Option<Self> {
        let (p, q) = parse_rational_parts(s)?;
        Some(BigRational::new(p, q))
    }
    fn check_tolerance() -> Self {
        Self::zero()
    }
    fn is_exact() -> bool {
        true
    }
}

/// Lossy conversion between scalar types through their exact string form
/// when possible, otherwise through `f64`.
pub fn convert<A: Scalar, B: Scalar>(x: &A) -> B {
    if A::is_exact() {
        if let Some(b) = B::parse_exact(&x.to_exact_string()) {
            if B::is_exact() {
                return b;
            }
        }
    }
    let v = x.to_f64_lossy();
    B::parse_exact(&format!("{:e}", v))
        .or_else(|| B::parse_exact(&format!("{}", v)))
        .unwrap_or_else(|| B::from_ratio(v.round() as i64, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_round_trip() {
        let r = BigRational::from_ratio(-6, 5);
        assert_eq!(r.to_exact_string(), "-6/5");
        assert_eq!(BigRational::parse_exact("-6/5"), Some(r));
        assert_eq!(BigRational::parse_exact("0.25"), Some(BigRational::from_ratio(1, 4)));
        assert_eq!(Rational64::parse_exact("-1.5"), Some(Rational64::new(-3, 2)));
        assert_eq!(BigRational::parse_exact("1/0"), None);
    }

    #[test]
    fn float_strings_round_trip() {
        let x = 0.1_f64 + 0.2;
        assert_eq!(f64::parse_exact(&x.to_exact_string()), Some(x));
        assert_eq!(f64::parse_exact("1/5"), Some(0.2));
    }

    #[test]
    fn conversion_between_fields() {
        let q = BigRational::from_ratio(1, 3);
        let f: f64 = convert(&q);
        assert!((f - 1.0 / 3.0).abs() < 1e-15);
        let back: Rational64 = convert(&BigRational::from_ratio(7, 2));
        assert_eq!(back, Rational64::new(7, 2));
        let g: f32 = convert(&2.5_f64);
        assert_eq!(g, 2.5);
    }

    #[test]
    fn approx_eq_respects_exactness() {
        assert!(1.0_f64.approx_eq(&(1.0 + 1e-14)));
        assert!(!Rational64::new(1, 3).approx_eq(&Rational64::new(333_333, 1_000_000)));
    }
}
