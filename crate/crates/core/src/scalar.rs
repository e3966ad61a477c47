//! Coefficient types.
//!
//! Everything on the exact path is written against [`Scalar`], which is
//! implemented for arbitrary-precision rationals, machine integers and the
//! two IEEE float widths. The crate root re-exports concrete aliases for the
//! exact instantiation.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// A commutative ring of coefficients that can absorb exact rationals.
///
/// `from_rational` is exact for [`BigRational`] and rounds for floats.
pub trait Scalar: Num + Clone + Debug + Send + Sync {
    fn from_rational(q: &BigRational) -> Self;

    fn from_u64(k: u64) -> Self;

    fn to_f64(&self) -> f64;
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn from_u64(k: u64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
}

impl Scalar for f64 {
    fn from_rational(q: &BigRational) -> Self {
        ratio_to_f64(q)
    }

    fn from_u64(k: u64) -> Self {
        k as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_rational(q: &BigRational) -> Self {
        ratio_to_f64(q) as f32
    }

    fn from_u64(k: u64) -> Self {
        k as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for u64 {
    /// Truncates toward zero; only meaningful for nonnegative integers.
    fn from_rational(q: &BigRational) -> Self {
        q.to_integer().to_u64().unwrap_or(0)
    }

    fn from_u64(k: u64) -> Self {
        k
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for i64 {
    fn from_rational(q: &BigRational) -> Self {
        q.to_integer().to_i64().unwrap_or(0)
    }

    fn from_u64(k: u64) -> Self {
        k as i64
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

fn ratio_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // huge numerator/denominator: scale both down by the same power of two
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer().abs() >> shift).to_f64().unwrap_or(f64::MAX);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::MAX);
            if q.is_negative() {
                -n / d
            } else {
                n / d
            }
        }
    }
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"` or `"p"`. Decimal points are rejected.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// `q^k` for a nonnegative exponent.
pub fn rational_pow(q: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= q;
    }
    acc
}

/// `k!` as an exact rational.
pub fn factorial(k: u32) -> BigRational {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    BigRational::from_integer(acc)
}

pub fn binomial(n: u32, k: u32) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}
