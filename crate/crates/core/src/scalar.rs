//! Scalar backends.
//!
//! Every matrix in this crate is generic over a [`Field`]. Two backends exist:
//! [`Q`] (arbitrary precision rationals, always normalized) and `f64`
//! (binary64, compared with an explicit tolerance). A matrix never mixes the
//! two; the only place where the backend is chosen at run time is the tagged
//! [`Scalar`] used at I/O boundaries, whose arithmetic refuses mixed operands.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

/// Default tolerance for predicates on the binary64 backend.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest denominator produced when a decimal is snapped to a rational.
pub const SNAP_DENOMINATOR: i64 = 1_000_000;

pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for the rational backend.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `n / d`; `d` must be nonzero.
    fn ratio(n: i64, d: i64) -> Self;
    fn from_q(q: &Q) -> Self;
    fn to_f64(&self) -> f64;

    /// Equality within `tol` (exact backend ignores `tol`).
    fn near(&self, other: &Self, tol: f64) -> bool;

    fn near_zero(&self, tol: f64) -> bool {
        self.near(&Self::zero(), tol)
    }

    /// Total order used for sorting rows; NaN sorts last.
    fn total_cmp(&self, other: &Self) -> Ordering;

    /// Square root when it exists in the backend: perfect squares only for
    /// rationals, any nonnegative value for binary64.
    fn sqrt(&self) -> Option<Self>;

    fn abs(&self) -> Self {
        if self.total_cmp(&Self::zero()) == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn is_negative(&self) -> bool {
        self.total_cmp(&Self::zero()) == Ordering::Less
    }
}

impl Field for Q {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn ratio(n: i64, d: i64) -> Self {
        Q::new(BigInt::from(n), BigInt::from(d))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn near_zero(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn sqrt(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Q::new(n, d))
        } else {
            None
        }
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn from_q(q: &Q) -> Self {
        Field::to_f64(q)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn near(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }
    fn sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(f64::sqrt(*self))
        }
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// Parse `"p/q"`, `"p"` or a decimal literal into an exact rational.
///
/// Decimal literals are converted exactly (`"0.25"` is `1/4`), not snapped.
pub fn parse_q(text: &str) -> Result<Q> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse(format!("empty number {text:?}")));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| Error::Parse(format!("bad numerator in {text:?}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| Error::Parse(format!("bad denominator in {text:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(t) {
        return Ok(Q::from_integer(n));
    }
    parse_decimal_exact(t).ok_or_else(|| Error::Parse(format!("not a number: {text:?}")))
}

fn parse_decimal_exact(t: &str) -> Option<Q> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Q::from_integer(BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    for _ in 0..scale.unsigned_abs() {
        if scale > 0 {
            value *= ten.clone();
        } else {
            value /= ten.clone();
        }
    }
    Some(if neg { -value } else { value })
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fraction convergents plus the final semiconvergent).
pub fn snap(x: f64, max_den: i64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    let max_den = max_den as i128;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e18 {
            break;
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den {
            // semiconvergent
            let k = (max_den - q0) / q1;
            let ps = k * p1 + p0;
            let qs = k * q1 + q0;
            let conv = p1 as f64 / q1 as f64;
            let semi = ps as f64 / qs as f64;
            if qs > 0 && (semi - x).abs() < (conv - x).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = r - r.floor();
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    Some(Q::new(BigInt::from(p1), BigInt::from(q1)))
}

/// A scalar whose backend is decided at run time.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Q),
    Approx(f64),
}

impl Scalar {
    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => Field::to_f64(q),
            Scalar::Approx(v) => *v,
        }
    }

    fn binary(&self, other: &Scalar, fq: impl Fn(&Q, &Q) -> Q, ff: impl Fn(f64, f64) -> f64) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(fq(a, b))),
            (Scalar::Approx(a), Scalar::Approx(b)) => Ok(Scalar::Approx(ff(*a, *b))),
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.binary(other, |a, b| a * b, |a, b| a * b)
    }

    /// Parse user input. Fractions and integers are exact; decimals are snapped
    /// to a rational with denominator at most [`SNAP_DENOMINATOR`] unless
    /// `snap_decimals` is false, in which case they stay binary64.
    pub fn parse_input(text: &str, snap_decimals: bool) -> Result<Scalar> {
        let t = text.trim();
        let is_decimal = t.contains(['.', 'e', 'E']) && !t.contains('/');
        if !is_decimal {
            return parse_q(t).map(Scalar::Exact);
        }
        let v: f64 = t.parse().map_err(|_| Error::Parse(format!("not a number: {text:?}")))?;
        if snap_decimals {
            snap(v, SNAP_DENOMINATOR)
                .map(Scalar::Exact)
                .ok_or_else(|| Error::Parse(format!("cannot snap {text:?}")))
        } else {
            Ok(Scalar::Approx(v))
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Approx(v) => write!(f, "{v}"),
        }
    }
}

/// Exact values as `"p/q"` strings (integers without a denominator),
/// approximate values as JSON numbers.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(q) => s.serialize_str(&q.to_string()),
            Scalar::Approx(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse_q(&t).map(Scalar::Exact).map_err(serde::de::Error::custom),
            Raw::Number(v) => Ok(Scalar::Approx(v)),
        }
    }
}

/// Convert between backends.
pub trait FromScalar: Field {
    fn from_scalar(s: &Scalar) -> Result<Self>;
    fn to_scalar(&self) -> Scalar;
}

impl FromScalar for Q {
    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Exact(q) => Ok(q.clone()),
            Scalar::Approx(_) => Err(Error::BackendMismatch),
        }
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
}

impl FromScalar for f64 {
    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Approx(v) => Ok(*v),
            Scalar::Exact(_) => Err(Error::BackendMismatch),
        }
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Approx(*self)
    }
}

/// Shorthand for `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Q {
    Q::ratio(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_normalized() {
        let a = q(6, -4);
        assert_eq!(a.numer(), &BigInt::from(-3));
        assert_eq!(a.denom(), &BigInt::from(2));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("-1/2").unwrap(), q(-1, 2));
        assert_eq!(parse_q("3").unwrap(), q(3, 1));
        assert_eq!(parse_q("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_q("-1.5e-1").unwrap(), q(-3, 20));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn exact_sqrt_only_for_squares() {
        assert_eq!(Field::sqrt(&q(64, 49)), Some(q(8, 7)));
        assert_eq!(Field::sqrt(&q(2, 1)), None);
        assert_eq!(Field::sqrt(&q(-1, 4)), None);
    }

    #[test]
    fn snapping_recovers_small_fractions() {
        assert_eq!(snap(0.4, SNAP_DENOMINATOR), Some(q(2, 5)));
        assert_eq!(snap(-1.0 / 3.0, SNAP_DENOMINATOR), Some(q(-1, 3)));
        assert_eq!(snap(7.0 / 11.0, SNAP_DENOMINATOR), Some(q(7, 11)));
        let s = snap(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(s, q(355, 113));
    }

    #[test]
    fn mixed_backend_is_an_error() {
        let a = Scalar::Exact(q(1, 2));
        let b = Scalar::Approx(0.5);
        assert!(matches!(a.checked_add(&b), Err(Error::BackendMismatch)));
        assert_eq!(a.checked_mul(&a).unwrap(), Scalar::Exact(q(1, 4)));
    }

    #[test]
    fn input_snapping() {
        assert_eq!(Scalar::parse_input("0.4", true).unwrap(), Scalar::Exact(q(2, 5)));
        assert_eq!(Scalar::parse_input("0.4", false).unwrap(), Scalar::Approx(0.4));
        assert_eq!(Scalar::parse_input("2/5", false).unwrap(), Scalar::Exact(q(2, 5)));
    }
}
