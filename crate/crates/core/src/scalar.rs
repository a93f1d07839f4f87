//! Number types shared by the design and matrix code.
//!
//! Every computation in this crate is generic over [`Scalar`], which is
//! implemented for exact rationals ([`Rational`]) and for `f64`. Rational
//! designs give exact information matrices, inverses and criterion values;
//! real designs go through the same code with tolerance-based comparisons.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::Value as Json;

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Absolute tolerance used when validating real-valued designs.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Absolute tolerance used by numeric checks on real-valued data.
pub const CHECK_TOL: f64 = 1e-9;

/// Field element usable as a design weight or matrix entry.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    /// `true` when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64;

    /// Whether `self` should be treated as zero relative to `scale`.
    fn is_negligible(&self, scale: f64) -> bool;

    /// Equality up to an absolute tolerance; exact types ignore `tol`.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// JSON form: rationals as `"p/q"` strings, reals as numbers.
    fn to_json(&self) -> Json;

    /// Exact rational value, when one is available without rounding.
    fn to_rational(&self) -> Option<Rational>;

    /// Nearest value of this type to `r`.
    fn from_rational(r: &Rational) -> Self;

    /// Strictly greater than zero. Unlike `Signed::is_positive`, `0.0` is not positive.
    fn gt_zero(&self) -> bool {
        *self > Self::zero()
    }

    /// Strictly less than zero; `-0.0` is not negative.
    fn lt_zero(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn to_json(&self) -> Json {
        Json::String(format_rational(self))
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-12 * scale.max(1.0)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn to_json(&self) -> Json {
        serde_json::Number::from_f64(*self)
            .map(Json::Number)
            .unwrap_or(Json::Null)
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Huge numerators/denominators: shift both down before dividing.
    let bits = x.numer().bits().max(x.denom().bits());
    let shift = bits.saturating_sub(1000) as usize;
    let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Formats as `p` or `p/q` in lowest terms.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

/// Parses `p`, `p/q` or a finite decimal such as `0.125` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| Error::Parse(format!("bad rational `{text}`")))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| Error::Parse(format!("bad rational `{text}`")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let num = BigInt::from_str(&digits).map_err(|_| Error::Parse(format!("bad decimal `{text}`")))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if negative { -r } else { r });
    }
    let n = BigInt::from_str(t).map_err(|_| Error::Parse(format!("bad rational `{text}`")))?;
    Ok(Rational::from_integer(n))
}

/// Converts an `f64` to the nearest rational whose denominator does not
/// exceed `max_den`, via continued-fraction convergents.
pub fn rational_candidates(x: f64, max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a_int = a as i128;
        let h2 = a_int * h1 + h0;
        let k2 = a_int * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        out.push(Rational::new(BigInt::from(h2), BigInt::from(k2)));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rest - a;
        if frac.abs() < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    out
}

/// Exact-or-real scalar produced by evaluations.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Real(f64),
}

impl Value {
    pub fn from_scalar<T: Scalar>(x: &T) -> Self {
        match x.to_rational() {
            Some(r) => Value::Exact(r),
            None => Value::Real(x.to_f64()),
        }
    }

    pub fn infinite() -> Self {
        Value::Real(f64::INFINITY)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Real(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Real(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Value::Exact(_) => true,
            Value::Real(x) => x.is_finite(),
        }
    }

    /// Exact comparison when both sides are rational, `f64` otherwise.
    pub fn compare(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Exact(r) => Json::String(format_rational(r)),
            Value::Real(x) if x.is_finite() => x.to_json(),
            Value::Real(x) if *x > 0.0 => Json::String("inf".into()),
            Value::Real(_) => Json::String("-inf".into()),
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Real(x) => write!(f, "{x}"),
        }
    }
}

pub(crate) fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn rat_int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
