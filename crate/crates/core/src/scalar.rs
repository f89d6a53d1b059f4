//! Scalar types: arbitrary-precision rationals and binary64 floats.
//!
//! Every construction is written once against [`Scalar`]. The exact
//! instantiation never rounds; the float instantiation carries a tolerance
//! through its comparisons instead.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixValue};

/// Exact scalar: a reduced fraction of arbitrary-precision integers with a
/// positive denominator.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for the rational instantiation.
    const EXACT: bool;

    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact rational value of `self` (floats convert without rounding).
    fn to_rational(&self) -> Rational;
    fn from_rational(r: &Rational) -> Self;
    /// Square root, when it is representable in this scalar type.
    fn exact_sqrt(&self) -> Option<Self>;
    /// Equality for exact scalars; `|a - b| <= tol` for floats.
    fn close_to(&self, other: &Self, tol: f64) -> bool;
    fn wrap(m: Matrix<Self>) -> MatrixValue;
    fn wrap_scalar(&self) -> ScalarValue;

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn exact_sqrt(&self) -> Option<Self> {
        rational_sqrt(self)
    }

    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn wrap(m: Matrix<Self>) -> MatrixValue {
        MatrixValue::Exact(m)
    }

    fn wrap_scalar(&self) -> ScalarValue {
        ScalarValue::Exact(self.clone())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Rational::zero)
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }

    fn exact_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn wrap(m: Matrix<Self>) -> MatrixValue {
        MatrixValue::Float(m)
    }

    fn wrap_scalar(&self) -> ScalarValue {
        ScalarValue::Float(*self)
    }
}

/// Square root of a nonnegative rational if both reduced numerator and
/// denominator are perfect squares.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    (&sn * &sn == *num && &sd * &sd == *den).then(|| Rational::new(sn, sd))
}

/// Integer `r` with `r^k == n`, if any.
pub fn integer_root(n: u64, k: u32) -> Option<u64> {
    if k == 0 {
        return None;
    }
    let big = BigInt::from(n);
    let r = big.nth_root(k);
    (r.pow(k) == big).then(|| r.to_u64()).flatten()
}

/// Parses `"p/q"` or `"p"` with decimal integers.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("bad numerator in {s:?}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("bad denominator in {s:?}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rational::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))?;
        Ok(Rational::from_integer(n))
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A scalar of either kind, as it appears in JSON: exact values are
/// fraction strings, floats are numbers.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarValue {
    Exact(Rational),
    Float(f64),
}

impl ScalarValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarValue::Exact(r) => Scalar::to_f64(r),
            ScalarValue::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ScalarValue::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarValue::Exact(r) => r.is_zero(),
            ScalarValue::Float(x) => *x == 0.0,
        }
    }
}

impl Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Exact(r) => write!(f, "{r}"),
            ScalarValue::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for ScalarValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ScalarValue::Exact(r) => s.serialize_str(&r.to_string()),
            ScalarValue::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for ScalarValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        scalar_from_json(&v).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn scalar_from_json(v: &serde_json::Value) -> Result<ScalarValue> {
    match v {
        serde_json::Value::String(s) => parse_rational(s).map(ScalarValue::Exact),
        serde_json::Value::Number(n) => n
            .as_f64()
            .map(ScalarValue::Float)
            .ok_or_else(|| Error::Parse(format!("unrepresentable number {n}"))),
        other => Err(Error::Parse(format!("expected a fraction string or number, got {other}"))),
    }
}
