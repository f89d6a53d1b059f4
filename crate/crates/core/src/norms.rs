//! Induced norms: exact 1- and ∞-norms, a power-iteration estimate of the
//! 2-norm, and the interpolation upper bound `‖M‖₁^{1/p} ‖M‖_∞^{1−1/p}` for
//! general `p`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

const POWER_REL_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 10_000;

/// Norm exponent `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("norm exponent must satisfy p >= 1, got {p}")));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// p ∈ {1, ∞}: the induced norm is an exact max of absolute sums.
    pub fn is_exact_norm(self) -> bool {
        self.is_one() || self.is_infinite()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INFINITY),
            t => t
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad exponent {s:?}: {e}")))
                .and_then(Exponent::new),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| serde::de::Error::custom("bad exponent"))
                .and_then(|p| Exponent::new(p).map_err(serde::de::Error::custom)),
            other => Err(serde::de::Error::custom(format!("bad exponent {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport<T> {
    /// Max absolute column sum.
    pub norm_1: T,
    /// Max absolute row sum.
    pub norm_inf: T,
    pub norm_2_estimate: f64,
    pub norm_p_upper: f64,
    pub p: Exponent,
}

pub fn norm_1<T: Scalar>(m: &Matrix<T>) -> T {
    (0..m.cols())
        .map(|j| (0..m.rows()).fold(T::zero(), |acc, i| acc + m.get(i, j).abs_val()))
        .fold(T::zero(), max_of)
}

pub fn norm_inf<T: Scalar>(m: &Matrix<T>) -> T {
    (0..m.rows())
        .map(|i| m.row(i).iter().fold(T::zero(), |acc, x| acc + x.abs_val()))
        .fold(T::zero(), max_of)
}

fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// `‖M‖₁^{1/p} · ‖M‖_∞^{1−1/p}`, an upper bound for the induced p-norm.
pub fn interpolation_bound(norm_1: f64, norm_inf: f64, p: Exponent) -> f64 {
    if p.is_one() {
        norm_1
    } else if p.is_infinite() {
        norm_inf
    } else if norm_1 == 0.0 || norm_inf == 0.0 {
        0.0
    } else {
        let t = 1.0 / p.value();
        norm_1.powf(t) * norm_inf.powf(1.0 - t)
    }
}

/// Largest singular value by power iteration on `MᵀM` from the all-ones
/// vector. The Rayleigh quotient never exceeds `λ_max(MᵀM)`, so the result
/// approaches the true 2-norm from below.
pub fn spectral_norm_estimate<T: Scalar>(m: &Matrix<T>) -> f64 {
    let a = m.to_f64();
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 || a.is_zero() {
        return 0.0;
    }
    let mut v = vec![1.0 / (cols as f64).sqrt(); cols];
    let mut lambda = 0.0f64;
    for _ in 0..POWER_MAX_ITER {
        let mv: Vec<f64> = (0..rows).map(|i| a.row(i).iter().zip(&v).map(|(x, y)| x * y).sum()).collect();
        let mut w = vec![0.0; cols];
        for (i, mvi) in mv.iter().enumerate() {
            for (j, wj) in w.iter_mut().enumerate() {
                *wj += a.get(i, j) * mvi;
            }
        }
        let rayleigh: f64 = w.iter().zip(&v).map(|(x, y)| x * y).sum();
        let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            return lambda.max(0.0).sqrt();
        }
        let converged = (rayleigh - lambda).abs() <= POWER_REL_TOL * rayleigh.abs();
        lambda = rayleigh;
        if converged {
            break;
        }
        v = w.into_iter().map(|x| x / len).collect();
    }
    lambda.max(0.0).sqrt()
}

pub fn norms<T: Scalar>(m: &Matrix<T>, p: Exponent) -> NormReport<T> {
    let n1 = norm_1(m);
    let ninf = norm_inf(m);
    let upper = interpolation_bound(n1.to_f64(), ninf.to_f64(), p);
    NormReport { norm_2_estimate: spectral_norm_estimate(m), norm_p_upper: upper, norm_1: n1, norm_inf: ninf, p }
}

/// Induced p-norm as a rational: exact for p ∈ {1, ∞} over exact entries,
/// the power-iteration estimate for p = 2, the interpolation bound otherwise.
pub fn induced_norm<T: Scalar>(m: &Matrix<T>, p: Exponent) -> Rational {
    if p.is_one() {
        norm_1(m).to_rational()
    } else if p.is_infinite() {
        norm_inf(m).to_rational()
    } else if m.is_zero() {
        Rational::zero()
    } else if p.is_two() {
        spectral_norm_estimate(m).to_rational()
    } else {
        interpolation_bound(norm_1(m).to_f64(), norm_inf(m).to_f64(), p).to_rational()
    }
}

/// `min(‖M‖₁, ‖M‖_∞)`, an upper bound for the spectral radius of a
/// nonnegative square matrix.
pub fn spectral_radius_bound<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    m.require_square()?;
    m.require_nonnegative()?;
    let a = norm_1(m);
    let b = norm_inf(m);
    Ok(if a < b { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn diagonal_norms() {
        let m = Matrix::diag(&[int(3), int(-4)]);
        let r = norms(&m, Exponent::TWO);
        assert_eq!(r.norm_1, int(4));
        assert_eq!(r.norm_inf, int(4));
        assert!((r.norm_2_estimate - 4.0).abs() < 1e-9);
    }

    #[test]
    fn single_entry_all_p() {
        let m: Matrix<Rational> = Matrix::jordan(2);
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let r = norms(&m, Exponent::new(p).unwrap());
            assert_eq!(r.norm_1, int(1));
            assert_eq!(r.norm_inf, int(1));
            assert!((r.norm_p_upper - 1.0).abs() < 1e-15, "p = {p}");
        }
    }

    #[test]
    fn rejects_p_below_one() {
        assert!(Exponent::new(0.5).is_err());
        assert!("0.99".parse::<Exponent>().is_err());
        assert!("inf".parse::<Exponent>().unwrap().is_infinite());
    }

    #[test]
    fn spectral_radius_examples() {
        assert_eq!(spectral_radius_bound(&Matrix::diag(&[int(5), int(2)])).unwrap(), int(5));
        assert_eq!(spectral_radius_bound(&Matrix::<Rational>::jordan(3)).unwrap(), int(1));
        let m = Matrix::from_rows(vec![vec![int(0), int(4)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(spectral_radius_bound(&m).unwrap(), int(4));
        let neg = Matrix::diag(&[int(-1), int(0)]);
        assert!(matches!(spectral_radius_bound(&neg), Err(Error::NegativeEntry { .. })));
    }

    #[test]
    fn power_iteration_matches_known_singular_value() {
        // [[1,1],[0,1]] has largest singular value golden ratio.
        let m = Matrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((spectral_norm_estimate(&m) - phi).abs() < 1e-8);
    }
}
