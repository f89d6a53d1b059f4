//! Diagonal-times-nilpotent factorizations for orderable matrices, and the
//! weighted shift whose factorizations must have large norm.
//!
//! With `A = diag(a)` the commutator is entrywise:
//! `(AB − BA)_{ij} = (a_i − a_j) b_{ij}`. Given a total order in which `C` is
//! strictly upper-triangular and weights `d ≥ 0`, take
//! `a_k = Σ_{i ⪰ k} d_i` and `b_{ij} = c_{ij} / (a_i − a_j)`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::band::triangularizing_order;
use crate::certificate::{Bound, CommutatorCertificate, Method};
use crate::error::{Error, Result};
use crate::matrix::{nilpotency_index, Matrix};
use crate::norms::{norm_inf, norms, Exponent};
use crate::scalar::{scalar_from_json, Rational, Scalar, ScalarValue};

/// Slack for the attested norm inequalities.
pub const BOUND_SLACK: f64 = 1e-9;
/// Float certificates are accepted when the residual is at most this times
/// the largest entry of `C`.
pub const RELATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Exact,
    Float,
}

/// The order, weights `d`, and diagonal `a` used by a factorization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightData {
    pub order: Vec<usize>,
    pub d: Vec<ScalarValue>,
    pub a: Vec<ScalarValue>,
    pub mode: WeightMode,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Weights {
    /// `d_i = Σ_j √c_ij`; exact when every root is rational.
    #[default]
    RowRootSums,
    /// Caller-chosen rational weights, optionally with the order to use.
    Custom { d: Vec<Rational>, order: Option<Vec<usize>> },
}

impl Weights {
    /// Reads `{"d": [...], "order": [...]}`; entries of `d` are fraction
    /// strings, integers, or floats (converted exactly).
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("weights must be a JSON object".into()))?;
        let d = obj
            .get("d")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("weights are missing the array \"d\"".into()))?
            .iter()
            .map(|x| {
                scalar_from_json(x).and_then(|s| match s {
                    ScalarValue::Exact(r) => Ok(r),
                    ScalarValue::Float(f) => Rational::from_float(f)
                        .ok_or_else(|| Error::Parse(format!("weight {f} is not finite"))),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let order = match obj.get("order") {
            None | Some(Value::Null) => None,
            Some(Value::Array(xs)) => Some(
                xs.iter()
                    .map(|x| x.as_u64().map(|i| i as usize).ok_or_else(|| Error::Parse(format!("bad order entry {x}"))))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Some(other) => return Err(Error::Parse(format!("\"order\" must be an array, got {other}"))),
        };
        Ok(Weights::Custom { d, order })
    }
}

fn check_order<T: Scalar>(c: &Matrix<T>, order: &[usize]) -> Result<Vec<usize>> {
    let n = c.rows();
    if order.len() != n {
        return Err(Error::InvalidParameter(format!("order has {} entries, expected {n}", order.len())));
    }
    let mut pos = vec![usize::MAX; n];
    for (p, &i) in order.iter().enumerate() {
        if i >= n || pos[i] != usize::MAX {
            return Err(Error::InvalidParameter(format!("order is not a permutation (index {i})")));
        }
        pos[i] = p;
    }
    for i in 0..n {
        for j in 0..n {
            if !c.get(i, j).is_zero() && pos[j] <= pos[i] {
                return Err(Error::InvalidParameter(format!(
                    "C is not strictly upper-triangular in the given order: entry ({i}, {j})"
                )));
            }
        }
    }
    Ok(pos)
}

struct Factors<T> {
    a: Vec<T>,
    b: Matrix<T>,
}

fn factor<T: Scalar>(c: &Matrix<T>, order: &[usize], d: &[T]) -> Result<Factors<T>> {
    let n = c.rows();
    for (i, di) in d.iter().enumerate().take(n) {
        if di.is_negative_value() {
            return Err(Error::InvalidParameter(format!("weight d[{i}] is negative")));
        }
        if di.is_zero() && c.row(i).iter().any(|x| !x.is_zero()) {
            return Err(Error::ZeroWeight(i));
        }
    }
    let mut a = vec![T::zero(); n];
    let mut acc = T::zero();
    for &k in order.iter().rev() {
        acc = acc + d[k].clone();
        a[k] = acc.clone();
    }
    let mut b = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let cij = c.get(i, j);
            if !cij.is_zero() {
                b.set(i, j, cij.clone() / (a[i].clone() - a[j].clone()));
            }
        }
    }
    Ok(Factors { a, b })
}

fn row_root_sums<T: Scalar>(c: &Matrix<T>) -> Option<Vec<T>> {
    (0..c.rows())
        .map(|i| c.row(i).iter().try_fold(T::zero(), |acc, x| x.exact_sqrt().map(|r| acc + r)))
        .collect()
}

fn weight_data<T: Scalar>(order: Vec<usize>, d: &[T], a: &[T]) -> WeightData {
    WeightData {
        order,
        d: d.iter().map(Scalar::wrap_scalar).collect(),
        a: a.iter().map(Scalar::wrap_scalar).collect(),
        mode: if T::EXACT { WeightMode::Exact } else { WeightMode::Float },
    }
}

fn certify<T: Scalar>(
    c: &Matrix<T>,
    order: Vec<usize>,
    d: Vec<T>,
    default_weights: bool,
) -> Result<(CommutatorCertificate, WeightData)> {
    let Factors { a, b } = factor(c, &order, &d)?;
    let tolerance = RELATIVE_TOLERANCE * c.max_abs_entry().to_f64();
    let mut bounds = Vec::new();
    if default_weights {
        let stats = summability_of(c, &b);
        bounds.push(Bound::new("sum_b_le_sum_sqrt_c", stats.sum_b, stats.sum_sqrt_c, BOUND_SLACK));
        for p in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY] {
            let upper = norms(&b, p).norm_p_upper;
            bounds.push(Bound::new(format!("norm_p_upper_b_le_sum_sqrt_c[p={p}]"), upper, stats.sum_sqrt_c, BOUND_SLACK));
        }
        let excess = (0..c.rows())
            .flat_map(|i| (0..c.cols()).map(move |j| (i, j)))
            .map(|(i, j)| b.get(i, j).to_f64() - c.get(i, j).to_f64().sqrt())
            .fold(0.0f64, f64::max);
        bounds.push(Bound::new("b_le_sqrt_c_entrywise", excess, 0.0, 1e-12));
    }
    let data = weight_data(order, &d, &a);
    let mut cert =
        CommutatorCertificate::assemble(Method::DiagonalQuasi, Matrix::diag(&a), b, c.clone(), None, Some(tolerance))?;
    cert.attestations.bounds = bounds;
    if !cert.residual_ok() {
        return Err(Error::Verification(format!("diagonal factorization residual {} exceeds tolerance", cert.residual_inf)));
    }
    Ok((cert, data))
}

/// Writes an orderable nonnegative `C` as `AB − BA` with `A = diag(a) ≥ 0`
/// and `B ≥ 0` supported where `C` is (hence nilpotent).
///
/// Default weights stay exact when every `√c_ij` is rational and fall back to
/// binary64 otherwise; custom weights are always exact.
pub fn construct_diagonal_quasi<T: Scalar>(c: &Matrix<T>, weights: &Weights) -> Result<(CommutatorCertificate, WeightData)> {
    c.require_square()?;
    c.require_nonnegative()?;
    match weights {
        Weights::RowRootSums => {
            let order = triangularizing_order(c)?;
            match row_root_sums(c) {
                Some(d) if T::EXACT => certify(c, order, d, true),
                _ => {
                    let cf = c.to_f64();
                    let d = row_root_sums(&cf).expect("float roots of nonnegative entries");
                    certify(&cf, order, d, true)
                }
            }
        }
        Weights::Custom { d, order } => {
            let n = c.rows();
            if d.len() != n {
                return Err(Error::InvalidParameter(format!("expected {n} weights, got {}", d.len())));
            }
            let order = match order {
                Some(o) => {
                    check_order(c, o)?;
                    o.clone()
                }
                None => triangularizing_order(c)?,
            };
            let ce = c.map(Scalar::to_rational);
            certify(&ce, order, d.clone(), false)
        }
    }
}

/// `ΣΣ √c_ij` against `ΣΣ b_ij` for the default weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub sum_sqrt_c: f64,
    pub sum_b: f64,
    pub holds: bool,
}

fn summability_of<T: Scalar>(c: &Matrix<T>, b: &Matrix<T>) -> SummabilityReport {
    let sum_sqrt_c: f64 = c.data().iter().map(|x| x.to_f64().sqrt()).sum();
    let sum_b: f64 = b.data().iter().map(Scalar::to_f64).sum();
    SummabilityReport { sum_sqrt_c, sum_b, holds: sum_b <= sum_sqrt_c + BOUND_SLACK }
}

/// Summability statistics of the default-weight factorization. `C` must be
/// orderable for `ΣΣ b_ij` to exist.
pub fn summability_stats<T: Scalar>(c: &Matrix<T>) -> Result<SummabilityReport> {
    c.require_nonnegative()?;
    let (cert, _) = construct_diagonal_quasi(c, &Weights::RowRootSums)?;
    let sum_b = cert.b.to_f64().data().iter().sum();
    let sum_sqrt_c: f64 = c.data().iter().map(|x| x.to_f64().sqrt()).sum();
    Ok(SummabilityReport { sum_sqrt_c, sum_b, holds: sum_b <= sum_sqrt_c + BOUND_SLACK })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ZeroDiagonalVerdict {
    /// Every diagonal entry vanishes.
    Pass { nilpotent: bool },
    /// A positive diagonal entry, which rules out nilpotency.
    Offending { index: usize },
}

/// A nonnegative nilpotent matrix has zero diagonal, since
/// `0 ≤ s_kkⁿ ≤ (Sⁿ)_kk`.
pub fn zero_diagonal_check<T: Scalar>(s: &Matrix<T>) -> Result<ZeroDiagonalVerdict> {
    let n = s.require_square()?;
    s.require_nonnegative()?;
    let nilpotent = nilpotency_index(s)?.is_some();
    match (0..n).find(|&k| !s.get(k, k).is_zero()) {
        Some(index) if nilpotent => {
            Err(Error::Internal(format!("nilpotent matrix has a nonzero diagonal entry at {index}")))
        }
        Some(index) => Ok(ZeroDiagonalVerdict::Offending { index }),
        None => Ok(ZeroDiagonalVerdict::Pass { nilpotent }),
    }
}

/// A truncated weighted shift: `weights[i]` sits at `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSpec {
    pub weights: Vec<Rational>,
    pub n: usize,
}

impl ShiftSpec {
    pub fn new(weights: Vec<Rational>, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("a weighted shift needs N >= 2, got {n}")));
        }
        if weights.len() < n - 1 {
            return Err(Error::InvalidParameter(format!("N = {n} needs {} weights, got {}", n - 1, weights.len())));
        }
        for (i, w) in weights.iter().enumerate() {
            if !(*w > Rational::from_integer(0.into())) {
                return Err(Error::InvalidParameter(format!("weight {i} is not positive")));
            }
            if i > 0 && *w >= weights[i - 1] {
                return Err(Error::InvalidParameter(format!("weights must decrease; w[{i}] >= w[{}]", i - 1)));
            }
        }
        Ok(Self { weights, n })
    }

    /// `w_i = 1/i` for `i = 1..N−1`.
    pub fn harmonic(n: usize) -> Result<Self> {
        let w = (1..n.max(1)).map(|i| Rational::new(1.into(), (i as u64).into())).collect();
        Self::new(w, n)
    }

    pub fn active(&self) -> &[Rational] {
        &self.weights[..self.n - 1]
    }
}

pub fn weighted_shift(spec: &ShiftSpec) -> Matrix<Rational> {
    let mut m = Matrix::zeros(spec.n, spec.n);
    for (i, w) in spec.active().iter().enumerate() {
        m.set(i, i + 1, w.clone());
    }
    m
}

/// `Σ_{i<N} w_i`, a lower bound for `‖A‖ ‖B‖` over factorizations of the
/// shift with one diagonal positive factor.
pub fn diag_factorization_lower_bound(spec: &ShiftSpec) -> f64 {
    exact_weight_sum(spec).to_f64()
}

pub fn exact_weight_sum(spec: &ShiftSpec) -> Rational {
    spec.active().iter().fold(Rational::from_integer(0.into()), |acc, w| acc + w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    pub sum_w: f64,
    /// `‖A‖_∞ · ‖B‖_{2, upper}` of the default-weight factorization.
    pub norm_product: f64,
    pub norm_c_inf: f64,
}

/// Factorizes truncations of the shift and tabulates the lower bound next
/// to the achieved norm product.
pub fn shift_growth_table(weights: &[Rational], sizes: &[usize]) -> Result<Vec<GrowthRow>> {
    sizes
        .iter()
        .map(|&n| {
            let spec = ShiftSpec::new(weights.to_vec(), n)?;
            let c = weighted_shift(&spec);
            let (cert, _) = construct_diagonal_quasi(&c, &Weights::RowRootSums)?;
            let a_norm = norm_inf(&cert.a.to_f64());
            let b_norm = norms(&cert.b.to_f64(), Exponent::TWO).norm_p_upper;
            Ok(GrowthRow {
                n,
                sum_w: diag_factorization_lower_bound(&spec),
                norm_product: a_norm * b_norm,
                norm_c_inf: norm_inf(&c).to_f64(),
            })
        })
        .collect()
}
