//! Embedding pairs `S: Y → X`, `T: X → Y` with `TS = I`, and the
//! step-function discretization of `ℓᵖₙ ⊂ Lᵖ[0, 1]`.

use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::{matrix_from_json, matrix_to_json};
use crate::matrix::{Matrix, MatrixValue};
use crate::norms::Exponent;
use crate::scalar::{integer_root, Rational, Scalar};

/// Float pairs are accepted when `‖TS − I‖_max` is below this.
pub const PAIR_TOLERANCE: f64 = 1e-10;

/// `S` is `q × m`, `T` is `m × q`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPair<T> {
    pub s: Matrix<T>,
    pub t: Matrix<T>,
}

fn max_deviation_from_identity<T: Scalar>(m: &Matrix<T>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m.get(i, j).to_f64() - target).abs());
        }
    }
    worst
}

impl<T: Scalar> EmbeddingPair<T> {
    /// Checks shapes against `(m, q)`, nonnegativity, and `TS = I_m`.
    pub fn new(s: Matrix<T>, t: Matrix<T>) -> Result<Self> {
        let (q, m) = s.shape();
        if t.shape() != (m, q) {
            return Err(Error::DimensionMismatch { op: "embedding pair", left: (m, q), right: t.shape() });
        }
        s.require_nonnegative()?;
        t.require_nonnegative()?;
        let ts = t.matmul(&s)?;
        let ok = if T::EXACT { ts == Matrix::identity(m) } else { max_deviation_from_identity(&ts) <= PAIR_TOLERANCE };
        if !ok {
            return Err(Error::Hypothesis("TS is not the identity on Y".into()));
        }
        Ok(Self { s, t })
    }

    pub fn y_dim(&self) -> usize {
        self.s.cols()
    }

    pub fn x_dim(&self) -> usize {
        self.s.rows()
    }

    pub fn ts(&self) -> Result<Matrix<T>> {
        self.t.matmul(&self.s)
    }

    /// Pads the `X` side with zero coordinates: `S' = [S; 0]`, `T' = [T 0]`.
    pub fn lift(&self, q: usize) -> Result<Self> {
        if q < self.x_dim() {
            return Err(Error::InvalidParameter(format!("cannot lift a pair on dimension {} to {q}", self.x_dim())));
        }
        let m = self.y_dim();
        Ok(Self { s: self.s.pad_to(q, m), t: self.t.pad_to(m, q) })
    }

    pub fn to_f64(&self) -> EmbeddingPair<f64> {
        EmbeddingPair { s: self.s.to_f64(), t: self.t.to_f64() }
    }
}

impl EmbeddingPair<Rational> {
    /// Coordinate injection of `Y` onto the first `m` coordinates of `X` and
    /// the matching coordinate projection.
    pub fn coordinate(m: usize, q: usize) -> Result<Self> {
        if m == 0 || m > q {
            return Err(Error::InvalidParameter(format!("the coordinate embedding needs 1 <= m <= q, got m = {m}, q = {q}")));
        }
        let s = Matrix::from_fn(q, m, |i, j| if i == j { Rational::one() } else { Rational::from_integer(0.into()) });
        let t = s.transpose();
        Self::new(s, t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingValue {
    Exact(EmbeddingPair<Rational>),
    Float(EmbeddingPair<f64>),
}

impl EmbeddingValue {
    pub fn is_exact(&self) -> bool {
        matches!(self, EmbeddingValue::Exact(_))
    }

    pub fn to_f64(&self) -> EmbeddingPair<f64> {
        match self {
            EmbeddingValue::Exact(p) => p.to_f64(),
            EmbeddingValue::Float(p) => p.clone(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            EmbeddingValue::Exact(p) => (p.y_dim(), p.x_dim()),
            EmbeddingValue::Float(p) => (p.y_dim(), p.x_dim()),
        }
    }

    /// Reads `{"S": <matrix>, "T": <matrix>}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |k: &str| {
            v.get(k).ok_or_else(|| Error::Parse(format!("embedding pair is missing {k:?}"))).and_then(matrix_from_json)
        };
        match (get("S")?, get("T")?) {
            (MatrixValue::Exact(s), MatrixValue::Exact(t)) => EmbeddingPair::new(s, t).map(EmbeddingValue::Exact),
            (s, t) => EmbeddingPair::new(s.to_f64(), t.to_f64()).map(EmbeddingValue::Float),
        }
    }

    pub fn to_json(&self) -> Value {
        let (s, t) = match self {
            EmbeddingValue::Exact(p) => (MatrixValue::Exact(p.s.clone()), MatrixValue::Exact(p.t.clone())),
            EmbeddingValue::Float(p) => (MatrixValue::Float(p.s.clone()), MatrixValue::Float(p.t.clone())),
        };
        json!({"S": matrix_to_json(&s), "T": matrix_to_json(&t)})
    }
}

/// Output of [`lp_embedding`] with its self-checks.
#[derive(Debug, Clone, PartialEq)]
pub struct LpEmbedding {
    pub pair: EmbeddingValue,
    pub exact: bool,
    /// `max |TS − I|`, zero in the exact regime.
    pub ts_deviation: f64,
    /// Discrete `‖S e_i‖_p` for every `i`.
    pub column_norms: Vec<f64>,
}

/// Discrete norm `(Σ_c |f_c|^p / M)^{1/p}` of a step function on `M` cells.
pub fn step_norm(values: &[f64], p: Exponent) -> f64 {
    let m = values.len() as f64;
    if p.is_infinite() {
        return values.iter().fold(0.0, |a, x| a.max(x.abs()));
    }
    (values.iter().map(|x| x.abs().powf(p.value())).sum::<f64>() / m).powf(1.0 / p.value())
}

fn exact_root(n: usize, p: Exponent) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    let v = p.value();
    (v.fract() == 0.0 && v <= u32::MAX as f64).then(|| integer_root(n as u64, v as u32)).flatten()
}

/// `S e_i = n^{1/p} χ_i` on the cells of `[(i−1)/n, i/n)` and
/// `T f = n^{(p−1)/p} Σ_i e_i ∫_{(i−1)/n}^{i/n} f` for step functions on an
/// `M`-cell grid. Exact when `n^{1/p}` is an integer.
pub fn lp_embedding(n: usize, p: Exponent, grid: usize) -> Result<LpEmbedding> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if p.is_infinite() {
        return Err(Error::InvalidParameter("the Lp embedding needs p < inf".into()));
    }
    if grid == 0 || !grid.is_multiple_of(n) {
        return Err(Error::InvalidParameter(format!("grid size {grid} is not a positive multiple of n = {n}")));
    }
    let cells = grid / n;
    let group = |c: usize| c / cells;

    if let Some(r) = exact_root(n, p) {
        let r = Rational::from_integer(r.into());
        let nn = Rational::from_integer((n as u64).into());
        let zero = Rational::from_integer(0.into());
        let tv = nn / r.clone() / Rational::from_integer((grid as u64).into());
        let s = Matrix::from_fn(grid, n, |c, i| if group(c) == i { r.clone() } else { zero.clone() });
        let t = Matrix::from_fn(n, grid, |i, c| if group(c) == i { tv.clone() } else { zero.clone() });
        let pair = EmbeddingPair::new(s, t)?;
        // Σ_c r^p / M over one group is (M/n) · n / M = 1 exactly.
        let pe = p.value().max(1.0) as usize;
        let column_norms = (0..n)
            .map(|i| {
                let sum = (0..grid)
                    .map(|c| num_traits::pow(pair.s.get(c, i).clone(), pe))
                    .fold(Rational::from_integer(0.into()), |a, x| a + x);
                let mean = sum / Rational::from_integer((grid as u64).into());
                if mean.is_one() {
                    1.0
                } else {
                    mean.to_f64().powf(1.0 / p.value())
                }
            })
            .collect();
        return Ok(LpEmbedding { pair: EmbeddingValue::Exact(pair), exact: true, ts_deviation: 0.0, column_norms });
    }

    let nf = n as f64;
    let sv = nf.powf(1.0 / p.value());
    let tv = nf.powf((p.value() - 1.0) / p.value()) / grid as f64;
    let s = Matrix::from_fn(grid, n, |c, i| if group(c) == i { sv } else { 0.0 });
    let t = Matrix::from_fn(n, grid, |i, c| if group(c) == i { tv } else { 0.0 });
    let ts_deviation = max_deviation_from_identity(&t.matmul(&s)?);
    let column_norms = (0..n).map(|i| step_norm(&(0..grid).map(|c| *s.get(c, i)).collect::<Vec<_>>(), p)).collect();
    let pair = EmbeddingPair::new(s, t)?;
    Ok(LpEmbedding { pair: EmbeddingValue::Float(pair), exact: false, ts_deviation, column_norms })
}
