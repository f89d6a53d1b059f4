//! Dense row-major matrices over a [`Scalar`].
//!
//! `Matrix<Rational>` is the exact kind, `Matrix<f64>` the float kind.
//! [`MatrixValue`] holds either and promotes mixed products to float.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Parse(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn diag(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i].clone() } else { T::zero() })
    }

    /// The n×n Jordan block: ones on the first superdiagonal.
    pub fn jordan(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if j == i + 1 { T::one() } else { T::zero() })
    }

    /// Single nonzero entry `value` at `(row, col)`.
    pub fn unit(rows: usize, cols: usize, row: usize, col: usize, value: T) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.set(row, col, value);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn first_negative(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(Scalar::is_negative_value)
            .map(|k| (k / self.cols, k % self.cols))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.first_negative().is_none()
    }

    /// Errors with the first negative entry, if any.
    pub fn require_nonnegative(&self) -> Result<()> {
        match self.first_negative() {
            Some((row, col)) => Err(Error::NegativeEntry { row, col }),
            None => Ok(()),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn trace(&self) -> T {
        self.diagonal().into_iter().fold(T::zero(), |acc, x| acc + x)
    }

    pub fn max_abs_entry(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| {
            let a = x.abs_val();
            if a > acc {
                a
            } else {
                acc
            }
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, "add", |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, "sub", |a, b| a.clone() - b.clone())
    }

    fn zip(&self, other: &Self, op: &'static str, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { op, left: self.shape(), right: other.shape() });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// Product `self · other`. Zero entries of `self` are skipped, which keeps
    /// the sparse operators of the constructions cheap in exact arithmetic.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { op: "matmul", left: self.shape(), right: other.shape() });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> Result<Self> {
        let n = self.require_square()?;
        let mut acc = Self::identity(n);
        for _ in 0..k {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// `P[a][b] = M[order[a]][order[b]]`: the matrix re-indexed so that
    /// position `a` holds original index `order[a]`.
    pub fn permute(&self, order: &[usize]) -> Self {
        Self::from_fn(order.len(), order.len(), |a, b| self.get(order[a], order[b]).clone())
    }

    /// Inverse of [`Matrix::permute`].
    pub fn unpermute(&self, order: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                out.set(i, j, self.get(a, b).clone());
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |a, b| self.get(rows[a], cols[b]).clone())
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn slice(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Zero-pads to `rows × cols` (top-left aligned).
    pub fn pad_to(&self, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        out.paste(0, 0, self);
        out
    }

    /// Indices of columns that are entirely zero.
    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|&j| (0..self.rows).all(|i| self.get(i, j).is_zero())).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.to_f64().is_finite())
    }
}

pub fn matmul<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    a.matmul(b)
}

/// `AB − BA`.
pub fn commutator<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    a.require_square()?;
    b.require_square()?;
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { op: "commutator", left: a.shape(), right: b.shape() });
    }
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// Smallest `m ≤ n` with `M^m = 0`, checked with exact zero tests.
///
/// Nonnegative matrices go through the support digraph: `M^m = 0` iff no
/// path has `m` edges, so the index is the longest path plus one.
pub fn nilpotency_index<T: Scalar>(m: &Matrix<T>) -> Result<Option<usize>> {
    let n = m.require_square()?;
    if m.is_zero() {
        return Ok(Some(1));
    }
    if m.is_nonnegative() {
        return Ok(support_depths(m).map(|d| d.into_iter().max().unwrap_or(0) + 1));
    }
    let mut power = m.clone();
    for k in 2..=n {
        power = power.matmul(m)?;
        if power.is_zero() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// For each index `j`, the number of edges on the longest path of the
/// support digraph `{i → j : m_ij ≠ 0}` that ends at `j`; `None` if the
/// digraph has a cycle.
pub fn support_depths<T: Scalar>(m: &Matrix<T>) -> Option<Vec<usize>> {
    let n = m.rows();
    let succ: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| !m.get(i, j).is_zero()).collect()).collect();
    let mut indeg = vec![0usize; n];
    for s in &succ {
        for &j in s {
            indeg[j] += 1;
        }
    }
    let mut depth = vec![0usize; n];
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(u) = stack.pop() {
        seen += 1;
        for &v in &succ[u] {
            depth[v] = depth[v].max(depth[u] + 1);
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    (seen == n).then_some(depth)
}

/// A matrix of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixValue {
    Exact(Matrix<Rational>),
    Float(Matrix<f64>),
}

impl MatrixValue {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixValue::Exact(m) => m.shape(),
            MatrixValue::Float(m) => m.shape(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MatrixValue::Exact(_))
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        match self {
            MatrixValue::Exact(m) => m.to_f64(),
            MatrixValue::Float(m) => m.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&Matrix<Rational>> {
        match self {
            MatrixValue::Exact(m) => Some(m),
            MatrixValue::Float(_) => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            MatrixValue::Exact(m) => m.is_nonnegative(),
            MatrixValue::Float(m) => m.is_nonnegative(),
        }
    }

    /// Product with kind promotion: exact × exact stays exact, anything
    /// involving a float is computed in floats.
    pub fn matmul(&self, other: &MatrixValue) -> Result<MatrixValue> {
        match (self, other) {
            (MatrixValue::Exact(a), MatrixValue::Exact(b)) => a.matmul(b).map(MatrixValue::Exact),
            _ => self.to_f64().matmul(&other.to_f64()).map(MatrixValue::Float),
        }
    }

    pub fn commutator(&self, other: &MatrixValue) -> Result<MatrixValue> {
        match (self, other) {
            (MatrixValue::Exact(a), MatrixValue::Exact(b)) => commutator(a, b).map(MatrixValue::Exact),
            _ => commutator(&self.to_f64(), &other.to_f64()).map(MatrixValue::Float),
        }
    }
}
