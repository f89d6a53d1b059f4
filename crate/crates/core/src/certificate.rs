//! Commutator certificates: a triple `(A, B, C)` with the claimed identity
//! `AB − BA = C`, its residual, and structural attestations.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{commutator, Matrix, MatrixValue};
use crate::norms::norm_inf;
use crate::scalar::{Scalar, ScalarValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    CentralNilpotent,
    Jordan,
    DiagonalQuasi,
    Pelczynski,
}

/// Coordinate window on which the identity is asserted: rows `0..rows`,
/// columns `0..cols`. Absent means the whole matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub rows: usize,
    pub cols: usize,
}

/// A named inequality `lhs <= rhs (+ slack)` recorded with the certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Bound {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self { name: name.into(), lhs, rhs, holds: lhs <= rhs + slack }
    }

    pub fn exact(name: impl Into<String>, lhs: f64, rhs: f64, holds: bool) -> Self {
        Self { name: name.into(), lhs, rhs, holds }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attestations {
    pub a_diagonal: bool,
    /// Smallest λ with `0 ≤ A ≤ λI`, when `A` is diagonal.
    pub a_central_bound: Option<ScalarValue>,
    pub b_nilpotency_index: Option<usize>,
    /// Always true for matrices; kept so certificates carry the same claims
    /// as the operator statements.
    pub b_compact: bool,
    #[serde(default)]
    pub bounds: Vec<Bound>,
}

/// Extra data carried by block-operator certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockProvenance {
    pub y_dim: usize,
    pub x_dim: usize,
    pub count: usize,
    pub p: String,
    /// Boundaries `n_1 = 0 < n_2 < …` of the regrouping.
    pub subsequence: Vec<usize>,
    pub source_x_dim: usize,
    pub source_count: usize,
    /// Flattened index, in the certificate's coordinates, of every coordinate
    /// of the input operator; `None` for dropped trailing coordinates.
    pub coordinate_map: Vec<Option<usize>>,
    /// The input operator before regrouping.
    pub source_c: MatrixValue,
    pub c_sequence: Vec<(i64, ScalarValue)>,
    pub t_norm: ScalarValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorCertificate {
    pub method: Method,
    pub a: MatrixValue,
    pub b: MatrixValue,
    pub c: MatrixValue,
    pub exact: bool,
    /// `‖AB − BA − C‖_∞` over the window.
    pub residual_inf: ScalarValue,
    /// Float certificates are accepted when the residual is within this
    /// tolerance.
    pub tolerance: Option<f64>,
    pub window: Option<Window>,
    pub attestations: Attestations,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlockProvenance>,
}

/// `‖(AB − BA − C)|window‖_∞` computed in `T`.
pub fn window_residual<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, c: &Matrix<T>, window: Option<Window>) -> Result<T> {
    let diff = commutator(a, b)?.sub(c)?;
    Ok(match window {
        None => norm_inf(&diff),
        Some(w) => norm_inf(&diff.slice(0, w.rows, 0, w.cols)),
    })
}

impl CommutatorCertificate {
    /// Computes the residual and nilpotency attestation and packages the
    /// triple. `exact` is set when `T` is exact and the residual vanishes.
    pub fn assemble<T: Scalar>(
        method: Method,
        a: Matrix<T>,
        b: Matrix<T>,
        c: Matrix<T>,
        window: Option<Window>,
        tolerance: Option<f64>,
    ) -> Result<Self> {
        let residual = window_residual(&a, &b, &c, window)?;
        let a_diagonal = a.is_diagonal();
        let a_central_bound = a_diagonal.then(|| {
            a.diagonal().into_iter().fold(T::zero(), |m, x| if x > m { x } else { m }).wrap_scalar()
        });
        let b_nilpotency_index = crate::matrix::nilpotency_index(&b)?;
        Ok(Self {
            method,
            exact: T::EXACT && residual.is_zero(),
            residual_inf: residual.wrap_scalar(),
            tolerance: if T::EXACT { None } else { tolerance },
            window,
            attestations: Attestations {
                a_diagonal,
                a_central_bound,
                b_nilpotency_index,
                b_compact: true,
                bounds: Vec::new(),
            },
            a: T::wrap(a),
            b: T::wrap(b),
            c: T::wrap(c),
            blocks: None,
        })
    }

    /// True when the stored residual meets the certificate's own acceptance
    /// rule (zero if exact, within tolerance otherwise).
    pub fn residual_ok(&self) -> bool {
        match (&self.residual_inf, self.tolerance) {
            (ScalarValue::Exact(r), _) => r.is_zero(),
            (ScalarValue::Float(x), Some(tol)) => *x <= tol,
            (ScalarValue::Float(x), None) => *x == 0.0,
        }
    }

    pub fn bounds_hold(&self) -> bool {
        self.attestations.bounds.iter().all(|b| b.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}
