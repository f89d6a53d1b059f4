//! Block-norm bookkeeping: the diagonal sums `c_i`, the Toeplitz matrix
//! `u_ij = c_{j−i}`, the dominance `‖A_ij‖ ≤ ‖T‖ u_ij`, and the decay of
//! `‖C Pₙ‖`, `‖Pₙ C‖`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::norms::{induced_norm, norm_1, norm_inf, norms};
use crate::scalar::{Rational, Scalar};

use super::blocks::BlockOperator;

/// Absolute slack for dominance checks built on 2-norm estimates.
pub const ESTIMATE_SLACK: f64 = 1e-8;

/// `c_i = Σ ‖C_{r,s}‖` over blocks with `s − r = i − 1`, for `i ∈ −K..=K+1`.
pub fn c_sequence<T: Scalar>(c: &BlockOperator<T>) -> BTreeMap<i64, Rational> {
    let k = c.partition.count as i64;
    let mut seq: BTreeMap<i64, Rational> = (-k..=k + 1).map(|i| (i, Rational::zero())).collect();
    for (&(r, s), block) in &c.nonzero_blocks() {
        let i = s as i64 - r as i64 + 1;
        let norm = induced_norm(block, c.partition.p);
        *seq.get_mut(&i).expect("offset within range") += norm;
    }
    seq
}

/// The c-sequence and the `(K+1) × (K+1)` Toeplitz matrix `u_ij = c_{j−i}`.
pub fn dominating_matrix_u<T: Scalar>(c: &BlockOperator<T>) -> (BTreeMap<i64, Rational>, Matrix<Rational>) {
    let seq = c_sequence(c);
    let n = c.partition.blocks();
    let u = Matrix::from_fn(n, n, |i, j| seq[&(j as i64 - i as i64)].clone());
    (seq, u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub holds: bool,
    /// Largest `‖A_ij‖ − ‖T‖ u_ij` over all blocks.
    pub worst_excess: f64,
    pub worst_block: Option<(usize, usize)>,
    /// Comparison was exact (p ∈ {1, ∞} over exact inputs).
    pub exact: bool,
}

/// Checks `‖A_ij‖ ≤ ‖T‖ u_ij` for every block, measuring both sides with
/// the partition's norm estimator.
pub fn check_dominance<T: Scalar>(a: &BlockOperator<T>, u: &Matrix<Rational>, t_norm: &Rational) -> DominanceReport {
    let p = a.partition.p;
    let exact = p.is_exact_norm() && T::EXACT;
    let n = a.partition.blocks();
    let mut holds = true;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_block = None;
    for i in 0..n {
        for j in 0..n {
            let lhs = a.block_norm(i, j);
            let rhs = t_norm * u.get(i, j);
            let excess = (lhs.clone() - rhs.clone()).to_f64();
            let ok = if exact { lhs <= rhs } else { excess <= ESTIMATE_SLACK };
            holds &= ok;
            if excess > worst_excess {
                worst_excess = excess;
                worst_block = Some((i, j));
            }
        }
    }
    DominanceReport { holds, worst_excess, worst_block, exact }
}

/// `‖A‖_p` against `‖T‖ · ‖U‖_{p, upper}`, plus `‖U‖₁, ‖U‖_∞ ≤ Σ c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormChain {
    pub a_norm: f64,
    pub t_norm: f64,
    pub u_norm_upper: f64,
    pub u_norm_1: Rational,
    pub u_norm_inf: Rational,
    pub c_sum: Rational,
    pub holds: bool,
}

pub fn norm_chain<T: Scalar>(
    a: &BlockOperator<T>,
    u: &Matrix<Rational>,
    seq: &BTreeMap<i64, Rational>,
    t_norm: &Rational,
) -> NormChain {
    let p = a.partition.p;
    let c_sum = seq.values().fold(Rational::zero(), |acc, x| acc + x);
    let u_norm_1 = norm_1(u);
    let u_norm_inf = norm_inf(u);
    let u_report = norms(u, p);
    let (a_norm, main_ok) = if p.is_exact_norm() && T::EXACT {
        let an = induced_norm(a.matrix(), p);
        let rhs = t_norm * &induced_norm(u, p);
        (an.to_f64(), an <= rhs)
    } else {
        let an = if p.is_two() { norms(a.matrix(), p).norm_2_estimate } else { norms(a.matrix(), p).norm_p_upper };
        let rhs = t_norm.to_f64() * u_report.norm_p_upper;
        (an, an <= rhs + ESTIMATE_SLACK)
    };
    let holds = main_ok && u_norm_1 <= c_sum && u_norm_inf <= c_sum;
    NormChain {
        a_norm,
        t_norm: t_norm.to_f64(),
        u_norm_upper: u_report.norm_p_upper,
        u_norm_1,
        u_norm_inf,
        c_sum,
        holds,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub n: usize,
    /// `‖C Pₙ‖`.
    pub right: Rational,
    /// `‖Pₙ C‖`.
    pub left: Rational,
}

impl DecayRow {
    pub fn max(&self) -> &Rational {
        if self.right > self.left {
            &self.right
        } else {
            &self.left
        }
    }
}

/// `max{‖C Pₙ‖, ‖Pₙ C‖}` pair for a single `n`, where `Pₙ` projects onto
/// blocks `≥ n`. Zero once `n` passes the support.
pub fn projection_norms<T: Scalar>(c: &BlockOperator<T>, n: usize) -> DecayRow {
    let part = c.partition;
    if n > part.count {
        return DecayRow { n, right: Rational::zero(), left: Rational::zero() };
    }
    let start = part.offset(n);
    let d = part.dim();
    let m = c.matrix();
    let right = m.slice(0, d, start, d - start);
    let left = m.slice(start, d - start, 0, d);
    DecayRow { n, right: induced_norm(&right, part.p), left: induced_norm(&left, part.p) }
}

/// `(n, ‖C Pₙ‖, ‖Pₙ C‖)` for `n = 1..=K`.
pub fn band_projection_decay<T: Scalar>(c: &BlockOperator<T>) -> Vec<DecayRow> {
    (1..=c.partition.count).map(|n| projection_norms(c, n)).collect()
}
