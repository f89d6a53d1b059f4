//! Regroup, build `B` and `A`, verify the window identity, and attest the
//! norm bounds.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::certificate::{BlockProvenance, Bound, CommutatorCertificate, Method};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::norms::induced_norm;
use crate::scalar::{Rational, Scalar};

use super::blocks::{BlockOperator, BlockValue};
use super::dominance::{band_projection_decay, check_dominance, dominating_matrix_u, norm_chain, DominanceReport, NormChain};
use super::embedding::{EmbeddingPair, EmbeddingValue};
use super::operators::{build_a, build_b, verify_commutator_window, window_of, WindowVerdict};
use super::regroup::{regroup_blocks, EpsilonSchedule, Regrouped};

/// Float pipelines accept residuals up to this times `max(1, max |C|)`.
pub const FLOAT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline<T> {
    pub certificate: CommutatorCertificate,
    pub regrouped: Regrouped<T>,
    pub pair: EmbeddingPair<T>,
    pub a: BlockOperator<T>,
    pub b: BlockOperator<T>,
    pub c_sequence: BTreeMap<i64, Rational>,
    pub u: Matrix<Rational>,
    pub t_norm: Rational,
    pub dominance: DominanceReport,
    pub chain: NormChain,
}

pub fn end_to_end<T: Scalar>(
    c: &BlockOperator<T>,
    pair: &EmbeddingPair<T>,
    schedule: &EpsilonSchedule,
) -> Result<Pipeline<T>> {
    let part = c.partition;
    if (pair.y_dim(), pair.x_dim()) != (part.y_dim, part.x_dim) {
        return Err(Error::DimensionMismatch {
            op: "embedding pair against partition",
            left: (part.x_dim, part.y_dim),
            right: pair.s.shape(),
        });
    }
    c.matrix().require_nonnegative()?;

    let regrouped = regroup_blocks(c, schedule)?;
    let c2 = &regrouped.operator;
    let new_part = c2.partition;
    let pair2 = regrouped.lift_pair(pair)?;
    let b = build_b(&pair2, new_part)?;
    let a = build_a(c2, &pair2)?;

    let max_c = c.matrix().max_abs_entry().to_f64();
    let tolerance = FLOAT_TOLERANCE * max_c.max(1.0);
    match verify_commutator_window(&a, &b, c2, tolerance)? {
        WindowVerdict::Pass { .. } => {}
        WindowVerdict::Mismatch { block, residual_inf } => {
            return Err(Error::Verification(format!(
                "window identity fails at block ({}, {}) with residual {residual_inf}",
                block.0, block.1
            )))
        }
    }

    let (c_sequence, u) = dominating_matrix_u(c2);
    let t_norm = induced_norm(&pair2.t, new_part.p);
    let dominance = check_dominance(&a, &u, &t_norm);
    let chain = norm_chain(&a, &u, &c_sequence, &t_norm);

    let decay = band_projection_decay(c2);
    let tails_ok = decay.iter().filter(|r| r.n >= 2).all(|r| *r.max() < schedule.eps(r.n));
    let worst_tail = decay.iter().filter(|r| r.n >= 2).map(|r| r.max().to_f64()).fold(0.0, f64::max);
    let partial = schedule.partial_sum(new_part.count + 1);
    let series = schedule.series_sum();

    let window = window_of(&new_part);
    let mut cert = CommutatorCertificate::assemble(
        Method::Pelczynski,
        a.matrix().clone(),
        b.matrix().clone(),
        c2.matrix().clone(),
        Some(window),
        Some(tolerance),
    )?;
    cert.attestations.bounds = vec![
        Bound::exact("block_dominance", dominance.worst_excess.max(0.0), 0.0, dominance.holds),
        Bound::exact("norm_a_le_norm_t_times_norm_u", chain.a_norm, chain.t_norm * chain.u_norm_upper, chain.holds),
        Bound::exact("norm_1_u_le_sum_c", chain.u_norm_1.to_f64(), chain.c_sum.to_f64(), chain.u_norm_1 <= chain.c_sum),
        Bound::exact(
            "norm_inf_u_le_sum_c",
            chain.u_norm_inf.to_f64(),
            chain.c_sum.to_f64(),
            chain.u_norm_inf <= chain.c_sum,
        ),
        Bound::exact("regrouped_tails_below_eps", worst_tail, schedule.eps(2).to_f64(), tails_ok),
        Bound::exact("schedule_partial_sum_le_series", partial.to_f64(), series.to_f64(), partial <= series),
    ];
    cert.blocks = Some(BlockProvenance {
        y_dim: new_part.y_dim,
        x_dim: new_part.x_dim,
        count: new_part.count,
        p: new_part.p.to_string(),
        source_x_dim: part.x_dim,
        source_count: part.count,
        subsequence: regrouped.subsequence.clone(),
        coordinate_map: regrouped.coordinate_map.clone(),
        source_c: T::wrap(c.matrix().clone()),
        c_sequence: c_sequence.iter().filter(|(_, v)| !v.is_zero()).map(|(&i, v)| (i, v.wrap_scalar())).collect(),
        t_norm: t_norm.wrap_scalar(),
    });
    if !cert.residual_ok() {
        return Err(Error::Verification(format!("window residual {} exceeds tolerance", cert.residual_inf)));
    }
    Ok(Pipeline { certificate: cert, regrouped, pair: pair2, a, b, c_sequence, u, t_norm, dominance, chain })
}

/// Runs [`end_to_end`] exactly when both inputs are exact and in binary64
/// otherwise.
pub fn end_to_end_value(
    c: &BlockValue,
    pair: &EmbeddingValue,
    schedule: &EpsilonSchedule,
) -> Result<CommutatorCertificate> {
    match (c, pair) {
        (BlockValue::Exact(c), EmbeddingValue::Exact(pair)) => end_to_end(c, pair, schedule).map(|p| p.certificate),
        _ => end_to_end(&c.to_f64(), &pair.to_f64(), schedule).map(|p| p.certificate),
    }
}
