//! The block shift `B` and the block solution `A` of `AB − BA = C`.
//!
//! `B` has `S` at `(1, 0)` and identities at `(i, i − 1)`, so
//! `(AB − BA)_{ij} = A_{i,j+1} − B_{i,i−1} A_{i−1,j}` for `j ≥ 1` and
//! `A_{i1} S − B_{i,i−1} A_{i−1,0}` for `j = 0`. Solving column by column
//! gives
//!
//! ```text
//! A_{i0} = 0
//! A_{i1} = C_{i0} T
//! A_{0j} = C_{0,j−1}                                         j ≥ 2
//! A_{ij} = Σ_{k=1}^{i} C_{i−k+1,j−k} + S C_{0,j−i−1}         1 ≤ i < j
//! A_{ij} = Σ_{k=1}^{j−1} C_{i−k+1,j−k} + C_{i−j+1,0} T       i ≥ j ≥ 2
//! ```
//!
//! where for `j = i + 1` the term `S C_{0,0}` is read as `S C_{0,0} T` so that
//! it maps `X → X`.

use serde::{Deserialize, Serialize};

use crate::certificate::Window;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::norms::norm_inf;
use crate::scalar::{Scalar, ScalarValue};

use super::blocks::{BlockOperator, BlockPartition};
use super::embedding::EmbeddingPair;

fn check_pair<T: Scalar>(pair: &EmbeddingPair<T>, partition: &BlockPartition) -> Result<()> {
    let want = (partition.x_dim, partition.y_dim);
    if pair.s.shape() != want {
        return Err(Error::DimensionMismatch { op: "S against partition", left: want, right: pair.s.shape() });
    }
    Ok(())
}

pub fn build_b<T: Scalar>(pair: &EmbeddingPair<T>, partition: BlockPartition) -> Result<BlockOperator<T>> {
    check_pair(pair, &partition)?;
    let mut b = BlockOperator::zeros(partition);
    b.set_block(1, 0, &pair.s)?;
    let id = Matrix::identity(partition.x_dim);
    for i in 2..=partition.count {
        b.set_block(i, i - 1, &id)?;
    }
    Ok(b)
}

/// Fails unless every nonzero block of `C` has both indices `≤ K − 1`.
pub fn require_window_support<T: Scalar>(c: &BlockOperator<T>) -> Result<()> {
    let limit = c.partition.count - 1;
    if let Some((&(row, col), _)) = c.nonzero_blocks().iter().find(|(&(i, j), _)| i > limit || j > limit) {
        return Err(Error::SupportTooWide { row, col, limit });
    }
    Ok(())
}

pub fn build_a<T: Scalar>(c: &BlockOperator<T>, pair: &EmbeddingPair<T>) -> Result<BlockOperator<T>> {
    let partition = c.partition;
    check_pair(pair, &partition)?;
    require_window_support(c)?;
    let (s, t) = (&pair.s, &pair.t);
    let k = partition.count;
    let mut a = BlockOperator::zeros(partition);
    for i in 0..=k {
        for j in 1..=k {
            let shape = (partition.block_dim(i), partition.block_dim(j));
            let mut block = Matrix::zeros(shape.0, shape.1);
            if j == 1 {
                block = c.block(i, 0).matmul(t)?;
            } else if i == 0 {
                block = c.block(0, j - 1);
            } else if i < j {
                for kk in 1..=i {
                    block = block.add(&c.block(i - kk + 1, j - kk))?;
                }
                let d = j - i - 1;
                let tail = if d == 0 { s.matmul(&c.block(0, 0))?.matmul(t)? } else { s.matmul(&c.block(0, d))? };
                block = block.add(&tail)?;
            } else {
                for kk in 1..j {
                    block = block.add(&c.block(i - kk + 1, j - kk))?;
                }
                block = block.add(&c.block(i - j + 1, 0).matmul(t)?)?;
            }
            if !block.is_zero() {
                a.set_block(i, j, &block)?;
            }
        }
    }
    Ok(a)
}

/// The window on which the identity is asserted: block rows `0..=K`, block
/// columns `0..K`.
pub fn window_of(partition: &BlockPartition) -> Window {
    Window { rows: partition.dim(), cols: partition.offset(partition.count) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WindowVerdict {
    Pass { window: Window },
    Mismatch { block: (usize, usize), residual_inf: ScalarValue },
}

impl WindowVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, WindowVerdict::Pass { .. })
    }
}

/// Compares `AB − BA` with `C` block by block on the window; exact for
/// rationals, within `tolerance` (max-abs) for floats.
pub fn verify_commutator_window<T: Scalar>(
    a: &BlockOperator<T>,
    b: &BlockOperator<T>,
    c: &BlockOperator<T>,
    tolerance: f64,
) -> Result<WindowVerdict> {
    let p = c.partition;
    if a.partition != p || b.partition != p {
        return Err(Error::InvalidParameter("operators do not share a block partition".into()));
    }
    let comm = a.matrix().matmul(b.matrix())?.sub(&b.matrix().matmul(a.matrix())?)?;
    let diff = BlockOperator::new(p, comm.sub(c.matrix())?)?;
    for i in 0..=p.count {
        for j in 0..p.count {
            let block = diff.block(i, j);
            let bad = if T::EXACT {
                !block.is_zero()
            } else {
                block.data().iter().any(|x| x.to_f64().abs() > tolerance)
            };
            if bad {
                return Ok(WindowVerdict::Mismatch { block: (i, j), residual_inf: norm_inf(&block).wrap_scalar() });
            }
        }
    }
    Ok(WindowVerdict::Pass { window: window_of(&p) })
}
