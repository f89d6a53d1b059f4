//! Block partitions `[m, q, …, q]` and truncated block operators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::{matrix_from_json, matrix_to_json};
use crate::matrix::{Matrix, MatrixValue};
use crate::norms::{induced_norm, Exponent};
use crate::scalar::{Rational, Scalar};

/// Block 0 is `Y` (dimension `y_dim`); blocks `1..=count` are copies of the
/// `x_dim`-dimensional stand-in for `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub y_dim: usize,
    pub x_dim: usize,
    pub count: usize,
    pub p: Exponent,
}

impl BlockPartition {
    pub fn new(y_dim: usize, x_dim: usize, count: usize, p: Exponent) -> Result<Self> {
        if y_dim == 0 || x_dim == 0 {
            return Err(Error::InvalidParameter("block dimensions must be positive".into()));
        }
        if count < 2 {
            return Err(Error::InvalidParameter(format!("a block partition needs K >= 2, got {count}")));
        }
        Ok(Self { y_dim, x_dim, count, p })
    }

    pub fn dim(&self) -> usize {
        self.y_dim + self.count * self.x_dim
    }

    /// Number of block indices, `K + 1`.
    pub fn blocks(&self) -> usize {
        self.count + 1
    }

    pub fn block_dim(&self, i: usize) -> usize {
        if i == 0 {
            self.y_dim
        } else {
            self.x_dim
        }
    }

    pub fn offset(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.y_dim + (i - 1) * self.x_dim
        }
    }

    pub fn block_of(&self, coordinate: usize) -> usize {
        if coordinate < self.y_dim {
            0
        } else {
            1 + (coordinate - self.y_dim) / self.x_dim
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator<T> {
    pub partition: BlockPartition,
    matrix: Matrix<T>,
}

impl<T: Scalar> BlockOperator<T> {
    pub fn new(partition: BlockPartition, matrix: Matrix<T>) -> Result<Self> {
        let d = partition.dim();
        if matrix.shape() != (d, d) {
            return Err(Error::DimensionMismatch { op: "block operator", left: (d, d), right: matrix.shape() });
        }
        Ok(Self { partition, matrix })
    }

    pub fn zeros(partition: BlockPartition) -> Self {
        let d = partition.dim();
        Self { partition, matrix: Matrix::zeros(d, d) }
    }

    pub fn from_blocks(partition: BlockPartition, blocks: BTreeMap<(usize, usize), Matrix<T>>) -> Result<Self> {
        let mut op = Self::zeros(partition);
        for ((i, j), b) in blocks {
            op.set_block(i, j, &b)?;
        }
        Ok(op)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    fn check_index(&self, i: usize, j: usize) -> Result<()> {
        let n = self.partition.blocks();
        if i >= n || j >= n {
            return Err(Error::InvalidParameter(format!("block ({i}, {j}) is outside 0..={}", self.partition.count)));
        }
        Ok(())
    }

    /// Block `(i, j)`; indices past `K` give a zero block of the shape the
    /// index would have.
    pub fn block(&self, i: usize, j: usize) -> Matrix<T> {
        let p = &self.partition;
        let (r, c) = (p.block_dim(i), p.block_dim(j));
        if i >= p.blocks() || j >= p.blocks() {
            return Matrix::zeros(r, c);
        }
        self.matrix.slice(p.offset(i), r, p.offset(j), c)
    }

    pub fn set_block(&mut self, i: usize, j: usize, block: &Matrix<T>) -> Result<()> {
        self.check_index(i, j)?;
        let p = &self.partition;
        let want = (p.block_dim(i), p.block_dim(j));
        if block.shape() != want {
            return Err(Error::DimensionMismatch { op: "set_block", left: want, right: block.shape() });
        }
        let (r0, c0) = (p.offset(i), p.offset(j));
        self.matrix.paste(r0, c0, block);
        Ok(())
    }

    /// Nonzero blocks, keyed by block index.
    pub fn nonzero_blocks(&self) -> BTreeMap<(usize, usize), Matrix<T>> {
        let n = self.partition.blocks();
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let b = self.block(i, j);
                if !b.is_zero() {
                    out.insert((i, j), b);
                }
            }
        }
        out
    }

    pub fn is_zero_block(&self, i: usize, j: usize) -> bool {
        self.block(i, j).is_zero()
    }

    /// Largest block index touched by a nonzero block.
    pub fn support_extent(&self) -> Option<usize> {
        self.nonzero_blocks().keys().map(|&(i, j)| i.max(j)).max()
    }

    pub fn block_norm(&self, i: usize, j: usize) -> Rational {
        induced_norm(&self.block(i, j), self.partition.p)
    }

    pub fn to_f64(&self) -> BlockOperator<f64> {
        BlockOperator { partition: self.partition, matrix: self.matrix.to_f64() }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BlockOperator<U> {
        BlockOperator { partition: self.partition, matrix: self.matrix.map(f) }
    }
}

/// A block operator of either scalar kind, as read from JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockValue {
    Exact(BlockOperator<Rational>),
    Float(BlockOperator<f64>),
}

impl BlockValue {
    pub fn partition(&self) -> BlockPartition {
        match self {
            BlockValue::Exact(b) => b.partition,
            BlockValue::Float(b) => b.partition,
        }
    }

    pub fn to_f64(&self) -> BlockOperator<f64> {
        match self {
            BlockValue::Exact(b) => b.to_f64(),
            BlockValue::Float(b) => b.clone(),
        }
    }

    pub fn flatten(&self) -> MatrixValue {
        match self {
            BlockValue::Exact(b) => MatrixValue::Exact(b.matrix().clone()),
            BlockValue::Float(b) => MatrixValue::Float(b.matrix().clone()),
        }
    }
}

fn parse_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("block key {key:?} must look like \"i,j\""));
    let (i, j) = key.split_once(',').ok_or_else(bad)?;
    Ok((i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?))
}

/// Reads `{"partition": {...}, "blocks": {"i,j": <matrix>, ...}}`. The
/// operator is exact unless some block is a float matrix.
pub fn block_operator_from_json(v: &Value) -> Result<BlockValue> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("block operator must be a JSON object".into()))?;
    let partition: BlockPartition = serde_json::from_value(
        obj.get("partition").cloned().ok_or_else(|| Error::Parse("missing \"partition\"".into()))?,
    )
    .map_err(|e| Error::Parse(format!("bad partition: {e}")))?;
    let partition = BlockPartition::new(partition.y_dim, partition.x_dim, partition.count, partition.p)?;
    let mut blocks = BTreeMap::new();
    if let Some(b) = obj.get("blocks") {
        let b = b.as_object().ok_or_else(|| Error::Parse("\"blocks\" must be an object".into()))?;
        for (key, m) in b {
            blocks.insert(parse_key(key)?, matrix_from_json(m)?);
        }
    }
    if blocks.values().all(MatrixValue::is_exact) {
        let blocks = blocks
            .into_iter()
            .map(|(k, m)| (k, m.as_exact().cloned().expect("checked exact")))
            .collect();
        BlockOperator::from_blocks(partition, blocks).map(BlockValue::Exact)
    } else {
        let blocks = blocks.into_iter().map(|(k, m)| (k, m.to_f64())).collect();
        BlockOperator::from_blocks(partition, blocks).map(BlockValue::Float)
    }
}

pub fn block_operator_to_json<T: Scalar>(op: &BlockOperator<T>) -> Value {
    let blocks: serde_json::Map<String, Value> = op
        .nonzero_blocks()
        .into_iter()
        .map(|((i, j), m)| (format!("{i},{j}"), matrix_to_json(&T::wrap(m))))
        .collect();
    json!({"partition": op.partition, "blocks": blocks})
}
