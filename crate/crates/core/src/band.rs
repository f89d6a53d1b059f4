//! Absolute kernels, band decompositions and triangularizing orders.
//!
//! In ℝⁿ with the coordinatewise order the bands are the coordinate
//! subspaces, so a band is an index set and its band projection is a 0/1
//! diagonal matrix. The absolute kernel of a nonnegative matrix is spanned by
//! its zero columns.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{support_depths, Matrix};
use crate::scalar::Scalar;

/// Which operator a decomposition was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandSource {
    #[default]
    C,
    /// `D = A + B` in the necessity check.
    Sum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandDecomposition {
    pub parts: Vec<Vec<usize>>,
    pub permutation: Vec<usize>,
    #[serde(skip)]
    pub source: BandSource,
}

impl BandDecomposition {
    /// One part per index, in the given order.
    pub fn singletons(order: &[usize]) -> Self {
        Self { parts: order.iter().map(|&i| vec![i]).collect(), permutation: order.to_vec(), source: BandSource::C }
    }

    pub fn dim(&self) -> usize {
        self.permutation.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    /// Checks that the parts are disjoint, cover `0..n`, and that the
    /// permutation lists them in sequence.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        let mut flat = Vec::with_capacity(n);
        for part in &self.parts {
            for &i in part {
                if i >= n || seen[i] {
                    return Err(Error::InvalidParameter(format!("band decomposition repeats or exceeds index {i}")));
                }
                seen[i] = true;
                flat.push(i);
            }
        }
        if flat.len() != n {
            return Err(Error::InvalidParameter(format!("band decomposition covers {} of {n} indices", flat.len())));
        }
        if flat != self.permutation {
            return Err(Error::InvalidParameter("permutation does not list the parts in sequence".into()));
        }
        Ok(())
    }

    /// Part number of every index.
    pub fn part_of(&self) -> Vec<usize> {
        let mut owner = vec![0; self.dim()];
        for (p, part) in self.parts.iter().enumerate() {
            for &i in part {
                owner[i] = p;
            }
        }
        owner
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperTriangularReport {
    pub order: Vec<usize>,
    pub max_k: usize,
    pub block_sizes: Vec<usize>,
}

fn require_square_nonnegative<T: Scalar>(c: &Matrix<T>) -> Result<usize> {
    let n = c.require_square()?;
    c.require_nonnegative()?;
    Ok(n)
}

/// Indices of the zero columns of `C`.
pub fn absolute_kernel<T: Scalar>(c: &Matrix<T>) -> Result<Vec<usize>> {
    require_square_nonnegative(c)?;
    Ok(c.zero_columns())
}

/// Part `i` is `N(Cⁱ) \ N(Cⁱ⁻¹)`; there are as many parts as the nilpotency
/// index, and `C` is strictly block upper-triangular in the listed order.
pub fn band_decomposition<T: Scalar>(c: &Matrix<T>) -> Result<BandDecomposition> {
    let n = require_square_nonnegative(c)?;
    if n == 0 {
        return Ok(BandDecomposition { parts: vec![], permutation: vec![], source: BandSource::C });
    }
    // j lies in N(Cⁱ) iff every path ending at j has fewer than i edges.
    let depth = support_depths(c).ok_or(Error::NotNilpotent)?;
    let count = depth.iter().max().map_or(0, |d| d + 1);
    let mut parts = vec![Vec::new(); count];
    for (j, &d) in depth.iter().enumerate() {
        parts[d].push(j);
    }
    let permutation = parts.iter().flatten().copied().collect();
    Ok(BandDecomposition { parts, permutation, source: BandSource::C })
}

/// Topological order of the support digraph `{i → j : c_ij ≠ 0}`, ties broken
/// by ascending index. The permuted matrix is strictly upper-triangular.
pub fn triangularizing_order<T: Scalar>(c: &Matrix<T>) -> Result<Vec<usize>> {
    let n = require_square_nonnegative(c)?;
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for (j, d) in indeg.iter_mut().enumerate() {
            if !c.get(i, j).is_zero() {
                *d += 1;
            }
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(u)) = heap.pop() {
        order.push(u);
        for (v, d) in indeg.iter_mut().enumerate() {
            if !c.get(u, v).is_zero() {
                *d -= 1;
                if *d == 0 {
                    heap.push(Reverse(v));
                }
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap_or(0);
        return Err(Error::Cycle(stuck));
    }
    Ok(order)
}

/// Largest `k` such that every block `C_{ij}` with `j − i < k` vanishes
/// (0 if a block on or below the block diagonal is nonzero). The zero matrix
/// gets `k = n`, following the convention that it is n-super
/// upper-triangular.
pub fn super_index<T: Scalar>(c: &Matrix<T>, decomposition: &BandDecomposition) -> Result<SuperTriangularReport> {
    let n = c.require_square()?;
    decomposition.validate(n)?;
    let owner = decomposition.part_of();
    let mut min_gap: Option<i64> = None;
    for i in 0..n {
        for j in 0..n {
            if !c.get(i, j).is_zero() {
                let gap = owner[j] as i64 - owner[i] as i64;
                min_gap = Some(min_gap.map_or(gap, |g| g.min(gap)));
            }
        }
    }
    let max_k = match min_gap {
        None => n,
        Some(g) if g <= 0 => 0,
        Some(g) => g as usize,
    };
    Ok(SuperTriangularReport {
        order: decomposition.permutation.clone(),
        max_k,
        block_sizes: decomposition.block_sizes(),
    })
}

/// Entrywise k-super index in the given coordinates (singleton parts).
pub fn entrywise_super_index<T: Scalar>(c: &Matrix<T>) -> Result<usize> {
    let n = c.require_square()?;
    let identity: Vec<usize> = (0..n).collect();
    Ok(super_index(c, &BandDecomposition::singletons(&identity))?.max_k)
}

/// Whether conjugating by the decomposition's permutation leaves no nonzero
/// block on or below the block diagonal.
pub fn is_strictly_block_upper<T: Scalar>(c: &Matrix<T>, decomposition: &BandDecomposition) -> Result<bool> {
    Ok(super_index(c, decomposition)?.max_k >= 1)
}
