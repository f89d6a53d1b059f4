//! ε-schedules and regrouping of blocks into superblocks so that the tails
//! `‖C Pₙ‖`, `‖Pₙ C‖` fall below `εₙ`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};

use super::blocks::{BlockOperator, BlockPartition};
use super::dominance::projection_norms;
use super::embedding::EmbeddingPair;

/// `εₙ` for `n ≥ 2`. Both rules carry a closed form for `Σ_{n≥2} (2n+1) εₙ`.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsilonSchedule {
    /// `εₙ = 2⁻ⁿ`.
    Pow2,
    /// `εₙ = scale · ratioⁿ` with `0 < ratio < 1`.
    Geometric { scale: Rational, ratio: Rational },
}

impl EpsilonSchedule {
    pub fn geometric(scale: Rational, ratio: Rational) -> Result<Self> {
        if !(scale > Rational::zero()) {
            return Err(Error::InvalidParameter("schedule scale must be positive".into()));
        }
        if !(ratio > Rational::zero() && ratio < Rational::one()) {
            return Err(Error::InvalidParameter("schedule ratio must lie in (0, 1)".into()));
        }
        Ok(EpsilonSchedule::Geometric { scale, ratio })
    }

    fn parts(&self) -> (Rational, Rational) {
        match self {
            EpsilonSchedule::Pow2 => (Rational::one(), Rational::new(1.into(), 2.into())),
            EpsilonSchedule::Geometric { scale, ratio } => (scale.clone(), ratio.clone()),
        }
    }

    pub fn eps(&self, n: usize) -> Rational {
        let (s, r) = self.parts();
        s * num_traits::pow(r, n)
    }

    /// `Σ_{n≥2} (2n+1) s rⁿ = s ((1+r)/(1−r)² − 1 − 3r)`.
    pub fn series_sum(&self) -> Rational {
        let (s, r) = self.parts();
        let one = Rational::one();
        let d = &one - &r;
        s * ((&one + &r) / (&d * &d) - &one - Rational::from_integer(3.into()) * r)
    }

    /// `Σ_{n=2}^{N} (2n+1) εₙ`.
    pub fn partial_sum(&self, upto: usize) -> Rational {
        (2..=upto).fold(Rational::zero(), |acc, n| acc + Rational::from_integer((2 * n as i64 + 1).into()) * self.eps(n))
    }
}

impl fmt::Display for EpsilonSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonSchedule::Pow2 => write!(f, "pow2"),
            EpsilonSchedule::Geometric { scale, ratio } => write!(f, "geom:{scale}:{ratio}"),
        }
    }
}

impl FromStr for EpsilonSchedule {
    type Err = Error;

    /// `pow2` or `geom:<scale>:<ratio>` with rational parameters.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "pow2" {
            return Ok(EpsilonSchedule::Pow2);
        }
        if let Some(rest) = t.strip_prefix("geom:") {
            if let Some((a, b)) = rest.split_once(':') {
                return EpsilonSchedule::geometric(parse_rational(a)?, parse_rational(b)?);
            }
        }
        Err(Error::InvalidParameter(format!("unknown epsilon schedule {s:?} (expected pow2 or geom:<scale>:<ratio>)")))
    }
}

impl Serialize for EpsilonSchedule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EpsilonSchedule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regrouped<T> {
    /// `n_1 = 0 < n_2 < … < n_{K'+1} ≤ K`.
    pub subsequence: Vec<usize>,
    pub operator: BlockOperator<T>,
    /// New coordinate of every input coordinate; `None` for coordinates of
    /// dropped trailing blocks (which carry no support).
    pub coordinate_map: Vec<Option<usize>>,
    /// Number of input blocks merged into each superblock `1..=K'`.
    pub group_sizes: Vec<usize>,
}

impl<T: Scalar> Regrouped<T> {
    /// Pads an embedding pair for the original `X` block to the superblock
    /// dimension.
    pub fn lift_pair(&self, pair: &EmbeddingPair<T>) -> Result<EmbeddingPair<T>> {
        pair.lift(self.operator.partition.x_dim)
    }
}

fn tail<T: Scalar>(c: &BlockOperator<T>, n: usize) -> Rational {
    projection_norms(c, n).max().clone()
}

/// Greedy `n_k`: `n_1 = 0`, then the smallest `n > n_{k−1}` with
/// `max{‖C Pₙ‖, ‖Pₙ C‖} < ε_k`, up to index `upto`.
pub fn greedy_subsequence<T: Scalar>(c: &BlockOperator<T>, schedule: &EpsilonSchedule, upto: usize) -> Vec<usize> {
    let mut seq = vec![0usize];
    for k in 2..=upto {
        let eps = schedule.eps(k);
        let mut n = seq[seq.len() - 1] + 1;
        while tail(c, n) >= eps {
            n += 1;
        }
        seq.push(n);
    }
    seq
}

/// Merges blocks `n_k + 1 ..= n_{k+1}` into superblock `k`, zero-padding
/// every superblock to the largest one. The result has partition
/// `(m, q · max group, K')` where `K'` counts the superblocks that fit in the
/// input truncation; all of `C`'s support must land in superblocks
/// `0..K'`.
pub fn regroup_blocks<T: Scalar>(c: &BlockOperator<T>, schedule: &EpsilonSchedule) -> Result<Regrouped<T>> {
    let part = c.partition;
    let k_in = part.count;
    // n_k ≥ k − 1, so K + 3 terms reach past the truncation.
    let seq = greedy_subsequence(c, schedule, k_in + 3);
    // seq[k - 1] holds n_k.
    let n_of = |k: usize| seq[k - 1];
    let k_new = (1..seq.len()).filter(|&k| n_of(k + 1) <= k_in).max().unwrap_or(0);

    let support = c.support_extent();
    let superblock_of = |b: usize| -> usize {
        if b == 0 {
            0
        } else {
            (1..seq.len()).find(|&k| n_of(k) < b && b <= n_of(k + 1)).expect("subsequence covers the support")
        }
    };
    let k_s = support.map_or(0, superblock_of);
    if k_new < 2 || k_s + 1 > k_new {
        let need = (k_s + 1).max(2) + 1;
        let required = if need <= seq.len() {
            n_of(need)
        } else {
            let longer = greedy_subsequence(c, schedule, need);
            longer[need - 1]
        };
        return Err(Error::TruncationTooSmall { required, count: k_in });
    }

    let group_sizes: Vec<usize> = (1..=k_new).map(|k| n_of(k + 1) - n_of(k)).collect();
    let q_new = part.x_dim * group_sizes.iter().copied().max().unwrap_or(1);
    let new_part = BlockPartition::new(part.y_dim, q_new, k_new, part.p)?;

    let mut coordinate_map = vec![None; part.dim()];
    for (x, slot) in coordinate_map.iter_mut().enumerate().take(part.y_dim) {
        *slot = Some(x);
    }
    for b in 1..=k_in {
        let k = superblock_of(b);
        if k == 0 || k > k_new {
            continue;
        }
        let base = new_part.offset(k) + (b - n_of(k) - 1) * part.x_dim;
        for t in 0..part.x_dim {
            coordinate_map[part.offset(b) + t] = Some(base + t);
        }
    }

    let mut out = crate::matrix::Matrix::zeros(new_part.dim(), new_part.dim());
    let m = c.matrix();
    for (i, ni) in coordinate_map.iter().enumerate() {
        for (j, nj) in coordinate_map.iter().enumerate() {
            let v = m.get(i, j);
            if v.is_zero() {
                continue;
            }
            match (ni, nj) {
                (Some(a), Some(b)) => out.set(*a, *b, v.clone()),
                _ => return Err(Error::Internal(format!("support entry ({i}, {j}) fell outside the regrouped window"))),
            }
        }
    }
    Ok(Regrouped {
        subsequence: seq[..=k_new].to_vec(),
        operator: BlockOperator::new(new_part, out)?,
        coordinate_map,
        group_sizes,
    })
}
