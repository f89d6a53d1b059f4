//! Seeded generators for property tests and demos. Every function takes the
//! caller's generator; nothing here owns randomness.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matrix::Matrix;
use crate::norms::Exponent;
use crate::pelczynski::blocks::{BlockOperator, BlockPartition};
use crate::scalar::{rat, Rational};

/// `a/b` with `a ∈ 1..=9`, `b ∈ 1..=4`.
pub fn positive_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    rat(rng.gen_range(1..=9), rng.gen_range(1..=4))
}

pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn fill<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64, keep: impl Fn(usize, usize) -> bool) -> Matrix<Rational> {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if keep(i, j) && rng.gen_bool(density) {
                m.set(i, j, positive_rational(rng));
            }
        }
    }
    m
}

/// Strictly upper-triangular with the given density, then conjugated by a
/// random permutation.
pub fn nilpotent<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Matrix<Rational> {
    let m = fill(rng, n, density, |i, j| j > i);
    let p = permutation(rng, n);
    m.permute(&p)
}

/// A nonnegative matrix whose support has a cycle (a loop or a two-cycle),
/// hence not nilpotent.
pub fn non_nilpotent<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Matrix<Rational> {
    let mut m = fill(rng, n, density, |i, j| j > i);
    if n == 1 || rng.gen_bool(0.5) {
        let k = rng.gen_range(0..n);
        m.set(k, k, positive_rational(rng));
    } else {
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 1..n);
        m.set(i, j, positive_rational(rng));
        m.set(j, i, positive_rational(rng));
    }
    let p = permutation(rng, n);
    m.permute(&p)
}

/// Nonzero only where `j − i ≥ k`.
pub fn k_super<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, density: f64) -> Matrix<Rational> {
    fill(rng, n, density, |i, j| j >= i + k)
}

/// Arbitrary nonnegative entries.
pub fn nonnegative<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, density: f64) -> Matrix<Rational> {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(density) {
                m.set(i, j, positive_rational(rng));
            }
        }
    }
    m
}

/// Random `S` whose first `zero_cols` columns vanish.
pub fn with_zero_leading_columns<R: Rng + ?Sized>(rng: &mut R, n: usize, zero_cols: usize) -> Matrix<Rational> {
    let mut m = nonnegative(rng, n, n, 0.6);
    for i in 0..n {
        for j in 0..zero_cols.min(n) {
            m.set(i, j, rat(0, 1));
        }
    }
    m
}

/// A block operator on `(m, q, K, p)` with nonzero blocks only for block
/// indices `≤ support`.
pub fn block_operator<R: Rng + ?Sized>(
    rng: &mut R,
    partition: BlockPartition,
    support: usize,
    density: f64,
) -> BlockOperator<Rational> {
    let mut op = BlockOperator::zeros(partition);
    let last = support.min(partition.count);
    for i in 0..=last {
        for j in 0..=last {
            let block = nonnegative(rng, partition.block_dim(i), partition.block_dim(j), density);
            op.set_block(i, j, &block).expect("shapes follow the partition");
        }
    }
    op
}

pub fn exponent<R: Rng + ?Sized>(rng: &mut R) -> Exponent {
    *[Exponent::ONE, Exponent::TWO, Exponent::INFINITY].choose(rng).expect("nonempty")
}
