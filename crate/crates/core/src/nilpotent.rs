//! Nilpotent positive matrices as commutators of positive matrices.
//!
//! * [`construct_central_nilpotent`]: `C = AB − BA` with `A` diagonal and `B`
//!   nilpotent, by recursion over the band decomposition of `C`.
//! * [`construct_jordan`]: `C = AB − BA` with `B` a power of the Jordan block,
//!   for k-super upper-triangular `C`.
//! * [`necessity_two_super`]: a commutator of positive nilpotents is 2-super
//!   upper-triangular under the band decomposition of `A + B`.
//! * [`characterize_nilpotent_pair`]: searches for a permutation exhibiting
//!   `C` as 2-super and either certifies or reports an obstruction.


use crate::band::{self, BandDecomposition, BandSource, SuperTriangularReport};
use crate::certificate::{CommutatorCertificate, Method};
use crate::error::{Error, Result};
use crate::matrix::{commutator, nilpotency_index, Matrix};
use crate::scalar::Scalar;

/// Largest dimension for which [`characterize_nilpotent_pair`] enumerates
/// every triangularizing order.
pub const EXHAUSTIVE_SEARCH_MAX_DIM: usize = 8;

struct Central<T> {
    /// Diagonal of `A`, aligned with the index list it was computed for.
    a: Vec<T>,
    /// Nonzero entries of `B` in global coordinates.
    b: Vec<(usize, usize, T)>,
}

fn central_on<T: Scalar>(c: &Matrix<T>, idx: &[usize]) -> Result<Central<T>> {
    let sub = c.submatrix(idx, idx);
    if sub.is_zero() {
        return Ok(Central { a: vec![T::one(); idx.len()], b: Vec::new() });
    }
    let kernel = sub.zero_columns();
    if kernel.is_empty() {
        return Err(Error::NotNilpotent);
    }
    let mut in_kernel = vec![false; idx.len()];
    for &k in &kernel {
        in_kernel[k] = true;
    }
    let all_entries = |sub: &Matrix<T>| {
        let mut out = Vec::new();
        for (x, &gx) in idx.iter().enumerate() {
            for (y, &gy) in idx.iter().enumerate() {
                let v = sub.get(x, y);
                if !v.is_zero() {
                    out.push((gx, gy, v.clone()));
                }
            }
        }
        out
    };

    if sub.matmul(&sub)?.is_zero() {
        // C² = 0: A is the band projection onto N(C) and B = C.
        let a = in_kernel.iter().map(|&k| if k { T::one() } else { T::zero() }).collect();
        return Ok(Central { a, b: all_entries(&sub) });
    }

    let rest_local: Vec<usize> = (0..idx.len()).filter(|&k| !in_kernel[k]).collect();
    let rest: Vec<usize> = rest_local.iter().map(|&k| idx[k]).collect();
    let inner = central_on(c, &rest)?;
    let alpha = inner.a.iter().fold(T::zero(), |m, x| if *x > m { x.clone() } else { m }) + T::one();

    let mut a = vec![T::zero(); idx.len()];
    for &k in &kernel {
        a[k] = alpha.clone();
    }
    for (pos, &k) in rest_local.iter().enumerate() {
        a[k] = inner.a[pos].clone();
    }
    // B' = P C (I − P) (αI − Ã)⁻¹, with (αI − Ã)⁻¹ diagonal.
    let mut b = inner.b;
    for &x in &kernel {
        for (pos, &r) in rest_local.iter().enumerate() {
            let v = sub.get(x, r);
            if !v.is_zero() {
                b.push((idx[x], idx[r], v.clone() / (alpha.clone() - inner.a[pos].clone())));
            }
        }
    }
    Ok(Central { a, b })
}

/// Writes a nonnegative nilpotent `C` as `AB − BA` with `A` diagonal and
/// nonnegative and `B` nonnegative and nilpotent.
///
/// `C = 0` gives `A = I, B = 0`; `C² = 0` gives `A` = projection onto the
/// absolute kernel and `B = C`; otherwise the kernel band `X₁` gets the
/// scalar `α = max(Ã) + 1` on top of the recursive solution `(Ã, B̃)` for the
/// compression to the complement, and `B` gains the block
/// `C_{X₁, X₁ᶜ} (αI − Ã)⁻¹`.
pub fn construct_central_nilpotent<T: Scalar>(c: &Matrix<T>) -> Result<CommutatorCertificate> {
    let n = c.require_square()?;
    c.require_nonnegative()?;
    let idx: Vec<usize> = (0..n).collect();
    let Central { a, b: entries } = central_on(c, &idx)?;
    let a = Matrix::diag(&a);
    let mut b = Matrix::zeros(n, n);
    for (i, j, v) in entries {
        b.set(i, j, v);
    }
    let cert = CommutatorCertificate::assemble(Method::CentralNilpotent, a, b, c.clone(), None, None)?;
    if T::EXACT && !cert.exact {
        return Err(Error::Internal("central-nilpotent construction left a nonzero residual".into()));
    }
    Ok(cert)
}

/// Checks `c_ij = 0` whenever `j − i < k`.
pub fn require_k_super<T: Scalar>(c: &Matrix<T>, k: usize) -> Result<()> {
    let n = c.require_square()?;
    for i in 0..n {
        for j in 0..n {
            if (j as i64 - i as i64) < k as i64 && !c.get(i, j).is_zero() {
                return Err(Error::NotSuperTriangular { k, row: i, col: j });
            }
        }
    }
    Ok(())
}

/// For a k-super upper-triangular nonnegative `C` (n ≥ 3, 2 ≤ k ≤ n):
/// `B = J^{k−1}` and `A = Σ_m J^{m(k−1)} · C · (Jᵀ)^{(m+1)(k−1)}`.
pub fn construct_jordan<T: Scalar>(c: &Matrix<T>, k: usize) -> Result<CommutatorCertificate> {
    let n = c.require_square()?;
    if n < 3 {
        return Err(Error::InvalidParameter(format!("the Jordan construction needs n >= 3, got n = {n}")));
    }
    if !(2..=n).contains(&k) {
        return Err(Error::InvalidParameter(format!("k must satisfy 2 <= k <= {n}, got {k}")));
    }
    c.require_nonnegative()?;
    require_k_super(c, k)?;

    let j: Matrix<T> = Matrix::jordan(n);
    let shift = k - 1;
    let b = j.pow(shift)?;
    let bt = b.transpose();
    let mut a = Matrix::zeros(n, n);
    let mut left = Matrix::identity(n);
    let mut right = bt.clone();
    let mut m = 0;
    while m * shift < n {
        a = a.add(&left.matmul(c)?.matmul(&right)?)?;
        left = left.matmul(&b)?;
        right = right.matmul(&bt)?;
        m += 1;
    }
    let cert = CommutatorCertificate::assemble(Method::Jordan, a, b, c.clone(), None, None)?;
    if T::EXACT && !cert.exact {
        return Err(Error::Internal("Jordan construction left a nonzero residual".into()));
    }
    Ok(cert)
}

/// Given nonnegative nilpotent `A`, `B` with `AB − BA ≥ 0`, returns the
/// super-index of the commutator under the band decomposition of
/// `D = A + B`; it is at least 2.
pub fn necessity_two_super<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<SuperTriangularReport> {
    let n = a.require_square()?;
    if b.shape() != a.shape() {
        return Err(Error::DimensionMismatch { op: "necessity_two_super", left: a.shape(), right: b.shape() });
    }
    a.require_nonnegative()?;
    b.require_nonnegative()?;
    if nilpotency_index(a)?.is_none() {
        return Err(Error::Hypothesis("A is not nilpotent".into()));
    }
    if nilpotency_index(b)?.is_none() {
        return Err(Error::Hypothesis("B is not nilpotent".into()));
    }
    let comm = commutator(a, b)?;
    if let Some((i, j)) = comm.first_negative() {
        return Err(Error::Hypothesis(format!("AB - BA has a negative entry at ({i}, {j})")));
    }
    let d = a.add(b)?;
    let mut decomposition = band::band_decomposition(&d).map_err(|e| match e {
        Error::NotNilpotent => Error::Internal("D = A + B is not nilpotent although AB - BA >= 0".into()),
        other => other,
    })?;
    decomposition.source = BandSource::Sum;
    let report = band::super_index(&comm, &decomposition)?;
    if report.max_k < 2 && n >= 1 {
        return Err(Error::Internal(format!("commutator is only {}-super under the decomposition of A + B", report.max_k)));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairCharacterization {
    /// `C = AB − BA` with both factors nonnegative and nilpotent; `order` is
    /// the permutation exhibiting `C` as 2-super.
    Certified { certificate: Box<CommutatorCertificate>, order: Vec<usize> },
    /// No permutation exhibits `C` as 2-super upper-triangular.
    Obstruction { best_max_k: usize },
    /// The exhaustive search was skipped (dimension above
    /// [`EXHAUSTIVE_SEARCH_MAX_DIM`]) and no candidate order succeeded.
    Undetermined { best_max_k: usize },
}

fn order_super_index<T: Scalar>(c: &Matrix<T>, order: &[usize]) -> usize {
    band::entrywise_super_index(&c.permute(order)).unwrap_or(0)
}

/// Best entrywise super-index over all topological orders of the support
/// digraph; stops early once an order reaching `target` is found.
fn search_orders<T: Scalar>(c: &Matrix<T>, target: usize) -> (usize, Option<Vec<usize>>) {
    let n = c.rows();
    let support: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| !c.get(i, j).is_zero()).collect()).collect();
    let mut indeg: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| support[i][j]).count()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut best = (0usize, None);

    fn rec(
        n: usize,
        support: &[Vec<bool>],
        indeg: &mut [usize],
        placed: &mut [bool],
        order: &mut Vec<usize>,
        best: &mut (usize, Option<Vec<usize>>),
        target: usize,
    ) -> bool {
        if order.len() == n {
            let mut pos = vec![0usize; n];
            for (p, &i) in order.iter().enumerate() {
                pos[i] = p;
            }
            let gap = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| support[i][j])
                .map(|(i, j)| pos[j] as i64 - pos[i] as i64)
                .min();
            let k = match gap {
                None => n,
                Some(g) if g <= 0 => 0,
                Some(g) => g as usize,
            };
            if k > best.0 || best.1.is_none() {
                *best = (k.max(best.0), Some(order.clone()));
            }
            return k >= target;
        }
        for v in 0..n {
            if placed[v] || indeg[v] != 0 {
                continue;
            }
            placed[v] = true;
            order.push(v);
            for w in 0..n {
                if support[v][w] {
                    indeg[w] -= 1;
                }
            }
            let done = rec(n, support, indeg, placed, order, best, target);
            for w in 0..n {
                if support[v][w] {
                    indeg[w] += 1;
                }
            }
            order.pop();
            placed[v] = false;
            if done {
                return true;
            }
        }
        false
    }

    rec(n, &support, &mut indeg, &mut placed, &mut order, &mut best, target);
    best
}

/// Decides whether `C` is permutation similar to a 2-super upper-triangular
/// matrix, and if so writes it as `AB − BA` with `A`, `B` nonnegative
/// nilpotent.
///
/// Candidate orders, in turn: the band decomposition of `C`, the reversed
/// band decomposition of `Cᵀ`, and for n ≤ 8 every topological order of the
/// support digraph.
pub fn characterize_nilpotent_pair<T: Scalar>(c: &Matrix<T>) -> Result<PairCharacterization> {
    let n = c.require_square()?;
    c.require_nonnegative()?;

    let mut candidates: Vec<Vec<usize>> = Vec::new();
    if let Ok(d) = band::band_decomposition(c) {
        candidates.push(d.permutation);
    }
    if let Ok(d) = band::band_decomposition(&c.transpose()) {
        let mut rev = d.permutation;
        rev.reverse();
        candidates.push(rev);
    }
    let mut best = 0;
    let mut found = None;
    for order in candidates {
        let k = order_super_index(c, &order);
        best = best.max(k);
        if k >= 2 {
            found = Some(order);
            break;
        }
    }
    if found.is_none() {
        if n > EXHAUSTIVE_SEARCH_MAX_DIM {
            return Ok(PairCharacterization::Undetermined { best_max_k: best });
        }
        let (k, order) = search_orders(c, 2);
        best = best.max(k);
        if k >= 2 {
            found = order;
        }
    }
    let Some(order) = found else {
        return Ok(PairCharacterization::Obstruction { best_max_k: best });
    };

    if n < 3 {
        // 2-super with n ≤ 2 forces C = 0.
        let z = Matrix::zeros(n, n);
        let cert = CommutatorCertificate::assemble(Method::Jordan, z.clone(), z, c.clone(), None, None)?;
        return Ok(PairCharacterization::Certified { certificate: Box::new(cert), order });
    }
    let permuted = c.permute(&order);
    let inner = construct_jordan(&permuted, 2)?;
    let (a, b) = match (&inner.a, &inner.b) {
        (crate::matrix::MatrixValue::Exact(a), crate::matrix::MatrixValue::Exact(b)) => {
            (T::wrap(a.unpermute(&order).map(T::from_rational)), T::wrap(b.unpermute(&order).map(T::from_rational)))
        }
        _ => {
            let a = inner.a.to_f64().unpermute(&order);
            let b = inner.b.to_f64().unpermute(&order);
            (crate::matrix::MatrixValue::Float(a), crate::matrix::MatrixValue::Float(b))
        }
    };
    let cert = rebuild(a, b, c)?;
    Ok(PairCharacterization::Certified { certificate: Box::new(cert), order })
}

fn rebuild<T: Scalar>(
    a: crate::matrix::MatrixValue,
    b: crate::matrix::MatrixValue,
    c: &Matrix<T>,
) -> Result<CommutatorCertificate> {
    use crate::matrix::MatrixValue;
    match (a, b, T::wrap(c.clone())) {
        (MatrixValue::Exact(a), MatrixValue::Exact(b), MatrixValue::Exact(c)) => {
            CommutatorCertificate::assemble(Method::Jordan, a, b, c, None, None)
        }
        (a, b, c) => CommutatorCertificate::assemble(Method::Jordan, a.to_f64(), b.to_f64(), c.to_f64(), None, Some(1e-10)),
    }
}

/// The decomposition from [`band::band_decomposition`] together with a check
/// that the permuted source is strictly block upper-triangular.
pub fn checked_band_decomposition<T: Scalar>(c: &Matrix<T>) -> Result<BandDecomposition> {
    let d = band::band_decomposition(c)?;
    if !band::is_strictly_block_upper(c, &d)? {
        return Err(Error::Internal("band decomposition does not triangularize C".into()));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixValue;
    use crate::scalar::{int, Rational};

    fn exact(m: &MatrixValue) -> &Matrix<Rational> {
        m.as_exact().expect("exact matrix")
    }

    #[test]
    fn zero_matrix_gives_identity_and_zero() {
        for n in 1..5 {
            let cert = construct_central_nilpotent(&Matrix::<Rational>::zeros(n, n)).unwrap();
            assert_eq!(exact(&cert.a), &Matrix::identity(n));
            assert!(exact(&cert.b).is_zero());
            assert!(cert.exact);
        }
    }

    #[test]
    fn square_zero_case_uses_kernel_projection() {
        let c: Matrix<Rational> = Matrix::jordan(2);
        let cert = construct_central_nilpotent(&c).unwrap();
        assert_eq!(exact(&cert.a), &Matrix::diag(&[int(1), int(0)]));
        assert_eq!(exact(&cert.b), &c);
        assert!(cert.exact);

        let c = Matrix::unit(3, 3, 0, 2, int(1));
        let cert = construct_central_nilpotent(&c).unwrap();
        assert_eq!(exact(&cert.a), &Matrix::diag(&[int(1), int(1), int(0)]));
        assert_eq!(exact(&cert.b), &c);
        let comm = commutator(exact(&cert.a), exact(&cert.b)).unwrap();
        assert_eq!(*comm.get(0, 2), int(1));
    }

    #[test]
    fn three_level_recursion_by_hand() {
        // J₃: X₁ = {0}, X₂ = {1}, X₃ = {2}. The compression to {1, 2} is J₂,
        // solved by Ã = diag(1, 0), B̃ = J₂; then α = 2 and
        // B'_{0,1} = 1 / (2 − 1), B'_{0,2} = 0.
        let c: Matrix<Rational> = Matrix::jordan(3);
        let cert = construct_central_nilpotent(&c).unwrap();
        assert_eq!(exact(&cert.a), &Matrix::diag(&[int(2), int(1), int(0)]));
        assert_eq!(exact(&cert.b), &c);
        assert_eq!(cert.attestations.b_nilpotency_index, Some(3));
        assert!(cert.exact);
    }

    #[test]
    fn refuses_non_nilpotent() {
        let c = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(construct_central_nilpotent(&c).unwrap_err(), Error::NotNilpotent);
        let c = Matrix::diag(&[int(1), int(0)]);
        assert_eq!(construct_central_nilpotent(&c).unwrap_err(), Error::NotNilpotent);
        let c = Matrix::diag(&[int(-1), int(0)]);
        assert!(matches!(construct_central_nilpotent(&c), Err(Error::NegativeEntry { .. })));
    }

    #[test]
    fn jordan_examples() {
        let z = Matrix::<Rational>::zeros(4, 4);
        let cert = construct_jordan(&z, 3).unwrap();
        assert!(exact(&cert.a).is_zero());
        assert_eq!(exact(&cert.b), &Matrix::<Rational>::jordan(4).pow(2).unwrap());

        let c = Matrix::unit(3, 3, 0, 2, int(1));
        let cert = construct_jordan(&c, 2).unwrap();
        assert_eq!(exact(&cert.a), &Matrix::unit(3, 3, 0, 1, int(1)));
        assert_eq!(exact(&cert.b), &Matrix::jordan(3));

        let mut c = Matrix::<Rational>::zeros(4, 4);
        c.set(0, 2, int(2));
        c.set(1, 3, int(3));
        c.set(0, 3, int(5));
        let cert = construct_jordan(&c, 2).unwrap();
        let mut a = Matrix::<Rational>::zeros(4, 4);
        a.set(0, 1, int(5));
        a.set(1, 2, int(3));
        a.set(0, 2, int(5));
        assert_eq!(exact(&cert.a), &a);
        assert!(cert.exact);
    }

    #[test]
    fn jordan_preconditions() {
        assert!(matches!(construct_jordan(&Matrix::<Rational>::zeros(2, 2), 2), Err(Error::InvalidParameter(_))));
        assert!(matches!(construct_jordan(&Matrix::<Rational>::zeros(3, 3), 4), Err(Error::InvalidParameter(_))));
        assert!(matches!(construct_jordan(&Matrix::<Rational>::zeros(3, 3), 1), Err(Error::InvalidParameter(_))));
        let c: Matrix<Rational> = Matrix::jordan(3);
        assert_eq!(construct_jordan(&c, 2).unwrap_err(), Error::NotSuperTriangular { k: 2, row: 0, col: 1 });
    }

    #[test]
    fn necessity_examples() {
        let z = Matrix::<Rational>::zeros(3, 3);
        assert_eq!(necessity_two_super(&z, &z).unwrap().max_k, 3);

        let mut c = Matrix::<Rational>::zeros(4, 4);
        c.set(0, 2, int(2));
        c.set(1, 3, int(3));
        c.set(0, 3, int(5));
        let cert = construct_jordan(&c, 2).unwrap();
        let r = necessity_two_super(exact(&cert.a), exact(&cert.b)).unwrap();
        assert!(r.max_k >= 2);

        let id: Matrix<Rational> = Matrix::identity(2);
        assert!(matches!(necessity_two_super(&id, &Matrix::zeros(2, 2)), Err(Error::Hypothesis(_))));
        // AB − BA = [[1,0],[0,-1]] for A = J, B = Jᵀ, but Jᵀ·J is not
        // nilpotent-compatible: both are nilpotent, commutator has a negative.
        let j: Matrix<Rational> = Matrix::jordan(2);
        assert!(matches!(necessity_two_super(&j, &j.transpose()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn characterize_examples() {
        let c = Matrix::unit(3, 3, 0, 2, int(1));
        match characterize_nilpotent_pair(&c).unwrap() {
            PairCharacterization::Certified { certificate, .. } => {
                assert_eq!(exact(&certificate.b), &Matrix::jordan(3));
                assert!(certificate.exact);
            }
            other => panic!("expected a certificate, got {other:?}"),
        }
        let c: Matrix<Rational> = Matrix::jordan(2);
        assert_eq!(characterize_nilpotent_pair(&c).unwrap(), PairCharacterization::Obstruction { best_max_k: 1 });
        let c: Matrix<Rational> = Matrix::jordan(4);
        assert_eq!(characterize_nilpotent_pair(&c).unwrap(), PairCharacterization::Obstruction { best_max_k: 1 });
        let c = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(characterize_nilpotent_pair(&c).unwrap(), PairCharacterization::Obstruction { best_max_k: 0 });
    }

    #[test]
    fn characterize_needs_a_permutation() {
        // Support 2 → 0 → 1 plus 2 → 1: natural order is not triangular but
        // the order (2, 0, 1) is, and then (2, 0) sits on the first
        // superdiagonal. No 2-super order exists.
        let mut c = Matrix::<Rational>::zeros(4, 4);
        c.set(2, 0, int(1));
        c.set(3, 1, int(1));
        // Orders must put 2 before 0 and 3 before 1; (2, 3, 0, 1) makes both
        // gaps equal to 2.
        match characterize_nilpotent_pair(&c).unwrap() {
            PairCharacterization::Certified { certificate, order } => {
                assert!(order_super_index(&c, &order) >= 2);
                assert!(certificate.exact);
                let a = exact(&certificate.a);
                let b = exact(&certificate.b);
                assert!(nilpotency_index(a).unwrap().is_some());
                assert!(nilpotency_index(b).unwrap().is_some());
            }
            other => panic!("expected a certificate, got {other:?}"),
        }
    }
}
