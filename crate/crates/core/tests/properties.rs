use num_traits::Zero;
use poscomm_core::band::{band_decomposition, is_strictly_block_upper, triangularizing_order};
use poscomm_core::matrix::{commutator, nilpotency_index, Matrix, MatrixValue};
use poscomm_core::nilpotent::{construct_central_nilpotent, construct_jordan, necessity_two_super};
use poscomm_core::norms::Exponent;
use poscomm_core::pelczynski::{
    band_projection_decay, build_a, build_b, verify_commutator_window, BlockPartition, EmbeddingPair,
};
use poscomm_core::quasi::{construct_diagonal_quasi, Weights};
use poscomm_core::random;
use poscomm_core::scalar::Rational;
use poscomm_core::verify::{nonnegative_commutator_is_nilpotent, verify_certificate};
use poscomm_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn exact(m: &MatrixValue) -> &Matrix<Rational> {
    m.as_exact().expect("exact")
}

/// Nilpotency index from repeated products, as a reference.
fn index_by_powers(m: &Matrix<Rational>) -> Option<usize> {
    let n = m.rows();
    let mut p = m.clone();
    for k in 1..=n {
        if p.is_zero() {
            return Some(k);
        }
        p = p.matmul(m).unwrap();
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nilpotency_index_matches_powers(seed in any::<u64>(), n in 1usize..9, density in 0.1f64..0.9, cyc in any::<bool>()) {
        let mut r = rng(seed);
        let m = if cyc { random::non_nilpotent(&mut r, n, density) } else { random::nilpotent(&mut r, n, density) };
        prop_assert_eq!(nilpotency_index(&m).unwrap(), index_by_powers(&m));
    }

    #[test]
    fn band_parts_are_kernel_increments(seed in any::<u64>(), n in 1usize..10, density in 0.1f64..0.9) {
        let mut r = rng(seed);
        let c = random::nilpotent(&mut r, n, density);
        let d = band_decomposition(&c).unwrap();
        prop_assert!(is_strictly_block_upper(&c, &d).unwrap());
        let mut power = c.clone();
        let mut seen: Vec<usize> = Vec::new();
        for part in &d.parts {
            let mut kernel = power.zero_columns();
            kernel.retain(|j| !seen.contains(j));
            let mut sorted = part.clone();
            sorted.sort_unstable();
            prop_assert_eq!(&kernel, &sorted);
            seen.extend(part);
            power = power.matmul(&c).unwrap();
        }
        prop_assert_eq!(d.parts.len(), nilpotency_index(&c).unwrap().unwrap());
    }

    #[test]
    fn central_nilpotent_certificates(seed in any::<u64>(), n in 1usize..13, density in 0.1f64..0.9) {
        let mut r = rng(seed);
        let c = random::nilpotent(&mut r, n, density);
        let cert = construct_central_nilpotent(&c).unwrap();
        prop_assert!(cert.exact);
        let (a, b) = (exact(&cert.a), exact(&cert.b));
        prop_assert!(a.is_diagonal() && a.is_nonnegative() && b.is_nonnegative());
        prop_assert_eq!(commutator(a, b).unwrap(), c.clone());
        let bands = band_decomposition(&c).unwrap().parts.len();
        prop_assert!(nilpotency_index(b).unwrap().unwrap() <= bands);
        prop_assert!(verify_certificate(&cert, None).unwrap().ok);
    }

    #[test]
    fn permutation_covariance(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let c = random::nilpotent(&mut r, n, 0.5);
        let q = random::permutation(&mut r, n);
        let qc = c.permute(&q);
        let cert = construct_central_nilpotent(&qc).unwrap();
        prop_assert_eq!(commutator(exact(&cert.a), exact(&cert.b)).unwrap(), qc);
    }

    #[test]
    fn non_nilpotent_is_refused(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let c = random::non_nilpotent(&mut r, n, 0.4);
        prop_assert_eq!(construct_central_nilpotent(&c).unwrap_err(), Error::NotNilpotent);
        prop_assert!(matches!(triangularizing_order(&c), Err(Error::Cycle(_))));
        prop_assert!(matches!(construct_diagonal_quasi(&c, &Weights::RowRootSums), Err(Error::Cycle(_))));
    }

    #[test]
    fn jordan_and_annihilation(seed in any::<u64>(), n in 3usize..9, kk in 0usize..100) {
        let k = 2 + kk % (n - 1);
        let mut r = rng(seed);
        let c = random::k_super(&mut r, n, k, 0.6);
        let cert = construct_jordan(&c, k).unwrap();
        prop_assert!(cert.exact);
        let j: Matrix<Rational> = Matrix::jordan(n);
        prop_assert_eq!(exact(&cert.b), &j.pow(k - 1).unwrap());
        let s = random::with_zero_leading_columns(&mut r, n, k - 1);
        let back = s.matmul(&j.transpose().pow(k - 1).unwrap()).unwrap().matmul(&j.pow(k - 1).unwrap()).unwrap();
        prop_assert_eq!(back, s);
        let report = necessity_two_super(exact(&cert.a), exact(&cert.b)).unwrap();
        prop_assert!(report.max_k >= 2);
    }

    #[test]
    fn positive_commutators_are_nilpotent(seed in any::<u64>(), n in 1usize..7, density in 0.05f64..0.5) {
        let mut r = rng(seed);
        let a = random::nonnegative(&mut r, n, n, density);
        let b = random::nonnegative(&mut r, n, n, density);
        if let Some(nil) = nonnegative_commutator_is_nilpotent(&a, &b) {
            prop_assert!(nil);
        }
    }

    #[test]
    fn diagonal_quasi_round_trip(seed in any::<u64>(), n in 1usize..15, density in 0.05f64..0.7) {
        let mut r = rng(seed);
        let c = random::nilpotent(&mut r, n, density);
        let (cert, data) = construct_diagonal_quasi(&c, &Weights::RowRootSums).unwrap();
        prop_assert!(cert.residual_ok());
        prop_assert!(cert.bounds_hold());
        prop_assert!(nilpotency_index(&cert.b.to_f64()).unwrap().is_some());
        prop_assert_eq!(data.order.len(), n);
        let d: Vec<Rational> = (0..n).map(|i| Rational::from_integer((i as i64 + 1).into())).collect();
        let (cert, _) = construct_diagonal_quasi(&c, &Weights::Custom { d, order: None }).unwrap();
        prop_assert!(cert.exact);
    }

    #[test]
    fn block_window_identity(seed in any::<u64>(), m in 1usize..3, extra in 0usize..2, k in 3usize..7) {
        let q = m + extra;
        let mut r = rng(seed);
        let p = random::exponent(&mut r);
        let part = BlockPartition::new(m, q, k, p).unwrap();
        let c = random::block_operator(&mut r, part, k - 1, 0.4);
        let pair = EmbeddingPair::coordinate(m, q).unwrap();
        let a = build_a(&c, &pair).unwrap();
        let b = build_b(&pair, part).unwrap();
        prop_assert!(a.matrix().is_nonnegative());
        prop_assert!(verify_commutator_window(&a, &b, &c, 0.0).unwrap().passed());
        let decay = band_projection_decay(&c);
        if p.is_exact_norm() {
            prop_assert!(decay.windows(2).all(|w| w[1].right <= w[0].right && w[1].left <= w[0].left));
        }
        prop_assert!(decay.last().is_none_or(|row| row.max().is_zero() || k > row.n));
    }
}

#[test]
fn exponent_strings() {
    assert_eq!(Exponent::INFINITY.to_string(), "inf");
    assert_eq!(Exponent::TWO.to_string(), "2");
}
