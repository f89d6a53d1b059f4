//! Independent re-check of a stored certificate.
//!
//! Everything here is recomputed from the stored matrices with a plain
//! triple-loop product, so it shares no code path with the constructions
//! beyond scalar arithmetic.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::certificate::{CommutatorCertificate, Window};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixValue};
use crate::scalar::{Rational, Scalar, ScalarValue};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub exact: bool,
    pub residual_inf: ScalarValue,
    pub tolerance: Option<f64>,
    /// First entry of the window where `AB − BA` and `C` disagree.
    pub offending: Option<(usize, usize)>,
    pub checks: Vec<Check>,
}

fn naive_product<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (n, k, m) = (a.rows(), a.cols(), b.cols());
    let mut out = Matrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            let mut acc = T::zero();
            for t in 0..k {
                let x = a.get(i, t);
                if !x.is_zero() {
                    acc = acc + x.clone() * b.get(t, j).clone();
                }
            }
            out.set(i, j, acc);
        }
    }
    out
}

struct Residual<T> {
    max: T,
    offending: Option<(usize, usize)>,
}

fn residual<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, c: &Matrix<T>, w: Window, tol: &T) -> Residual<T> {
    let ab = naive_product(a, b);
    let ba = naive_product(b, a);
    // Row sums of |AB − BA − C| over the window give the ∞-norm.
    let mut max = T::zero();
    let mut offending = None;
    for i in 0..w.rows {
        let mut row = T::zero();
        for j in 0..w.cols {
            let d = (ab.get(i, j).clone() - ba.get(i, j).clone() - c.get(i, j).clone()).abs_val();
            if offending.is_none() && d > *tol {
                offending = Some((i, j));
            }
            row = row + d;
        }
        if row > max {
            max = row;
        }
    }
    Residual { max, offending }
}

fn naive_nilpotency<T: Scalar>(b: &Matrix<T>, claimed: usize) -> bool {
    let n = b.rows();
    if claimed == 0 || claimed > n.max(1) {
        return false;
    }
    if !b.is_nonnegative() {
        return numeric_nilpotency(b, claimed);
    }
    // Without cancellation the support of Bᵏ is the Boolean k-th power of
    // the support of B.
    let support: Vec<bool> = b.data().iter().map(|x| !x.is_zero()).collect();
    let mut power: Vec<bool> = (0..n * n).map(|k| k / n == k % n).collect();
    for k in 1..=claimed {
        let mut next = vec![false; n * n];
        for i in 0..n {
            for t in 0..n {
                if power[i * n + t] {
                    for j in 0..n {
                        next[i * n + j] |= support[t * n + j];
                    }
                }
            }
        }
        power = next;
        let zero = !power.contains(&true);
        if k < claimed && zero {
            return false;
        }
        if k == claimed {
            return zero;
        }
    }
    false
}

fn numeric_nilpotency<T: Scalar>(b: &Matrix<T>, claimed: usize) -> bool {
    let mut power = Matrix::identity(b.rows());
    for k in 1..=claimed {
        power = naive_product(&power, b);
        let zero = power.is_zero();
        if k < claimed && zero {
            return false;
        }
        if k == claimed {
            return zero;
        }
    }
    false
}

fn check(name: &str, passed: bool, detail: Option<String>) -> Check {
    Check { name: name.into(), passed, detail }
}

fn structural<T: Scalar>(cert: &CommutatorCertificate, a: &Matrix<T>, b: &Matrix<T>, checks: &mut Vec<Check>) {
    checks.push(check("a_nonnegative", a.is_nonnegative(), a.first_negative().map(|(i, j)| format!("A[{i}][{j}] < 0"))));
    checks.push(check("b_nonnegative", b.is_nonnegative(), b.first_negative().map(|(i, j)| format!("B[{i}][{j}] < 0"))));
    if cert.attestations.a_diagonal {
        checks.push(check("a_diagonal", a.is_diagonal(), None));
    }
    if let Some(k) = cert.attestations.b_nilpotency_index {
        checks.push(check("b_nilpotency_index", naive_nilpotency(b, k), Some(format!("claimed {k}"))));
    }
    if let Some(bound) = &cert.attestations.a_central_bound {
        let max = a.diagonal().into_iter().fold(T::zero(), |m, x| if x > m { x } else { m });
        let ok = match bound {
            ScalarValue::Exact(r) if T::EXACT => max.to_rational() == *r,
            other => (max.to_f64() - other.to_f64()).abs() <= 1e-12 * other.to_f64().abs().max(1.0),
        };
        checks.push(check("a_central_bound", ok, Some(format!("claimed {bound}"))));
    }
}

fn provenance(cert: &CommutatorCertificate, checks: &mut Vec<Check>) {
    let Some(blocks) = &cert.blocks else { return };
    let c = cert.c.to_f64();
    let src = blocks.source_c.to_f64();
    let exact_pair = match (&cert.c, &blocks.source_c) {
        (MatrixValue::Exact(c), MatrixValue::Exact(s)) => Some((c, s)),
        _ => None,
    };
    let dim = blocks.y_dim + blocks.count * blocks.x_dim;
    let mut ok = c.shape() == (dim, dim) && blocks.coordinate_map.len() == src.rows();
    let mut detail = None;
    let mut covered = vec![false; c.rows()];
    if ok {
        for (i, ni) in blocks.coordinate_map.iter().enumerate() {
            if let Some(a) = ni {
                if *a >= c.rows() || covered[*a] {
                    ok = false;
                    detail = Some(format!("coordinate {i} maps outside or onto a used coordinate"));
                    break;
                }
                covered[*a] = true;
            }
        }
    }
    if ok {
        'outer: for (i, ni) in blocks.coordinate_map.iter().enumerate() {
            for (j, nj) in blocks.coordinate_map.iter().enumerate() {
                let same = match (ni, nj, exact_pair) {
                    (Some(a), Some(b), Some((c, s))) => c.get(*a, *b) == s.get(i, j),
                    (Some(a), Some(b), None) => c.get(*a, *b) == src.get(i, j),
                    _ => *src.get(i, j) == 0.0,
                };
                if !same {
                    ok = false;
                    detail = Some(format!("source entry ({i}, {j}) is not carried over"));
                    break 'outer;
                }
            }
        }
    }
    if ok {
        // Coordinates outside the image (padding) must carry no support.
        for (a, _) in covered.iter().enumerate().filter(|(_, used)| !**used) {
            if (0..c.cols()).any(|b| *c.get(a, b) != 0.0) || (0..c.rows()).any(|b| *c.get(b, a) != 0.0) {
                ok = false;
                detail = Some(format!("padding coordinate {a} carries support"));
                break;
            }
        }
    }
    checks.push(check("block_provenance", ok, detail));
}

/// Re-verifies the identity on the certificate's window and its structural
/// claims. `tolerance` overrides the stored tolerance for float
/// certificates.
pub fn verify_certificate(cert: &CommutatorCertificate, tolerance: Option<f64>) -> Result<VerifyReport> {
    let n = cert.a.shape().0;
    for (name, m) in [("A", &cert.a), ("B", &cert.b), ("C", &cert.c)] {
        if m.shape() != (n, n) {
            return Err(Error::Verification(format!("{name} has shape {:?}, expected ({n}, {n})", m.shape())));
        }
    }
    let window = cert.window.unwrap_or(Window { rows: n, cols: n });
    if window.rows > n || window.cols > n {
        return Err(Error::Verification("window exceeds the matrix".into()));
    }
    let mut checks = Vec::new();
    let report = match (&cert.a, &cert.b, &cert.c) {
        (MatrixValue::Exact(a), MatrixValue::Exact(b), MatrixValue::Exact(c)) => {
            let r = residual(a, b, c, window, &Rational::zero());
            let zero = r.max.is_zero();
            checks.push(check("identity_on_window", zero, r.offending.map(|(i, j)| format!("entry ({i}, {j})"))));
            let stored_matches = cert.residual_inf == ScalarValue::Exact(r.max.clone());
            checks.push(check("stored_residual", stored_matches, Some(format!("recomputed {}", r.max))));
            if cert.exact {
                checks.push(check("exact_claim", zero, None));
            }
            structural(cert, a, b, &mut checks);
            VerifyReport {
                ok: false,
                exact: zero,
                residual_inf: ScalarValue::Exact(r.max),
                tolerance: None,
                offending: r.offending,
                checks,
            }
        }
        _ => {
            let (a, b, c) = (cert.a.to_f64(), cert.b.to_f64(), cert.c.to_f64());
            let tol = tolerance.or(cert.tolerance).unwrap_or(0.0);
            let r = residual(&a, &b, &c, window, &tol);
            checks.push(check(
                "identity_on_window",
                r.max <= tol && r.offending.is_none(),
                Some(format!("residual {:e} against tolerance {:e}", r.max, tol)),
            ));
            checks.push(check("exact_claim", !cert.exact, cert.exact.then(|| "float matrices cannot be exact".into())));
            structural(cert, &a, &b, &mut checks);
            VerifyReport {
                ok: false,
                exact: false,
                residual_inf: ScalarValue::Float(r.max),
                tolerance: Some(tol),
                offending: r.offending,
                checks,
            }
        }
    };
    let mut report = report;
    provenance(cert, &mut report.checks);
    report.ok = report.checks.iter().all(|c| c.passed);
    Ok(report)
}

/// `None` if `AB − BA` has a negative entry, otherwise whether it is
/// nilpotent, checked with naive products. Used by property tests as a
/// second opinion.
pub fn nonnegative_commutator_is_nilpotent(a: &Matrix<Rational>, b: &Matrix<Rational>) -> Option<bool> {
    let comm = naive_product(a, b).sub(&naive_product(b, a)).ok()?;
    if !comm.is_nonnegative() {
        return None;
    }
    let mut power = comm.clone();
    for _ in 1..comm.rows() {
        power = naive_product(&power, &comm);
    }
    Some(power.is_zero())
}
