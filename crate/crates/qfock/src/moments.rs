//! Vacuum-state moments on the deformed Fock space: semicircle moments of
//! `G_i = S_i + S_i^*`, the non-traciality probe, and the two-sided
//! operator-space norm bounds relating `|| sum a_i (x) G_i ||` to the
//! row/column max norm.
//!
//! Moments are computed by direct matrix products on the truncated space,
//! never by path counting; the Catalan identity is a check on the output,
//! not the algorithm.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::fock::{FockError, QFock};
use crate::linalg::{hermitian_min_eig, kron, matmul, operator_norm, ComplexMatrix, LinalgError};
use crate::report::CheckReport;

/// Mass above this at the top truncation level, with enough factors left
/// for the cropped component to have reached the vacuum again, means the
/// computed expectation could be wrong.
pub const LEAK_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MomentsError {
    #[error(
        "truncation leak: cropped mass {mass:.3e} at factor {step} could still reach the vacuum"
    )]
    TruncationLeak { step: usize, mass: f64 },
    #[error("word uses letter {0} but the space has {1} generators")]
    LetterOutOfRange(usize, usize),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A single factor of a vacuum-expectation word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `G_i = S_i + S_i^*`
    G(usize),
    /// `S_i`
    S(usize),
    /// `S_i^*`
    SStar(usize),
}

impl Factor {
    fn letter(&self) -> usize {
        match self {
            Factor::G(i) | Factor::S(i) | Factor::SStar(i) => *i,
        }
    }

    /// whether applying the factor can raise the level (and hence crop)
    fn creates(&self) -> bool {
        !matches!(self, Factor::SStar(_))
    }
}

/// An ordered product of factors; `factors[0]` is the leftmost.
#[derive(Debug, Clone)]
pub struct GWord(pub Vec<Factor>);

impl GWord {
    /// `G_i^p`
    pub fn power(i: usize, p: usize) -> Self {
        GWord(vec![Factor::G(i); p])
    }
}

/// `<omega, w omega>` by applying the factors of `w` right to left to the
/// vacuum of the truncated deformed Fock space.
///
/// Applying a creation part to a vector with mass at the top level crops
/// that mass. The crop is only an error when the cropped component could
/// still have contributed to the vacuum expectation: it sits at the top
/// level `M`, so it needs at least `M + 1` further factors to come back
/// down. Crops with fewer factors remaining are harmless and ignored.
pub fn vacuum_expectation(qf: &QFock, w: &GWord) -> Result<C64, MomentsError> {
    let n = qf.ctx.n;
    let top = qf.ctx.level_max;
    for f in &w.0 {
        if f.letter() >= n {
            return Err(MomentsError::LetterOutOfRange(f.letter(), n));
        }
    }
    let adjoints: Vec<ComplexMatrix> = qf.s.iter().map(|s| s.adjoint()).collect();
    let mut v = qf.vacuum();
    let total = w.0.len();
    for (pos, f) in w.0.iter().rev().enumerate() {
        if f.creates() {
            let mass = qf.level_mass(&v, top);
            let remaining = total - pos - 1;
            if mass > LEAK_THRESHOLD && remaining >= top + 1 {
                return Err(MomentsError::TruncationLeak { step: pos, mass });
            }
        }
        let i = f.letter();
        v = match f {
            Factor::S(_) => qf.s[i].matvec(&v),
            Factor::SStar(_) => adjoints[i].matvec(&v),
            Factor::G(_) => {
                let a = qf.s[i].matvec(&v);
                let b = adjoints[i].matvec(&v);
                a.iter().zip(&b).map(|(x, y)| x + y).collect()
            }
        };
    }
    let omega = qf.vacuum();
    Ok(omega.iter().zip(&v).map(|(o, x)| o.conj() * x).sum())
}

/// `<omega, G_i^p omega>` for p = 1..=p_max; odd entries vanish.
pub fn moment_sequence(qf: &QFock, i: usize, p_max: usize) -> Result<Vec<f64>, MomentsError> {
    let mut out = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let val = vacuum_expectation(qf, &GWord::power(i, p))?;
        debug_assert!(val.im.abs() < 1e-12);
        out.push(val.re);
    }
    Ok(out)
}

/// `C_k = binom(2k, k) / (k + 1)`, the 2k-th moment of the standard
/// semicircle law.
pub fn catalan(k: usize) -> f64 {
    let mut c = 1.0f64;
    // C_{j+1} = C_j * 2(2j+1)/(j+2)
    for j in 0..k {
        c *= 2.0 * (2 * j + 1) as f64 / (j + 2) as f64;
    }
    c
}

/// `max( ||sum a_i a_i^*||^{1/2}, ||sum a_i^* a_i||^{1/2} )`.
pub fn max_norm(a: &[ComplexMatrix]) -> Result<f64, MomentsError> {
    assert!(!a.is_empty());
    let d = a[0].rows;
    let mut row = ComplexMatrix::zeros(d, d);
    let mut col = ComplexMatrix::zeros(d, d);
    for m in a {
        assert_eq!(m.rows, d);
        assert_eq!(m.cols, d);
        row = row.add(&matmul(m, &m.adjoint())?);
        col = col.add(&matmul(&m.adjoint(), m)?);
    }
    let r = operator_norm(&row, 1e-10)?;
    let c = operator_norm(&col, 1e-10)?;
    Ok(r.max(c).sqrt())
}

/// Row-plus-column embedding of `C^n` into `M_n (+) M_n`: the first block
/// carries `r` in its first column, the second block carries `r` in its
/// first row. The generators `delta_i = e_{i1} (+) e_{1i}` are the images
/// of the standard basis.
pub fn en_embed(r: &[C64]) -> ComplexMatrix {
    let n = r.len();
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    for (i, v) in r.iter().enumerate() {
        m[(i, 0)] = *v;
        m[(n, n + i)] = *v;
    }
    m
}

/// Outcome of the two-sided norm bound check for one coefficient tuple.
pub struct NormBounds {
    /// `|| sum a_i (x) G_i ||` on the truncated space
    pub coupled_norm: f64,
    /// `||(a_1, ..., a_n)||_max`
    pub max_norm: f64,
    pub reports: Vec<CheckReport>,
}

/// Checks `max_norm - eps_tail <= || sum a_i (x) G_i || <= 2 max_norm`
/// and the state lower bound `N^2 >= || sum a_i^* a_i || - eps_tail`.
/// Truncation can only shrink the operator norm, so the tail allowance
/// applies to the lower bounds only.
pub fn coupled_norm_bounds(
    a: &[ComplexMatrix],
    qf: &QFock,
    eps_tail: f64,
) -> Result<NormBounds, MomentsError> {
    assert_eq!(a.len(), qf.ctx.n);
    let qdim = qf.qdim();
    let mut coupled = ComplexMatrix::zeros(a[0].rows * qdim, a[0].cols * qdim);
    for (ai, si) in a.iter().zip(&qf.s) {
        let g = si.add(&si.adjoint());
        coupled = coupled.add(&kron(ai, &g));
    }
    let n_val = operator_norm(&coupled, 1e-10)?;
    let mn = max_norm(a)?;
    let mut col = ComplexMatrix::zeros(a[0].rows, a[0].cols);
    for m in a {
        col = col.add(&matmul(&m.adjoint(), m)?);
    }
    let col_norm = operator_norm(&col, 1e-10)?;
    let reports = vec![
        CheckReport::new("norm_lower_bound", (mn - eps_tail - n_val).max(0.0), 1e-10),
        CheckReport::new("norm_upper_bound", (n_val - 2.0 * mn).max(0.0), 1e-10),
        CheckReport::new(
            "state_lower_bound",
            (col_norm - eps_tail - n_val * n_val).max(0.0),
            1e-10,
        ),
    ];
    Ok(NormBounds { coupled_norm: n_val, max_norm: mn, reports })
}

/// Smallest eigenvalue of the Hankel matrix built from the even moments
/// `(1, m_2, m_4, ...)`; nonnegative for moments of a probability measure.
pub fn hankel_min_eig(even_moments: &[f64]) -> Result<f64, MomentsError> {
    // moments[k] = m_{2k}, with m_0 = 1 prepended
    let mut m = vec![1.0];
    m.extend_from_slice(even_moments);
    let k = (m.len() + 1) / 2;
    let h = ComplexMatrix::from_fn(k, k, |r, c| C64::new(m[r + c], 0.0));
    Ok(hermitian_min_eig(&h, 1e-12)?)
}

/// CSV rows `(p, moment, catalan_reference, abs_error)`; odd rows compare
/// against zero.
pub fn moments_csv(moments: &[f64]) -> String {
    let mut out = String::from("p,moment,semicircle_reference,abs_error\n");
    for (idx, m) in moments.iter().enumerate() {
        let p = idx + 1;
        let reference = if p % 2 == 0 { catalan(p / 2) } else { 0.0 };
        out.push_str(&format!("{p},{m:.12e},{reference:.12e},{:.3e}\n", (m - reference).abs()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockContext;
    use crate::qcoeff::QParams;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn build(n: usize, level: usize, q: &QParams) -> QFock {
        let ctx = FockContext::new(n, level);
        QFock::build(&ctx, q).unwrap()
    }

    #[test]
    fn odd_moments_vanish_and_pair_moments() {
        let q = QParams::uniform_theta(2, 0.37);
        let qf = build(2, 4, &q);
        for i in 0..2 {
            let v = vacuum_expectation(&qf, &GWord::power(i, 1)).unwrap();
            assert!(v.norm() < 1e-12);
            let v3 = vacuum_expectation(&qf, &GWord::power(i, 3)).unwrap();
            assert!(v3.norm() < 1e-12);
        }
        // <omega, S_i^* S_j omega> = delta_ij
        for i in 0..2 {
            for j in 0..2 {
                let w = GWord(vec![Factor::SStar(i), Factor::S(j)]);
                let v = vacuum_expectation(&qf, &w).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - C64::new(want, 0.0)).norm() < 1e-10, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn semicircle_moments_match_catalan() {
        let qs = [
            QParams::trivial(2),
            QParams::uniform_theta(2, 0.61),
            QParams::uniform_theta(3, -1.13),
        ];
        for q in &qs {
            let qf = build(q.n, 4, q);
            let moments = moment_sequence(&qf, 0, 8).unwrap();
            // (0, 1, 0, 2, 0, 5, 0, 14)
            for (idx, m) in moments.iter().enumerate() {
                let p = idx + 1;
                let want = if p % 2 == 0 { catalan(p / 2) } else { 0.0 };
                assert!((m - want).abs() < 1e-10, "p={p} got {m} want {want}");
            }
        }
    }

    #[test]
    fn catalan_values() {
        assert_eq!(
            (0..=6).map(catalan).collect::<Vec<_>>(),
            vec![1.0, 1.0, 2.0, 5.0, 14.0, 42.0, 132.0]
        );
    }

    #[test]
    fn non_traciality_gap_is_half_for_any_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..5 {
            let q = QParams::random(2, &mut rng);
            let qf = build(2, 3, &q);
            // indices: G_2 G_2 G_1 G_1 and G_2 G_1 G_1 G_2
            let w1 = GWord(vec![Factor::G(1), Factor::G(1), Factor::G(0), Factor::G(0)]);
            let w2 = GWord(vec![Factor::G(1), Factor::G(0), Factor::G(0), Factor::G(1)]);
            let v1 = vacuum_expectation(&qf, &w1).unwrap();
            let v2 = vacuum_expectation(&qf, &w2).unwrap();
            assert!((v1 - C64::new(1.0, 0.0)).norm() < 1e-10);
            assert!((v2 - C64::new(0.5, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn truncation_leak_detection() {
        let q = QParams::trivial(1);
        let qf = build(1, 2, &q);
        // G^6 at M = 2: paths through level 3 exist and could return
        let err = vacuum_expectation(&qf, &GWord::power(0, 6));
        assert!(matches!(err, Err(MomentsError::TruncationLeak { .. })));
        // G^4 at M = 2 is exact: cropped paths cannot return in time
        let v = vacuum_expectation(&qf, &GWord::power(0, 4)).unwrap();
        assert!((v - C64::new(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn hankel_psd_for_computed_moments() {
        let q = QParams::uniform_theta(2, 0.9);
        let qf = build(2, 4, &q);
        let moments = moment_sequence(&qf, 1, 8).unwrap();
        let even: Vec<f64> = moments.iter().skip(1).step_by(2).copied().collect();
        assert!(hankel_min_eig(&even).unwrap() > -1e-10);
        // a fake non-moment sequence is caught
        assert!(hankel_min_eig(&[1.0, 0.5]).unwrap() < -1e-3);
    }

    #[test]
    fn max_norm_examples() {
        let eye = ComplexMatrix::identity(2);
        let zero = ComplexMatrix::zeros(2, 2);
        assert!((max_norm(&[eye.clone(), zero]).unwrap() - 1.0).abs() < 1e-10);
        let n = 3;
        let tuple: Vec<ComplexMatrix> = (0..n).map(|_| ComplexMatrix::identity(2)).collect();
        assert!((max_norm(&tuple).unwrap() - (n as f64).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn en_embed_matches_max_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        // delta_1 for r = e_1
        let e1 = en_embed(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert!((e1[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((e1[(2, 2)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(e1.rows, 4);
        for _ in 0..4 {
            let r: Vec<C64> = (0..3)
                .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm_r = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let m = en_embed(&r);
            assert!((operator_norm(&m, 1e-11).unwrap() - norm_r).abs() < 1e-9);
            // linearity spot check
            let scaled: Vec<C64> = r.iter().map(|z| z * C64::new(2.0, -1.0)).collect();
            let diff = en_embed(&scaled).sub(&en_embed(&r).scale(C64::new(2.0, -1.0)));
            assert!(diff.max_abs() < 1e-15);
        }
        // matrix coefficients: || sum a_i (x) delta_i || = max_norm(a)
        for _ in 0..3 {
            let a: Vec<ComplexMatrix> = (0..2)
                .map(|_| {
                    ComplexMatrix::from_fn(2, 2, |_, _| {
                        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                    })
                })
                .collect();
            let mut coupled = ComplexMatrix::zeros(8, 8);
            for (i, ai) in a.iter().enumerate() {
                let mut r = vec![C64::new(0.0, 0.0); 2];
                r[i] = C64::new(1.0, 0.0);
                coupled = coupled.add(&kron(ai, &en_embed(&r)));
            }
            let lhs = operator_norm(&coupled, 1e-11).unwrap();
            let rhs = max_norm(&a).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn coupled_norm_two_sided_bounds() {
        // scalar single generator: truncated G is the tridiagonal Toeplitz
        // matrix with norm 2 cos(pi / (M + 2)) -> 2 = 2 * max_norm
        let q1 = QParams::trivial(1);
        for level in [3usize, 6, 8] {
            let qf = build(1, level, &q1);
            let a = vec![ComplexMatrix::identity(1)];
            let b = coupled_norm_bounds(&a, &qf, 1e-6).unwrap();
            let want = 2.0 * (std::f64::consts::PI / (level as f64 + 2.0)).cos();
            assert!((b.coupled_norm - want).abs() < 1e-8, "level {level}");
            assert!(b.reports.iter().all(|r| r.pass));
        }
        // truncation monotonicity in M
        let q = QParams::uniform_theta(2, 0.41);
        let mut prev = 0.0;
        for level in [2usize, 3, 4, 5] {
            let qf = build(2, level, &q);
            let a = vec![ComplexMatrix::identity(1); 2];
            let b = coupled_norm_bounds(&a, &qf, 1e-6).unwrap();
            assert!(b.coupled_norm >= prev - 1e-10);
            prev = b.coupled_norm;
            // scalars (1, 1): sqrt(2) <= N <= 2 sqrt(2)
            assert!((b.max_norm - 2.0f64.sqrt()).abs() < 1e-10);
            assert!(b.reports.iter().all(|r| r.pass));
        }
        // random matrix coefficients
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let qf = build(2, 4, &q);
        for _ in 0..3 {
            let a: Vec<ComplexMatrix> = (0..2)
                .map(|_| {
                    ComplexMatrix::from_fn(2, 2, |_, _| {
                        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                    })
                })
                .collect();
            let b = coupled_norm_bounds(&a, &qf, 1e-6).unwrap();
            for r in &b.reports {
                assert!(r.pass, "{}: {}", r.check, r.max_residual);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let csv = moments_csv(&[0.0, 1.0, 0.0, 2.0]);
        let lines: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("p,moment"));
        assert!(lines[2].starts_with("2,"));
    }
}
