//! The maximal q-commuting piece of an arbitrary operator tuple.
//!
//! For a tuple `R` and deformation grid `q`, the subspace `K` generated by
//! the columns of the relation defects `q_ij R_i R_j - R_j R_i` and closed
//! under left multiplication by each `R_k` is invariant; its orthogonal
//! complement is the largest co-invariant subspace on which the compressed
//! tuple satisfies the exchange relations. No modulus restriction on the
//! `q_ij` is needed here, only that they are nonzero.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    hermitian_min_eig, kron, matmul, ComplexMatrix, SubspaceProjector, TOL_EXACT, TOL_RANK,
};
use crate::report::CheckReport;

#[derive(Debug, Error)]
pub enum PieceError {
    #[error("tuple has {0} matrices, expected {1}")]
    WrongCount(usize, usize),
    #[error("matrix {0} is {1}x{2}, expected {3}x{3}")]
    WrongShape(usize, usize, usize, usize),
    #[error("tuple is not contractive: min eigenvalue of I - sum T_i T_i^* is {0:.3e}")]
    NotContractive(f64),
    #[error("deformation grid must be {0}x{0} with nonzero entries")]
    BadGrid(usize),
    #[error("claimed dilation fails the co-extension property (residual {0:.3e})")]
    NotADilation(f64),
    #[error("embedding is not an isometry from the small space (residual {0:.3e})")]
    BadEmbedding(f64),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// An n-tuple of operators on a common finite-dimensional space.
///
/// JSON form: `{ "n": n, "dim": d, "matrices": [matrix, ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorTuple {
    pub n: usize,
    pub dim: usize,
    pub matrices: Vec<ComplexMatrix>,
}

impl OperatorTuple {
    pub fn new(matrices: Vec<ComplexMatrix>) -> Result<Self, PieceError> {
        let n = matrices.len();
        if n == 0 {
            return Err(PieceError::WrongCount(0, 1));
        }
        let dim = matrices[0].rows;
        for (i, m) in matrices.iter().enumerate() {
            if m.rows != dim || m.cols != dim {
                return Err(PieceError::WrongShape(i, m.rows, m.cols, dim));
            }
        }
        Ok(OperatorTuple { n, dim, matrices })
    }

    /// Smallest eigenvalue of `I - sum T_i T_i^*`; nonnegative (within
    /// tolerance) means the tuple is contractive.
    pub fn contraction_margin(&self) -> Result<f64, PieceError> {
        let mut g = ComplexMatrix::identity(self.dim);
        for t in &self.matrices {
            g = g.sub(&matmul(t, &t.adjoint())?);
        }
        Ok(hermitian_min_eig(&g, TOL_EXACT)?)
    }

    pub fn require_contractive(&self, tol: f64) -> Result<(), PieceError> {
        let margin = self.contraction_margin()?;
        if margin < -tol {
            return Err(PieceError::NotContractive(margin));
        }
        Ok(())
    }

    /// `T^alpha = T_{a_1} ... T_{a_k}` applied to a vector.
    pub fn apply_word(&self, word: &[usize], v: &[C64]) -> Vec<C64> {
        let mut out = v.to_vec();
        for &a in word.iter().rev() {
            out = self.matrices[a].matvec(&out);
        }
        out
    }

    /// Block-diagonal join on the direct sum of the two spaces.
    pub fn direct_sum(&self, other: &OperatorTuple) -> Result<OperatorTuple, PieceError> {
        if self.n != other.n {
            return Err(PieceError::WrongCount(other.n, self.n));
        }
        let dim = self.dim + other.dim;
        let matrices = (0..self.n)
            .map(|i| {
                let mut m = ComplexMatrix::zeros(dim, dim);
                for r in 0..self.dim {
                    for c in 0..self.dim {
                        m[(r, c)] = self.matrices[i][(r, c)];
                    }
                }
                for r in 0..other.dim {
                    for c in 0..other.dim {
                        m[(self.dim + r, self.dim + c)] = other.matrices[i][(r, c)];
                    }
                }
                m
            })
            .collect();
        Ok(OperatorTuple { n: self.n, dim, matrices })
    }

    /// `(T_1 (x) I_d, ..., T_n (x) I_d)`.
    pub fn ampliation(&self, d: usize) -> OperatorTuple {
        let eye = ComplexMatrix::identity(d);
        let matrices: Vec<ComplexMatrix> =
            self.matrices.iter().map(|t| kron(t, &eye)).collect();
        OperatorTuple { n: self.n, dim: self.dim * d, matrices }
    }

    /// Worst residual of the exchange relations `q_ij T_i T_j = T_j T_i`.
    pub fn exchange_residual(&self, q: &ComplexMatrix) -> Result<f64, PieceError> {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let d = relation_defect(self, q, i, j)?;
                worst = worst.max(d.max_abs());
            }
        }
        Ok(worst)
    }
}

/// Validates an n x n deformation grid (nonzero entries; no modulus
/// restriction).
fn check_grid(q: &ComplexMatrix, n: usize) -> Result<(), PieceError> {
    if q.rows != n || q.cols != n || q.data.iter().any(|z| z.norm() == 0.0) {
        return Err(PieceError::BadGrid(n));
    }
    Ok(())
}

/// `q_ij T_i T_j - T_j T_i`.
fn relation_defect(
    t: &OperatorTuple,
    q: &ComplexMatrix,
    i: usize,
    j: usize,
) -> Result<ComplexMatrix, PieceError> {
    let a = matmul(&t.matrices[i], &t.matrices[j])?.scale(q[(i, j)]);
    let b = matmul(&t.matrices[j], &t.matrices[i])?;
    Ok(a.sub(&b))
}

/// Outcome of the span-closure computation.
#[derive(Debug, Clone)]
pub struct PieceResult {
    /// orthogonal projection onto the piece
    pub projector: SubspaceProjector,
    /// orthonormal basis of the piece (ambient_dim x piece_dim)
    pub basis: ComplexMatrix,
    /// the compressed tuple in that basis
    pub compressed: OperatorTuple,
    /// closure rounds until the span stabilized
    pub iterations: usize,
}

impl PieceResult {
    pub fn piece_dim(&self) -> usize {
        self.basis.cols
    }
}

/// Computes the maximal q-commuting piece by span closure.
///
/// Seeds `K` with the columns of every relation defect `(i < j)` and closes
/// under left multiplication by each `T_k`; the piece is `K`'s orthogonal
/// complement. The numerical rank of `K` grows monotonically and stabilizes
/// in at most `dim` rounds.
pub fn maximal_q_piece(
    t: &OperatorTuple,
    q: &ComplexMatrix,
    tol: f64,
) -> Result<PieceResult, PieceError> {
    check_grid(q, t.n)?;
    let dim = t.dim;
    let scale = t.matrices.iter().map(|m| m.max_abs()).fold(1.0f64, f64::max);

    // orthonormal basis of K, grown incrementally
    let mut k_basis: Vec<Vec<C64>> = Vec::new();
    let absorb = |k_basis: &mut Vec<Vec<C64>>, cand: &[C64]| -> bool {
        let norm = cand.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm <= tol * scale * scale {
            return false;
        }
        let mut v: Vec<C64> = cand.iter().map(|x| x / norm).collect();
        // two Gram-Schmidt passes for orthogonality at close angles
        for _ in 0..2 {
            for b in k_basis.iter() {
                let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let rem = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if rem <= tol {
            return false;
        }
        k_basis.push(v.iter().map(|x| x / rem).collect());
        true
    };

    let mut fresh: Vec<Vec<C64>> = Vec::new();
    for i in 0..t.n {
        for j in (i + 1)..t.n {
            let d = relation_defect(t, q, i, j)?;
            for c in 0..dim {
                let col = d.column(c);
                if absorb(&mut k_basis, &col) {
                    fresh.push(k_basis.last().unwrap().clone());
                }
            }
        }
    }

    let mut iterations = 0usize;
    while !fresh.is_empty() && k_basis.len() < dim {
        iterations += 1;
        let mut next = Vec::new();
        for v in &fresh {
            for m in &t.matrices {
                let w = m.matvec(v);
                if absorb(&mut k_basis, &w) {
                    next.push(k_basis.last().unwrap().clone());
                }
            }
        }
        fresh = next;
    }

    let mut k_matrix = ComplexMatrix::zeros(dim, k_basis.len());
    for (j, v) in k_basis.iter().enumerate() {
        k_matrix.set_column(j, v);
    }
    let basis = crate::linalg::complement_basis(dim, &k_matrix, tol);
    let projector = SubspaceProjector::from_basis(&basis);
    let bt = basis.adjoint();
    let compressed_matrices: Vec<ComplexMatrix> = t
        .matrices
        .iter()
        .map(|m| matmul(&bt, &matmul(m, &basis).unwrap()).unwrap())
        .collect();
    let compressed =
        OperatorTuple { n: t.n, dim: basis.cols, matrices: compressed_matrices };
    Ok(PieceResult { projector, basis, compressed, iterations })
}

/// Residual of the adjoint-side characterization of the piece: every `h`
/// in the piece satisfies
/// `(conj(q_ij) T_j^* T_i^* - T_i^* T_j^*)(T^alpha)^* h = 0`
/// for every word `alpha`. Checks all words up to `word_cap`.
pub fn dual_characterization_check(
    t: &OperatorTuple,
    q: &ComplexMatrix,
    result: &PieceResult,
    word_cap: usize,
) -> Result<CheckReport, PieceError> {
    check_grid(q, t.n)?;
    let adjoints: Vec<ComplexMatrix> = t.matrices.iter().map(|m| m.adjoint()).collect();
    let mut max_residual = 0.0f64;
    for col in 0..result.basis.cols {
        let h = result.basis.column(col);
        // frontier of (T^alpha)^* h over words alpha of growing length
        let mut frontier = vec![h];
        for _depth in 0..=word_cap {
            for v in &frontier {
                for i in 0..t.n {
                    for j in 0..t.n {
                        if i == j {
                            continue;
                        }
                        let ji = adjoints[i].matvec(&adjoints[j].matvec(v));
                        let ij = adjoints[j].matvec(&adjoints[i].matvec(v));
                        let res: f64 = ji
                            .iter()
                            .zip(&ij)
                            .map(|(a, b)| (q[(i, j)].conj() * b - a).norm_sqr())
                            .sum::<f64>()
                            .sqrt();
                        max_residual = max_residual.max(res);
                    }
                }
            }
            frontier = frontier
                .iter()
                .flat_map(|v| adjoints.iter().map(|a| a.matvec(v)))
                .collect();
        }
    }
    Ok(CheckReport::new("dual_characterization", max_residual, 1e-9))
}

/// Worst residual of the same starred relations on a single vector; used
/// to probe that vectors outside the piece violate them.
pub fn dual_relation_residual(t: &OperatorTuple, q: &ComplexMatrix, h: &[C64], word_cap: usize) -> f64 {
    let adjoints: Vec<ComplexMatrix> = t.matrices.iter().map(|m| m.adjoint()).collect();
    let mut worst = 0.0f64;
    let mut frontier = vec![h.to_vec()];
    for _ in 0..=word_cap {
        for v in &frontier {
            for i in 0..t.n {
                for j in 0..t.n {
                    if i == j {
                        continue;
                    }
                    let ji = adjoints[i].matvec(&adjoints[j].matvec(v));
                    let ij = adjoints[j].matvec(&adjoints[i].matvec(v));
                    let res: f64 = ji
                        .iter()
                        .zip(&ij)
                        .map(|(a, b)| (q[(i, j)].conj() * b - a).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    worst = worst.max(res);
                }
            }
        }
        frontier = frontier.iter().flat_map(|v| adjoints.iter().map(|a| a.matvec(v))).collect();
    }
    worst
}

/// Verifies the piece respects direct sums and ampliations:
/// `piece(A (+) B) = piece(A) (+) piece(B)` and
/// `piece(A (x) I_2) = piece(A) (x) I_2`, as projector equalities.
pub fn lattice_checks(
    a: &OperatorTuple,
    b: &OperatorTuple,
    q: &ComplexMatrix,
    tol: f64,
) -> Result<CheckReport, PieceError> {
    let pa = maximal_q_piece(a, q, tol)?;
    let pb = maximal_q_piece(b, q, tol)?;
    let mut max_residual = 0.0f64;

    let joint = a.direct_sum(b)?;
    let pj = maximal_q_piece(&joint, q, tol)?;
    let mut expected = ComplexMatrix::zeros(joint.dim, joint.dim);
    for r in 0..a.dim {
        for c in 0..a.dim {
            expected[(r, c)] = pa.projector.matrix[(r, c)];
        }
    }
    for r in 0..b.dim {
        for c in 0..b.dim {
            expected[(a.dim + r, a.dim + c)] = pb.projector.matrix[(r, c)];
        }
    }
    max_residual = max_residual.max(pj.projector.matrix.sub(&expected).max_abs());

    let amp = a.ampliation(2);
    let pamp = maximal_q_piece(&amp, q, tol)?;
    let expected = kron(&pa.projector.matrix, &ComplexMatrix::identity(2));
    max_residual = max_residual.max(pamp.projector.matrix.sub(&expected).max_abs());

    Ok(CheckReport::new("piece_lattice", max_residual, 1e-9))
}

/// Verifies that the piece of a dilation, intersected with the dilated
/// space, is exactly the piece of the original tuple.
///
/// `embed` is the isometry carrying the small space `H` into the dilation
/// space; the dilation property `R_i^* embed = embed T_i^*` is checked
/// first and its failure is an error. The subspace intersection
/// `range(embed) /\ piece(R)` is computed through the span of the two
/// orthogonal complements.
pub fn dilation_intersection_check(
    t: &OperatorTuple,
    r: &OperatorTuple,
    embed: &ComplexMatrix,
    q: &ComplexMatrix,
    tol: f64,
) -> Result<CheckReport, PieceError> {
    check_grid(q, t.n)?;
    let iso_dev = matmul(&embed.adjoint(), embed)?
        .sub(&ComplexMatrix::identity(t.dim))
        .max_abs();
    if iso_dev > TOL_EXACT {
        return Err(PieceError::BadEmbedding(iso_dev));
    }
    let mut codev = 0.0f64;
    for i in 0..t.n {
        let lhs = matmul(&r.matrices[i].adjoint(), embed)?;
        let rhs = matmul(embed, &t.matrices[i].adjoint())?;
        codev = codev.max(lhs.sub(&rhs).max_abs());
    }
    if codev > TOL_EXACT {
        return Err(PieceError::NotADilation(codev));
    }

    let piece_t = maximal_q_piece(t, q, tol)?;
    let piece_r = maximal_q_piece(r, q, tol)?;

    // intersection of range(embed) with the piece of R: the orthogonal
    // complement of span{ (I - P_H) columns, (I - P_piece) columns }
    let big = r.dim;
    let p_h = matmul(embed, &embed.adjoint())?;
    let mut complement_cols: Vec<Vec<C64>> = Vec::new();
    let eye = ComplexMatrix::identity(big);
    let c1 = eye.sub(&p_h);
    let c2 = eye.sub(&piece_r.projector.matrix);
    for c in 0..big {
        complement_cols.push(c1.column(c));
        complement_cols.push(c2.column(c));
    }
    let span = crate::linalg::orthonormal_columns(big, &complement_cols, TOL_RANK);
    let inter_basis = crate::linalg::complement_basis(big, &span, TOL_RANK);
    let p_inter = SubspaceProjector::from_basis(&inter_basis);

    // expected: embed carries piece(T) onto the intersection
    let embedded = matmul(embed, &piece_t.basis)?;
    let p_expected = SubspaceProjector::from_basis(&embedded);
    let residual = p_inter.matrix.sub(&p_expected.matrix).max_abs();
    Ok(CheckReport::new("dilation_piece_intersection", residual, 1e-8))
}

/// The nilpotent cyclic one-jump tuple on C^n: `P_k = t_k E_{k, k+1 mod n}`
/// (0-based). Its maximal q-commuting piece is the zero space whenever all
/// `0 < |t_k| < 1`.
pub fn one_jump_tuple(n: usize, t: &[C64]) -> OperatorTuple {
    assert_eq!(t.len(), n);
    let matrices: Vec<ComplexMatrix> = (0..n)
        .map(|k| {
            let mut m = ComplexMatrix::zeros(n, n);
            m[(k, (k + 1) % n)] = t[k];
            m
        })
        .collect();
    OperatorTuple { n, dim: n, matrices }
}
