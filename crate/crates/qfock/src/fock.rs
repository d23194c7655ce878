//! Truncated full Fock space over C^n, the twisted symmetric-group
//! representation, the level symmetrizers, and the q-deformed Fock space
//! carved out by them, together with its compressed creation tuple.
//!
//! Truncation semantics: creation maps the top level to zero. Every
//! identity that the crop can disturb is asserted away from the edge
//! levels, never across them.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{matmul, operator_norm, ComplexMatrix, SubspaceProjector, TOL_RANK};
use crate::qcoeff::{q_coeff_closed, q_coeff_of_sorted, MultiIndex, Permutation, QParams, Word};
use crate::report::CheckReport;

/// Factorial enumeration beyond this is refused (desk scale).
pub const SYMMETRIZER_LEVEL_CAP: usize = 8;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("creation index {0} out of range for n = {1}")]
    IndexOutOfRange(usize, usize),
    #[error("level {0} exceeds truncation level {1}")]
    LevelOutOfRange(usize, usize),
    #[error("permutation size {0} does not match level {1}")]
    SizeMismatch(usize, usize),
    #[error("level {0} exceeds the factorial enumeration budget ({1})")]
    BudgetExceeded(usize, usize),
    #[error("multi-index degree {0} overflows truncation level {1}")]
    DegreeOverflow(usize, usize),
    #[error(transparent)]
    QCoeff(#[from] crate::qcoeff::QCoeffError),
}

/// Enumeration of the word basis of the truncated full Fock space:
/// level-major, lexicographic within each level, vacuum at index 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FockContext {
    pub n: usize,
    pub level_max: usize,
    level_offsets: Vec<usize>, // offsets[m] = first index of level m; one extra entry = dim
}

impl FockContext {
    pub fn new(n: usize, level_max: usize) -> Self {
        assert!(n >= 1);
        let mut offsets = Vec::with_capacity(level_max + 2);
        let mut acc = 0usize;
        let mut level_size = 1usize;
        for _ in 0..=level_max {
            offsets.push(acc);
            acc += level_size;
            level_size *= n;
        }
        offsets.push(acc);
        FockContext { n, level_max, level_offsets: offsets }
    }

    pub fn dim(&self) -> usize {
        *self.level_offsets.last().unwrap()
    }

    pub fn level_size(&self, m: usize) -> usize {
        self.level_offsets[m + 1] - self.level_offsets[m]
    }

    pub fn level_offset(&self, m: usize) -> usize {
        self.level_offsets[m]
    }

    pub fn level_of(&self, idx: usize) -> usize {
        debug_assert!(idx < self.dim());
        match self.level_offsets.binary_search(&idx) {
            Ok(m) if m <= self.level_max => m,
            Ok(m) => m - 1,
            Err(m) => m - 1,
        }
    }

    /// Index of a word within its level (lexicographic, base-n digits).
    pub fn word_index_in_level(&self, w: &Word) -> usize {
        w.0.iter().fold(0usize, |acc, &l| acc * self.n + l)
    }

    pub fn word_index(&self, w: &Word) -> usize {
        self.level_offset(w.len()) + self.word_index_in_level(w)
    }

    pub fn index_word(&self, idx: usize) -> Word {
        let m = self.level_of(idx);
        let mut rem = idx - self.level_offset(m);
        let mut letters = vec![0usize; m];
        for j in (0..m).rev() {
            letters[j] = rem % self.n;
            rem /= self.n;
        }
        Word(letters)
    }

    /// All words of a given level, in enumeration order.
    pub fn words_at_level(&self, m: usize) -> Vec<Word> {
        (0..self.level_size(m))
            .map(|k| self.index_word(self.level_offset(m) + k))
            .collect()
    }
}

/// Operator acting within a single particle level.
#[derive(Debug, Clone)]
pub struct LevelOperator {
    pub level: usize,
    pub matrix: ComplexMatrix,
}

/// Left creation operator `V_i`: word `a` of length `< M` goes to `i a`,
/// top-level words go to zero.
pub fn creation(ctx: &FockContext, i: usize) -> Result<ComplexMatrix, FockError> {
    if i >= ctx.n {
        return Err(FockError::IndexOutOfRange(i, ctx.n));
    }
    let dim = ctx.dim();
    let mut v = ComplexMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let w = ctx.index_word(idx);
        if w.len() >= ctx.level_max {
            continue;
        }
        let mut letters = Vec::with_capacity(w.len() + 1);
        letters.push(i);
        letters.extend_from_slice(&w.0);
        let target = ctx.word_index(&Word(letters));
        v[(target, idx)] = C64::new(1.0, 0.0);
    }
    Ok(v)
}

/// Twisted permutation action on level `m`:
/// `U_sigma e_x = q^sigma(x) e_{x o sigma^{-1}}`.
pub fn rep_unitary(
    ctx: &FockContext,
    q: &QParams,
    m: usize,
    sigma: &Permutation,
) -> Result<LevelOperator, FockError> {
    if m > ctx.level_max {
        return Err(FockError::LevelOutOfRange(m, ctx.level_max));
    }
    if sigma.size() != m {
        return Err(FockError::SizeMismatch(sigma.size(), m));
    }
    let size = ctx.level_size(m);
    let inv = sigma.inverse();
    let mut u = ComplexMatrix::zeros(size, size);
    for (col, x) in ctx.words_at_level(m).iter().enumerate() {
        let scalar = q_coeff_closed(q, x, sigma)?;
        let permuted = Word((0..m).map(|j| x.0[inv.apply(j)]).collect());
        let row = ctx.word_index_in_level(&permuted);
        u[(row, col)] = scalar;
    }
    Ok(LevelOperator { level: m, matrix: u })
}

/// Level symmetrizer: the average of the twisted action over the whole
/// permutation group. An orthogonal projection onto the level-m fixed space.
pub fn symmetrizer(ctx: &FockContext, q: &QParams, m: usize) -> Result<LevelOperator, FockError> {
    if m > SYMMETRIZER_LEVEL_CAP {
        return Err(FockError::BudgetExceeded(m, SYMMETRIZER_LEVEL_CAP));
    }
    if m > ctx.level_max {
        return Err(FockError::LevelOutOfRange(m, ctx.level_max));
    }
    let size = ctx.level_size(m);
    let mut acc = ComplexMatrix::zeros(size, size);
    let perms = Permutation::all(m);
    let count = perms.len() as f64;
    for sigma in &perms {
        let u = rep_unitary(ctx, q, m, sigma)?;
        acc = acc.add(&u.matrix);
    }
    Ok(LevelOperator { level: m, matrix: acc.scale(C64::new(1.0 / count, 0.0)) })
}

/// Block-diagonal projector onto the truncated q-deformed Fock space,
/// assembled level by level from the symmetrizers.
pub fn qfock_projector(ctx: &FockContext, q: &QParams) -> Result<SubspaceProjector, FockError> {
    let dim = ctx.dim();
    let mut p = ComplexMatrix::zeros(dim, dim);
    let mut rank = 0usize;
    for m in 0..=ctx.level_max {
        let block = symmetrizer(ctx, q, m)?;
        let off = ctx.level_offset(m);
        let size = ctx.level_size(m);
        let mut tr = 0.0f64;
        for a in 0..size {
            for b in 0..size {
                p[(off + a, off + b)] = block.matrix[(a, b)];
            }
            tr += block.matrix[(a, a)].re;
        }
        rank += tr.round() as usize;
    }
    Ok(SubspaceProjector { ambient_dim: dim, matrix: p, rank })
}

/// The truncated q-deformed Fock space: an orthonormal basis of the
/// symmetrizer ranges (pivoted orthogonalization of `P_m`(word basis) in
/// enumeration order) plus the compressed creation tuple on it.
#[derive(Debug, Clone)]
pub struct QFock {
    pub ctx: FockContext,
    pub q: QParams,
    /// ambient_dim x qdim, orthonormal columns, homogeneous by level
    pub basis: ComplexMatrix,
    /// particle level of each basis column
    pub basis_levels: Vec<usize>,
    /// compressed creations `S_i` in the orthonormal basis
    pub s: Vec<ComplexMatrix>,
}

impl QFock {
    pub fn build(ctx: &FockContext, q: &QParams) -> Result<Self, FockError> {
        assert_eq!(ctx.n, q.n);
        let dim = ctx.dim();
        let mut cols: Vec<Vec<C64>> = Vec::new();
        let mut levels_of_candidates: Vec<usize> = Vec::new();
        for m in 0..=ctx.level_max {
            let block = symmetrizer(ctx, q, m)?;
            let off = ctx.level_offset(m);
            let size = ctx.level_size(m);
            for j in 0..size {
                let mut col = vec![C64::new(0.0, 0.0); dim];
                for i in 0..size {
                    col[off + i] = block.matrix[(i, j)];
                }
                cols.push(col);
                levels_of_candidates.push(m);
            }
        }
        // orthogonalize level by level so basis columns stay homogeneous
        let mut kept: Vec<Vec<C64>> = Vec::new();
        let mut basis_levels = Vec::new();
        let mut start = 0usize;
        for m in 0..=ctx.level_max {
            let count = ctx.level_size(m);
            let level_cols = &cols[start..start + count];
            let b = crate::linalg::orthonormal_columns(dim, level_cols, TOL_RANK);
            for j in 0..b.cols {
                kept.push(b.column(j));
                basis_levels.push(m);
            }
            start += count;
        }
        let qdim = kept.len();
        let mut basis = ComplexMatrix::zeros(dim, qdim);
        for (j, c) in kept.iter().enumerate() {
            basis.set_column(j, c);
        }
        let bt = basis.adjoint();
        let mut s = Vec::with_capacity(ctx.n);
        for i in 0..ctx.n {
            let v = creation(ctx, i)?;
            let vb = matmul(&v, &basis).unwrap();
            s.push(matmul(&bt, &vb).unwrap());
        }
        Ok(QFock { ctx: ctx.clone(), q: q.clone(), basis, basis_levels, s })
    }

    pub fn qdim(&self) -> usize {
        self.basis.cols
    }

    /// Vacuum in compressed coordinates.
    pub fn vacuum(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.qdim()];
        // level-0 column of the basis is the vacuum itself
        v[0] = self.basis[(0, 0)].conj();
        v
    }

    /// `S^k omega = S_0^{k_0} ... S_{n-1}^{k_{n-1}} omega` in compressed
    /// coordinates.
    pub fn monomial_vector(&self, k: &MultiIndex) -> Result<Vec<C64>, FockError> {
        assert_eq!(k.0.len(), self.ctx.n);
        if k.degree() > self.ctx.level_max {
            return Err(FockError::DegreeOverflow(k.degree(), self.ctx.level_max));
        }
        let mut v = self.vacuum();
        for i in (0..self.ctx.n).rev() {
            for _ in 0..k.0[i] {
                v = self.s[i].matvec(&v);
            }
        }
        Ok(v)
    }

    /// Mass of a compressed vector on a given particle level.
    pub fn level_mass(&self, v: &[C64], m: usize) -> f64 {
        v.iter()
            .zip(&self.basis_levels)
            .filter(|(_, &lev)| lev == m)
            .map(|(x, _)| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Squared monomial norm `k_1! ... k_n! / |k|!`.
pub fn monomial_norm_sq(k: &MultiIndex) -> f64 {
    fn factorial(n: usize) -> f64 {
        (1..=n).map(|x| x as f64).product()
    }
    k.0.iter().map(|&ki| factorial(ki)).product::<f64>() / factorial(k.degree())
}

/// Checks that `z^k -> S^k omega` is isometric on monomials and intertwines
/// multiplication by `z_i` with `S_i` up to the deformation power factor
/// `prod_{j<i} q_{ji}^{k_j}`.
pub fn weighted_shift_model_check(qf: &QFock, max_degree: usize) -> Result<CheckReport, FockError> {
    let n = qf.ctx.n;
    assert!(max_degree + 1 <= qf.ctx.level_max);
    let mut max_residual = 0.0f64;
    for k in MultiIndex::enumerate_up_to(n, max_degree) {
        let v = qf.monomial_vector(&k)?;
        let norm_sq: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        max_residual = max_residual.max((norm_sq - monomial_norm_sq(&k)).abs());
        for i in 0..n {
            let mut factor = C64::new(1.0, 0.0);
            for j in 0..i {
                for _ in 0..k.0[j] {
                    factor *= qf.q.get(j, i);
                }
            }
            let lhs = qf.s[i].matvec(&v);
            let rhs = qf.monomial_vector(&k.bump(i))?;
            let dev: f64 = lhs
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - factor * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            max_residual = max_residual.max(dev);
        }
    }
    Ok(CheckReport::new("weighted_shift_model", max_residual, 1e-10))
}

/// The diagonal unitary intertwining the symmetric (`q = 1`) projector with
/// the deformed one: entry on basis word `y` is the sorting scalar of `y`.
pub fn intertwiner_wq(ctx: &FockContext, q: &QParams) -> Result<ComplexMatrix, FockError> {
    let dim = ctx.dim();
    let mut w = ComplexMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let word = ctx.index_word(idx);
        w[(idx, idx)] = q_coeff_of_sorted(q, &word)?;
    }
    Ok(w)
}

/// Diagonal and commutator diagnostics for the compressed tuple:
/// (a) each monomial is an eigenvector of `sum S_i^* S_i`,
/// (b) the `[S_i^*, S_i]` formula including the `k_i = 0` branch,
/// (c) the per-level block norms of `[S_i^*, S_j]_{q_ij}` do not grow
///     with the level (finite surrogate of compactness).
pub fn diagonal_diagnostics(qf: &QFock) -> Result<CheckReport, FockError> {
    let n = qf.ctx.n;
    let level_max = qf.ctx.level_max;
    assert!(level_max >= 2);
    let mut max_residual = 0.0f64;

    // number operator in compressed coordinates
    let mut number_op = ComplexMatrix::zeros(qf.qdim(), qf.qdim());
    for i in 0..n {
        number_op = number_op.add(&matmul(&qf.s[i].adjoint(), &qf.s[i]).unwrap());
    }

    for k in MultiIndex::enumerate_up_to(n, level_max - 1) {
        let v = qf.monomial_vector(&k)?;
        let v_norm_sq: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let ratios: Vec<f64> = (0..n)
            .map(|i| {
                let up = qf.monomial_vector(&k.bump(i)).unwrap();
                up.iter().map(|x| x.norm_sqr()).sum::<f64>() / v_norm_sq
            })
            .collect();
        // (a) eigen-relation
        let lhs = number_op.matvec(&v);
        let lambda: f64 = ratios.iter().sum();
        let dev_a: f64 = lhs
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * C64::new(lambda, 0.0)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        max_residual = max_residual.max(dev_a);

        // (b) self-commutator on the monomial
        for i in 0..n {
            let si = &qf.s[i];
            let comm_v = {
                let a = si.adjoint().matvec(&si.matvec(&v));
                let b = si.matvec(&si.adjoint().matvec(&v));
                a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>()
            };
            let expected: Vec<C64> = if k.0[i] == 0 {
                let a = si.adjoint().matvec(&si.matvec(&v));
                a
            } else {
                let mut down = k.0.clone();
                down[i] -= 1;
                let down_norm_sq: f64 = qf
                    .monomial_vector(&MultiIndex(down))?
                    .iter()
                    .map(|x| x.norm_sqr())
                    .sum();
                let coeff = ratios[i] - v_norm_sq / down_norm_sq;
                v.iter().map(|x| x * C64::new(coeff, 0.0)).collect()
            };
            let dev_b: f64 = comm_v
                .iter()
                .zip(&expected)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            max_residual = max_residual.max(dev_b);
        }
    }

    // (c) level-block norms of the deformed commutators decay
    for i in 0..n {
        for j in 0..n {
            let qij = qf.q.get(i, j);
            let a = matmul(&qf.s[i].adjoint(), &qf.s[j]).unwrap();
            let b = matmul(&qf.s[j], &qf.s[i].adjoint()).unwrap().scale(qij);
            let comm = a.sub(&b);
            // start at level 1: for i != j the level-0 block is zero while
            // the level-1 block is not, so decay sets in only from there
            let mut prev = f64::INFINITY;
            for m in 1..=level_max.saturating_sub(2) {
                let idxs: Vec<usize> = (0..qf.qdim()).filter(|&c| qf.basis_levels[c] == m).collect();
                let block = ComplexMatrix::from_fn(idxs.len(), idxs.len(), |r, c| {
                    comm[(idxs[r], idxs[c])]
                });
                let norm = operator_norm(&block, 1e-9).unwrap_or(f64::INFINITY);
                if norm > prev + 1e-10 {
                    max_residual = max_residual.max(norm - prev);
                }
                prev = norm;
            }
        }
    }

    Ok(CheckReport::new("diagonal_diagnostics", max_residual, 1e-10))
}
