//! Dense complex linear-algebra kernels shared by every other module.
//!
//! Matrices are row-major `Complex64` with no sparsity tricks; everything
//! here targets desk-scale dimensions (a few thousand at most). The
//! Hermitian eigensolver is a cyclic Jacobi sweep, and `operator_norm`
//! switches between the Jacobi route (small matrices) and power iteration
//! on `A*A` (large ones).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Exact-identity tolerance: float error only, dims <= ~200.
pub const TOL_EXACT: f64 = 1e-10;
/// Numerical-rank threshold for span computations, relative to the
/// largest column norm.
pub const TOL_RANK: f64 = 1e-8;

/// Matrices that fit comfortably through a full Jacobi eigensolve.
const JACOBI_DIM_CAP: usize = 160;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: ({0}x{1}) vs ({2}x{3})")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("eigenvalue {0:.3e} below tolerance for a positive square root")]
    NegativeEigenvalue(f64),
    #[error("iteration did not converge after {0} steps")]
    NoConvergence(usize),
}

/// Dense complex matrix, row-major.
///
/// JSON form: `{ "rows": r, "cols": c, "entries": [[re, im], ...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixDump", into = "MatrixDump")]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixDump {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl From<ComplexMatrix> for MatrixDump {
    fn from(m: ComplexMatrix) -> Self {
        MatrixDump {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixDump> for ComplexMatrix {
    type Error = String;

    fn try_from(d: MatrixDump) -> Result<Self, String> {
        if d.entries.len() != d.rows * d.cols {
            return Err(format!(
                "matrix dump has {} entries, expected {}x{}",
                d.entries.len(),
                d.rows,
                d.cols
            ));
        }
        let data: Vec<C64> = d.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err("matrix dump contains non-finite entries".to_string());
        }
        Ok(ComplexMatrix { rows: d.rows, cols: d.cols, data })
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = entries[i];
        }
        m
    }

    /// Column vector (n x 1) from a slice.
    pub fn col_vec(v: &[C64]) -> Self {
        ComplexMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self * v` for a plain vector.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                row.iter().zip(v).map(|(a, x)| a * x).sum()
            })
            .collect()
    }

    /// `self^* v` without materializing the adjoint.
    pub fn adjoint_matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let vi = v[i];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * vi;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Hermitian deviation `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut d = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Standard complex matrix product, parallelized over output rows.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if a.cols != b.rows {
        return Err(LinalgError::DimensionMismatch(a.rows, a.cols, b.rows, b.cols));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    let cols = b.cols;
    if cols == 0 || a.rows == 0 {
        return Ok(out);
    }
    out.data
        .par_chunks_mut(cols)
        .enumerate()
        .for_each(|(i, out_row)| {
            for k in 0..a.cols {
                let aik = a[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                let brow = b.row(k);
                for (o, bv) in out_row.iter_mut().zip(brow) {
                    *o += aik * bv;
                }
            }
        });
    Ok(out)
}

/// Kronecker product with index convention `(i_a, i_b) -> i_a * b.rows + i_b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let av = a[(ia, ja)];
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    out[(ia * b.rows + ib, ja * b.cols + jb)] = av * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Eigen decomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Returns `(eigenvalues, v)` with eigenvalues ascending and `v` unitary,
/// `h = v diag(e) v^*`.
pub fn hermitian_eigs(h: &ComplexMatrix, tol: f64) -> Result<(Vec<f64>, ComplexMatrix), LinalgError> {
    let dev = h.hermitian_deviation();
    let scale = h.max_abs().max(1.0);
    if dev > tol * scale {
        return Err(LinalgError::NotHermitian(dev));
    }
    let n = h.rows;
    let mut a = h.clone();
    // symmetrize to kill the sub-tolerance skew part
    for i in 0..n {
        for j in 0..n {
            let s = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = s;
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let target = 1e-14 * scale * (n as f64).max(1.0);
    for sweep in 0..60 {
        if off(&a) <= target {
            break;
        }
        if sweep == 59 {
            return Err(LinalgError::NoConvergence(60));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{i phi}
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let tau = (beta - alpha) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J: identity except J_pp = c, J_pq = s*phase,
                // J_qp = -s*conj(phase), J_qq = c; zeroes a_pq in J^* A J
                let (cc, ss) = (C64::new(c, 0.0), C64::new(s, 0.0));
                // columns (A <- A J)
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cc - aiq * (ss * phase.conj());
                    a[(i, q)] = aip * (ss * phase) + aiq * cc;
                }
                // rows (J^* from the left)
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cc - aqj * (ss * phase);
                    a[(q, j)] = apj * (ss * phase.conj()) + aqj * cc;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cc - viq * (ss * phase.conj());
                    v[(i, q)] = vip * (ss * phase) + viq * cc;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let evals: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vs = ComplexMatrix::zeros(n, n);
    for (newj, (_, oldj)) in pairs.iter().enumerate() {
        for i in 0..n {
            vs[(i, newj)] = v[(i, *oldj)];
        }
    }
    Ok((evals, vs))
}

/// Unique positive-semidefinite square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero; anything below `-tol`
/// is an error.
pub fn hermitian_sqrt(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, LinalgError> {
    let (evals, v) = hermitian_eigs(h, tol)?;
    let scale = evals.iter().fold(0.0f64, |m, &e| m.max(e.abs())).max(1.0);
    let mut roots = Vec::with_capacity(evals.len());
    for &e in &evals {
        if e < -tol * scale {
            return Err(LinalgError::NegativeEigenvalue(e));
        }
        // clamp eigensolver noise so that sqrt does not amplify it
        let clipped = if e <= 1e-12 * scale { 0.0 } else { e };
        roots.push(C64::new(clipped.sqrt(), 0.0));
    }
    let d = ComplexMatrix::diag(&roots);
    let vd = matmul(&v, &d)?;
    matmul(&vd, &v.adjoint())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eig(h: &ComplexMatrix, tol: f64) -> Result<f64, LinalgError> {
    if h.rows <= JACOBI_DIM_CAP {
        let (evals, _) = hermitian_eigs(h, tol)?;
        return Ok(*evals.first().unwrap_or(&0.0));
    }
    // shifted power iteration: lambda_min = s - lambda_max(sI - H)
    let s = operator_norm(h, 1e-9)?;
    let n = h.rows;
    let shifted = ComplexMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { C64::new(s, 0.0) } else { C64::new(0.0, 0.0) };
        d - h[(i, j)]
    });
    let top = operator_norm(&shifted, 1e-9)?;
    Ok(s - top)
}

/// Largest singular value to relative accuracy `tol`.
pub fn operator_norm(a: &ComplexMatrix, tol: f64) -> Result<f64, LinalgError> {
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Ok(0.0);
    }
    if a.rows.max(a.cols) <= JACOBI_DIM_CAP {
        let g = matmul(&a.adjoint(), a)?;
        let (evals, _) = hermitian_eigs(&g, 1e-8)?;
        let top = evals.last().copied().unwrap_or(0.0).max(0.0);
        return Ok(top.sqrt());
    }
    power_iteration_norm(a, tol)
}

/// Power iteration on `A^*A` with a deterministic start vector.
pub fn power_iteration_norm(a: &ComplexMatrix, tol: f64) -> Result<f64, LinalgError> {
    let n = a.cols;
    let mut x: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + (i as f64 * 0.7391).sin() * 0.3, (i as f64 * 0.433).cos() * 0.3))
        .collect();
    let nx = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for v in &mut x {
        *v /= nx;
    }
    let mut lambda = 0.0f64;
    let cap = 20_000;
    for it in 0..cap {
        let ax = a.matvec(&x);
        let mut y = a.adjoint_matvec(&ax);
        let ny = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if ny == 0.0 {
            return Ok(0.0);
        }
        for v in &mut y {
            *v /= ny;
        }
        let new_lambda = ny;
        let rel = (new_lambda - lambda).abs() / new_lambda.max(1e-300);
        x = y;
        lambda = new_lambda;
        if it > 4 && rel < tol * 0.01 {
            return Ok(lambda.sqrt());
        }
    }
    // stagnated within tolerance anyway?
    if lambda > 0.0 {
        return Ok(lambda.sqrt());
    }
    Err(LinalgError::NoConvergence(cap))
}

/// Orthogonal projection onto a subspace, with its numerical rank.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceProjector {
    pub ambient_dim: usize,
    pub matrix: ComplexMatrix,
    pub rank: usize,
}

impl SubspaceProjector {
    pub fn zero(ambient_dim: usize) -> Self {
        SubspaceProjector { ambient_dim, matrix: ComplexMatrix::zeros(ambient_dim, ambient_dim), rank: 0 }
    }

    pub fn from_basis(basis: &ComplexMatrix) -> Self {
        let p = matmul(basis, &basis.adjoint()).expect("basis dims");
        SubspaceProjector { ambient_dim: basis.rows, matrix: p, rank: basis.cols }
    }

    /// `max(||P^2 - P||, ||P - P^*||)` as a sanity residual.
    pub fn projector_residual(&self) -> f64 {
        let p2 = matmul(&self.matrix, &self.matrix).unwrap();
        let idem = operator_norm(&p2.sub(&self.matrix), 1e-9).unwrap_or(f64::INFINITY);
        let herm = self.matrix.hermitian_deviation();
        idem.max(herm)
    }
}

/// Orthonormalize `columns` in order by modified Gram-Schmidt with
/// reorthogonalization. Columns whose residual is below
/// `tol * max(initial column norms)` are discarded.
///
/// Returns the surviving orthonormal columns as a matrix (ambient x rank).
pub fn orthonormal_columns(ambient: usize, columns: &[Vec<C64>], tol: f64) -> ComplexMatrix {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let max_norm = columns
        .iter()
        .map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if max_norm == 0.0 {
        return ComplexMatrix::zeros(ambient, 0);
    }
    let threshold = tol * max_norm;
    for col in columns {
        assert_eq!(col.len(), ambient);
        let mut v = col.clone();
        for _pass in 0..2 {
            for b in &basis {
                let coeff: C64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= coeff * bi;
                }
            }
        }
        let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nv > threshold {
            for x in &mut v {
                *x /= nv;
            }
            basis.push(v);
        }
    }
    let mut m = ComplexMatrix::zeros(ambient, basis.len());
    for (j, b) in basis.iter().enumerate() {
        m.set_column(j, b);
    }
    m
}

/// Projector onto the span of the given columns.
pub fn orthonormal_range(ambient: usize, columns: &[Vec<C64>], tol: f64) -> SubspaceProjector {
    let basis = orthonormal_columns(ambient, columns, tol);
    if basis.cols == 0 {
        return SubspaceProjector::zero(ambient);
    }
    SubspaceProjector::from_basis(&basis)
}

/// Orthonormal basis of the orthogonal complement of `basis` in C^ambient.
pub fn complement_basis(ambient: usize, basis: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    assert_eq!(basis.rows, ambient);
    let mut cols: Vec<Vec<C64>> = (0..basis.cols).map(|j| basis.column(j)).collect();
    for k in 0..ambient {
        let mut e = vec![C64::new(0.0, 0.0); ambient];
        e[k] = C64::new(1.0, 0.0);
        cols.push(e);
    }
    let full = orthonormal_columns(ambient, &cols, tol);
    // first basis.cols columns reproduce the input span; the rest complement it
    let comp_cols: Vec<Vec<C64>> = (basis.cols..full.cols).map(|j| full.column(j)).collect();
    let mut m = ComplexMatrix::zeros(ambient, comp_cols.len());
    for (j, c) in comp_cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}
