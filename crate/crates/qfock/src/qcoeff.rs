//! The scalar `q^sigma(x)` attached to a word and a permutation, computed
//! two independent ways.
//!
//! The chain algorithm simulates the defining substitution rule one
//! adjacent swap at a time and is the ground-truth oracle. The closed form
//! multiplies one factor per inversion of the permutation; its subscript
//! order is fixed by testing against the chain (the two published
//! orderings of the factor disagree, and only `q_{x_{s(i)} x_{s(k)}}` with
//! `s = sigma^{-1}` reproduces the substitution simulation).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QCoeffError {
    #[error("|q_{0}{1}| = {2} is not 1")]
    NotUnitModulus(usize, usize, f64),
    #[error("q_{0}{1} and q_{1}{0} are not conjugate")]
    NotConjugateSymmetric(usize, usize),
    #[error("diagonal entry q_{0}{0} is not 1")]
    DiagonalNotOne(usize),
    #[error("transposition position {0} out of range for word length {1}")]
    PositionOutOfRange(usize, usize),
    #[error("permutation size {0} does not match word length {1}")]
    SizeMismatch(usize, usize),
    #[error("letter {0} out of range for alphabet size {1}")]
    LetterOutOfRange(usize, usize),
    #[error("images {0:?} are not a bijection")]
    NotABijection(Vec<usize>),
}

/// Deformation coefficients: an n x n matrix of unit-modulus scalars with
/// `q_ii = 1` and `q_ji = conj(q_ij)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QParams {
    pub n: usize,
    q: Vec<C64>, // row-major n x n
}

impl QParams {
    /// Full-matrix constructor; validates the invariants.
    pub fn from_matrix(n: usize, q: Vec<C64>) -> Result<Self, QCoeffError> {
        assert_eq!(q.len(), n * n);
        for i in 0..n {
            for j in 0..n {
                let v = q[i * n + j];
                if (v.norm() - 1.0).abs() > 1e-12 {
                    return Err(QCoeffError::NotUnitModulus(i, j, v.norm()));
                }
                if (q[j * n + i] - v.conj()).norm() > 1e-12 {
                    return Err(QCoeffError::NotConjugateSymmetric(i, j));
                }
            }
            if (q[i * n + i] - C64::new(1.0, 0.0)).norm() > 1e-12 {
                return Err(QCoeffError::DiagonalNotOne(i));
            }
        }
        Ok(QParams { n, q })
    }

    /// Uniform deformation: `q_ij = q` for `i < j` with `|q| = 1`.
    pub fn uniform(n: usize, q: C64) -> Result<Self, QCoeffError> {
        if (q.norm() - 1.0).abs() > 1e-12 {
            return Err(QCoeffError::NotUnitModulus(0, 1, q.norm()));
        }
        let one = C64::new(1.0, 0.0);
        let mut m = vec![one; n * n];
        for i in 0..n {
            for j in 0..n {
                if i < j {
                    m[i * n + j] = q;
                } else if i > j {
                    m[i * n + j] = q.conj();
                }
            }
        }
        Ok(QParams { n, q: m })
    }

    /// `q = e^{i theta}` uniform deformation.
    pub fn uniform_theta(n: usize, theta: f64) -> Self {
        Self::uniform(n, C64::from_polar(1.0, theta)).expect("e^{i theta} has modulus 1")
    }

    /// Trivial deformation `q_ij = 1` (the symmetric / bosonic case).
    pub fn trivial(n: usize) -> Self {
        Self::uniform(n, C64::new(1.0, 0.0)).unwrap()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.q[i * self.n + j]
    }

    /// The deformation entries as an n x n matrix.
    pub fn grid(&self) -> crate::linalg::ComplexMatrix {
        crate::linalg::ComplexMatrix {
            rows: self.n,
            cols: self.n,
            data: self.q.clone(),
        }
    }

    pub fn entries(&self) -> &[C64] {
        &self.q
    }

    /// Random unit-modulus deformation with the required symmetry.
    pub fn random(n: usize, rng: &mut impl rand::Rng) -> Self {
        let one = C64::new(1.0, 0.0);
        let mut m = vec![one; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                let v = C64::from_polar(1.0, theta);
                m[i * n + j] = v;
                m[j * n + i] = v.conj();
            }
        }
        QParams { n, q: m }
    }
}

/// Index word: letters are 0-based indices into the alphabet `0..n`.
/// Length 0 is the empty word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<(), QCoeffError> {
        for &l in &self.0 {
            if l >= n {
                return Err(QCoeffError::LetterOutOfRange(l, n));
            }
        }
        Ok(())
    }
}

/// Permutation of `{0..m-1}`, stored as images: `sigma(i) = images[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation { images: (0..m).collect() }
    }

    pub fn new(images: Vec<usize>) -> Result<Self, QCoeffError> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &v in &images {
            if v >= m || seen[v] {
                return Err(QCoeffError::NotABijection(images.clone()));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0usize; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.size(), other.size());
        Permutation { images: (0..self.size()).map(|i| self.apply(other.apply(i))).collect() }
    }

    /// Adjacent transposition `(k, k+1)` in a permutation of size `m`.
    pub fn adjacent_transposition(m: usize, k: usize) -> Permutation {
        let mut images: Vec<usize> = (0..m).collect();
        images.swap(k, k + 1);
        Permutation { images }
    }

    /// Product `t_1 ... t_s` of adjacent transpositions, given by positions.
    pub fn from_adjacent_transpositions(m: usize, positions: &[usize]) -> Permutation {
        let mut p = Permutation::identity(m);
        for &k in positions {
            p = p.compose(&Permutation::adjacent_transposition(m, k));
        }
        p
    }

    /// Adjacent-transposition positions whose product (in list order) is
    /// `self`; obtained by bubble sort.
    pub fn bubble_decomposition(&self) -> Vec<usize> {
        // find positions so that t_1 ... t_s = self
        let m = self.size();
        let mut w: Vec<usize> = self.images.clone();
        let mut rev = Vec::new();
        // sort the one-line notation to identity; each adjacent swap
        // right-multiplies by a transposition, so the factor order reverses.
        loop {
            let mut swapped = false;
            for k in 0..m.saturating_sub(1) {
                if w[k] > w[k + 1] {
                    w.swap(k, k + 1);
                    rev.push(k);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        // t_{k_r} ... t_{k_1} self = id, hence self = t_{k_1} ... t_{k_r}
        rev.reverse();
        rev
    }

    /// Enumerate all permutations of size `m` by iterative Heap's algorithm,
    /// in a deterministic order.
    pub fn all(m: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut a: Vec<usize> = (0..m).collect();
        out.push(Permutation { images: a.clone() });
        let mut c = vec![0usize; m];
        let mut i = 0usize;
        while i < m {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i);
                } else {
                    a.swap(c[i], i);
                }
                out.push(Permutation { images: a.clone() });
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        out
    }
}

/// Exponent vector over the alphabet; `|k| = sum k_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// `k + e_i`.
    pub fn bump(&self, i: usize) -> MultiIndex {
        let mut k = self.0.clone();
        k[i] += 1;
        MultiIndex(k)
    }

    /// The sorted word `1^{k_1} 2^{k_2} ...` (0-based letters, nondecreasing).
    pub fn to_word(&self) -> Word {
        let mut w = Vec::with_capacity(self.degree());
        for (letter, &count) in self.0.iter().enumerate() {
            w.extend(std::iter::repeat(letter).take(count));
        }
        Word(w)
    }

    /// All multi-indices over `n` letters with `|k| <= max_degree`.
    pub fn enumerate_up_to(n: usize, max_degree: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        fn rec(prefix: &mut Vec<usize>, remaining_slots: usize, budget: usize, out: &mut Vec<MultiIndex>) {
            if remaining_slots == 0 {
                out.push(MultiIndex(prefix.clone()));
                return;
            }
            for v in 0..=budget {
                prefix.push(v);
                rec(prefix, remaining_slots - 1, budget - v, out);
                prefix.pop();
            }
        }
        rec(&mut Vec::new(), n, max_degree, &mut out);
        out.sort_by_key(|k| (k.degree(), k.0.clone()));
        out
    }
}

/// Chain oracle: simulate the substitution sequence.
///
/// `positions = [k_1, ..., k_s]` encodes `sigma = t_1 ... t_s` with `t_i`
/// the adjacent transposition at `k_i` (0-based). The substitutions run
/// from `t_s` back to `t_1`: the pair `(a, b)` currently at positions
/// `(k, k+1)` is replaced by `q_{b a} (b, a)`, contributing one factor.
/// The word ends up reordered to `x o sigma^{-1}` and the accumulated
/// scalar is `q^sigma(x)`, matching [`q_coeff_closed`]; the result does
/// not depend on the chosen decomposition.
pub fn q_coeff_chain(q: &QParams, x: &Word, positions: &[usize]) -> Result<C64, QCoeffError> {
    x.validate(q.n)?;
    let m = x.len();
    let mut w = x.0.clone();
    let mut scalar = C64::new(1.0, 0.0);
    for &k in positions.iter().rev() {
        if m < 2 || k >= m - 1 {
            return Err(QCoeffError::PositionOutOfRange(k, m));
        }
        let (a, b) = (w[k], w[k + 1]);
        scalar *= q.get(b, a);
        w.swap(k, k + 1);
    }
    Ok(scalar)
}

/// Closed form: one factor per inversion of `sigma`.
///
/// With `s = sigma^{-1}`, the product runs over `{(i,k): i < k, s(i) > s(k)}`
/// with factor `q_{x_{s(i)} x_{s(k)}}`. This order agrees with the chain
/// oracle (see module docs).
pub fn q_coeff_closed(q: &QParams, x: &Word, sigma: &Permutation) -> Result<C64, QCoeffError> {
    x.validate(q.n)?;
    if sigma.size() != x.len() {
        return Err(QCoeffError::SizeMismatch(sigma.size(), x.len()));
    }
    let inv = sigma.inverse();
    let mut scalar = C64::new(1.0, 0.0);
    for i in 0..x.len() {
        for k in (i + 1)..x.len() {
            if inv.apply(i) > inv.apply(k) {
                scalar *= q.get(x.0[inv.apply(i)], x.0[inv.apply(k)]);
            }
        }
    }
    Ok(scalar)
}

/// The scalar attached to sorting `y` into nondecreasing order.
///
/// With `x = sort(y)` and any `sigma` satisfying `y_i = x_{sigma(i)}`,
/// returns `q^{sigma^{-1}}(x)`; independent of the choice of `sigma` when
/// letters repeat.
pub fn q_coeff_of_sorted(q: &QParams, y: &Word) -> Result<C64, QCoeffError> {
    y.validate(q.n)?;
    let m = y.len();
    let mut order: Vec<usize> = (0..m).collect();
    // stable sort: sigma sends position-in-x to position-in-y via y_i = x_{sigma(i)}
    order.sort_by_key(|&i| (y.0[i], i));
    // order[j] = position in y of the j-th smallest letter, i.e. x_j = y_{order[j]}
    let x = Word(order.iter().map(|&i| y.0[i]).collect());
    // sigma(order[j]) = j  =>  sigma^{-1}(j) = order[j]
    let sigma_inv = Permutation::new(order)?;
    q_coeff_closed(q, &x, &sigma_inv)
}
