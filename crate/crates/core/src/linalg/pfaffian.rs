//! Alternating matrices and their Pfaffians.
//!
//! Sign convention: `Pf([0 1; -1 0]) = 1`. The elimination routine is the
//! production path; [`pfaffian_by_expansion`] is an independent cross-check
//! for small sizes.

use crate::error::{Error, Result};
use crate::exactfield::Field;
use crate::linalg::Matrix;

/// Square matrix with zero diagonal and `a_ij = -a_ji`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlternatingMatrix<F: Field>(Matrix<F>);

impl<F: Field> AlternatingMatrix<F> {
    pub fn new(m: Matrix<F>) -> Result<Self> {
        if !m.is_alternating() {
            return Err(Error::NotAlternating);
        }
        Ok(AlternatingMatrix(m))
    }

    pub fn zeros(field: &F, n: usize) -> Self {
        AlternatingMatrix(Matrix::zeros(field, n, n))
    }

    /// `K_{2s} = [0 I_s; -I_s 0]`.
    pub fn standard_symplectic(field: &F, s: usize) -> Self {
        let mut m = Matrix::zeros(field, 2 * s, 2 * s);
        for i in 0..s {
            m.set(i, s + i, field.one());
            m.set(s + i, i, field.neg(&field.one()));
        }
        AlternatingMatrix(m)
    }

    pub fn size(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix<F> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<F> {
        self.0
    }

    pub fn field(&self) -> &F {
        self.0.field()
    }

    /// Rank, which is always even for an alternating matrix.
    pub fn rank(&self) -> usize {
        let r = self.0.rank();
        assert!(r.is_multiple_of(2), "odd rank {r} for an alternating matrix");
        r
    }

    pub fn pfaffian(&self) -> F::Elem {
        pfaffian(self)
    }

    /// `P^T A P`, again alternating.
    pub fn congruent(&self, p: &Matrix<F>) -> Self {
        AlternatingMatrix(&(&p.transpose() * &self.0) * p)
    }

    /// Lexicographically least index set `I` with `|I| = rank` and the
    /// principal submatrix on `I` invertible.
    ///
    /// For a skew-symmetric matrix the principal submatrix on `I`, with
    /// `|I| = rank`, is invertible exactly when the rows on `I` are linearly
    /// independent, so the greedy pivot columns give the least such set. The
    /// invertibility is re-checked before returning.
    pub fn invertible_principal_submatrix(&self) -> Vec<usize> {
        let (_, pivots) = self.0.rref();
        assert!(
            self.0.principal(&pivots).is_invertible(),
            "principal submatrix on pivot set is singular"
        );
        pivots
    }
}

/// Pfaffian by skew-symmetric elimination. Returns zero for odd sizes.
///
/// Each step pivots a nonzero `a[k][j]` into position `(k, k+1)` by a
/// simultaneous row/column swap (flipping the sign), then clears rows and
/// columns `k, k+1` with unimodular congruences, which leave the Pfaffian
/// unchanged. Diagonal entries are pinned to zero so the routine stays valid
/// in characteristic 2.
pub fn pfaffian<F: Field>(a: &AlternatingMatrix<F>) -> F::Elem {
    let f = a.field();
    let n = a.size();
    if n % 2 == 1 {
        return f.zero();
    }
    let mut m = a.as_matrix().clone();
    let mut pf = f.one();
    let mut k = 0;
    while k < n {
        let Some(j) = (k + 1..n).find(|&j| !f.is_zero(m.get(k, j))) else {
            return f.zero();
        };
        if j != k + 1 {
            swap_index(&mut m, k + 1, j);
            pf = f.neg(&pf);
        }
        let pivot = m.get(k, k + 1).clone();
        pf = f.mul(&pf, &pivot);
        let inv = f.inv(&pivot).expect("nonzero pivot");
        for i in k + 2..n {
            // index i -= (m[k][i] / m[k][k+1]) * index (k+1)
            let c = f.mul(m.get(k, i), &inv);
            if !f.is_zero(&c) {
                add_index_multiple(&mut m, i, k + 1, &f.neg(&c));
            }
            // index i -= (m[k+1][i] / m[k+1][k]) * index k
            let c = f.mul(m.get(k + 1, i), &f.neg(&inv));
            if !f.is_zero(&c) {
                add_index_multiple(&mut m, i, k, &f.neg(&c));
            }
        }
        k += 2;
    }
    pf
}

/// Swaps row and column `a` with row and column `b`.
fn swap_index<F: Field>(m: &mut Matrix<F>, a: usize, b: usize) {
    let n = m.rows();
    for j in 0..n {
        let (x, y) = (m.get(a, j).clone(), m.get(b, j).clone());
        m.set(a, j, y);
        m.set(b, j, x);
    }
    for i in 0..n {
        let (x, y) = (m.get(i, a).clone(), m.get(i, b).clone());
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

/// Row `dst` += c * row `src`, then column `dst` += c * column `src`.
fn add_index_multiple<F: Field>(m: &mut Matrix<F>, dst: usize, src: usize, c: &F::Elem) {
    let f = m.field().clone();
    let n = m.rows();
    for j in 0..n {
        let v = f.add(m.get(dst, j), &f.mul(c, m.get(src, j)));
        m.set(dst, j, v);
    }
    for i in 0..n {
        let v = f.add(m.get(i, dst), &f.mul(c, m.get(i, src)));
        m.set(i, dst, v);
    }
    m.set(dst, dst, f.zero());
}

/// Pfaffian by recursive expansion along the first row:
/// `Pf(A) = sum_{j>0} (-1)^(j+1) a_0j Pf(A without rows/cols 0, j)`.
pub fn pfaffian_by_expansion<F: Field>(a: &AlternatingMatrix<F>) -> F::Elem {
    let idx: Vec<usize> = (0..a.size()).collect();
    expand(a.as_matrix(), &idx)
}

fn expand<F: Field>(m: &Matrix<F>, idx: &[usize]) -> F::Elem {
    let f = m.field();
    match idx.len() {
        0 => return f.one(),
        n if n % 2 == 1 => return f.zero(),
        _ => {}
    }
    let first = idx[0];
    let mut acc = f.zero();
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let a = m.get(first, j);
        if f.is_zero(a) {
            continue;
        }
        let rest: Vec<usize> = idx
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != 0 && p != pos)
            .map(|(_, &i)| i)
            .collect();
        let term = f.mul(a, &expand(m, &rest));
        acc = if pos % 2 == 1 { f.add(&acc, &term) } else { f.sub(&acc, &term) };
    }
    acc
}
