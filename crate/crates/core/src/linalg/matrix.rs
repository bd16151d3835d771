use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::exactfield::Field;

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![field.zero(); rows * cols],
            field: field.clone(),
            rows,
            cols,
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_fn(field: &F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn from_vec(field: &F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: &F, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::shape("ragged rows"));
        }
        let n = rows.len();
        Self::from_vec(field, n, cols, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix from integer rows, reducing into the field.
    ///
    /// Panics on ragged input; meant for literals.
    pub fn from_ints(field: &F, rows: &[&[i64]]) -> Self {
        let data = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(field, data).expect("rectangular literal")
    }

    /// The matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(field: &F, rows: usize, columns: &[Vec<F::Elem>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::shape("column length mismatch"));
        }
        Ok(Self::from_fn(field, rows, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    /// Row-major entries; this is also the vectorization used for spans of
    /// matrices.
    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [F::Elem] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<F::Elem> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F::Elem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    /// Zero diagonal and `a_ij = -a_ji`; correct in every characteristic.
    pub fn is_alternating(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let f = &self.field;
        (0..self.rows).all(|i| {
            f.is_zero(self.get(i, i))
                && (i + 1..self.cols).all(|j| f.is_zero(&f.add(self.get(i, j), self.get(j, i))))
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        Matrix {
            data: self.data.iter().map(|x| f.mul(c, x)).collect(),
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    /// `self += c * other`.
    pub fn add_scaled_assign(&mut self, c: &F::Elem, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in add_scaled_assign");
        if self.field.is_zero(c) {
            return;
        }
        let f = self.field.clone();
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            if !f.is_zero(y) {
                *x = f.add(x, &f.mul(c, y));
            }
        }
    }

    pub fn mat_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect()
    }

    /// The bilinear value `x^T self y`.
    pub fn bilinear(&self, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
        let f = &self.field;
        let my = self.mat_vec(y);
        x.iter().zip(&my).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Self::from_fn(&self.field, nr, nc, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, m: &Self) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols, "block out of range");
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.set(r0 + i, c0 + j, m.get(i, j).clone());
            }
        }
    }

    /// Principal submatrix on the given (sorted, distinct) indices.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(&self.field, idx.len(), idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut m = Self::zeros(&self.field, self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = echelonize(&self.field, &mut m.data, self.rows, self.cols, true);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut buf = self.data.clone();
        rank_in_place(&self.field, &mut buf, self.rows, self.cols)
    }

    /// Basis of `{x : self x = 0}`, one vector per free column in index
    /// order, read off the reduced echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = vec![f.zero(); self.cols];
                x[free] = f.one();
                for (row, &p) in pivots.iter().enumerate() {
                    x[p] = f.neg(r.get(row, free));
                }
                x
            })
            .collect()
    }

    /// A solution of `self x = b` with all free variables zero, if any.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let f = &self.field;
        let aug = Self::from_fn(f, self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::shape("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let f = &self.field;
        let aug = Self::from_fn(f, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                f.one()
            } else {
                f.zero()
            }
        });
        let (r, pivots) = aug.rref();
        if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
            return Err(Error::Singular);
        }
        Ok(r.block(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn det(&self) -> F::Elem {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let f = &self.field;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !f.is_zero(&a[i * n + c])) else {
                return f.zero();
            };
            if p != c {
                swap_rows(&mut a, n, p, c);
                det = f.neg(&det);
            }
            let pivot = a[c * n + c].clone();
            det = f.mul(&det, &pivot);
            let inv = f.inv(&pivot).expect("nonzero pivot");
            for i in c + 1..n {
                let factor = f.mul(&a[i * n + c], &inv);
                if f.is_zero(&factor) {
                    continue;
                }
                for j in c..n {
                    let t = f.mul(&factor, &a[c * n + j]);
                    a[i * n + j] = f.sub(&a[i * n + j], &t);
                }
            }
        }
        det
    }
}

fn swap_rows<T>(a: &mut [T], cols: usize, r1: usize, r2: usize) {
    if r1 == r2 {
        return;
    }
    let (lo, hi) = (r1.min(r2), r1.max(r2));
    let (head, tail) = a.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}

/// Gaussian elimination in place with first-nonzero pivoting. Returns the
/// pivot columns. With `reduced`, entries above each pivot are cleared too.
pub(crate) fn echelonize<F: Field>(
    field: &F,
    a: &mut [F::Elem],
    rows: usize,
    cols: usize,
    reduced: bool,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !field.is_zero(&a[i * cols + c])) else {
            continue;
        };
        swap_rows(a, cols, p, r);
        let inv = field.inv(&a[r * cols + c]).expect("nonzero pivot");
        for j in c..cols {
            a[r * cols + j] = field.mul(&a[r * cols + j], &inv);
        }
        let start = if reduced { 0 } else { r + 1 };
        for i in start..rows {
            if i == r {
                continue;
            }
            let factor = a[i * cols + c].clone();
            if field.is_zero(&factor) {
                continue;
            }
            for j in c..cols {
                let t = field.mul(&factor, &a[r * cols + j]);
                a[i * cols + j] = field.sub(&a[i * cols + j], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a row-major buffer, destroying it.
pub fn rank_in_place<F: Field>(field: &F, a: &mut [F::Elem], rows: usize, cols: usize) -> usize {
    echelonize(field, a, rows, cols, false).len()
}

impl<F: Field> Add for &Matrix<F> {
    type Output = Matrix<F>;

    fn add(self, rhs: Self) -> Matrix<F> {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        let f = &self.field;
        Matrix {
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f.add(a, b)).collect(),
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
        }
    }
}

impl<F: Field> Sub for &Matrix<F> {
    type Output = Matrix<F>;

    fn sub(self, rhs: Self) -> Matrix<F> {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        let f = &self.field;
        Matrix {
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f.sub(a, b)).collect(),
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
        }
    }
}

impl<F: Field> Neg for &Matrix<F> {
    type Output = Matrix<F>;

    fn neg(self) -> Matrix<F> {
        let f = &self.field;
        Matrix {
            data: self.data.iter().map(|a| f.neg(a)).collect(),
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
        }
    }
}

impl<F: Field> Mul for &Matrix<F> {
    type Output = Matrix<F>;

    fn mul(self, rhs: Self) -> Matrix<F> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !f.is_zero(b) {
                        let idx = i * rhs.cols + j;
                        out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                    }
                }
            }
        }
        out
    }
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| self.field.format(x)).collect();
            writeln!(out, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// `E_ij - E_ji` in `A_n`.
pub fn alternating_unit<F: Field>(field: &F, n: usize, i: usize, j: usize) -> Matrix<F> {
    let mut m = Matrix::zeros(field, n, n);
    m.set(i, j, field.one());
    m.set(j, i, field.neg(&field.one()));
    m
}

/// The matrix unit `E_ij` of shape `rows x cols`.
pub fn unit<F: Field>(field: &F, rows: usize, cols: usize, i: usize, j: usize) -> Matrix<F> {
    let mut m = Matrix::zeros(field, rows, cols);
    m.set(i, j, field.one());
    m
}

pub fn standard_vector<F: Field>(field: &F, n: usize, i: usize) -> Vec<F::Elem> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}
