use crate::error::{Error, Result};
use crate::exactfield::Field;
use crate::linalg::Matrix;

/// Splits an `n x n` alternating matrix as `[A B; -B^T D]` with `A` of size
/// `r x r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockView {
    n: usize,
    r: usize,
}

impl BlockView {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if r > n {
            return Err(Error::shape(format!("leading block {r} larger than {n}")));
        }
        Ok(BlockView { n, r })
    }

    pub fn a<F: Field>(&self, m: &Matrix<F>) -> Matrix<F> {
        m.block(0, 0, self.r, self.r)
    }

    pub fn b<F: Field>(&self, m: &Matrix<F>) -> Matrix<F> {
        m.block(0, self.r, self.r, self.n - self.r)
    }

    pub fn d<F: Field>(&self, m: &Matrix<F>) -> Matrix<F> {
        m.block(self.r, self.r, self.n - self.r, self.n - self.r)
    }

    pub fn assemble<F: Field>(&self, a: &Matrix<F>, b: &Matrix<F>, d: &Matrix<F>) -> Matrix<F> {
        let mut m = Matrix::zeros(a.field(), self.n, self.n);
        m.set_block(0, 0, a);
        m.set_block(0, self.r, b);
        m.set_block(self.r, 0, &-&b.transpose());
        m.set_block(self.r, self.r, d);
        m
    }
}
