//! Lexicographic enumeration and seeded sampling of affine-space members.
//!
//! Coordinates are ordered lexicographically by their element indices with
//! the last coordinate least significant. Sample `i` of seed `s` is drawn
//! from ChaCha8 seeded with `s` on stream `i`, so any sample can be
//! regenerated in isolation and the stream does not depend on thread count.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::AffineMatrixSpace;
use crate::error::{Error, Result};
use crate::exactfield::Field;
use crate::linalg::Matrix;

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Splits `0..total` into at most `parts` contiguous, nearly equal ranges.
pub fn partition(total: u64, parts: usize) -> Vec<Range<u64>> {
    let parts = (parts.max(1) as u64).min(total.max(1));
    let step = total / parts;
    let extra = total % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 0;
    for k in 0..parts {
        let len = step + u64::from(k < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}

type Sparse<F> = Vec<Vec<(usize, <F as Field>::Elem)>>;

fn sparse_basis<F: Field>(space: &AffineMatrixSpace<F>) -> Sparse<F> {
    let f = space.field();
    space
        .basis()
        .iter()
        .map(|b| {
            b.data()
                .iter()
                .enumerate()
                .filter(|(_, v)| !f.is_zero(v))
                .map(|(i, v)| (i, v.clone()))
                .collect()
        })
        .collect()
}

/// Iterator over `(coordinates, member)` pairs in lexicographic order.
pub struct Members<'a, F: Field> {
    space: &'a AffineMatrixSpace<F>,
    sparse: Sparse<F>,
    elements: Vec<F::Elem>,
    digits: Vec<usize>,
    member: Matrix<F>,
    next: u64,
    end: u64,
}

impl<'a, F: Field> Members<'a, F> {
    fn new(space: &'a AffineMatrixSpace<F>, range: Range<u64>) -> Result<Self> {
        let q = space.field().size().ok_or(Error::InfiniteField)?;
        let total = space.member_count().ok_or_else(|| Error::BudgetExceeded {
            required: format!("{q}^{}", space.dimension()),
            budget: u64::MAX,
        })?;
        if range.end > total || range.start > range.end {
            return Err(Error::precondition(format!(
                "range {range:?} outside 0..{total}"
            )));
        }
        let elements = space.field().elements()?;
        let mut digits = vec![0usize; space.dimension()];
        let mut rest = range.start;
        for d in digits.iter_mut().rev() {
            *d = (rest % q) as usize;
            rest /= q;
        }
        let coords: Vec<F::Elem> = digits.iter().map(|&d| elements[d].clone()).collect();
        let member = space.member_at(&coords)?;
        Ok(Members {
            space,
            sparse: sparse_basis(space),
            elements,
            digits,
            member,
            next: range.start,
            end: range.end,
        })
    }

    fn coords(&self) -> Vec<F::Elem> {
        self.digits.iter().map(|&d| self.elements[d].clone()).collect()
    }

    /// Moves to the next member, updating only the coordinates that change.
    fn advance(&mut self) {
        let f = self.space.field().clone();
        let q = self.elements.len();
        for j in (0..self.digits.len()).rev() {
            let old = self.digits[j];
            let new = (old + 1) % q;
            self.digits[j] = new;
            let delta = f.sub(&self.elements[new], &self.elements[old]);
            let data = self.member.data_mut();
            for (idx, v) in &self.sparse[j] {
                data[*idx] = f.add(&data[*idx], &f.mul(&delta, v));
            }
            if new != 0 {
                break;
            }
        }
    }

    /// Visits the remaining members by reference, avoiding clones.
    pub fn for_each_ref(mut self, mut visit: impl FnMut(u64, &[usize], &Matrix<F>)) {
        while self.next < self.end {
            visit(self.next, &self.digits, &self.member);
            self.next += 1;
            if self.next < self.end {
                self.advance();
            }
        }
    }

    /// Converts element indices back to coordinates.
    pub fn coords_from_digits(&self, digits: &[usize]) -> Vec<F::Elem> {
        digits.iter().map(|&d| self.elements[d].clone()).collect()
    }
}

impl<F: Field> Iterator for Members<'_, F> {
    type Item = (Vec<F::Elem>, Matrix<F>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let out = (self.coords(), self.member.clone());
        self.next += 1;
        if self.next < self.end {
            self.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

/// Iterator over seeded random members.
pub struct Samples<'a, F: Field> {
    space: &'a AffineMatrixSpace<F>,
    seed: u64,
    next: u64,
    end: u64,
}

impl<F: Field> Iterator for Samples<'_, F> {
    type Item = (Vec<F::Elem>, Matrix<F>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let out = self.space.sample_member(self.seed, self.next);
        self.next += 1;
        Some(out)
    }
}

impl<F: Field> AffineMatrixSpace<F> {
    /// All members in lexicographic order; refuses when the member count
    /// exceeds `budget`.
    pub fn enumerate(&self, budget: u64) -> Result<Members<'_, F>> {
        let q = self.field().size().ok_or(Error::InfiniteField)?;
        match self.member_count() {
            Some(total) if total <= budget => Members::new(self, 0..total),
            _ => Err(Error::BudgetExceeded {
                required: format!("{q}^{}", self.dimension()),
                budget,
            }),
        }
    }

    /// Members with lexicographic index in `range`.
    pub fn enumerate_range(&self, range: Range<u64>) -> Result<Members<'_, F>> {
        Members::new(self, range)
    }

    /// Sample number `index` of the stream for `seed`.
    pub fn sample_member(&self, seed: u64, index: u64) -> (Vec<F::Elem>, Matrix<F>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let f = self.field();
        let coords: Vec<F::Elem> = (0..self.dimension()).map(|_| f.random(&mut rng)).collect();
        let m = self.member_at(&coords).expect("coordinate count matches");
        (coords, m)
    }

    /// `count` reproducible random members.
    pub fn sample(&self, count: u64, seed: u64) -> Result<Samples<'_, F>> {
        if count == 0 {
            return Err(Error::precondition("sample count must be positive"));
        }
        Ok(Samples {
            space: self,
            seed,
            next: 0,
            end: count,
        })
    }
}
