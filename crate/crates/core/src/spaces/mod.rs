//! Affine subspaces of matrices: a base point plus an independent
//! translation basis.

mod block;
mod enumerate;
mod equivalence;
mod json;
mod search;

pub use block::BlockView;
pub use enumerate::{partition, Members, Samples, DEFAULT_BUDGET};
pub use equivalence::brute_equivalence_test;
pub use json::SpaceJson;
pub use search::{exhaustive_optimal_dimension, OptimalSearch, RankPredicate};

use crate::error::{Error, Result};
use crate::exactfield::Field;
use crate::linalg::{Matrix, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMatrixSpace<F: Field> {
    base: Matrix<F>,
    basis: Vec<Matrix<F>>,
    alternating: bool,
}

impl<F: Field> AffineMatrixSpace<F> {
    /// Validates shapes and linear independence of `basis`.
    pub fn new(base: Matrix<F>, basis: Vec<Matrix<F>>) -> Result<Self> {
        let shape = base.shape();
        if let Some(b) = basis.iter().find(|b| b.shape() != shape) {
            return Err(Error::shape(format!(
                "basis element {:?} does not match base {:?}",
                b.shape(),
                shape
            )));
        }
        let span = Span::new(
            base.field(),
            shape.0 * shape.1,
            basis.iter().map(|b| b.data().to_vec()),
        );
        if span.dim() != basis.len() {
            return Err(Error::DependentBasis);
        }
        let alternating = base.is_alternating() && basis.iter().all(Matrix::is_alternating);
        Ok(AffineMatrixSpace {
            base,
            basis,
            alternating,
        })
    }

    /// Like [`new`](Self::new) but additionally insists that every member is
    /// alternating.
    pub fn new_alternating(base: Matrix<F>, basis: Vec<Matrix<F>>) -> Result<Self> {
        let sp = Self::new(base, basis)?;
        if !sp.alternating {
            return Err(Error::NotAlternating);
        }
        Ok(sp)
    }

    /// Drops generators that are dependent on earlier ones.
    pub fn from_spanning(base: Matrix<F>, generators: Vec<Matrix<F>>) -> Result<Self> {
        let (r, c) = base.shape();
        let mut span = Span::empty(base.field(), r * c);
        let mut basis = Vec::new();
        for g in generators {
            if g.shape() != (r, c) {
                return Err(Error::shape("generator shape differs from base"));
            }
            if span.insert(g.data().to_vec()) {
                basis.push(g);
            }
        }
        Self::new(base, basis)
    }

    pub fn linear(field: &F, rows: usize, cols: usize, basis: Vec<Matrix<F>>) -> Result<Self> {
        Self::new(Matrix::zeros(field, rows, cols), basis)
    }

    pub fn point(base: Matrix<F>) -> Self {
        let alternating = base.is_alternating();
        AffineMatrixSpace {
            base,
            basis: Vec::new(),
            alternating,
        }
    }

    pub fn field(&self) -> &F {
        self.base.field()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.base.shape()
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn base(&self) -> &Matrix<F> {
        &self.base
    }

    pub fn basis(&self) -> &[Matrix<F>] {
        &self.basis
    }

    pub fn is_alternating(&self) -> bool {
        self.alternating
    }

    /// Whether the space passes through zero.
    pub fn is_linear(&self) -> bool {
        self.translation_span().contains(self.base.data())
    }

    /// The translation space as a span of row-major vectorizations.
    pub fn translation_span(&self) -> Span<F> {
        let (r, c) = self.shape();
        Span::new(self.field(), r * c, self.basis.iter().map(|b| b.data().to_vec()))
    }

    /// The linear space with the same translation basis.
    pub fn translation_space(&self) -> Self {
        AffineMatrixSpace {
            base: Matrix::zeros(self.field(), self.shape().0, self.shape().1),
            basis: self.basis.clone(),
            alternating: self.basis.iter().all(Matrix::is_alternating),
        }
    }

    /// `number of field elements ^ dimension`, if finite and representable.
    pub fn member_count(&self) -> Option<u64> {
        let q = self.field().size()?;
        q.checked_pow(self.dimension() as u32)
    }

    /// `base + sum coords_i basis_i`.
    pub fn member_at(&self, coords: &[F::Elem]) -> Result<Matrix<F>> {
        if coords.len() != self.dimension() {
            return Err(Error::shape(format!(
                "{} coordinates for a space of dimension {}",
                coords.len(),
                self.dimension()
            )));
        }
        let mut m = self.base.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            m.add_scaled_assign(c, b);
        }
        Ok(m)
    }

    /// Coordinates of `m` if it is a member.
    pub fn coords_of(&self, m: &Matrix<F>) -> Option<Vec<F::Elem>> {
        if m.shape() != self.shape() {
            return None;
        }
        let (r, c) = self.shape();
        let diff = m - &self.base;
        let system = Matrix::from_fn(self.field(), r * c, self.dimension(), |i, j| {
            self.basis[j].data()[i].clone()
        });
        system.solve(diff.data())
    }

    pub fn contains(&self, m: &Matrix<F>) -> bool {
        m.shape() == self.shape() && self.translation_span().contains((m - &self.base).data())
    }

    /// Set equality by exact linear algebra: equal dimension, base difference
    /// in the translation space, and each basis vector in the other's
    /// translation space.
    pub fn set_eq(&self, other: &Self) -> bool {
        if self.shape() != other.shape() || self.dimension() != other.dimension() {
            return false;
        }
        let span = other.translation_span();
        span.contains((&self.base - &other.base).data())
            && self.basis.iter().all(|b| span.contains(b.data()))
    }

    /// Same set, re-anchored at `member`.
    pub fn rebase(&self, member: Matrix<F>) -> Result<Self> {
        if !self.contains(&member) {
            return Err(Error::precondition("new base point is not a member"));
        }
        let alternating = self.alternating;
        Ok(AffineMatrixSpace {
            base: member,
            basis: self.basis.clone(),
            alternating,
        })
    }

    /// The congruence image `{P^T X P : X in self}`.
    pub fn congruence_act(&self, p: &Matrix<F>) -> Result<Self> {
        let (r, c) = self.shape();
        if r != c || p.shape() != (r, r) {
            return Err(Error::shape("congruence needs square members and a matching P"));
        }
        if !p.is_invertible() {
            return Err(Error::Singular);
        }
        let pt = p.transpose();
        let act = |x: &Matrix<F>| &(&pt * x) * p;
        Ok(AffineMatrixSpace {
            base: act(&self.base),
            basis: self.basis.iter().map(act).collect(),
            alternating: self.alternating,
        })
    }

    /// The equivalence image `{P X Q : X in self}`.
    pub fn equivalence_act(&self, p: &Matrix<F>, q: &Matrix<F>) -> Result<Self> {
        let (r, c) = self.shape();
        if p.shape() != (r, r) || q.shape() != (c, c) {
            return Err(Error::shape("equivalence needs P of size rows and Q of size cols"));
        }
        if !p.is_invertible() || !q.is_invertible() {
            return Err(Error::Singular);
        }
        let act = |x: &Matrix<F>| &(p * x) * q;
        let base = act(&self.base);
        let basis: Vec<_> = self.basis.iter().map(act).collect();
        let alternating = base.is_alternating() && basis.iter().all(Matrix::is_alternating);
        Ok(AffineMatrixSpace {
            base,
            basis,
            alternating,
        })
    }
}
