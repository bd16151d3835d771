use crate::exactfield::Field;

/// A linear subspace of `F^len`, kept as a reduced echelon basis.
///
/// Insertion order does not affect the stored basis, so two spans are equal
/// exactly when their bases are.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span<F: Field> {
    field: F,
    len: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Field> Span<F> {
    pub fn empty(field: &F, len: usize) -> Self {
        Span {
            field: field.clone(),
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn new<I>(field: &F, len: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<F::Elem>>,
    {
        let mut s = Self::empty(field, len);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after elimination against the basis; zero iff
    /// `v` lies in the span.
    pub fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let f = &self.field;
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row).skip(p) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.reduce(v).iter().all(|x| self.field.is_zero(x))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<F::Elem>) -> bool {
        let f = self.field.clone();
        let mut v = self.reduce(&v);
        let Some(p) = v.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&v[p]).expect("nonzero leading entry");
        for x in v.iter_mut().skip(p) {
            *x = f.mul(x, &inv);
        }
        for row in &mut self.rows {
            let c = row[p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&v).skip(p) {
                *x = f.sub(x, &f.mul(&c, y));
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    pub fn contains_span(&self, other: &Self) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    /// Basis of the intersection with `other` (Zassenhaus-free variant: solve
    /// `sum a_i u_i = sum b_j w_j` and map the `a` part).
    pub fn intersection(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "ambient mismatch");
        let f = &self.field;
        let (d1, d2) = (self.dim(), other.dim());
        let m = crate::linalg::Matrix::from_fn(f, self.len, d1 + d2, |i, j| {
            if j < d1 {
                self.rows[j][i].clone()
            } else {
                other.rows[j - d1][i].clone()
            }
        });
        let vectors = m.kernel_basis().into_iter().map(|k| {
            let mut v = vec![f.zero(); self.len];
            for (a, row) in k.iter().take(d1).zip(&self.rows) {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = f.add(x, &f.mul(a, y));
                }
            }
            v
        });
        Span::new(f, self.len, vectors)
    }
}
