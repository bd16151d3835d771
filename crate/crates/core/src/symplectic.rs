//! Alternating-form linear algebra: radicals, symplectic bases adapted to a
//! Lagrangian, and the correspondence between affine spaces of symplectic
//! forms through `K` and linear spaces of `K`-alternating operators.

use crate::error::{Error, Result};
use crate::exactfield::Field;
use crate::linalg::{AlternatingMatrix, Matrix, Span};
use crate::spaces::AffineMatrixSpace;

/// Basis of the radical (kernel) of the form.
pub fn radical<F: Field>(a: &AlternatingMatrix<F>) -> Vec<Vec<F::Elem>> {
    a.as_matrix().kernel_basis()
}

/// Whether `x^T b y = 0` for every pair of basis vectors.
pub fn is_totally_singular<F: Field>(b: &AlternatingMatrix<F>, basis: &[Vec<F::Elem>]) -> bool {
    singular_witness(b, basis).is_none()
}

/// First pair `(i, j)` of basis indices with `x_i^T b x_j != 0`.
pub fn singular_witness<F: Field>(b: &AlternatingMatrix<F>, basis: &[Vec<F::Elem>]) -> Option<(usize, usize)> {
    let f = b.field();
    let m = b.as_matrix();
    for i in 0..basis.len() {
        let bx = m.mat_vec(&basis[i]);
        for (j, y) in basis.iter().enumerate().skip(i + 1) {
            let v = dot(f, y, &bx);
            if !f.is_zero(&v) {
                return Some((i, j));
            }
        }
    }
    None
}

pub(crate) fn dot<F: Field>(f: &F, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
    x.iter().zip(y).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
}

/// A totally singular subspace of half the ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lagrangian<F: Field> {
    basis: Vec<Vec<F::Elem>>,
}

impl<F: Field> Lagrangian<F> {
    pub fn new(k: &AlternatingMatrix<F>, basis: Vec<Vec<F::Elem>>) -> Result<Self> {
        let n = k.size();
        if !n.is_multiple_of(2) || basis.len() * 2 != n {
            return Err(Error::precondition(format!(
                "a Lagrangian of a {n}-dimensional space needs {} vectors, got {}",
                n / 2,
                basis.len()
            )));
        }
        if basis.iter().any(|v| v.len() != n) {
            return Err(Error::shape("Lagrangian vector of the wrong length"));
        }
        if Span::new(k.field(), n, basis.iter().cloned()).dim() != basis.len() {
            return Err(Error::DependentBasis);
        }
        if !is_totally_singular(k, &basis) {
            return Err(Error::precondition("subspace is not totally singular"));
        }
        Ok(Lagrangian { basis })
    }

    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Invertible `P` with `P^T K P = [0 I_s; -I_s 0]`.
///
/// With a Lagrangian `L`, its basis becomes the last `s` columns of `P`, so
/// `P^{-1} L` is spanned by the last `s` standard vectors.
pub fn symplectic_basis<F: Field>(k: &AlternatingMatrix<F>, lagrangian: Option<&Lagrangian<F>>) -> Result<Matrix<F>> {
    let n = k.size();
    if !k.as_matrix().is_invertible() {
        return Err(Error::Singular);
    }
    let f = k.field();
    let p = match lagrangian {
        None => greedy_basis(k),
        Some(l) => {
            if l.basis.len() * 2 != n || !is_totally_singular(k, &l.basis) {
                return Err(Error::precondition("not a Lagrangian of K"));
            }
            adapted_basis(k, l)?
        }
    };
    if k.congruent(&p) != AlternatingMatrix::standard_symplectic(f, n / 2) {
        return Err(Error::contract("symplectic basis fails P^T K P = J"));
    }
    Ok(p)
}

fn greedy_basis<F: Field>(k: &AlternatingMatrix<F>) -> Matrix<F> {
    let f = k.field();
    let n = k.size();
    let km = k.as_matrix();
    let form = |x: &[F::Elem], y: &[F::Elem]| km.bilinear(x, y);
    let mut pool: Vec<Vec<F::Elem>> = (0..n).map(|i| crate::linalg::standard_vector(f, n, i)).collect();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while let Some(x) = pool.first().cloned() {
        let partner = pool
            .iter()
            .position(|w| !f.is_zero(&form(&x, w)))
            .expect("nondegenerate form has a partner");
        let c = f.inv(&form(&x, &pool[partner])).expect("nonzero");
        let y: Vec<F::Elem> = pool[partner].iter().map(|v| f.mul(v, &c)).collect();
        let rest: Vec<Vec<F::Elem>> = pool
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != 0 && i != partner)
            .map(|(_, w)| {
                // w - K(w,y) x + K(w,x) y
                let (wy, wx) = (form(w, &y), form(w, &x));
                w.iter()
                    .zip(x.iter().zip(&y))
                    .map(|(wi, (xi, yi))| f.add(&f.sub(wi, &f.mul(&wy, xi)), &f.mul(&wx, yi)))
                    .collect()
            })
            .collect();
        es.push(x);
        fs.push(y);
        pool = rest;
    }
    es.extend(fs);
    Matrix::from_columns(f, n, &es).expect("square")
}

fn adapted_basis<F: Field>(k: &AlternatingMatrix<F>, l: &Lagrangian<F>) -> Result<Matrix<F>> {
    let f = k.field();
    let n = k.size();
    let s = n / 2;
    let fm = Matrix::from_columns(f, n, &l.basis)?;
    // E with F^T K E = -I
    let ftk = &fm.transpose() * k.as_matrix();
    let mut e_cols = Vec::with_capacity(s);
    for j in 0..s {
        let mut rhs = vec![f.zero(); s];
        rhs[j] = f.neg(&f.one());
        e_cols.push(ftk.solve(&rhs).ok_or(Error::Singular)?);
    }
    let e = Matrix::from_columns(f, n, &e_cols)?;
    // make E totally singular: E += F X with X = -(strict upper part of E^T K E)
    let gram = &(&e.transpose() * k.as_matrix()) * &e;
    let x = Matrix::from_fn(f, s, s, |i, j| if i < j { f.neg(gram.get(i, j)) } else { f.zero() });
    let e = &e + &(&fm * &x);
    let mut cols = e.columns();
    cols.extend(l.basis.iter().cloned());
    Matrix::from_columns(f, n, &cols)
}

/// An invertible Gram matrix `K` and a linear space of operators `M`, each
/// `K`-alternating (`K M` alternating).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSpacePair<F: Field> {
    gram: AlternatingMatrix<F>,
    operators: AffineMatrixSpace<F>,
}

impl<F: Field> FormSpacePair<F> {
    pub fn new(gram: AlternatingMatrix<F>, operators: AffineMatrixSpace<F>) -> Result<Self> {
        let n = gram.size();
        if !gram.as_matrix().is_invertible() {
            return Err(Error::Singular);
        }
        if operators.shape() != (n, n) {
            return Err(Error::shape("operators do not match the Gram matrix"));
        }
        if !operators.base().is_zero() {
            return Err(Error::precondition("operator space must be linear with zero base"));
        }
        if let Some(i) = operators
            .basis()
            .iter()
            .position(|m| !(gram.as_matrix() * m).is_alternating())
        {
            return Err(Error::contract(format!("operator {i} is not K-alternating")));
        }
        Ok(FormSpacePair { gram, operators })
    }

    pub fn gram(&self) -> &AlternatingMatrix<F> {
        &self.gram
    }

    pub fn operators(&self) -> &AffineMatrixSpace<F> {
        &self.operators
    }

    pub fn dimension(&self) -> usize {
        self.operators.dimension()
    }
}

/// `{K^{-1} G : G in the translation space}` for an affine space of forms
/// through the invertible `K`.
pub fn phi_forms_to_operators<F: Field>(
    k: &AlternatingMatrix<F>,
    space: &AffineMatrixSpace<F>,
) -> Result<FormSpacePair<F>> {
    if !space.contains(k.as_matrix()) {
        return Err(Error::precondition("K is not a member of the space"));
    }
    let kinv = k.as_matrix().inverse()?;
    let n = k.size();
    let ops = space.basis().iter().map(|g| &kinv * g).collect();
    FormSpacePair::new(k.clone(), AffineMatrixSpace::linear(k.field(), n, n, ops)?)
}

/// The affine space `K + {K U : U in the operator space}`.
pub fn operators_to_forms<F: Field>(pair: &FormSpacePair<F>) -> Result<AffineMatrixSpace<F>> {
    let k = pair.gram.as_matrix();
    AffineMatrixSpace::new_alternating(k.clone(), pair.operators.basis().iter().map(|u| k * u).collect())
}

/// `(every K + lambda G invertible, K^{-1} G has no nonzero eigenvalue)`.
pub fn pencil_symplectic_iff_trivial_spectrum<F: Field>(
    k: &AlternatingMatrix<F>,
    g: &AlternatingMatrix<F>,
) -> Result<(bool, bool)> {
    let f = k.field();
    let elements = f.elements()?;
    if k.size() != g.size() {
        return Err(Error::shape("K and G differ in size"));
    }
    let kinv = k.as_matrix().inverse()?;
    let pencil = elements.iter().all(|lambda| {
        let mut m = k.as_matrix().clone();
        m.add_scaled_assign(lambda, g.as_matrix());
        m.is_invertible()
    });
    let u = &kinv * g.as_matrix();
    let trivial = crate::linalg::nonzero_eigenvalues(&u)?.is_empty();
    Ok((pencil, trivial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{Fp, Rationals};
    use crate::linalg::{alternating_unit, standard_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_alternating(f: &Fp, n: usize, rng: &mut ChaCha8Rng) -> AlternatingMatrix<Fp> {
        let mut m = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = f.random(rng);
                m.set(i, j, v);
                m.set(j, i, f.neg(&v));
            }
        }
        AlternatingMatrix::new(m).unwrap()
    }

    fn random_symplectic(f: &Fp, n: usize, rng: &mut ChaCha8Rng) -> AlternatingMatrix<Fp> {
        loop {
            let k = random_alternating(f, n, rng);
            if k.as_matrix().is_invertible() {
                return k;
            }
        }
    }

    #[test]
    fn radical_examples() {
        let f = Fp::new(5).unwrap();
        assert!(radical(&AlternatingMatrix::standard_symplectic(&f, 2)).is_empty());
        let k = AlternatingMatrix::new(alternating_unit(&f, 5, 0, 1)).unwrap();
        let rad = Span::new(&f, 5, radical(&k));
        assert_eq!(rad.dim(), 3);
        for i in 2..5 {
            assert!(rad.contains(&standard_vector(&f, 5, i)));
        }
    }

    #[test]
    fn total_singularity() {
        let f = Fp::new(7).unwrap();
        let k = AlternatingMatrix::standard_symplectic(&f, 2);
        let e = |i| standard_vector(&f, 4, i);
        assert!(is_totally_singular(&k, &[e(0)]));
        assert!(is_totally_singular(&k, &[e(2), e(3)]));
        assert!(!is_totally_singular(&k, &[e(0), e(2)]));
    }

    #[test]
    fn scaled_form_basis() {
        let f = Fp::new(5).unwrap();
        let k = AlternatingMatrix::new(Matrix::from_ints(&f, &[&[0, 2], &[-2, 0]])).unwrap();
        let p = symplectic_basis(&k, None).unwrap();
        assert_eq!(k.congruent(&p), AlternatingMatrix::standard_symplectic(&f, 1));
        let diag = Matrix::from_ints(&f, &[&[1, 0], &[0, 3]]);
        assert_eq!(k.congruent(&diag), AlternatingMatrix::standard_symplectic(&f, 1));
    }

    #[test]
    fn adapted_to_lagrangian() {
        let f = Fp::new(7).unwrap();
        let k = AlternatingMatrix::standard_symplectic(&f, 2);
        let l = Lagrangian::new(&k, vec![standard_vector(&f, 4, 2), standard_vector(&f, 4, 3)]).unwrap();
        let p = symplectic_basis(&k, Some(&l)).unwrap();
        let cols = p.columns();
        let lspan = Span::new(&f, 4, l.basis().iter().cloned());
        assert!(cols[2..].iter().all(|c| lspan.contains(c)));
        assert!(Lagrangian::new(&k, vec![standard_vector(&f, 4, 0), standard_vector(&f, 4, 2)]).is_err());
    }

    #[test]
    fn random_forms_and_lagrangians() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(p, n) in &[(3u64, 2usize), (5, 4), (7, 6), (11, 8)] {
            let f = Fp::new(p).unwrap();
            for _ in 0..20 {
                let k = random_symplectic(&f, n, &mut rng);
                let p0 = symplectic_basis(&k, None).unwrap();
                // Pf(P^T K P) of the standard matrix is (-1)^{s(s-1)/2}
                let s = n / 2;
                let sign = if (s * (s.saturating_sub(1)) / 2) % 2 == 0 { f.one() } else { f.neg(&f.one()) };
                assert_eq!(k.congruent(&p0).pfaffian(), sign);
                // the last s columns of p0 span a Lagrangian; move it randomly
                let mix = loop {
                    let m = Matrix::from_fn(&f, s, s, |_, _| f.random(&mut rng));
                    if m.is_invertible() {
                        break m;
                    }
                };
                let lcols = &p0.block(0, s, n, s) * &mix;
                let l = Lagrangian::new(&k, lcols.columns()).unwrap();
                let p1 = symplectic_basis(&k, Some(&l)).unwrap();
                let lspan = Span::new(&f, n, lcols.columns());
                assert!(p1.columns()[s..].iter().all(|c| lspan.contains(c)));
            }
        }
    }

    #[test]
    fn singular_form_rejected() {
        let f = Fp::new(5).unwrap();
        assert!(matches!(symplectic_basis(&AlternatingMatrix::zeros(&f, 2), None), Err(Error::Singular)));
    }

    #[test]
    fn phi_examples() {
        let q = Rationals;
        let k = AlternatingMatrix::standard_symplectic(&q, 1);
        let point = AffineMatrixSpace::point(k.as_matrix().clone());
        assert_eq!(phi_forms_to_operators(&k, &point).unwrap().dimension(), 0);
        let c = q.from_i64(3);
        let g = Matrix::from_vec(&q, 2, 2, vec![q.zero(), c.clone(), q.neg(&c), q.zero()]).unwrap();
        let sp = AffineMatrixSpace::new(k.as_matrix().clone(), vec![g]).unwrap();
        let pair = phi_forms_to_operators(&k, &sp).unwrap();
        assert_eq!(pair.operators().basis()[0], Matrix::identity(&q, 2).scale(&c));
        assert!(operators_to_forms(&pair).unwrap().set_eq(&sp));
        let outside = AffineMatrixSpace::point(Matrix::zeros(&q, 2, 2));
        assert!(phi_forms_to_operators(&k, &outside).is_err());
    }

    #[test]
    fn phi_round_trip_on_random_spaces() {
        let f = Fp::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let k = random_symplectic(&f, 4, &mut rng);
            let gens: Vec<_> = (0..3).map(|_| random_alternating(&f, 4, &mut rng).into_matrix()).collect();
            let sp = AffineMatrixSpace::from_spanning(k.as_matrix().clone(), gens).unwrap();
            let pair = phi_forms_to_operators(&k, &sp).unwrap();
            assert!(operators_to_forms(&pair).unwrap().set_eq(&sp));
        }
    }

    #[test]
    fn pencil_examples() {
        let f = Fp::new(5).unwrap();
        let k = AlternatingMatrix::standard_symplectic(&f, 1);
        assert_eq!(
            pencil_symplectic_iff_trivial_spectrum(&k, &AlternatingMatrix::zeros(&f, 2)).unwrap(),
            (true, true)
        );
        assert_eq!(pencil_symplectic_iff_trivial_spectrum(&k, &k).unwrap(), (false, false));
    }

    #[test]
    fn pencil_agrees_with_spectrum() {
        let f = Fp::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [0usize; 2];
        for n in [4, 6] {
            for _ in 0..100 {
                let k = random_symplectic(&f, n, &mut rng);
                let g = random_alternating(&f, n, &mut rng);
                let (a, b) = pencil_symplectic_iff_trivial_spectrum(&k, &g).unwrap();
                assert_eq!(a, b);
                seen[a as usize] += 1;
            }
        }
        assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
    }
}
