use super::AffineMatrixSpace;
use crate::error::{Error, Result};
use crate::exactfield::Field;
use crate::linalg::Matrix;

/// Largest matrix size accepted by [`brute_equivalence_test`].
const MAX_SIZE: usize = 2;
/// Largest field accepted by [`brute_equivalence_test`].
const MAX_FIELD: u64 = 7;

/// Searches `GL_s x GL_s` for `(P, Q)` with `P X Q = Y` as sets.
///
/// Only for `s <= 2` over fields with at most 7 elements. Candidates are
/// tried with the identity first, then in lexicographic order of entries.
pub fn brute_equivalence_test<F: Field>(
    x: &AffineMatrixSpace<F>,
    y: &AffineMatrixSpace<F>,
) -> Result<Option<(Matrix<F>, Matrix<F>)>> {
    let q = x.field().size().ok_or(Error::InfiniteField)?;
    let (s, c) = x.shape();
    if s != c || s > MAX_SIZE || q > MAX_FIELD {
        return Err(Error::Unsupported(format!(
            "brute force equivalence needs s <= {MAX_SIZE} and |F| <= {MAX_FIELD}"
        )));
    }
    if y.shape() != (s, s) {
        return Err(Error::shape("spaces of different shapes"));
    }
    if x.dimension() != y.dimension() {
        return Ok(None);
    }
    let f = x.field();
    let target = y.translation_span();
    let group = general_linear(f, s)?;
    for p in &group {
        let px0 = p * x.base();
        let pbasis: Vec<Matrix<F>> = x.basis().iter().map(|b| p * b).collect();
        for qm in &group {
            let offset = &(&px0 * qm) - y.base();
            if !target.contains(offset.data()) {
                continue;
            }
            if pbasis.iter().all(|pb| target.contains((pb * qm).data())) {
                return Ok(Some((p.clone(), qm.clone())));
            }
        }
    }
    Ok(None)
}

/// Invertible `s x s` matrices, identity first.
fn general_linear<F: Field>(f: &F, s: usize) -> Result<Vec<Matrix<F>>> {
    let elements = f.elements()?;
    let q = elements.len();
    let cells = s * s;
    let id = Matrix::identity(f, s);
    let mut out = vec![id.clone()];
    let total = q.pow(cells as u32);
    for mut idx in 0..total {
        let mut data = vec![f.zero(); cells];
        for cell in data.iter_mut().rev() {
            *cell = elements[idx % q].clone();
            idx /= q;
        }
        let m = Matrix::from_vec(f, s, s, data)?;
        if m != id && m.is_invertible() {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{Fp, Rationals};
    use crate::linalg::unit;

    fn inner(f: &Fp) -> AffineMatrixSpace<Fp> {
        AffineMatrixSpace::new(Matrix::identity(f, 2), vec![unit(f, 2, 2, 0, 1)]).unwrap()
    }

    #[test]
    fn group_orders() {
        // |GL_2(F_q)| = (q^2 - 1)(q^2 - q)
        for q in [2u64, 3, 5] {
            let f = Fp::new(q).unwrap();
            assert_eq!(general_linear(&f, 2).unwrap().len() as u64, (q * q - 1) * (q * q - q));
            assert_eq!(general_linear(&f, 1).unwrap().len() as u64, q - 1);
        }
    }

    #[test]
    fn identity_found_for_equal_spaces() {
        let f = Fp::new(3).unwrap();
        let sp = inner(&f);
        let (p, q) = brute_equivalence_test(&sp, &sp).unwrap().unwrap();
        assert_eq!(p, Matrix::identity(&f, 2));
        assert_eq!(q, Matrix::identity(&f, 2));
    }

    #[test]
    fn finds_planted_equivalence() {
        let f = Fp::new(5).unwrap();
        let sp = inner(&f);
        let p = Matrix::from_ints(&f, &[&[1, 2], &[2, 1]]);
        let q = Matrix::from_ints(&f, &[&[0, 1], &[1, 4]]);
        let img = sp.equivalence_act(&p, &q).unwrap();
        let (p2, q2) = brute_equivalence_test(&sp, &img).unwrap().unwrap();
        assert!(sp.equivalence_act(&p2, &q2).unwrap().set_eq(&img));
    }

    #[test]
    fn rejects_inequivalent_and_unsupported() {
        let f = Fp::new(3).unwrap();
        let sp = inner(&f);
        // the diagonal space contains singular members, the inner space does not
        let diag = AffineMatrixSpace::new(Matrix::identity(&f, 2), vec![unit(&f, 2, 2, 0, 0)]).unwrap();
        assert!(brute_equivalence_test(&sp, &diag).unwrap().is_none());
        let big = Fp::new(11).unwrap();
        let b = inner(&big);
        assert!(matches!(brute_equivalence_test(&b, &b), Err(Error::Unsupported(_))));
        let q = Rationals;
        let r = AffineMatrixSpace::point(Matrix::identity(&q, 2));
        assert!(matches!(brute_equivalence_test(&r, &r), Err(Error::InfiniteField)));
    }
}
