use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactfield::{Field, Rationals};
use crate::linalg::Matrix;

/// Largest |coefficient| for which the rational-root scan enumerates
/// divisors.
const RATIONAL_ROOT_COEFF_LIMIT: u64 = 1_000_000_000_000;

/// Eigenvalues of `m` lying in its field.
///
/// Finite fields: every `lambda` is tested with an exact determinant of
/// `m - lambda I`. Rationals: only the candidates of the rational-root test
/// on the characteristic polynomial are examined, which is complete for
/// rational eigenvalues but refuses polynomials with huge coefficients.
pub fn eigenvalues_in_field<F: Field>(m: &Matrix<F>) -> Result<Vec<F::Elem>> {
    if !m.is_square() {
        return Err(Error::shape("eigenvalues of a non-square matrix"));
    }
    let f = m.field();
    match f.size() {
        Some(q) => Ok((0..q)
            .map(|i| f.element(i))
            .filter(|lambda| !shifted(m, lambda).is_invertible())
            .collect()),
        None => {
            let as_q = Matrix::from_vec(
                &Rationals,
                m.rows(),
                m.cols(),
                m.data()
                    .iter()
                    .map(|x| f.to_rational(x).expect("characteristic zero"))
                    .collect(),
            )?;
            rational_eigenvalues(&as_q)?
                .iter()
                .map(|q| f.from_rational(q))
                .collect()
        }
    }
}

/// Nonzero eigenvalues only; empty means trivial spectrum.
pub fn nonzero_eigenvalues<F: Field>(m: &Matrix<F>) -> Result<Vec<F::Elem>> {
    let f = m.field().clone();
    Ok(eigenvalues_in_field(m)?
        .into_iter()
        .filter(|x| !f.is_zero(x))
        .collect())
}

fn shifted<F: Field>(m: &Matrix<F>, lambda: &F::Elem) -> Matrix<F> {
    let f = m.field();
    let mut s = m.clone();
    for i in 0..m.rows() {
        s.set(i, i, f.sub(m.get(i, i), lambda));
    }
    s
}

/// Characteristic polynomial `det(xI - A)` by Faddeev-LeVerrier; coefficients
/// from the constant term up, monic.
pub fn charpoly_rational(a: &Matrix<Rationals>) -> Vec<BigRational> {
    let q = Rationals;
    let n = a.rows();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = Matrix::zeros(&q, n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a * &mk;
        for i in 0..n {
            let v = q.add(next.get(i, i), &coeffs[n - k + 1]);
            next.set(i, i, v);
        }
        let am = a * &next;
        let trace = (0..n).fold(BigRational::zero(), |acc, i| acc + am.get(i, i));
        coeffs[n - k] = -trace / BigRational::from_integer(BigInt::from(k));
        mk = next;
    }
    coeffs
}

fn rational_eigenvalues(a: &Matrix<Rationals>) -> Result<Vec<BigRational>> {
    let poly = charpoly_rational(a);
    // clear denominators
    let lcm = poly
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = poly
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut roots = Vec::new();
    if ints[0].is_zero() {
        roots.push(BigRational::zero());
        while ints.first().is_some_and(|c| c.is_zero()) {
            ints.remove(0);
        }
    }
    if ints.len() <= 1 {
        return Ok(roots);
    }
    let constant = ints[0].abs();
    let leading = ints[ints.len() - 1].abs();
    let limit = BigInt::from(RATIONAL_ROOT_COEFF_LIMIT);
    if constant > limit || leading > limit {
        return Err(Error::Unsupported(
            "rational-root scan with coefficients beyond 10^12".into(),
        ));
    }
    let nums = divisors(constant.to_u64().expect("bounded"));
    let dens = divisors(leading.to_u64().expect("bounded"));
    let mut candidates: Vec<BigRational> = Vec::new();
    for &p in &nums {
        for &d in &dens {
            for sign in [1i64, -1] {
                let c = BigRational::new(BigInt::from(p) * sign, BigInt::from(d));
                if !candidates.contains(&c) {
                    candidates.push(c);
                }
            }
        }
    }
    candidates.sort();
    for c in candidates {
        let value = ints
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, k| acc * &c + BigRational::from_integer(k.clone()));
        if value.is_zero() {
            roots.push(c);
        }
    }
    roots.sort();
    Ok(roots)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::Fp;

    #[test]
    fn nilpotent_has_only_zero() {
        let f = Fp::new(5).unwrap();
        let m = Matrix::from_ints(&f, &[&[0, 1, 2], &[0, 0, 3], &[0, 0, 0]]);
        assert_eq!(eigenvalues_in_field(&m).unwrap(), vec![0]);
    }

    #[test]
    fn rotation_depends_on_field() {
        // oracle: lambda^2 + 1 = 0 scanned by hand
        let lam2_plus_1 = |p: u32| -> Vec<u32> { (0..p).filter(|l| (l * l + 1) % p == 0).collect() };
        for p in [3u32, 5, 7, 13] {
            let f = Fp::new(p as u64).unwrap();
            let m = Matrix::from_ints(&f, &[&[0, 1], &[-1, 0]]);
            assert_eq!(eigenvalues_in_field(&m).unwrap(), lam2_plus_1(p), "p = {p}");
        }
        let f3 = Fp::new(3).unwrap();
        assert!(eigenvalues_in_field(&Matrix::from_ints(&f3, &[&[0, 1], &[-1, 0]]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn rational_scan() {
        let q = Rationals;
        let m = Matrix::from_ints(&q, &[&[2, 0, 0], &[1, -3, 0], &[5, 7, 0]]);
        let ev: Vec<String> = eigenvalues_in_field(&m).unwrap().iter().map(|x| q.format(x)).collect();
        assert_eq!(ev, ["-3", "0", "2"]);
        let half = Matrix::from_vec(&q, 1, 1, vec![q.parse("1/2").unwrap()]).unwrap();
        assert_eq!(eigenvalues_in_field(&half).unwrap(), vec![q.parse("1/2").unwrap()]);
        let rot = Matrix::from_ints(&q, &[&[0, 1], &[-1, 0]]);
        assert!(eigenvalues_in_field(&rot).unwrap().is_empty());
    }

    #[test]
    fn charpoly_of_companion() {
        // companion of x^2 - 3x + 2
        let q = Rationals;
        let m = Matrix::from_ints(&q, &[&[0, -2], &[1, 3]]);
        let c: Vec<String> = charpoly_rational(&m).iter().map(|x| q.format(x)).collect();
        assert_eq!(c, ["2", "-3", "1"]);
    }
}
