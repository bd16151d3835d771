//! Exact scalar arithmetic over prime fields `F_p` and the rationals.
//!
//! Every algorithm in the crate is generic over [`Field`]; the two concrete
//! fields are [`Fp`] (residues stored as `u32`, products in `u64`) and
//! [`Rationals`] (reduced `BigRational`s). [`FieldCtx`] is the runtime handle
//! used at the I/O boundary, with the text encoding `Fp:<p>` / `Q`.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Exclusive upper bound on the characteristic of a prime field.
pub const MAX_PRIME: u64 = 1 << 31;

/// Rational coordinates are drawn uniformly from `[-B, B]` when sampling.
pub const RATIONAL_SAMPLE_BOUND: i64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cardinality {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(q) => write!(f, "{q}"),
            Cardinality::Infinite => f.write_str("infinite"),
        }
    }
}

/// A commutative field with exact, canonical element representations.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync;

    fn ctx(&self) -> FieldCtx;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `DivisionByZero` on zero.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Number of elements, `None` for an infinite field.
    fn size(&self) -> Option<u64>;
    /// The `index`-th element in the canonical enumeration order of a finite
    /// field (`0, 1, ..., p-1` for `F_p`). For the rationals this walks the
    /// integers `0, 1, -1, 2, -2, ...`.
    fn element(&self, index: u64) -> Self::Elem;
    /// Uniform over a finite field; uniform integers in the sampling box
    /// for the rationals.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem>;
    /// Exact rational value, only available in characteristic zero.
    fn to_rational(&self, a: &Self::Elem) -> Option<BigRational>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn cardinality(&self) -> Cardinality {
        match self.size() {
            Some(q) => Cardinality::Finite(q),
            None => Cardinality::Infinite,
        }
    }

    /// `|F| >= m`; always true for infinite fields.
    fn cardinality_at_least(&self, m: u64) -> bool {
        self.size().is_none_or(|q| q >= m)
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// All elements of a finite field in enumeration order.
    fn elements(&self) -> Result<Vec<Self::Elem>> {
        let q = self.size().ok_or(Error::InfiniteField)?;
        Ok((0..q).map(|i| self.element(i)).collect())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The prime field `Z/pZ`, `2 <= p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Fp { p: p as u32 })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    fn reduce_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    fn reduce_bigint(&self, v: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        v.mod_floor(&p).to_u32().expect("residue fits in u32")
    }
}

impl Field for Fp {
    type Elem = u32;

    fn ctx(&self) -> FieldCtx {
        FieldCtx::Prime(*self)
    }

    #[inline]
    fn zero(&self) -> u32 {
        0
    }

    #[inline]
    fn one(&self) -> u32 {
        1
    }

    fn from_i64(&self, v: i64) -> u32 {
        self.reduce_i64(v)
    }

    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (*a as u64 + self.p as u64 - *b as u64) as u32
        }
    }

    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }

    fn inv(&self, a: &u32) -> Result<u32> {
        if *a == 0 {
            return Err(Error::DivisionByZero);
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, *a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_i64(t0))
    }

    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn size(&self) -> Option<u64> {
        Some(self.p as u64)
    }

    fn element(&self, index: u64) -> u32 {
        (index % self.p as u64) as u32
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.random_range(0..self.p)
    }

    fn format(&self, a: &u32) -> String {
        a.to_string()
    }

    fn parse(&self, s: &str) -> Result<u32> {
        let q = parse_rational(s)?;
        self.from_rational(&q)
    }

    fn from_rational(&self, q: &BigRational) -> Result<u32> {
        let num = self.reduce_bigint(q.numer());
        let den = self.reduce_bigint(q.denom());
        self.div(&num, &den)
    }

    fn to_rational(&self, _a: &u32) -> Option<BigRational> {
        None
    }
}

/// The field of rational numbers with arbitrary-precision numerators and
/// denominators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn ctx(&self) -> FieldCtx {
        FieldCtx::Rational(Rationals)
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a.recip())
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }

    fn size(&self) -> Option<u64> {
        None
    }

    fn element(&self, index: u64) -> BigRational {
        let k = index.div_ceil(2) as i64;
        self.from_i64(if index % 2 == 1 { k } else { -k })
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.random_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND))
    }

    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    fn parse(&self, s: &str) -> Result<BigRational> {
        parse_rational(s)
    }

    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }

    fn to_rational(&self, a: &BigRational) -> Option<BigRational> {
        Some(a.clone())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse {
        what: "field element",
        input: s.to_string(),
    };
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(num, den))
}

/// Runtime field selector; text encoding `Fp:<p>` or `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldCtx {
    Prime(Fp),
    Rational(Rationals),
}

impl FieldCtx {
    pub fn prime(p: u64) -> Result<Self> {
        Ok(FieldCtx::Prime(Fp::new(p)?))
    }

    pub fn rational() -> Self {
        FieldCtx::Rational(Rationals)
    }

    pub fn cardinality(&self) -> Cardinality {
        match self {
            FieldCtx::Prime(f) => f.cardinality(),
            FieldCtx::Rational(f) => f.cardinality(),
        }
    }

    pub fn cardinality_at_least(&self, m: u64) -> bool {
        match self {
            FieldCtx::Prime(f) => f.cardinality_at_least(m),
            FieldCtx::Rational(_) => true,
        }
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldCtx::Prime(fp) => write!(f, "Fp:{}", fp.p),
            FieldCtx::Rational(_) => f.write_str("Q"),
        }
    }
}

impl FromStr for FieldCtx {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(FieldCtx::rational());
        }
        let p = s
            .strip_prefix("Fp:")
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| Error::Parse {
                what: "field",
                input: s.to_string(),
            })?;
        FieldCtx::prime(p)
    }
}

/// Runs `$body` with `$f` bound to the concrete field behind a [`FieldCtx`].
#[macro_export]
macro_rules! with_field {
    ($ctx:expr, $f:ident => $body:expr) => {
        match $ctx {
            $crate::FieldCtx::Prime($f) => $body,
            $crate::FieldCtx::Rational($f) => $body,
        }
    };
}

/// Checks that a textual field tag matches the field in hand.
pub(crate) fn expect_field<F: Field>(field: &F, tag: &str) -> Result<()> {
    let found: FieldCtx = tag.parse()?;
    if found != field.ctx() {
        return Err(Error::FieldMismatch {
            expected: field.ctx().to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

pub(crate) fn is_positive(q: &BigRational) -> bool {
    q.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn inverse_examples() {
        let f5 = Fp::new(5).unwrap();
        assert_eq!(f5.inv(&2).unwrap(), 3);
        assert_eq!(Rationals.inv(&q(3, 4)).unwrap(), q(4, 3));
        let f7 = Fp::new(7).unwrap();
        assert!(matches!(f7.inv(&0), Err(Error::DivisionByZero)));
        assert!(matches!(Rationals.inv(&q(0, 1)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn cardinality_gates() {
        assert!(Fp::new(5).unwrap().cardinality_at_least(4));
        assert!(!Fp::new(3).unwrap().cardinality_at_least(4));
        assert!(Rationals.cardinality_at_least(1_000_000_000));
        assert_eq!(FieldCtx::rational().cardinality().to_string(), "infinite");
        assert_eq!(FieldCtx::prime(7).unwrap().cardinality(), Cardinality::Finite(7));
    }

    #[test]
    fn rejects_composites_and_large_moduli() {
        for n in [0, 1, 4, 9, 15, 561] {
            assert!(Fp::new(n).is_err(), "{n}");
        }
        assert!(Fp::new(MAX_PRIME).is_err());
        assert!(Fp::new(2_147_483_647).is_ok());
    }

    #[test]
    fn text_encoding() {
        let ctx: FieldCtx = "Fp:7".parse().unwrap();
        assert_eq!(ctx.to_string(), "Fp:7");
        assert_eq!("Q".parse::<FieldCtx>().unwrap(), FieldCtx::rational());
        assert!("Fp:8".parse::<FieldCtx>().is_err());
        assert!("R".parse::<FieldCtx>().is_err());

        let f7 = Fp::new(7).unwrap();
        assert_eq!(f7.parse("-1").unwrap(), 6);
        assert_eq!(f7.parse("1/2").unwrap(), 4);
        assert_eq!(Rationals.format(&Rationals.parse("6/-4").unwrap()), "-3/2");
        assert_eq!(Rationals.format(&Rationals.parse("10").unwrap()), "10");
        assert!(Rationals.parse("1/0").is_err());
        assert!(Rationals.parse("x").is_err());
    }

    #[test]
    fn rational_enumeration_walks_integers() {
        let got: Vec<String> = (0..5).map(|i| Rationals.format(&Rationals.element(i))).collect();
        assert_eq!(got, ["0", "1", "-1", "2", "-2"]);
    }

    #[test]
    fn big_rational_products_do_not_overflow() {
        let big = Rationals.parse("123456789012345678901234567890/7").unwrap();
        let sq = Rationals.mul(&big, &big);
        assert_eq!(Rationals.div(&sq, &big).unwrap(), big);
    }

    fn check_axioms<F: Field>(f: &F, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
            assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            assert_eq!(
                f.mul(&a, &f.add(&b, &c)),
                f.add(&f.mul(&a, &b), &f.mul(&a, &c))
            );
            assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
            assert_eq!(f.sub(&a, &b), f.add(&a, &f.neg(&b)));
            if !f.is_zero(&a) {
                assert!(f.is_one(&f.mul(&a, &f.inv(&a).unwrap())));
            }
        }
    }

    #[test]
    fn field_axioms_on_random_triples() {
        for p in [2, 3, 5, 7, 101, 2_147_483_647] {
            check_axioms(&Fp::new(p).unwrap(), p);
        }
        check_axioms(&Rationals, 11);
    }

    proptest! {
        #[test]
        fn prime_inverse_matches_fermat(a in 1u32..1_000_002) {
            let f = Fp::new(1_000_003).unwrap();
            let a = a % 1_000_003;
            prop_assume!(a != 0);
            prop_assert_eq!(f.inv(&a).unwrap(), f.pow(&a, 1_000_001));
        }
    }
}
