//! Explicit families of matrix spaces and the closed-form dimension values
//! they attain.
//!
//! Translation bases inside block constructions are ordered block by block
//! (leading block entries, then the inner family, then the remaining blocks),
//! each block in row-major order, so coordinates are reproducible.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::analyze::{rank_profile, trivial_spectrum_check};
use crate::error::{Error, Result};
use crate::exactfield::{Field, Rationals};
use crate::linalg::{alternating_unit, unit, AlternatingMatrix, Matrix};
use crate::spaces::AffineMatrixSpace;
use crate::symplectic::FormSpacePair;

/// Members scanned exhaustively when a constructor verifies its inner family.
pub const VERIFY_BUDGET: u64 = 1_000_000;
/// Samples drawn when the inner family is too large to enumerate.
pub const VERIFY_SAMPLES: u64 = 2_000;
const VERIFY_SEED: u64 = 0x5eed;

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `n x n` matrix holding `m` at `(r0, c0)` and `-m^T` at `(c0, r0)`.
fn alt_embed<F: Field>(n: usize, r0: usize, c0: usize, m: &Matrix<F>) -> Matrix<F> {
    let mut out = Matrix::zeros(m.field(), n, n);
    out.set_block(r0, c0, m);
    out.set_block(c0, r0, &-&m.transpose());
    out
}

/// Alternating units on the diagonal block starting at `offset`.
fn alternating_block_basis<F: Field>(f: &F, n: usize, offset: usize, size: usize) -> Vec<Matrix<F>> {
    (0..size)
        .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
        .map(|(i, j)| alternating_unit(f, n, offset + i, offset + j))
        .collect()
}

/// Strictly upper-triangular `n x n` matrices.
pub fn build_nt<F: Field>(f: &F, n: usize) -> AffineMatrixSpace<F> {
    let basis = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| unit(f, n, n, i, j))
        .collect();
    AffineMatrixSpace::linear(f, n, n, basis).expect("independent units")
}

/// `I_s + NT_s`: invertible `s x s` matrices of dimension `s(s-1)/2`.
pub fn identity_plus_nt<F: Field>(f: &F, s: usize) -> AffineMatrixSpace<F> {
    AffineMatrixSpace::new(Matrix::identity(f, s), build_nt(f, s).basis().to_vec()).expect("independent units")
}

/// `{[0 I+A; -(I+A)^T B] : A in NT_s, B in A_s}` in `A_{2s}`.
pub fn build_nonsingular_alt<F: Field>(f: &F, s: usize) -> AffineMatrixSpace<F> {
    let n = 2 * s;
    let base = AlternatingMatrix::standard_symplectic(f, s).into_matrix();
    let mut basis: Vec<Matrix<F>> = build_nt(f, s)
        .basis()
        .iter()
        .map(|a| alt_embed(n, 0, s, a))
        .collect();
    basis.extend(alternating_block_basis(f, n, s, s));
    AffineMatrixSpace::new_alternating(base, basis).expect("independent units")
}

fn check_inner<F: Field>(inner: &AffineMatrixSpace<F>, size: usize, dim: usize, rank: usize, what: &str) -> Result<()> {
    if inner.shape() != (size, size) {
        return Err(Error::precondition(format!("{what} must be {size}x{size}")));
    }
    if inner.dimension() != dim {
        return Err(Error::precondition(format!(
            "{what} has dimension {} instead of {dim}",
            inner.dimension()
        )));
    }
    let profile = rank_profile(inner, VERIFY_BUDGET, VERIFY_SAMPLES, VERIFY_SEED)?;
    if profile.min != rank || profile.max != rank {
        return Err(Error::precondition(format!(
            "{what} has ranks {}..={} instead of constant {rank}",
            profile.min, profile.max
        )));
    }
    Ok(())
}

/// `{[A B C; -B^T 0 0; -C^T 0 0]}` in `A_n`, with `A in A_s`, `B` in the
/// inner family of invertible `s x s` matrices and `C` arbitrary `s x (n-2s)`.
pub fn build_m_tilde_alt<F: Field>(n: usize, s: usize, inner: &AffineMatrixSpace<F>) -> Result<AffineMatrixSpace<F>> {
    if s == 0 || n < 2 * s {
        return Err(Error::precondition(format!("need 1 <= s and 2s <= n, got s = {s}, n = {n}")));
    }
    check_inner(inner, s, binom2(s), s, "inner family")?;
    let f = inner.field();
    let base = alt_embed(n, 0, s, inner.base());
    let mut basis = alternating_block_basis(f, n, 0, s);
    basis.extend(inner.basis().iter().map(|b| alt_embed(n, 0, s, b)));
    for i in 0..s {
        for j in 2 * s..n {
            basis.push(alternating_unit(f, n, i, j));
        }
    }
    AffineMatrixSpace::new_alternating(base, basis)
}

/// `{[B C] : B in inner, C arbitrary}` in `M_{s,p}`.
pub fn build_m_tilde_rect<F: Field>(p: usize, inner: &AffineMatrixSpace<F>) -> Result<AffineMatrixSpace<F>> {
    let s = inner.shape().0;
    if p < s {
        return Err(Error::precondition(format!("p = {p} smaller than s = {s}")));
    }
    check_inner(inner, s, binom2(s), s, "inner family")?;
    let f = inner.field();
    let widen = |m: &Matrix<F>| {
        let mut out = Matrix::zeros(f, s, p);
        out.set_block(0, 0, m);
        out
    };
    let mut basis: Vec<Matrix<F>> = inner.basis().iter().map(widen).collect();
    for i in 0..s {
        for j in s..p {
            basis.push(unit(f, s, p, i, j));
        }
    }
    AffineMatrixSpace::new(widen(inner.base()), basis)
}

fn check_nonsingular_inner<F: Field>(inner: &AffineMatrixSpace<F>) -> Result<usize> {
    let r = inner.shape().0;
    if !r.is_multiple_of(2) || r == 0 || !inner.is_alternating() {
        return Err(Error::precondition("inner family must be alternating of positive even size"));
    }
    let s = r / 2;
    check_inner(inner, r, s * (s - 1), r, "nonsingular inner family")?;
    Ok(r)
}

/// `{[H C; -C^T 0]}` in `A_{r+1}` with `H` in a nonsingular family of `A_r`.
pub fn build_h_plus<F: Field>(inner: &AffineMatrixSpace<F>) -> Result<AffineMatrixSpace<F>> {
    build_h_bar_impl(inner.shape().0 + 1, inner, false)
}

/// `{[H C; -C^T D]}` in `A_n` with `H` in a nonsingular family of `A_r`.
pub fn build_h_bar<F: Field>(n: usize, inner: &AffineMatrixSpace<F>) -> Result<AffineMatrixSpace<F>> {
    build_h_bar_impl(n, inner, true)
}

fn build_h_bar_impl<F: Field>(n: usize, inner: &AffineMatrixSpace<F>, with_d: bool) -> Result<AffineMatrixSpace<F>> {
    let r = check_nonsingular_inner(inner)?;
    if n < r {
        return Err(Error::precondition(format!("n = {n} smaller than r = {r}")));
    }
    let f = inner.field();
    let pad = |m: &Matrix<F>| {
        let mut out = Matrix::zeros(f, n, n);
        out.set_block(0, 0, m);
        out
    };
    let mut basis: Vec<Matrix<F>> = inner.basis().iter().map(pad).collect();
    for i in 0..r {
        for j in r..n {
            basis.push(alternating_unit(f, n, i, j));
        }
    }
    if with_d {
        basis.extend(alternating_block_basis(f, n, r, n - r));
    }
    AffineMatrixSpace::new_alternating(pad(inner.base()), basis)
}

/// Operators `[A B; 0 A^T]` with `A` in `W` and `B` alternating, paired
/// with the standard symplectic Gram matrix of size `2n`.
pub fn build_operator_block<F: Field>(n: usize, w: &AffineMatrixSpace<F>) -> Result<FormSpacePair<F>> {
    if w.shape() != (n, n) || !w.base().is_zero() {
        return Err(Error::precondition("W must be a linear space of n x n matrices"));
    }
    let f = w.field();
    if f.size().is_some() && n > 0 {
        let report = trivial_spectrum_check(w, VERIFY_BUDGET)?;
        if !report.holds {
            return Err(Error::precondition("W does not have trivial spectrum"));
        }
    }
    let mut basis: Vec<Matrix<F>> = w
        .basis()
        .iter()
        .map(|a| a.direct_sum(&a.transpose()))
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            let mut m = Matrix::zeros(f, 2 * n, 2 * n);
            m.set_block(0, n, &alternating_unit(f, n, i, j));
            basis.push(m);
        }
    }
    let k = AlternatingMatrix::standard_symplectic(f, n);
    FormSpacePair::new(k, AffineMatrixSpace::linear(f, 2 * n, 2 * n, basis)?)
}

/// The 4x4 alternating matrix with Pfaffian `x^2 + y^2 + z^2`.
pub fn counterexample_matrix<F: Field>(f: &F, x: &F::Elem, y: &F::Elem, z: &F::Elem) -> AlternatingMatrix<F> {
    let mut m = Matrix::zeros(f, 4, 4);
    let mut put = |i: usize, j: usize, v: &F::Elem| {
        m.set(i, j, v.clone());
        m.set(j, i, f.neg(v));
    };
    put(0, 1, x);
    put(0, 2, y);
    put(0, 3, z);
    put(1, 2, z);
    put(1, 3, &f.neg(y));
    put(2, 3, x);
    AlternatingMatrix::new(m).expect("alternating by construction")
}

fn counter_at<F: Field>(f: &F, x: i64, y: i64, z: i64) -> Matrix<F> {
    counterexample_matrix(f, &f.from_i64(x), &f.from_i64(y), &f.from_i64(z)).into_matrix()
}

/// The plane `{A(x, y, 1)}`: base `A(0,0,1)`, translations `A(1,0,0)`, `A(0,1,0)`.
pub fn build_counterexample_plane<F: Field>(f: &F) -> AffineMatrixSpace<F> {
    AffineMatrixSpace::new_alternating(counter_at(f, 0, 0, 1), vec![counter_at(f, 1, 0, 0), counter_at(f, 0, 1, 0)])
        .expect("independent")
}

/// Closed-form dimension values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// Symplectic forms, `n = r`: `s(s-1)`.
    Thm3,
    /// Rank at least `r`: `C(n,2) - s^2`.
    Thm4,
    /// Constant rank `r`: `s(n-s-1)`, or `s(s+1)` when `n = r + 1`.
    Thm5,
}

pub fn theorem_dimension(n: usize, r: usize, which: Theorem) -> Result<usize> {
    if !r.is_multiple_of(2) || r > n {
        return Err(Error::precondition(format!("need even r <= n, got n = {n}, r = {r}")));
    }
    let s = r / 2;
    Ok(match which {
        Theorem::Thm3 => {
            if n != r {
                return Err(Error::precondition("the symplectic case needs n = r"));
            }
            s * s.saturating_sub(1)
        }
        Theorem::Thm4 => binom2(n) - s * s,
        Theorem::Thm5 if n == r + 1 => s * (s + 1),
        Theorem::Thm5 => s * (n - s - 1),
    })
}

/// Field-size hypothesis under which the closed form is the exact maximum.
pub fn theorem_hypothesis(q: Option<u64>, n: usize, r: usize, which: Theorem) -> bool {
    let need = match which {
        Theorem::Thm3 => r.saturating_sub(1),
        Theorem::Thm4 if n.is_multiple_of(2) => n.saturating_sub(1),
        Theorem::Thm4 => n.saturating_sub(2),
        Theorem::Thm5 => (r.saturating_sub(1)).max(2 + r / 2),
    };
    q.is_none_or(|q| q >= need as u64)
}

/// Hypotheses of the canonical-form reduction: the constant-rank field bound
/// and `n >= r + 3`.
pub fn reduction_hypothesis(q: Option<u64>, n: usize, r: usize) -> bool {
    r > 0 && r.is_multiple_of(2) && n >= r + 3 && theorem_hypothesis(q, n, r, Theorem::Thm5)
}

/// A dimension-matching constant-rank construction for `(n, r)`:
/// nonsingular at `n = r`, `H^+` at `n = r + 1`, otherwise `M~_alt`.
pub fn constant_rank_family<F: Field>(f: &F, n: usize, r: usize) -> Result<AffineMatrixSpace<F>> {
    let s = r / 2;
    if r == 0 || !r.is_multiple_of(2) || r > n {
        return Err(Error::precondition(format!("need even 0 < r <= n, got n = {n}, r = {r}")));
    }
    if n == r {
        Ok(build_nonsingular_alt(f, s))
    } else if n == r + 1 {
        build_h_plus(&build_nonsingular_alt(f, s))
    } else {
        build_m_tilde_alt(n, s, &identity_plus_nt(f, s))
    }
}

/// Coefficients `(a, b, c)` of `a x^2 + b xy + c y^2` for the quadratic form
/// `Pf(x G1 + y G2)` of two 4x4 alternating generators, by evaluation at
/// `(1,0)`, `(0,1)`, `(1,1)`.
pub fn pfaffian_quadratic_form<F: Field>(g1: &AlternatingMatrix<F>, g2: &AlternatingMatrix<F>) -> Result<[F::Elem; 3]> {
    if g1.size() != 4 || g2.size() != 4 {
        return Err(Error::shape("the Pfaffian is quadratic only on 4x4 matrices"));
    }
    let f = g1.field();
    let a = g1.pfaffian();
    let c = g2.pfaffian();
    let both = AlternatingMatrix::new(g1.as_matrix() + g2.as_matrix())?.pfaffian();
    let b = f.sub(&f.sub(&both, &a), &c);
    Ok([a, b, c])
}

/// Pfaffian of `A(x, y, z)` as a ternary quadratic form, by polarization:
/// `[x^2, y^2, z^2, xy, xz, yz]` coefficients.
pub fn counterexample_pencil<F: Field>(f: &F) -> [F::Elem; 6] {
    let pf = |x, y, z| counter_at(f, x, y, z);
    let at = |m: Matrix<F>| AlternatingMatrix::new(m).expect("alternating").pfaffian();
    let (xx, yy, zz) = (at(pf(1, 0, 0)), at(pf(0, 1, 0)), at(pf(0, 0, 1)));
    let cross = |m: Matrix<F>, p: &F::Elem, q: &F::Elem| f.sub(&f.sub(&at(m), p), q);
    let xy = cross(pf(1, 1, 0), &xx, &yy);
    let xz = cross(pf(1, 0, 1), &xx, &zz);
    let yz = cross(pf(0, 1, 1), &yy, &zz);
    [xx, yy, zz, xy, xz, yz]
}

/// Certificate that the translation plane of the counterexample contains
/// no rank 2 matrix over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnisotropyCertificate {
    /// `(x^2, xy, y^2)` coefficients as reduced fractions.
    pub coefficients: [String; 3],
    /// The form is diagonal with positive coefficients.
    pub positive_definite_diagonal: bool,
    pub anisotropic: bool,
}

/// Extracts `Pf(x A(1,0,0) + y A(0,1,0))` over the rationals and certifies
/// it is a positive diagonal form, hence nonzero away from the origin, so
/// every nonzero translation has rank 4.
pub fn certify_plane_anisotropy() -> Result<AnisotropyCertificate> {
    let q = Rationals;
    let plane = build_counterexample_plane(&q);
    let g1 = AlternatingMatrix::new(plane.basis()[0].clone())?;
    let g2 = AlternatingMatrix::new(plane.basis()[1].clone())?;
    let coeffs = pfaffian_quadratic_form(&g1, &g2)?;
    let positive = |c: &BigRational| crate::exactfield::is_positive(c);
    let diagonal_positive = q.is_zero(&coeffs[1]) && positive(&coeffs[0]) && positive(&coeffs[2]);
    Ok(AnisotropyCertificate {
        coefficients: [q.format(&coeffs[0]), q.format(&coeffs[1]), q.format(&coeffs[2])],
        positive_definite_diagonal: diagonal_positive,
        anisotropic: diagonal_positive,
    })
}

/// First nonzero `(x, y)` in lexicographic order with `Pf(x G1 + y G2) = 0`
/// over a finite field.
pub fn isotropic_witness<F: Field>(
    g1: &AlternatingMatrix<F>,
    g2: &AlternatingMatrix<F>,
) -> Result<Option<(F::Elem, F::Elem)>> {
    let f = g1.field();
    let elements = f.elements()?;
    let [a, b, c] = pfaffian_quadratic_form(g1, g2)?;
    for x in &elements {
        for y in &elements {
            if f.is_zero(x) && f.is_zero(y) {
                continue;
            }
            let v = f.add(
                &f.add(&f.mul(&a, &f.mul(x, x)), &f.mul(&b, &f.mul(x, y))),
                &f.mul(&c, &f.mul(y, y)),
            );
            if f.is_zero(&v) {
                return Ok(Some((x.clone(), y.clone())));
            }
        }
    }
    Ok(None)
}

/// Constructor arguments, mirrored by the command-line `construct` flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    Nt { n: usize },
    NonsingularAlt { s: usize },
    MTildeAlt { n: usize, s: usize },
    HPlus { r: usize },
    HBar { n: usize, r: usize },
    MTildeRect { p: usize, s: usize },
    OperatorBlock { n: usize },
    CounterexamplePlane,
    StandardSymplectic { s: usize },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Nt { .. } => "nt",
            FamilySpec::NonsingularAlt { .. } => "nonsingular-alt",
            FamilySpec::MTildeAlt { .. } => "m-tilde-alt",
            FamilySpec::HPlus { .. } => "h-plus",
            FamilySpec::HBar { .. } => "h-bar",
            FamilySpec::MTildeRect { .. } => "m-tilde-rect",
            FamilySpec::OperatorBlock { .. } => "operator-block",
            FamilySpec::CounterexamplePlane => "counterexample-plane",
            FamilySpec::StandardSymplectic { .. } => "standard-symplectic",
        }
    }

    /// The constructed space; for the operator block this is the operator
    /// space paired with the standard symplectic form.
    pub fn build<F: Field>(&self, f: &F) -> Result<AffineMatrixSpace<F>> {
        let even = |r: usize| {
            if r == 0 || !r.is_multiple_of(2) {
                Err(Error::precondition(format!("r = {r} must be positive and even")))
            } else {
                Ok(r / 2)
            }
        };
        match *self {
            FamilySpec::Nt { n } => Ok(build_nt(f, n)),
            FamilySpec::NonsingularAlt { s } => Ok(build_nonsingular_alt(f, s)),
            FamilySpec::MTildeAlt { n, s } => build_m_tilde_alt(n, s, &identity_plus_nt(f, s)),
            FamilySpec::HPlus { r } => build_h_plus(&build_nonsingular_alt(f, even(r)?)),
            FamilySpec::HBar { n, r } => build_h_bar(n, &build_nonsingular_alt(f, even(r)?)),
            FamilySpec::MTildeRect { p, s } => build_m_tilde_rect(p, &identity_plus_nt(f, s)),
            FamilySpec::OperatorBlock { n } => Ok(build_operator_block(n, &build_nt(f, n))?.operators().clone()),
            FamilySpec::CounterexamplePlane => Ok(build_counterexample_plane(f)),
            FamilySpec::StandardSymplectic { s } => {
                Ok(AffineMatrixSpace::point(AlternatingMatrix::standard_symplectic(f, s).into_matrix()))
            }
        }
    }

    /// Dimension the construction must have.
    pub fn expected_dimension(&self) -> usize {
        match *self {
            FamilySpec::Nt { n } => binom2(n),
            FamilySpec::NonsingularAlt { s } => s * s.saturating_sub(1),
            FamilySpec::MTildeAlt { n, s } => s * (n - s - 1),
            FamilySpec::HPlus { r } => (r / 2) * (r / 2 + 1),
            FamilySpec::HBar { n, r } => binom2(n) - (r / 2) * (r / 2),
            FamilySpec::MTildeRect { p, s } => binom2(s) + s * (p - s),
            FamilySpec::OperatorBlock { n } => n * n.saturating_sub(1),
            FamilySpec::CounterexamplePlane => 2,
            FamilySpec::StandardSymplectic { .. } => 0,
        }
    }

    /// The rank contract: `(rank, constant)`; `constant = false` means
    /// "rank at least". `None` when the family has no rank contract.
    pub fn rank_contract(&self) -> Option<(usize, bool)> {
        match *self {
            FamilySpec::NonsingularAlt { s } | FamilySpec::StandardSymplectic { s } => Some((2 * s, true)),
            FamilySpec::MTildeAlt { s, .. } => Some((2 * s, true)),
            FamilySpec::HPlus { r } => Some((r, true)),
            FamilySpec::HBar { r, .. } => Some((r, false)),
            FamilySpec::MTildeRect { s, .. } => Some((s, true)),
            FamilySpec::Nt { .. } | FamilySpec::OperatorBlock { .. } | FamilySpec::CounterexamplePlane => None,
        }
    }
}
