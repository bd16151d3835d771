//! Canonical form of constant-rank affine spaces of alternating matrices
//! with critical dimension `s(n-s-1)` and `n >= r + 3`.
//!
//! The pipeline returns a [`ReductionCertificate`] whose verdict bits record
//! every run-time check; mathematical failures are data, errors are reserved
//! for malformed input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::analyze::{alternating_moment_conclusions, extract_lagrangian, rank_profile};
use crate::error::{Error, Result};
use crate::exactfield::Field;
use crate::families::{build_m_tilde_alt, build_m_tilde_rect, reduction_hypothesis};
use crate::linalg::{alternating_unit, unit, AlternatingMatrix, Matrix, Span};
use crate::spaces::{AffineMatrixSpace, DEFAULT_BUDGET};
use crate::symplectic::{is_totally_singular, radical, singular_witness, symplectic_basis, Lagrangian};

/// Perturbed candidates tested against the unique complement.
pub const UNIQUENESS_CANDIDATES: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Largest member count checked exhaustively for constant rank.
    pub budget: u64,
    /// Sample count when the space is larger than the budget.
    pub samples: u64,
    pub seed: u64,
    /// Skip the constant-rank precheck.
    pub assume_constant_rank: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            budget: DEFAULT_BUDGET,
            samples: 2_000,
            seed: 0,
            assume_constant_rank: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub base_rank: bool,
    pub moments: bool,
    pub lagrangian: bool,
    pub step1: bool,
    pub step2: bool,
    pub step3: bool,
    pub step4: bool,
}

impl Verdicts {
    pub fn all(&self) -> bool {
        self.base_rank && self.moments && self.lagrangian && self.step1 && self.step2 && self.step3 && self.step4
    }
}

#[derive(Clone, Debug)]
pub struct ReductionCertificate<F: Field> {
    /// `P^T S P` is the canonical form when every verdict holds.
    pub p: Option<Matrix<F>>,
    /// Lagrangian of `F^r` in the coordinates after the radical is moved last.
    pub lagrangian: Vec<Vec<F::Elem>>,
    pub recovered_m: Option<AffineMatrixSpace<F>>,
    pub verdicts: Verdicts,
    pub failure: Option<String>,
    pub witnesses: Map<String, Value>,
}

impl<F: Field> ReductionCertificate<F> {
    fn empty() -> Self {
        ReductionCertificate {
            p: None,
            lagrangian: Vec::new(),
            recovered_m: None,
            verdicts: Verdicts::default(),
            failure: None,
            witnesses: Map::new(),
        }
    }

    pub fn succeeded(&self) -> bool {
        self.verdicts.all()
    }

    fn fail(mut self, step: &str, msg: impl Into<String>) -> Self {
        let msg = msg.into();
        self.failure = Some(format!("{step}: {msg}"));
        self.witnesses.insert(step.to_string(), Value::String(msg));
        self
    }

    pub fn to_json(&self, f: &F) -> Value {
        let vectors: Vec<Vec<String>> = self
            .lagrangian
            .iter()
            .map(|v| v.iter().map(|x| f.format(x)).collect())
            .collect();
        json!({
            "verdicts": self.verdicts,
            "P": self.p.as_ref().map(Matrix::to_json),
            "lagrangian": vectors,
            "recovered_M": self.recovered_m.as_ref().map(AffineMatrixSpace::to_json),
            "witnesses": self.witnesses,
            "failure": self.failure,
        })
    }
}

/// Output of the rectangular reduction: `Q T Q' = {[B C] : B in M}`.
#[derive(Clone, Debug)]
pub struct RectReduction<F: Field> {
    pub q: Matrix<F>,
    pub q_prime: Matrix<F>,
    pub m: AffineMatrixSpace<F>,
}

/// Standard vectors completing `sub` to a basis, in index order.
fn standard_complement<F: Field>(f: &F, n: usize, sub: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let mut span = Span::new(f, n, sub.iter().cloned());
    (0..n)
        .map(|i| crate::linalg::standard_vector(f, n, i))
        .filter(|e| span.insert(e.clone()))
        .collect()
}

/// Reduces an affine space of full-row-rank `s x m` matrices with
/// codimension at most `s(s+1)/2` to `{[B C]}` form.
///
/// `W = {v : e_i v^T in T for all i}` is computed from the membership
/// conditions; `Q'` sends a standard complement of `W` to the first `s`
/// coordinates and `W` to the rest. `Q` is the identity.
pub fn reduce_rectangular<F: Field>(t: &AffineMatrixSpace<F>) -> Result<RectReduction<F>> {
    let f = t.field();
    let (s, m) = t.shape();
    if s == 0 || s > m {
        return Err(Error::precondition(format!("need 0 < s <= m, got {s} x {m}")));
    }
    if f.size().is_some_and(|q| q <= 2) {
        return Err(Error::precondition("needs a field with more than 2 elements"));
    }
    let codim = s * m - t.dimension().min(s * m);
    if codim > s * (s + 1) / 2 {
        return Err(Error::precondition(format!("codimension {codim} exceeds {}", s * (s + 1) / 2)));
    }
    let span = t.translation_span();
    let conditions = Matrix::from_columns(
        f,
        s * s * m,
        &(0..m)
            .map(|k| (0..s).flat_map(|i| span.reduce(unit(f, s, m, i, k).data())).collect())
            .collect::<Vec<Vec<F::Elem>>>(),
    )?;
    let w = conditions.kernel_basis();
    if w.len() != m - s {
        return Err(Error::contract(format!("universal column space has dimension {} instead of {}", w.len(), m - s)));
    }
    let mut cols = standard_complement(f, m, &w);
    cols.extend(w);
    let g = Matrix::from_columns(f, m, &cols)?;
    let q_prime = g.inverse()?.transpose();
    let q = Matrix::identity(f, s);
    let reduced = t.equivalence_act(&q, &q_prime)?;
    let first = |x: &Matrix<F>| x.block(0, 0, s, s);
    let inner = AffineMatrixSpace::from_spanning(first(reduced.base()), reduced.basis().iter().map(first).collect())?;
    if inner.dimension() != s * (s - 1) / 2 {
        return Err(Error::contract(format!(
            "recovered inner family has dimension {} instead of {}",
            inner.dimension(),
            s * (s - 1) / 2
        )));
    }
    let target = build_m_tilde_rect(m, &inner).map_err(|e| Error::contract(format!("recovered inner family: {e}")))?;
    if !reduced.set_eq(&target) {
        return Err(Error::contract("Q T Q' differs from {[B C]}"));
    }
    Ok(RectReduction { q, q_prime, m: inner })
}

fn lower_right_zero<F: Field>(x: &Matrix<F>, k: usize) -> bool {
    let n = x.rows();
    x.block(n - k, n - k, k, k).is_zero()
}

fn find_rank_member<F: Field>(sp: &AffineMatrixSpace<F>, r: usize, opts: &ReduceOptions) -> Option<Matrix<F>> {
    if sp.base().rank() == r {
        return Some(sp.base().clone());
    }
    if let Ok(members) = sp.enumerate(opts.budget) {
        return members.map(|(_, m)| m).find(|m| m.rank() == r);
    }
    sp.sample(opts.samples.max(1), opts.seed)
        .ok()?
        .map(|(_, m)| m)
        .find(|m| m.rank() == r)
}

fn check_preconditions<F: Field>(sp: &AffineMatrixSpace<F>, r: usize, opts: &ReduceOptions) -> Result<()> {
    let (n, c) = sp.shape();
    if n != c || !sp.is_alternating() {
        return Err(Error::NotAlternating);
    }
    if r == 0 || !r.is_multiple_of(2) || r > n {
        return Err(Error::precondition(format!("r = {r} must be positive, even and at most n = {n}")));
    }
    if n == r + 1 || n == r + 2 {
        return Err(Error::precondition(format!("n = {n} = r + {} is outside the reduction range", n - r)));
    }
    if n < r + 3 {
        return Err(Error::precondition(format!("need n >= r + 3, got n = {n}, r = {r}")));
    }
    if !reduction_hypothesis(sp.field().size(), n, r) {
        return Err(Error::precondition(format!(
            "field too small: need |F| >= max(r - 1, 2 + r/2) = {}",
            (r - 1).max(2 + r / 2)
        )));
    }
    let s = r / 2;
    if sp.dimension() != s * (n - s - 1) {
        return Err(Error::precondition(format!(
            "dimension {} differs from s(n-s-1) = {}",
            sp.dimension(),
            s * (n - s - 1)
        )));
    }
    if !opts.assume_constant_rank {
        let profile = rank_profile(sp, opts.budget, opts.samples, opts.seed)?;
        if profile.min != r || profile.max != r {
            return Err(Error::precondition(format!(
                "ranks range over {}..={} instead of constant {r}",
                profile.min, profile.max
            )));
        }
    }
    Ok(())
}

pub fn reduce<F: Field>(sp: &AffineMatrixSpace<F>, r: usize) -> Result<ReductionCertificate<F>> {
    reduce_with(sp, r, &ReduceOptions::default())
}

pub fn reduce_with<F: Field>(sp: &AffineMatrixSpace<F>, r: usize, opts: &ReduceOptions) -> Result<ReductionCertificate<F>> {
    check_preconditions(sp, r, opts)?;
    let f = sp.field();
    let n = sp.shape().0;
    let s = r / 2;
    let mut cert = ReductionCertificate::empty();

    // (a) base point of rank r
    let Some(s0) = find_rank_member(sp, r, opts) else {
        return Ok(cert.fail("base_rank", "no member of rank r found"));
    };
    let sp_a = sp.rebase(s0.clone())?;

    // (b) radical of s0 on the last n - r coordinates
    let s0_alt = AlternatingMatrix::new(s0)?;
    let rad = radical(&s0_alt);
    let mut cols = standard_complement(f, n, &rad);
    cols.extend(rad);
    let p1 = Matrix::from_columns(f, n, &cols)?;
    let sp_b = sp_a.congruence_act(&p1)?;
    let base = sp_b.base();
    let k_mat = base.block(0, 0, r, r);
    if !k_mat.is_invertible() || !base.block(0, r, r, n - r).is_zero() || !lower_right_zero(base, n - r) {
        return Ok(cert.fail("base_rank", "base point does not split as [K 0; 0 0]"));
    }
    cert.verdicts.base_rank = true;
    let k = AlternatingMatrix::new(k_mat)?;
    let k_inv = k.as_matrix().inverse()?;

    // (c) moment identities on every translation generator
    for (i, g) in sp_b.basis().iter().enumerate() {
        let c = alternating_moment_conclusions(&k, g)?;
        if !c.all() {
            cert.witnesses.insert("moments_generator".into(), json!(i));
            return Ok(cert.fail("moments", format!("generator {i} violates the moment identities")));
        }
    }
    cert.verdicts.moments = true;

    // (d) Lagrangian from K^{-1} B(S)
    let b_of = |g: &Matrix<F>| g.block(0, r, r, n - r);
    let generators: Vec<Matrix<F>> = sp_b.basis().iter().map(|g| &k_inv * &b_of(g)).collect();
    if generators.is_empty() {
        return Ok(cert.fail("lagrangian", "no translation generators"));
    }
    let lagrangian = match extract_lagrangian(&generators, &k) {
        Ok(Some(l)) => l,
        Ok(None) => return Ok(cert.fail("lagrangian", "K^{-1} B(S) is below the extremal dimension")),
        Err(Error::Contract(msg)) => return Ok(cert.fail("lagrangian", msg)),
        Err(e) => return Err(e),
    };
    cert.lagrangian = lagrangian.basis().to_vec();
    cert.verdicts.lagrangian = true;

    // (e) L is totally A(b)-singular; the quadratic identity along a least-index section
    let mut b_span = Span::empty(f, r * (n - r));
    for (i, g) in sp_b.basis().iter().enumerate() {
        let a = AlternatingMatrix::new(g.block(0, 0, r, r))?;
        if let Some((x, y)) = singular_witness(&a, lagrangian.basis()) {
            cert.witnesses.insert("step1_generator".into(), json!({ "generator": i, "pair": [x, y] }));
            return Ok(cert.fail("step1", format!("L is not totally singular for A of generator {i}")));
        }
        if b_span.insert(b_of(g).data().to_vec()) {
            let kn = &generators[i];
            if !(&(&kn.transpose() * a.as_matrix()) * kn).is_zero() {
                cert.witnesses.insert("quadratic_identity_generator".into(), json!(i));
                return Ok(cert.fail("step1", format!("identity (K^-1 N)^T A(theta N) K^-1 N = 0 fails at {i}")));
            }
        }
    }
    cert.verdicts.step1 = true;

    // (f) symplectic basis adapted to L
    let p2 = symplectic_basis(&k, Some(&lagrangian))?.direct_sum(&Matrix::identity(f, n - r));
    let sp_f = sp_b.congruence_act(&p2)?;
    if let Some(i) = std::iter::once(sp_f.base())
        .chain(sp_f.basis())
        .position(|x| !lower_right_zero(x, n - s))
    {
        cert.witnesses.insert("step2_member".into(), json!(i));
        return Ok(cert.fail("step2", "lower-right (n-s) block is not zero"));
    }
    cert.verdicts.step2 = true;

    // (g) rectangular reduction of the top-right block, (h) set equality
    let top = |x: &Matrix<F>| x.block(0, s, s, n - s);
    let t = AffineMatrixSpace::from_spanning(top(sp_f.base()), sp_f.basis().iter().map(top).collect())?;
    let rect = match reduce_rectangular(&t) {
        Ok(rect) => rect,
        Err(Error::Contract(msg)) | Err(Error::Precondition(msg)) => return Ok(cert.fail("step3", msg)),
        Err(e) => return Err(e),
    };
    let p3 = rect.q.transpose().direct_sum(&rect.q_prime);
    let p = &(&p1 * &p2) * &p3;
    let canonical = sp.congruence_act(&p)?;
    cert.p = Some(p);
    cert.recovered_m = Some(rect.m.clone());
    let target = match build_m_tilde_alt(n, s, &rect.m) {
        Ok(t) => t,
        Err(e) => return Ok(cert.fail("step3", e.to_string())),
    };
    if !canonical.set_eq(&target) {
        return Ok(cert.fail("step3", "P^T S P differs from the canonical family"));
    }
    cert.verdicts.step3 = true;

    let report = unique_totally_singular_complement(&canonical, s, opts.seed)?;
    if let Some(w) = &report.first_passing {
        cert.witnesses.insert("step4_passing_candidate".into(), json!(format!("{w:?}")));
    }
    if !report.holds() {
        return Ok(cert.fail("step4", "a second totally singular complement was not excluded"));
    }
    cert.verdicts.step4 = true;
    Ok(cert)
}

/// A member `b` and vectors `x`, `y` with `b(x, y) != 0`.
pub type SingularityWitness<F> = (Matrix<F>, Vec<<F as Field>::Elem>, Vec<<F as Field>::Elem>);

#[derive(Clone, Debug)]
pub struct UniquenessReport<F: Field> {
    /// Basis `e_{s+1}, ..., e_n` of the complement.
    pub complement: Vec<Vec<F::Elem>>,
    /// The hypotheses of the exact uniqueness argument hold.
    pub exact_argument: bool,
    pub candidates_checked: usize,
    pub candidates_rejected: usize,
    pub first_witness: Option<SingularityWitness<F>>,
    pub first_passing: Option<Vec<Vec<F::Elem>>>,
}

impl<F: Field> UniquenessReport<F> {
    pub fn holds(&self) -> bool {
        self.exact_argument && self.candidates_rejected == self.candidates_checked
    }
}

/// First member generator (base point first) that is not totally singular
/// on `candidate`, with the offending pair.
pub fn reject_candidate<F: Field>(
    sp: &AffineMatrixSpace<F>,
    candidate: &[Vec<F::Elem>],
) -> Result<Option<SingularityWitness<F>>> {
    for b in std::iter::once(sp.base()).chain(sp.basis()) {
        let alt = AlternatingMatrix::new(b.clone())?;
        if let Some((i, j)) = singular_witness(&alt, candidate) {
            return Ok(Some((b.clone(), candidate[i].clone(), candidate[j].clone())));
        }
    }
    Ok(None)
}

/// For a space already in canonical form, certifies that
/// `span(e_{s+1}, ..., e_n)` is the only `(n-s)`-dimensional subspace
/// totally singular for every member.
///
/// The exact argument needs every alternating form with radical containing
/// the complement, every `C`-block unit, and `n > 2s + 1`; seeded perturbed
/// candidates are then each rejected with a witness.
pub fn unique_totally_singular_complement<F: Field>(
    sp: &AffineMatrixSpace<F>,
    s: usize,
    seed: u64,
) -> Result<UniquenessReport<F>> {
    let f = sp.field();
    let (n, c) = sp.shape();
    let r = 2 * s;
    if n != c || !sp.is_alternating() {
        return Err(Error::NotAlternating);
    }
    if s == 0 || n < r + 3 {
        return Err(Error::precondition(format!("need s >= 1 and n >= 2s + 3, got n = {n}, s = {s}")));
    }
    let complement: Vec<Vec<F::Elem>> = (s..n).map(|i| crate::linalg::standard_vector(f, n, i)).collect();
    if std::iter::once(sp.base()).chain(sp.basis()).any(|x| !lower_right_zero(x, n - s)) {
        return Err(Error::precondition("space is not in canonical form"));
    }
    let span = sp.translation_span();
    let block_forms = (0..s).all(|i| (i + 1..s).all(|j| span.contains(alternating_unit(f, n, i, j).data())));
    let c_block = (0..s).all(|i| (r..n).all(|j| span.contains(alternating_unit(f, n, i, j).data())));
    let exact_argument = block_forms && c_block && n > r + 1;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0;
    let mut first_witness = None;
    let mut first_passing = None;
    for _ in 0..UNIQUENESS_CANDIDATES {
        let mut cand = complement.clone();
        let slot = rng.random_range(0..cand.len());
        let mut shift: Vec<F::Elem> = (0..n).map(|_| f.random(&mut rng)).collect();
        if (0..s).all(|i| f.is_zero(&shift[i])) {
            shift[rng.random_range(0..s)] = f.one();
        }
        cand[slot] = cand[slot].iter().zip(&shift).map(|(a, b)| f.add(a, b)).collect();
        match reject_candidate(sp, &cand)? {
            Some(w) => {
                rejected += 1;
                first_witness.get_or_insert(w);
            }
            None => {
                first_passing.get_or_insert(cand);
            }
        }
    }
    debug_assert!(is_totally_singular(&AlternatingMatrix::new(sp.base().clone())?, &complement));
    Ok(UniquenessReport {
        complement,
        exact_argument,
        candidates_checked: UNIQUENESS_CANDIDATES,
        candidates_rejected: rejected,
        first_witness,
        first_passing,
    })
}

/// Random invertible matrix from the seeded stream.
pub fn random_invertible<F: Field>(f: &F, n: usize, seed: u64, index: u64) -> Matrix<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let m = Matrix::from_fn(f, n, n, |_, _| f.random(&mut rng));
        if m.is_invertible() {
            return m;
        }
    }
}

/// Lagrangian of `K` spanned by the given vectors; re-exported for callers
/// that build Step-2 inputs by hand.
pub fn lagrangian_of<F: Field>(k: &AlternatingMatrix<F>, basis: Vec<Vec<F::Elem>>) -> Result<Lagrangian<F>> {
    Lagrangian::new(k, basis)
}
