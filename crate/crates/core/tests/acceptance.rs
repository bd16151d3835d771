//! Acceptance suite. One PASS/FAIL line per criterion; the process exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use altrank_core::analyze::{alternating_moment_conclusions, duality_invariant_check, trivial_spectrum_check};
use altrank_core::families::{
    build_counterexample_plane, build_h_bar, build_m_tilde_alt, build_nonsingular_alt, build_nt, build_operator_block,
    certify_plane_anisotropy, constant_rank_family, counterexample_matrix, counterexample_pencil, identity_plus_nt,
    isotropic_witness, theorem_dimension, theorem_hypothesis, Theorem,
};
use altrank_core::linalg::{pfaffian_by_expansion, standard_vector};
use altrank_core::reduce::{random_invertible, reduce};
use altrank_core::spaces::{brute_equivalence_test, exhaustive_optimal_dimension, RankPredicate};
use altrank_core::symplectic::{operators_to_forms, pencil_symplectic_iff_trivial_spectrum};
use altrank_core::{rank_profile, AffineMatrixSpace, AlternatingMatrix, Field, Fp, Matrix, Rationals};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const EXHAUSTIVE_LIMIT: u64 = 1_000_000;
const RANK_SAMPLES: u64 = 100_000;
const SEED: u64 = 20_240_611;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(id: usize, name: &str, tolerance: &str, limit: Option<Duration>, body: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let took = start.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(_), Some(l)) if took > l => Err(format!("runtime {:.1}s exceeds {}s", took.as_secs_f64(), l.as_secs())),
        (o, _) => o,
    };
    let limit_text = limit.map_or(String::new(), |l| format!(", limit {}s", l.as_secs()));
    let (tag, detail, ok) = match outcome {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!(
        "{tag} [{id}] {name} (tolerance: {tolerance}{limit_text}; {:.1}s): {detail}",
        took.as_secs_f64()
    );
    ok
}

fn primes() -> [Fp; 3] {
    [Fp::new(3).unwrap(), Fp::new(5).unwrap(), Fp::new(7).unwrap()]
}

/// Rank contract of a constructed family: `(rank, constant)`.
struct Built {
    label: String,
    space: AffineMatrixSpace<Fp>,
    rank: usize,
    constant: bool,
}

fn grid_families() -> Result<(Vec<Built>, usize), String> {
    let mut built = Vec::new();
    let mut rows = 0;
    for f in primes() {
        let q = u64::from(f.modulus());
        for r in [2usize, 4, 6] {
            let s = r / 2;
            for n in r..=9 {
                let tag = |t: &str| format!("{t} n={n} r={r} q={q}");
                if n == r && theorem_hypothesis(Some(q), n, r, Theorem::Thm3) {
                    let want = theorem_dimension(n, r, Theorem::Thm3).map_err(|e| e.to_string())?;
                    let direct = build_nonsingular_alt(&f, s);
                    let pair = build_operator_block(s, &build_nt(&f, s)).map_err(|e| e.to_string())?;
                    let pulled = operators_to_forms(&pair).map_err(|e| e.to_string())?;
                    ensure(want == s * (s - 1), || tag("thm3 formula"))?;
                    ensure(direct.dimension() == want && pulled.dimension() == want, || {
                        format!("{}: {} / {} vs {want}", tag("thm3"), direct.dimension(), pulled.dimension())
                    })?;
                    built.push(Built { label: tag("nonsingular-alt"), space: direct, rank: r, constant: true });
                    built.push(Built { label: tag("operator-pullback"), space: pulled, rank: r, constant: true });
                    rows += 1;
                }
                if theorem_hypothesis(Some(q), n, r, Theorem::Thm4) {
                    let want = theorem_dimension(n, r, Theorem::Thm4).map_err(|e| e.to_string())?;
                    ensure(want == n * (n - 1) / 2 - s * s, || tag("thm4 formula"))?;
                    let sp = build_h_bar(n, &build_nonsingular_alt(&f, s)).map_err(|e| e.to_string())?;
                    ensure(sp.dimension() == want, || format!("{}: {} vs {want}", tag("thm4"), sp.dimension()))?;
                    built.push(Built { label: tag("h-bar"), space: sp, rank: r, constant: false });
                    rows += 1;
                }
                if theorem_hypothesis(Some(q), n, r, Theorem::Thm5) {
                    let want = theorem_dimension(n, r, Theorem::Thm5).map_err(|e| e.to_string())?;
                    let formula = if n == r + 1 { s * (s + 1) } else { s * (n - s - 1) };
                    ensure(want == formula, || tag("thm5 formula"))?;
                    let sp = constant_rank_family(&f, n, r).map_err(|e| e.to_string())?;
                    ensure(sp.dimension() == want, || format!("{}: {} vs {want}", tag("thm5"), sp.dimension()))?;
                    built.push(Built { label: tag("constant-rank"), space: sp, rank: r, constant: true });
                    rows += 1;
                }
            }
        }
    }
    Ok((built, rows))
}

fn criterion_dimension_table() -> Check {
    let (built, rows) = grid_families()?;
    Ok(format!("{rows} table rows, {} constructions, all dimensions equal the closed forms", built.len()))
}

fn criterion_rank_contracts() -> Check {
    let (built, _) = grid_families()?;
    let mut exhaustive = 0;
    let mut sampled = 0;
    for (i, b) in built.iter().enumerate() {
        let p = rank_profile(&b.space, EXHAUSTIVE_LIMIT, RANK_SAMPLES, SEED + i as u64).map_err(|e| e.to_string())?;
        let count = b.space.member_count();
        if count.is_some_and(|c| c <= EXHAUSTIVE_LIMIT) {
            ensure(p.is_exhaustive(), || format!("{}: expected exhaustive check", b.label))?;
            exhaustive += 1;
        } else {
            ensure(p.histogram.values().sum::<u64>() >= RANK_SAMPLES, || format!("{}: too few samples", b.label))?;
            sampled += 1;
        }
        let ok = if b.constant { p.min == b.rank && p.max == b.rank } else { p.min >= b.rank };
        ensure(ok && p.all_even(), || {
            format!("{}: ranks {}..={} against {} {}", b.label, p.min, p.max, if b.constant { "=" } else { ">=" }, b.rank)
        })?;
    }
    let m7 = build_m_tilde_alt(7, 2, &identity_plus_nt(&primes()[0], 2)).map_err(|e| e.to_string())?;
    let p = rank_profile(&m7, EXHAUSTIVE_LIMIT, RANK_SAMPLES, SEED).map_err(|e| e.to_string())?;
    ensure(p.histogram.get(&4) == Some(&6561) && p.histogram.len() == 1, || format!("{:?}", p.histogram))?;
    Ok(format!("{exhaustive} exhaustive, {sampled} sampled ({RANK_SAMPLES} each), zero violations"))
}

fn criterion_optimal_search() -> Check {
    let f = Fp::new(3).unwrap();
    let mut parts = Vec::new();
    for r in [4, 2] {
        let out = exhaustive_optimal_dimension(4, RankPredicate::ConstantRank(r), &f, 10_000_000).map_err(|e| e.to_string())?;
        ensure(out.max_dimension == Some(2), || format!("rank {r}: maximum {:?}", out.max_dimension))?;
        ensure(out.examined.len() == 4 && out.examined[2] > 0 && out.examined[3] > 0, || {
            format!("rank {r}: dimensions 2 and 3 not fully enumerated: {:?}", out.examined)
        })?;
        let w = out.witness.ok_or("missing witness")?;
        let p = rank_profile(&w, 100, 1, 0).map_err(|e| e.to_string())?;
        ensure(w.dimension() == 2 && p.min == r && p.max == r, || format!("rank {r}: bad witness"))?;
        parts.push(format!("rank {r}: max 2 ({} / {} subspaces of dim 2 / 3)", out.examined[2], out.examined[3]));
    }
    Ok(parts.join("; "))
}

fn random_elem<F: Field>(f: &F, rng: &mut ChaCha8Rng) -> F::Elem {
    let x = f.random(rng);
    if f.size().is_some() {
        x
    } else {
        f.div(&x, &f.from_i64(rng.random_range(1..=4))).unwrap()
    }
}

fn random_alternating<F: Field>(f: &F, n: usize, rng: &mut ChaCha8Rng) -> AlternatingMatrix<F> {
    let mut m = Matrix::zeros(f, n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = random_elem(f, rng);
            m.set(j, i, f.neg(&v));
            m.set(i, j, v);
        }
    }
    AlternatingMatrix::new(m).unwrap()
}

fn pfaffian_suite<F: Field>(f: &F, seed: u64) -> Result<(usize, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks = 0;
    for n in [2, 4, 6, 8] {
        for t in 0..1000 {
            let a = random_alternating(f, n, &mut rng);
            let pf = a.pfaffian();
            ensure(f.mul(&pf, &pf) == a.as_matrix().det(), || format!("{:?} n={n} #{t}: Pf^2 != det", f.ctx()))?;
            ensure(pfaffian_by_expansion(&a) == pf, || format!("{:?} n={n} #{t}: algorithms differ", f.ctx()))?;
            let rk = a.rank();
            ensure(rk % 2 == 0 && rk == a.as_matrix().rank(), || format!("{:?} n={n} #{t}: rank {rk}", f.ctx()))?;
            ranks += 1;
        }
    }
    for t in 0..200 {
        let n = [2, 4, 6, 8][t % 4];
        let a = random_alternating(f, n, &mut rng);
        let p = Matrix::from_fn(f, n, n, |_, _| random_elem(f, &mut rng));
        let lhs = a.congruent(&p).pfaffian();
        let rhs = f.mul(&p.det(), &a.pfaffian());
        ensure(lhs == rhs, || format!("{:?} pair #{t}: Pf(P^T A P) != det(P) Pf(A)", f.ctx()))?;
        let rk = a.congruent(&p).rank();
        ensure(rk % 2 == 0, || format!("{:?} pair #{t}: odd rank", f.ctx()))?;
        ranks += 1;
    }
    Ok((4000, ranks))
}

fn criterion_pfaffian() -> Check {
    let mut total = 0;
    let mut ranks = 0;
    for (i, f) in primes().iter().enumerate() {
        let (t, r) = pfaffian_suite(f, SEED + i as u64)?;
        total += t;
        ranks += r;
    }
    let (t, r) = pfaffian_suite(&Rationals, SEED + 3)?;
    total += t;
    ranks += r;
    Ok(format!("{total} matrices, 800 congruence pairs, {ranks} even ranks"))
}

/// `[K 0; 0 0]` base after moving the radical of the base point last.
fn normalize<F: Field>(sp: &AffineMatrixSpace<F>) -> (AffineMatrixSpace<F>, usize) {
    let f = sp.field();
    let n = sp.shape().0;
    let rad = sp.base().kernel_basis();
    let mut span = altrank_core::Span::new(f, n, rad.iter().cloned());
    let mut cols: Vec<Vec<F::Elem>> = (0..n).map(|i| standard_vector(f, n, i)).filter(|e| span.insert(e.clone())).collect();
    let r = cols.len();
    cols.extend(rad);
    let p = Matrix::from_columns(f, n, &cols).unwrap();
    (sp.congruence_act(&p).unwrap(), r)
}

fn criterion_moments() -> Check {
    let mut checked = 0;
    for (n, s, q) in [(5usize, 1usize, 5u64), (7, 2, 5), (8, 2, 7)] {
        let f = Fp::new(q).unwrap();
        let sp = build_m_tilde_alt(n, s, &identity_plus_nt(&f, s)).map_err(|e| e.to_string())?;
        let bad: Vec<String> = (0..200u64)
            .into_par_iter()
            .filter_map(|t| {
                let p0 = random_invertible(&f, n, SEED, t);
                let (norm, r) = normalize(&sp.congruence_act(&p0).unwrap());
                let base = norm.base();
                let k = base.block(0, 0, r, r);
                if r != 2 * s || !base.block(0, r, r, n - r).is_zero() || !base.block(r, r, n - r, n - r).is_zero() {
                    return Some(format!("(n={n}, s={s}, q={q}) trial {t}: base not in [K 0; 0 0] form"));
                }
                let kinv = k.inverse().unwrap();
                let kalt = AlternatingMatrix::new(k).unwrap();
                for (i, g) in norm.basis().iter().enumerate() {
                    let a = g.block(0, 0, r, r);
                    let b = g.block(0, r, r, n - r);
                    let d = g.block(r, r, n - r, n - r);
                    let mut cur = &b.transpose() * &kinv;
                    let step = &a * &kinv;
                    let mut ok = d.is_zero();
                    for _ in 0..r {
                        ok &= (&cur * &b).is_zero();
                        cur = &cur * &step;
                    }
                    let lib = alternating_moment_conclusions(&kalt, g).unwrap().all();
                    if !ok || !lib {
                        return Some(format!("(n={n}, s={s}, q={q}) trial {t} generator {i}"));
                    }
                }
                None
            })
            .collect();
        if let Some(first) = bad.first() {
            return Err(format!("{} violations, first {first}", bad.len()));
        }
        checked += 200 * sp.dimension();
    }
    Ok(format!("600 congruences, {checked} generators, zero violations"))
}

fn criterion_round_trip() -> Check {
    let mut parts = Vec::new();
    for (n, r, q) in [(7usize, 4usize, 5u64), (9, 6, 7)] {
        let s = r / 2;
        let f = Fp::new(q).unwrap();
        let planted = identity_plus_nt(&f, s);
        let planted_profile = rank_profile(&planted, EXHAUSTIVE_LIMIT, 1, 0).map_err(|e| e.to_string())?;
        let sp = build_m_tilde_alt(n, s, &planted).map_err(|e| e.to_string())?;
        let failures: Vec<String> = (0..50u64)
            .into_par_iter()
            .filter_map(|t| {
                let p0 = random_invertible(&f, n, SEED ^ 0xabc, t);
                let input = sp.congruence_act(&p0).unwrap();
                let cert = match reduce(&input, r) {
                    Ok(c) => c,
                    Err(e) => return Some(format!("trial {t}: {e}")),
                };
                if !cert.succeeded() {
                    return Some(format!("trial {t}: {:?}", cert.failure));
                }
                let m = cert.recovered_m.as_ref().unwrap();
                let p = cert.p.as_ref().unwrap();
                let target = build_m_tilde_alt(n, s, m).unwrap();
                if !input.congruence_act(p).unwrap().set_eq(&target) {
                    return Some(format!("trial {t}: independent set equality fails"));
                }
                if s <= 2 {
                    if brute_equivalence_test(m, &planted).unwrap().is_none() {
                        return Some(format!("trial {t}: recovered M not equivalent to the planted family"));
                    }
                } else {
                    let prof = rank_profile(m, EXHAUSTIVE_LIMIT, 1, 0).unwrap();
                    if m.dimension() != planted.dimension()
                        || !prof.is_exhaustive()
                        || prof.min != s
                        || prof.histogram != planted_profile.histogram
                    {
                        return Some(format!("trial {t}: recovered M invariants differ"));
                    }
                }
                None
            })
            .collect();
        if let Some(first) = failures.first() {
            return Err(format!("(n={n}, r={r}, q={q}): {}/50 failed, first {first}", failures.len()));
        }
        parts.push(format!("(n={n}, r={r}, q={q}) 50/50"));
    }
    Ok(parts.join("; "))
}

fn criterion_counterexample() -> Check {
    let q = Rationals;
    let pencil = counterexample_pencil(&q);
    let expected = [1, 1, 1, 0, 0, 0].map(|c| q.from_i64(c));
    ensure(pencil == expected, || format!("pencil coefficients {pencil:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..200 {
        let (x, y, z) = (random_elem(&q, &mut rng), random_elem(&q, &mut rng), random_elem(&q, &mut rng));
        let pf = counterexample_matrix(&q, &x, &y, &z).pfaffian();
        let direct = q.add(&q.add(&q.mul(&x, &x), &q.mul(&y, &y)), &q.mul(&z, &z));
        ensure(pf == direct, || "Pf(A(x,y,z)) != x^2 + y^2 + z^2".into())?;
    }
    let plane = build_counterexample_plane(&q);
    let samples = plane.sample(10_000, SEED).map_err(|e| e.to_string())?;
    let mut count = 0;
    for (coords, m) in samples {
        ensure(m.rank() == 4, || format!("member {coords:?} has rank {}", m.rank()))?;
        count += 1;
    }
    let cert = certify_plane_anisotropy().map_err(|e| e.to_string())?;
    ensure(cert.anisotropic && cert.coefficients == ["1", "0", "1"], || format!("{cert:?}"))?;

    let f3 = Fp::new(3).unwrap();
    let plane3 = build_counterexample_plane(&f3);
    let drop = plane3.enumerate(100).map_err(|e| e.to_string())?.find(|(_, m)| m.rank() < 4);
    let (_, m3) = drop.ok_or("no rank drop over F_3")?;
    ensure(m3 == counterexample_matrix(&f3, &1, &1, &1).into_matrix(), || format!("F_3 witness {m3:?}"))?;

    let f5 = Fp::new(5).unwrap();
    let g1 = counterexample_matrix(&f5, &1, &0, &0);
    let g2 = counterexample_matrix(&f5, &0, &1, &0);
    let w = isotropic_witness(&g1, &g2).map_err(|e| e.to_string())?;
    ensure(w == Some((1, 2)), || format!("F_5 witness {w:?}"))?;
    let a120 = counterexample_matrix(&f5, &1, &2, &0);
    ensure(a120.rank() == 2, || "A(1,2,0) mod 5 does not have rank 2".into())?;
    Ok(format!(
        "Pf = x^2 + y^2 + z^2, {count} rational members of rank 4, anisotropic, witnesses A(1,1,1) mod 3 and A(1,2,0) mod 5"
    ))
}

fn criterion_spectrum() -> Check {
    let mut nt_checked = 0;
    for q in [3u64, 5] {
        let f = Fp::new(q).unwrap();
        for n in 1..=5 {
            let nt = build_nt(&f, n);
            ensure(nt.dimension() == n * (n - 1) / 2, || format!("NT_{n} dimension"))?;
            let rep = trivial_spectrum_check(&nt, 10_000_000).map_err(|e| e.to_string())?;
            ensure(rep.holds, || format!("NT_{n} over F_{q}: eigenvalue witness {:?}", rep.witness))?;
            nt_checked += rep.members_checked;
        }
    }
    let mut blocks = 0;
    for q in [3u64, 5] {
        let f = Fp::new(q).unwrap();
        for n in 1..=3 {
            let pair = build_operator_block(n, &build_nt(&f, n)).map_err(|e| e.to_string())?;
            ensure(pair.dimension() == n * (n - 1), || format!("operator block n={n} dimension"))?;
            let k = pair.gram().as_matrix();
            for u in pair.operators().basis() {
                ensure((k * u).is_alternating(), || format!("operator block n={n}: K U not alternating"))?;
            }
            if q == 3 {
                let rep = trivial_spectrum_check(pair.operators(), 10_000_000).map_err(|e| e.to_string())?;
                ensure(rep.holds && rep.witness.is_none(), || format!("operator block n={n}: {:?}", rep.witness))?;
            }
            let dual = duality_invariant_check(&pair, SEED + n as u64).map_err(|e| e.to_string())?;
            ensure(dual, || format!("operator block n={n} over F_{q}: duality invariant fails"))?;
            blocks += 1;
        }
    }
    let f7 = Fp::new(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut agree = 0;
    let mut seen = [0; 2];
    for n in [4, 6] {
        for t in 0..100 {
            let k = loop {
                let k = random_alternating(&f7, n, &mut rng);
                if k.as_matrix().is_invertible() {
                    break k;
                }
            };
            let g = random_alternating(&f7, n, &mut rng);
            let (pencil, trivial) = pencil_symplectic_iff_trivial_spectrum(&k, &g).map_err(|e| e.to_string())?;
            ensure(pencil == trivial, || format!("size {n} pair #{t}: {pencil} vs {trivial}"))?;
            seen[usize::from(pencil)] += 1;
            agree += 1;
        }
    }
    Ok(format!(
        "NT_n (n <= 5, F_3/F_5) trivial, {nt_checked} projective members; {blocks} operator blocks; \
         {agree} pencil pairs agree ({} symplectic, {} not)",
        seen[1], seen[0]
    ))
}

fn main() {
    let minute = |m: u64| Some(Duration::from_secs(60 * m));
    let results = [
        run(1, "dimension-table", "exact", minute(1), criterion_dimension_table),
        run(2, "rank-contracts", "zero violations", minute(5), criterion_rank_contracts),
        run(3, "optimal-search-F3", "exact", minute(5), criterion_optimal_search),
        run(4, "pfaffian-suite", "exact", None, criterion_pfaffian),
        run(5, "moment-identities", "zero violations", None, criterion_moments),
        run(6, "reduction-round-trip", "50/50 per configuration", minute(10), criterion_round_trip),
        run(7, "counterexample", "exact", None, criterion_counterexample),
        run(8, "spectrum-and-duality", "zero violations", None, criterion_spectrum),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
