use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use altrank_core::analyze::{duality_invariant_check, moment_identities_check, trivial_spectrum_check};
use altrank_core::families::{
    build_counterexample_plane, build_h_bar, build_nonsingular_alt, certify_plane_anisotropy, constant_rank_family,
    counterexample_matrix, counterexample_pencil, isotropic_witness, theorem_dimension, theorem_hypothesis, FamilySpec,
    Theorem,
};
use altrank_core::linalg::encode_vector;
use altrank_core::reduce::{reduce_with, ReduceOptions};
use altrank_core::spaces::{exhaustive_optimal_dimension, RankPredicate, SpaceJson};
use altrank_core::symplectic::phi_forms_to_operators;
use altrank_core::{rank_profile, with_field, AffineMatrixSpace, AlternatingMatrix, Field, FieldCtx, Fp, Rationals};

use crate::report::{CliError, CliResult};

/// Budget, sample and seed flags shared by every check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Limits {
    pub budget: u64,
    pub sample: u64,
    pub seed: u64,
}

/// `(passed, results)` of one subcommand.
pub type Outcome = (bool, Value);

pub fn read_space(input: &str) -> CliResult<SpaceJson> {
    let mut text = String::new();
    if input == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(input)?;
    }
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn rank_check<F: Field>(sp: &AffineMatrixSpace<F>, contract: Option<(usize, bool)>, limits: &Limits) -> CliResult<Outcome> {
    let f = sp.field();
    let p = rank_profile(sp, limits.budget, limits.sample, limits.seed)?;
    let passed = match contract {
        Some((r, true)) => p.min == r && p.max == r,
        Some((r, false)) => p.min >= r,
        None => p.min == p.max,
    };
    let mut out = json!({ "profile": p.to_json(f), "passed": passed });
    if let Some((r, constant)) = contract {
        out["contract"] = json!({ "rank": r, "kind": if constant { "constant" } else { "at-least" } });
    }
    if !passed {
        let witness = sp.member_at(&p.min_witness)?;
        out["witness"] = json!({
            "coordinates": encode_vector(f, &p.min_witness),
            "rank": p.min,
            "member": witness.to_json(),
        });
    }
    Ok((passed, out))
}

pub fn construct(ctx: FieldCtx, spec: &FamilySpec, limits: &Limits, out: Option<&Path>) -> CliResult<Outcome> {
    with_field!(ctx, f => {
        let sp = spec.build(&f)?;
        let expected = spec.expected_dimension();
        let dim_ok = sp.dimension() == expected;
        let mut results = json!({
            "family": spec,
            "shape": [sp.shape().0, sp.shape().1],
            "dimension": sp.dimension(),
            "expected_dimension": expected,
            "dimension_ok": dim_ok,
        });
        let mut passed = dim_ok;
        if let Some(contract) = spec.rank_contract() {
            let (ok, rank) = rank_check(&sp, Some(contract), limits)?;
            passed &= ok;
            results["rank"] = rank;
        }
        match out {
            Some(path) => {
                write_json(path, &sp.to_json())?;
                results["output"] = json!(path.display().to_string());
            }
            None => results["space"] = serde_json::to_value(sp.to_json())?,
        }
        Ok((passed, results))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    RankProfile,
    TrivialSpectrum,
    FlandersAtkinson,
    Duality,
}

pub fn verify(json: &SpaceJson, checks: &[CheckKind], contract: Option<(usize, bool)>, limits: &Limits) -> CliResult<Outcome> {
    let ctx = json.field_ctx()?;
    with_field!(ctx, f => {
        let sp = AffineMatrixSpace::from_json(&f, json)?;
        let mut passed = true;
        let mut results = serde_json::Map::new();
        results.insert("dimension".into(), json!(sp.dimension()));
        results.insert("shape".into(), json!([sp.shape().0, sp.shape().1]));
        for check in checks {
            let (ok, value) = match check {
                CheckKind::RankProfile => rank_check(&sp, contract, limits)?,
                CheckKind::TrivialSpectrum => spectrum(&sp, limits)?,
                CheckKind::FlandersAtkinson => {
                    let rep = moment_identities_check(&sp)?;
                    let mut value = serde_json::to_value(&rep)?;
                    value["holds"] = json!(rep.holds());
                    (rep.holds(), value)
                }
                CheckKind::Duality => duality(&sp, limits)?,
            };
            passed &= ok;
            let key = serde_json::to_value(check)?.as_str().unwrap_or_default().to_string();
            results.insert(key, value);
        }
        Ok((passed, Value::Object(results)))
    })
}

fn spectrum<F: Field>(sp: &AffineMatrixSpace<F>, limits: &Limits) -> CliResult<Outcome> {
    let f = sp.field();
    let rep = trivial_spectrum_check(sp, limits.budget)?;
    let mut out = json!({
        "holds": rep.holds,
        "method": { "kind": "exhaustive", "projective_members": rep.members_checked },
    });
    if let Some((coords, m, lambda)) = &rep.witness {
        out["witness"] = json!({
            "coordinates": encode_vector(f, coords),
            "member": m.to_json(),
            "eigenvalue": f.format(lambda),
        });
    }
    Ok((rep.holds, out))
}

fn duality<F: Field>(sp: &AffineMatrixSpace<F>, limits: &Limits) -> CliResult<Outcome> {
    let k = AlternatingMatrix::new(sp.base().clone())?;
    if k.rank() < k.size() {
        return Err(CliError::Usage("the duality check needs a space K + V with a nonsingular base form K".into()));
    }
    let pair = phi_forms_to_operators(&k, sp)?;
    let ok = duality_invariant_check(&pair, limits.seed)?;
    Ok((ok, json!({ "holds": ok, "operators": pair.dimension(), "seed": limits.seed })))
}

pub fn reduce(json: &SpaceJson, r: usize, limits: &Limits, out: Option<&Path>) -> CliResult<Outcome> {
    let ctx = json.field_ctx()?;
    with_field!(ctx, f => {
        let sp = AffineMatrixSpace::from_json(&f, json)?;
        let opts = ReduceOptions {
            budget: limits.budget,
            samples: limits.sample,
            seed: limits.seed,
            assume_constant_rank: false,
        };
        let cert = reduce_with(&sp, r, &opts)?;
        let value = cert.to_json(&f);
        let passed = cert.succeeded();
        let results = match out {
            Some(path) => {
                write_json(path, &value)?;
                json!({ "succeeded": passed, "verdicts": value["verdicts"], "output": path.display().to_string() })
            }
            None => json!({ "succeeded": passed, "certificate": value }),
        };
        Ok((passed, results))
    })
}

/// One row of the dimension table.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub r: usize,
    pub field: String,
    pub theorem: Theorem,
    pub formula: usize,
    pub constructed: usize,
    pub hypothesis: bool,
    pub rank_ok: bool,
    pub method: String,
}

impl TableRow {
    pub fn agrees(&self) -> bool {
        self.formula == self.constructed && self.rank_ok
    }

    pub fn tsv_header() -> &'static str {
        "n\tr\tfield\ttheorem\tformula\tconstructed\thypothesis\trank_ok\tmethod"
    }

    pub fn tsv(&self) -> String {
        let theorem = serde_json::to_value(self.theorem).ok();
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.n,
            self.r,
            self.field,
            theorem.as_ref().and_then(Value::as_str).unwrap_or("?"),
            self.formula,
            self.constructed,
            self.hypothesis,
            self.rank_ok,
            self.method
        )
    }
}

fn table_row<F: Field>(f: &F, n: usize, r: usize, which: Theorem, limits: &Limits) -> CliResult<TableRow> {
    let s = r / 2;
    let (sp, contract) = match which {
        Theorem::Thm3 => (build_nonsingular_alt(f, s), (r, true)),
        Theorem::Thm4 => (build_h_bar(n, &build_nonsingular_alt(f, s))?, (r, false)),
        Theorem::Thm5 => (constant_rank_family(f, n, r)?, (r, true)),
    };
    let (rank_ok, profile) = rank_check(&sp, Some(contract), limits)?;
    let method = match profile["profile"]["method"]["kind"].as_str() {
        Some("exhaustive") => format!("exhaustive:{}", profile["profile"]["method"]["members"]),
        _ => format!("sampled:{}:seed={}", limits.sample, limits.seed),
    };
    Ok(TableRow {
        n,
        r,
        field: f.ctx().to_string(),
        theorem: which,
        formula: theorem_dimension(n, r, which)?,
        constructed: sp.dimension(),
        hypothesis: theorem_hypothesis(f.size(), n, r, which),
        rank_ok,
        method,
    })
}

pub fn table(ns: &[usize], rs: &[usize], fields: &[FieldCtx], limits: &Limits) -> CliResult<Vec<TableRow>> {
    let mut keys = Vec::new();
    for &ctx in fields {
        for &r in rs {
            if r == 0 || r % 2 != 0 {
                return Err(CliError::Usage(format!("r = {r} must be positive and even")));
            }
            for &n in ns.iter().filter(|&&n| n >= r) {
                if n == r {
                    keys.push((ctx, n, r, Theorem::Thm3));
                }
                keys.push((ctx, n, r, Theorem::Thm4));
                keys.push((ctx, n, r, Theorem::Thm5));
            }
        }
    }
    keys.into_par_iter()
        .map(|(ctx, n, r, which)| with_field!(ctx, f => table_row(&f, n, r, which, limits)))
        .collect()
}

pub fn optimal_search(n: usize, predicate: RankPredicate, field: &Fp, budget: u64, expect: Option<usize>) -> CliResult<Outcome> {
    let out = exhaustive_optimal_dimension(n, predicate, field, budget)?;
    let passed = expect.is_none_or(|e| out.max_dimension == Some(e));
    Ok((
        passed,
        json!({
            "max_dimension": out.max_dimension,
            "examined_per_dimension": out.examined,
            "witness": out.witness.as_ref().map(AffineMatrixSpace::to_json),
            "expected": expect,
        }),
    ))
}

pub fn counterexample(samples: u64, seed: u64) -> CliResult<Outcome> {
    let q = Rationals;
    let pencil = counterexample_pencil(&q);
    let names = ["x^2", "y^2", "z^2", "xy", "xz", "yz"];
    let coefficients: BTreeMap<&str, String> = names.iter().zip(&pencil).map(|(n, c)| (*n, q.format(c))).collect();
    let pencil_ok = pencil == [1, 1, 1, 0, 0, 0].map(|c| q.from_i64(c));

    let plane = build_counterexample_plane(&q);
    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    for (_, m) in plane.sample(samples, seed)? {
        *histogram.entry(m.rank()).or_insert(0) += 1;
    }
    let sampled_ok = histogram.keys().all(|&r| r == 4);
    let cert = certify_plane_anisotropy()?;

    let f3 = Fp::new(3)?;
    let drop = build_counterexample_plane(&f3)
        .enumerate(100)?
        .find(|(_, m)| m.rank() < 4)
        .map(|(coords, m)| json!({ "coordinates": coords, "member": m.to_json(), "rank": m.rank() }));
    let expected3 = counterexample_matrix(&f3, &1, &1, &1).into_matrix().to_json();
    let f3_ok = drop.as_ref().is_some_and(|d| d["member"] == serde_json::to_value(&expected3).unwrap_or_default());

    let f5 = Fp::new(5)?;
    let w5 = isotropic_witness(&counterexample_matrix(&f5, &1, &0, &0), &counterexample_matrix(&f5, &0, &1, &0))?;
    let rank5 = w5.map(|(x, y)| counterexample_matrix(&f5, &x, &y, &0).rank());
    let f5_ok = w5 == Some((1, 2)) && rank5 == Some(2);

    let passed = pencil_ok && sampled_ok && cert.anisotropic && f3_ok && f5_ok;
    Ok((
        passed,
        json!({
            "pfaffian_coefficients": coefficients,
            "pencil_is_sum_of_squares": pencil_ok,
            "rational_samples": { "count": samples, "seed": seed, "rank_histogram": histogram, "all_rank_4": sampled_ok },
            "anisotropy_certificate": cert,
            "f3_rank_drop": drop,
            "f3_witness_ok": f3_ok,
            "f5_translation_witness": w5.map(|(x, y)| [x, y]),
            "f5_witness_rank": rank5,
            "f5_witness_ok": f5_ok,
        }),
    ))
}
