//! Exhaustive search for the largest affine subspace of `n x n` alternating
//! matrices over a small prime field whose members all satisfy a rank
//! predicate.
//!
//! Members are coordinate vectors in `F_q^N`, `N = n(n-1)/2`, indexed in
//! base `q`. A rank table over all `q^N` vectors is built once. Linear
//! subspaces are enumerated by their reduced echelon bases and cosets by
//! representatives supported off the pivot positions, so every affine
//! subspace is visited exactly once. Both predicates are inherited by
//! subspaces, so the search stops at the first dimension with no witness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AffineMatrixSpace;
use crate::error::{Error, Result};
use crate::exactfield::{Field, Fp};
use crate::linalg::{rank_in_place, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "predicate", content = "rank")]
pub enum RankPredicate {
    ConstantRank(usize),
    RankAtLeast(usize),
}

impl RankPredicate {
    pub fn holds(&self, rank: usize) -> bool {
        match *self {
            RankPredicate::ConstantRank(r) => rank == r,
            RankPredicate::RankAtLeast(r) => rank >= r,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimalSearch {
    /// `None` when not even a single matrix satisfies the predicate.
    pub max_dimension: Option<usize>,
    pub witness: Option<AffineMatrixSpace<Fp>>,
    /// Affine subspaces examined, per dimension tried.
    pub examined: Vec<u64>,
}

pub fn exhaustive_optimal_dimension(
    n: usize,
    predicate: RankPredicate,
    field: &Fp,
    budget: u64,
) -> Result<OptimalSearch> {
    let q = u64::from(field.modulus());
    let big_n = n * n.saturating_sub(1) / 2;
    let points = q
        .checked_pow(big_n as u32)
        .filter(|&p| p <= budget)
        .ok_or_else(|| Error::BudgetExceeded {
            required: format!("{q}^{big_n} rank table entries"),
            budget,
        })?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let ok = rank_table(field, n, &pairs, points, predicate);
    let ctx = Ctx {
        q: q as u32,
        big_n,
        ok: &ok,
    };

    let mut best: Option<(usize, Vec<Vec<u32>>, Vec<u32>)> = None;
    let mut examined = Vec::new();
    for d in 0..=big_n {
        let work = ctx.work(d);
        if work.saturating_mul(points) > budget.saturating_mul(1000) {
            return Err(Error::BudgetExceeded {
                required: format!("{work} subspaces of dimension {d}"),
                budget,
            });
        }
        examined.push(work);
        match ctx.find(d) {
            Some((rows, coset)) => best = Some((d, rows, coset)),
            None => break,
        }
    }
    let Some((d, rows, coset)) = best else {
        return Ok(OptimalSearch {
            max_dimension: None,
            witness: None,
            examined,
        });
    };
    let to_matrix = |v: &[u32]| {
        let mut m = Matrix::zeros(field, n, n);
        for (&(i, j), &c) in pairs.iter().zip(v) {
            m.set(i, j, c);
            m.set(j, i, field.neg(&c));
        }
        m
    };
    let witness = AffineMatrixSpace::new_alternating(to_matrix(&coset), rows.iter().map(|r| to_matrix(r)).collect())?;
    Ok(OptimalSearch {
        max_dimension: Some(d),
        witness: Some(witness),
        examined,
    })
}

fn rank_table(field: &Fp, n: usize, pairs: &[(usize, usize)], points: u64, pred: RankPredicate) -> Vec<bool> {
    let q = u64::from(field.modulus());
    (0..points)
        .into_par_iter()
        .map_init(
            || vec![0u32; n * n],
            |buf, mut idx| {
                buf.iter_mut().for_each(|x| *x = 0);
                for &(i, j) in pairs.iter().rev() {
                    let c = (idx % q) as u32;
                    idx /= q;
                    buf[i * n + j] = c;
                    buf[j * n + i] = field.neg(&c);
                }
                pred.holds(rank_in_place(field, buf, n, n))
            },
        )
        .collect()
}

struct Ctx<'a> {
    q: u32,
    big_n: usize,
    ok: &'a [bool],
}

impl Ctx<'_> {
    fn index(&self, v: &[u32]) -> usize {
        v.iter().fold(0usize, |acc, &c| acc * self.q as usize + c as usize)
    }

    /// Number of affine subspaces of dimension `d`.
    fn work(&self, d: usize) -> u64 {
        combinations(self.big_n, d)
            .iter()
            .map(|piv| {
                let free = free_slots(piv, self.big_n);
                (self.q as u64).pow(free as u32 + (self.big_n - d) as u32)
            })
            .sum()
    }

    /// First affine subspace of dimension `d` (in pivot, echelon, coset
    /// order) whose members all pass; returns echelon rows and coset point.
    fn find(&self, d: usize) -> Option<(Vec<Vec<u32>>, Vec<u32>)> {
        combinations(self.big_n, d)
            .into_par_iter()
            .find_map_first(|piv| self.find_with_pivots(&piv))
    }

    fn find_with_pivots(&self, piv: &[usize]) -> Option<(Vec<Vec<u32>>, Vec<u32>)> {
        let n = self.big_n;
        let d = piv.len();
        // free entries of row k: non-pivot columns after piv[k]
        let slots: Vec<Vec<usize>> = piv
            .iter()
            .map(|&p| (p + 1..n).filter(|c| !piv.contains(c)).collect())
            .collect();
        let total_free: usize = slots.iter().map(Vec::len).sum();
        let non_pivot: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
        let mut free = vec![0u32; total_free];
        loop {
            let mut rows = vec![vec![0u32; n]; d];
            let mut k = 0;
            for (r, cols) in slots.iter().enumerate() {
                rows[r][piv[r]] = 1;
                for &c in cols {
                    rows[r][c] = free[k];
                    k += 1;
                }
            }
            let mut coset = vec![0u32; non_pivot.len()];
            loop {
                let mut point = vec![0u32; n];
                for (&c, &v) in non_pivot.iter().zip(&coset) {
                    point[c] = v;
                }
                if self.ok[self.index(&point)] && self.all_members_ok(&point, &rows) {
                    return Some((rows, point));
                }
                if !odometer(&mut coset, self.q) {
                    break;
                }
            }
            if !odometer(&mut free, self.q) {
                return None;
            }
        }
    }

    fn all_members_ok(&self, point: &[u32], rows: &[Vec<u32>]) -> bool {
        let q = self.q;
        let mut coeffs = vec![0u32; rows.len()];
        let mut v = point.to_vec();
        while odometer_with(&mut coeffs, q, |j, delta| {
            for (x, r) in v.iter_mut().zip(&rows[j]) {
                *x = ((*x as u64 + delta as u64 * *r as u64) % q as u64) as u32;
            }
        }) {
            if !self.ok[self.index(&v)] {
                return false;
            }
        }
        true
    }
}

/// Increments a base-`q` counter (last digit fastest); `false` on wrap.
fn odometer(digits: &mut [u32], q: u32) -> bool {
    odometer_with(digits, q, |_, _| {})
}

/// As [`odometer`], reporting each digit change as `(position, delta mod q)`.
fn odometer_with(digits: &mut [u32], q: u32, mut changed: impl FnMut(usize, u32)) -> bool {
    for j in (0..digits.len()).rev() {
        if digits[j] + 1 < q {
            digits[j] += 1;
            changed(j, 1);
            return true;
        }
        digits[j] = 0;
        changed(j, 1);
    }
    false
}

fn free_slots(piv: &[usize], n: usize) -> usize {
    piv.iter()
        .map(|&p| (p + 1..n).filter(|c| !piv.contains(c)).count())
        .sum()
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
