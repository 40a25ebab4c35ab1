//! Arrow relations, couples and their extensions, and a direct checker for
//! the two conditions that make a configuration separable.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::cc::{CoherentConfiguration, Point, Relation};
use crate::error::{Error, Result};

/// `α ← β` for the fixed point `μ`: `c_{xr}^y = 1` with
/// `x = r(μ,α)`, `r = r(α,β)`, `y = r(μ,β)`.
pub fn arrow(x: &CoherentConfiguration, mu: Point, a: Point, b: Point) -> bool {
    x.c(x.color(mu, a), x.color(a, b), x.color(mu, b)) == 1
}

/// The symmetrized arrow: `α ← β` or `β ← α`.
pub fn arrow_weak(x: &CoherentConfiguration, mu: Point, a: Point, b: Point) -> bool {
    arrow(x, mu, a, b) || arrow(x, mu, b, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Couple {
    pub x: Relation,
    pub y: Relation,
    pub z: Relation,
    pub r: Relation,
    pub s: Relation,
    pub t: Relation,
}

fn contains(sorted: &[Relation], r: Relation) -> bool {
    sorted.binary_search(&r).is_ok()
}

/// True iff two sorted relation lists meet exactly in `{r}`.
fn meet_is(a: &[Relation], b: &[Relation], r: Relation) -> bool {
    let (mut i, mut j, mut hits) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] != r {
                    return false;
                }
                hits += 1;
                i += 1;
                j += 1;
            }
        }
    }
    hits == 1
}

impl Couple {
    /// Checks `r ∈ x*y`, `s ∈ y*z`, `t ∈ z*x`.
    pub fn new(
        cc: &CoherentConfiguration,
        (x, y, z): (Relation, Relation, Relation),
        (r, s, t): (Relation, Relation, Relation),
    ) -> Result<Self> {
        for v in [x, y, z, r, s, t] {
            if v >= cc.rank() {
                return Err(Error::OutOfRange {
                    what: "relation",
                    value: v,
                    limit: cc.rank(),
                });
            }
        }
        let q = Self { x, y, z, r, s, t };
        if !q.is_valid(cc) {
            return Err(Error::InvalidArgument(format!("{q:?} is not a couple")));
        }
        Ok(q)
    }

    pub fn is_valid(&self, cc: &CoherentConfiguration) -> bool {
        let p = |a: Relation, b: Relation| cc.complex_product(cc.converse(a), b);
        contains(p(self.x, self.y), self.r)
            && contains(p(self.y, self.z), self.s)
            && contains(p(self.z, self.x), self.t)
    }
}

/// The couple `Q_μ(α, β, γ)`, of which `(α, β, γ)` is a μ-representation.
pub fn couple_at(cc: &CoherentConfiguration, mu: Point, a: Point, b: Point, g: Point) -> Couple {
    Couple {
        x: cc.color(mu, a),
        y: cc.color(mu, b),
        z: cc.color(mu, g),
        r: cc.color(a, b),
        s: cc.color(b, g),
        t: cc.color(g, a),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MExtension {
    pub m: Relation,
    pub triangle: (Relation, Relation, Relation),
}

/// The first `m`-extension of `q` with `m` ascending, then the triangle
/// ascending. With a base point `μ`, only relations with `μm ≠ ∅` are tried.
pub fn find_m_extension(cc: &CoherentConfiguration, q: &Couple, base: Option<Point>) -> Option<MExtension> {
    let p = |a: Relation, b: Relation| cc.complex_product(cc.converse(a), b);
    let (xy, yz, zx) = (p(q.x, q.y), p(q.y, q.z), p(q.z, q.x));
    for m in 0..cc.rank() {
        if let Some(mu) = base {
            if cc.source_fiber(m) != cc.fiber_of(mu) {
                continue;
            }
        }
        let mc = cc.converse(m);
        let (xs, ys, zs) = (
            cc.complex_product(mc, q.x),
            cc.complex_product(mc, q.y),
            cc.complex_product(mc, q.z),
        );
        for &xb in xs {
            for &yb in ys {
                if !meet_is(xy, p(xb, yb), q.r) {
                    continue;
                }
                for &zb in zs {
                    if meet_is(yz, p(yb, zb), q.s) && meet_is(zx, p(zb, xb), q.t) {
                        return Some(MExtension {
                            m,
                            triangle: (xb, yb, zb),
                        });
                    }
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict<W> {
    Holds,
    HoldsOnSample { sample_size: u64 },
    Fails { witness: W },
    Skipped { reason: String },
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Holds)
    }

    pub fn failed(&self) -> bool {
        matches!(self, Self::Fails { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConditionStats {
    pub delta_sets_checked: u64,
    pub triples_checked: u64,
    pub distinct_couples: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub mu: Point,
    pub delta_size: usize,
    pub condition_i: Verdict<Vec<Point>>,
    pub condition_ii: Verdict<(Point, Point, Point)>,
    pub stats: ConditionStats,
}

impl ConditionReport {
    /// Both conditions verified by full enumeration.
    pub fn fully_holds(&self) -> bool {
        self.condition_i.holds() && self.condition_ii.holds()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionOptions {
    /// Largest `|Δ|` in condition (i).
    pub delta_size: usize,
    /// Number of sets or triples drawn when enumeration is over budget.
    pub samples: u64,
    pub seed: u64,
}

impl Default for ConditionOptions {
    fn default() -> Self {
        Self {
            delta_size: 4,
            samples: 20_000,
            seed: 0,
        }
    }
}

/// Bitset of `λ` with `δ ← λ`, one per `δ`.
fn arrow_targets(cc: &CoherentConfiguration, mu: Point) -> Vec<Vec<u64>> {
    let n = cc.n();
    let words = n.div_ceil(64);
    (0..n)
        .into_par_iter()
        .map(|d| {
            let mut bits = vec![0u64; words];
            for l in 0..n {
                if arrow(cc, mu, d, l) {
                    bits[l / 64] |= 1 << (l % 64);
                }
            }
            bits
        })
        .collect()
}

fn has_common_target(targets: &[Vec<u64>], delta: &[Point]) -> bool {
    (0..targets[0].len()).any(|w| delta.iter().fold(u64::MAX, |acc, &d| acc & targets[d][w]) != 0)
}

/// Advances `comb` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in (0..k).rev() {
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn condition_i(
    cc: &CoherentConfiguration,
    mu: Point,
    full: bool,
    opts: &ConditionOptions,
    stats: &mut ConditionStats,
) -> Verdict<Vec<Point>> {
    let n = cc.n();
    let targets = arrow_targets(cc, mu);
    let max = opts.delta_size.min(n);
    if full {
        for k in 1..=max {
            let mut comb: Vec<usize> = (0..k).collect();
            loop {
                stats.delta_sets_checked += 1;
                if !has_common_target(&targets, &comb) {
                    return Verdict::Fails { witness: comb };
                }
                if !next_combination(&mut comb, n) {
                    break;
                }
            }
        }
        return Verdict::Holds;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let k = rng.gen_range(1..=max);
        let mut delta = sample(&mut rng, n, k).into_vec();
        delta.sort_unstable();
        stats.delta_sets_checked += 1;
        if !has_common_target(&targets, &delta) {
            return Verdict::Fails { witness: delta };
        }
    }
    Verdict::HoldsOnSample {
        sample_size: opts.samples,
    }
}

fn condition_ii(
    cc: &CoherentConfiguration,
    mu: Point,
    full: bool,
    opts: &ConditionOptions,
    stats: &mut ConditionStats,
) -> Verdict<(Point, Point, Point)> {
    let n = cc.n();
    let triples: Vec<(Point, Point, Point)> = if full {
        (0..n * n * n).map(|i| (i / (n * n), (i / n) % n, i % n)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
        (0..opts.samples)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect()
    };
    let mut index: HashMap<Couple, usize> = HashMap::new();
    let mut couples = Vec::new();
    let ids: Vec<usize> = triples
        .iter()
        .map(|&(a, b, g)| {
            let q = couple_at(cc, mu, a, b, g);
            *index.entry(q).or_insert_with(|| {
                couples.push(q);
                couples.len() - 1
            })
        })
        .collect();
    let ok: Vec<bool> = couples
        .par_iter()
        .map(|q| find_m_extension(cc, q, Some(mu)).is_some())
        .collect();
    stats.distinct_couples += couples.len() as u64;
    stats.triples_checked += triples.len() as u64;
    if let Some(pos) = ids.iter().position(|&i| !ok[i]) {
        return Verdict::Fails { witness: triples[pos] };
    }
    if full {
        Verdict::Holds
    } else {
        Verdict::HoldsOnSample {
            sample_size: opts.samples,
        }
    }
}

pub fn check_theorem_conditions(cc: &CoherentConfiguration, mu: Point, budget: &Budget) -> Result<ConditionReport> {
    check_theorem_conditions_with(cc, mu, budget, &ConditionOptions::default())
}

/// Verifies condition (i), every small `Δ` has a common `λ` with `Δ ← λ`,
/// and condition (ii), every couple `Q_μ(α,β,γ)` has an `m`-extension with
/// `μm ≠ ∅`. Exhaustive up to `budget.max_search_degree` points, sampled
/// beyond.
pub fn check_theorem_conditions_with(
    cc: &CoherentConfiguration,
    mu: Point,
    budget: &Budget,
    opts: &ConditionOptions,
) -> Result<ConditionReport> {
    if mu >= cc.n() {
        return Err(Error::OutOfRange {
            what: "base point",
            value: mu,
            limit: cc.n(),
        });
    }
    let full = cc.n() <= budget.max_search_degree;
    let mut stats = ConditionStats::default();
    let condition_i = condition_i(cc, mu, full, opts, &mut stats);
    let condition_ii = condition_ii(cc, mu, full, opts, &mut stats);
    Ok(ConditionReport {
        mu,
        delta_size: opts.delta_size,
        condition_i,
        condition_ii,
        stats,
    })
}

/// Checks that `x →_r y` forces `n_x ≤ n_y`, and that for `x` of maximal
/// valency, `α ← β` implies `β ← α` at every base point.
pub fn arrow_valency_monotone(cc: &CoherentConfiguration) -> bool {
    let monotone = cc
        .tensor()
        .entries()
        .all(|((x, _, y), c)| c != 1 || cc.valency(x) <= cc.valency(y));
    if !monotone {
        return false;
    }
    let kmax = cc.max_valency();
    let n = cc.n();
    (0..n).into_par_iter().all(|mu| {
        (0..n)
            .all(|a| cc.valency(cc.color(mu, a)) != kmax || (0..n).all(|b| !arrow(cc, mu, a, b) || arrow(cc, mu, b, a)))
    })
}
