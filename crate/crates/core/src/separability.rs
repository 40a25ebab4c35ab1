//! Sufficient conditions for separability and the tables derived from them.

use std::collections::BTreeMap;
use std::fmt::Display;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, Zero};
use serde::{Serialize, Serializer};

use crate::budget::Budget;
use crate::builders::{c_scheme_with_budget, cyclotomic_with_budget, PaleyKind};
use crate::cc::CoherentConfiguration;
use crate::closure::{is_fission, point_extension};
use crate::couples::{check_theorem_conditions, ConditionReport};
use crate::error::{Error, FieldError, Result};
use crate::gf::{is_prime, prime_power, FieldElement, FiniteField};

/// Exact unsigned integers the inequalities can be evaluated in.
pub trait ExactInt: Clone + Ord + Display + Zero + One + CheckedAdd + CheckedMul + CheckedSub + FromPrimitive {}

impl<T> ExactInt for T where T: Clone + Ord + Display + Zero + One + CheckedAdd + CheckedMul + CheckedSub + FromPrimitive
{}

pub(crate) fn as_string<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn overflow(p: u64, d: u32) -> Error {
    FieldError::Overflow { p, d }.into()
}

fn checked_pow<T: ExactInt>(base: u64, exp: u32) -> Option<T> {
    let b = T::from_u64(base)?;
    (0..exp).try_fold(T::one(), |acc, _| acc.checked_mul(&b))
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(FieldError::NotPrime(p).into())
    }
}

/// `Σ_{i=1}^{d-1} (p^gcd(i,d) - 1)`, the bound on the indistinguishing
/// number of `C(p^d)`.
pub fn c_bound_in<T: ExactInt>(p: u64, d: u32) -> Result<T> {
    check_prime(p)?;
    let mut sum = T::zero();
    for i in 1..d {
        let term = checked_pow::<T>(p, i.gcd(&d))
            .and_then(|v| v.checked_sub(&T::one()))
            .ok_or_else(|| overflow(p, d))?;
        sum = sum.checked_add(&term).ok_or_else(|| overflow(p, d))?;
    }
    Ok(sum)
}

pub fn c_bound(p: u64, d: u32) -> Result<BigUint> {
    c_bound_in(p, d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityOutcome<T: Display> {
    pub p: u64,
    pub d: u32,
    #[serde(serialize_with = "as_string")]
    pub lhs: T,
    #[serde(serialize_with = "as_string")]
    pub rhs: T,
    pub holds: bool,
}

/// `3 · c_bound(p, d) · (d - 1) · d < p^d - 1`.
pub fn field_inequality_in<T: ExactInt>(p: u64, d: u32) -> Result<InequalityOutcome<T>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "the field inequality needs d >= 2, got {d}"
        )));
    }
    let c = c_bound_in::<T>(p, d)?;
    let factor = T::from_u64(3 * (d as u64 - 1) * d as u64).ok_or_else(|| overflow(p, d))?;
    let lhs = c.checked_mul(&factor).ok_or_else(|| overflow(p, d))?;
    let rhs = checked_pow::<T>(p, d)
        .and_then(|v| v.checked_sub(&T::one()))
        .ok_or_else(|| overflow(p, d))?;
    let holds = lhs < rhs;
    Ok(InequalityOutcome { p, d, lhs, rhs, holds })
}

pub fn field_inequality(p: u64, d: u32) -> Result<InequalityOutcome<BigUint>> {
    field_inequality_in(p, d)
}

/// True iff `d >= 2` and the field inequality fails.
pub fn is_exceptional(p: u64, d: u32) -> Result<bool> {
    Ok(d >= 2 && !field_inequality(p, d)?.holds)
}

pub const EXCEPTIONAL_PRIME_LIMIT: u64 = 23;
pub const EXCEPTIONAL_DEGREE_RANGE: std::ops::RangeInclusive<u32> = 2..=33;

pub type ExceptionalPair = InequalityOutcome<BigUint>;

/// Every `(p, d)` with `p ≤ 23` and `2 ≤ d ≤ 33` where the field inequality
/// fails, sorted.
pub fn exceptional_pairs() -> Vec<ExceptionalPair> {
    (2..=EXCEPTIONAL_PRIME_LIMIT)
        .filter(|&p| is_prime(p))
        .flat_map(|p| EXCEPTIONAL_DEGREE_RANGE.map(move |d| field_inequality(p, d).expect("p is prime")))
        .filter(|o| !o.holds)
        .collect()
}

/// Pairs whose schemes `C(p^d)` were settled by direct computation.
pub const COMPUTATIONALLY_SETTLED: [(u64, u32); 7] = [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (5, 2)];

/// Published table of degrees for which 2-separability stays open.
pub const PUBLISHED_OPEN_DEGREES: [(u64, &[u32]); 3] = [
    (5, &[4, 5, 6]),
    (3, &[4, 5, 6, 8, 10]),
    (2, &[6, 7, 8, 9, 10, 11, 12, 14, 15, 16, 18, 20]),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpenDegreeRow {
    pub p: u64,
    pub published: Vec<u32>,
    pub derived: Vec<u32>,
    pub consistent: bool,
}

/// Compares the published open-degree table with the exceptional pairs minus
/// the computationally settled ones.
pub fn open_degree_rows() -> Vec<OpenDegreeRow> {
    let mut derived: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for e in exceptional_pairs() {
        if !COMPUTATIONALLY_SETTLED.contains(&(e.p, e.d)) {
            derived.entry(e.p).or_default().push(e.d);
        }
    }
    let mut rows: Vec<OpenDegreeRow> = PUBLISHED_OPEN_DEGREES
        .iter()
        .map(|&(p, published)| {
            let d = derived.remove(&p).unwrap_or_default();
            OpenDegreeRow {
                p,
                consistent: d == published,
                published: published.to_vec(),
                derived: d,
            }
        })
        .collect();
    rows.extend(derived.into_iter().map(|(p, d)| OpenDegreeRow {
        p,
        published: Vec::new(),
        derived: d,
        consistent: false,
    }));
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    SeparableCertified,
    FissionSeparableCertified,
    Inconclusive,
}

impl Conclusion {
    pub fn certifies_separability(self) -> bool {
        self != Self::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeInequality {
    #[serde(serialize_with = "as_string")]
    pub lhs: BigUint,
    #[serde(serialize_with = "as_string")]
    pub rhs: BigUint,
    #[serde(serialize_with = "as_string")]
    pub margin: BigInt,
    pub holds: bool,
}

/// `n > 3c(k - 1)k`.
pub fn degree_inequality(n: usize, k: usize, c: usize) -> DegreeInequality {
    let lhs = BigUint::from(3u32) * BigUint::from(c) * BigUint::from(k.saturating_sub(1)) * BigUint::from(k);
    let rhs = BigUint::from(n);
    let margin = BigInt::from(rhs.clone()) - BigInt::from(lhs.clone());
    DegreeInequality {
        holds: rhs > lhs,
        lhs,
        rhs,
        margin,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub k: usize,
    pub c: usize,
    pub inequality: DegreeInequality,
    pub condition_report: Option<ConditionReport>,
    pub conclusion: Conclusion,
}

/// Degree, maximal valency and indistinguishing number, with the verdict
/// they support. `deep` also runs the direct condition checker at point 0.
pub fn analyze(x: &CoherentConfiguration, deep: bool, budget: &Budget) -> AnalysisReport {
    let (n, k) = (x.n(), x.max_valency());
    let c = x.max_indistinguishing().unwrap_or(0);
    let inequality = degree_inequality(n, k, c);
    let condition_report = deep.then(|| check_theorem_conditions(x, 0, budget).expect("point 0 exists"));
    let conclusion = if inequality.holds {
        Conclusion::FissionSeparableCertified
    } else if condition_report.as_ref().is_some_and(ConditionReport::fully_holds) {
        Conclusion::SeparableCertified
    } else {
        Conclusion::Inconclusive
    };
    AnalysisReport {
        n,
        k,
        c,
        inequality,
        condition_report,
        conclusion,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoSeparability {
    TwoSeparableCertified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoSeparabilityReport {
    pub p: u64,
    pub d: u32,
    pub index: u64,
    pub rank: usize,
    pub extension_rank: usize,
    pub restricted_rank: usize,
    pub restricted_is_fission_of_c_scheme: bool,
    pub exceptional: bool,
    pub restricted_analysis: AnalysisReport,
    pub conclusion: TwoSeparability,
    pub needs_small_case_check: bool,
}

/// The cyclotomic scheme of `m`, its extension at `0_F`, and the
/// restriction of that extension to `F^×`, compared against `C(F)`.
pub fn two_separability_report(
    field: &FiniteField,
    m: &[FieldElement],
    budget: &Budget,
) -> Result<TwoSeparabilityReport> {
    let x = cyclotomic_with_budget(field, m, budget)?;
    let index = (field.order() - 1) / m.len() as u64;
    let ext = point_extension(&x, 0)?;
    let restricted = ext.restrict_at_singleton(0)?;
    let c = c_scheme_with_budget(field, budget)?;
    let fission = is_fission(&restricted, &c)?;
    let exceptional = is_exceptional(field.p(), field.d())?;
    let analysis = analyze(&restricted, false, budget);
    let certified = !exceptional || analysis.conclusion.certifies_separability();
    Ok(TwoSeparabilityReport {
        p: field.p(),
        d: field.d(),
        index,
        rank: x.rank(),
        extension_rank: ext.rank(),
        restricted_rank: restricted.rank(),
        restricted_is_fission_of_c_scheme: fission,
        exceptional,
        restricted_analysis: analysis,
        conclusion: if certified {
            TwoSeparability::TwoSeparableCertified
        } else {
            TwoSeparability::Inconclusive
        },
        needs_small_case_check: !certified,
    })
}

/// Orders listed as exceptions in the published WL-dimension bound.
pub const PUBLISHED_PALEY_GRAPH_EXCEPTIONS: [u64; 6] = [81, 729, 6561, 59049, 625, 15625];
pub const PUBLISHED_PALEY_TOURNAMENT_EXCEPTIONS: [u64; 1] = [243];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaleyBoundReport {
    pub q: u64,
    pub p: u64,
    pub d: u32,
    pub kind: PaleyKind,
    /// `Some(3)` when the bound applies, `None` when unknown.
    pub bound: Option<u32>,
    pub computed_exception: bool,
    pub published_exception: bool,
    pub flags: Vec<String>,
}

/// Paley orders whose `(p, d)` is exceptional for odd `p` and not settled by
/// computation.
pub fn paley_exceptions() -> Vec<(u64, u32)> {
    exceptional_pairs()
        .into_iter()
        .filter(|e| e.p % 2 == 1 && !COMPUTATIONALLY_SETTLED.contains(&(e.p, e.d)))
        .map(|e| (e.p, e.d))
        .collect()
}

/// Upper bound 3 on the WL-dimension of the Paley graph or tournament on
/// `q` vertices, unless `(p, d)` is a computed exception.
pub fn paley_wl_bound(q: u64, kind: Option<PaleyKind>) -> Result<PaleyBoundReport> {
    let (p, d) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
    let natural = PaleyKind::for_order(q)
        .ok_or_else(|| Error::InvalidArgument(format!("q = {q} is even; Paley structures need odd q")))?;
    if let Some(k) = kind {
        if k != natural {
            return Err(Error::InvalidArgument(format!(
                "q = {q} is {} mod 4 and only admits a Paley {natural:?}",
                q % 4
            )));
        }
    }
    let computed_exception = paley_exceptions().contains(&(p, d))
        || (d > 1 && {
            let out_of_range = p > EXCEPTIONAL_PRIME_LIMIT || !EXCEPTIONAL_DEGREE_RANGE.contains(&d);
            out_of_range && is_exceptional(p, d)? && !COMPUTATIONALLY_SETTLED.contains(&(p, d))
        });
    let published_exception = match natural {
        PaleyKind::Graph => PUBLISHED_PALEY_GRAPH_EXCEPTIONS.contains(&q),
        PaleyKind::Tournament => PUBLISHED_PALEY_TOURNAMENT_EXCEPTIONS.contains(&q),
    };
    let mut flags = Vec::new();
    if computed_exception && !published_exception {
        flags.push(format!(
            "inconsistent: ({p},{d}) fails the field inequality but {q} is not among the published exceptions"
        ));
    }
    if published_exception && !computed_exception {
        flags.push(format!(
            "inconsistent: {q} is a published exception but ({p},{d}) satisfies the field inequality"
        ));
    }
    Ok(PaleyBoundReport {
        q,
        p,
        d,
        kind: natural,
        bound: (!computed_exception).then_some(3),
        computed_exception,
        published_exception,
        flags,
    })
}
