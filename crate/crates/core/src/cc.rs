//! The coherent-configuration data model.
//!
//! A configuration is held as a dense `n x n` matrix of relation indices.
//! Relation indices are canonical: reflexive relations come first, ordered by
//! their least point, followed by irreflexive relations ordered by their
//! lexicographically least pair. Two configurations with the same partition
//! of `Ω x Ω` therefore have identical matrices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{AxiomError, Error, Result};

pub type Point = usize;
pub type Relation = usize;

/// Dense intersection arrays are kept for ranks up to this bound.
const DENSE_RANK_LIMIT: usize = 160;

/// A validated coherent configuration `(Ω, S)`.
pub struct CoherentConfiguration {
    n: usize,
    rank: usize,
    colors: Vec<u32>,
    converse: Vec<Relation>,
    reflexive: Vec<bool>,
    valency: Vec<usize>,
    representative: Vec<(Point, Point)>,
    fibers: Vec<Vec<Point>>,
    fiber_of: Vec<usize>,
    source_fiber: Vec<usize>,
    target_fiber: Vec<usize>,
    tensor: OnceLock<IntersectionTensor>,
}

impl Clone for CoherentConfiguration {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            rank: self.rank,
            colors: self.colors.clone(),
            converse: self.converse.clone(),
            reflexive: self.reflexive.clone(),
            valency: self.valency.clone(),
            representative: self.representative.clone(),
            fibers: self.fibers.clone(),
            fiber_of: self.fiber_of.clone(),
            source_fiber: self.source_fiber.clone(),
            target_fiber: self.target_fiber.clone(),
            tensor: OnceLock::new(),
        }
    }
}

impl PartialEq for CoherentConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.colors == other.colors
    }
}

impl Eq for CoherentConfiguration {}

impl fmt::Debug for CoherentConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoherentConfiguration")
            .field("n", &self.n)
            .field("rank", &self.rank)
            .field("valency", &self.valency)
            .finish()
    }
}

/// Per-pair counts of `(r(α,γ), r(γ,β))` for a fixed pair `(α, β)`.
struct PairCounter {
    rank: usize,
    dense: Option<Vec<u32>>,
    sparse: HashMap<u64, u32>,
    touched: Vec<u64>,
}

impl PairCounter {
    fn new(rank: usize) -> Self {
        let dense = (rank * rank <= 1 << 20).then(|| vec![0u32; rank * rank]);
        Self {
            rank,
            dense,
            sparse: HashMap::new(),
            touched: Vec::new(),
        }
    }

    fn count(&mut self, colors: &[u32], n: usize, a: Point, b: Point) {
        self.clear();
        for g in 0..n {
            let key = colors[a * n + g] as u64 * self.rank as u64 + colors[g * n + b] as u64;
            match &mut self.dense {
                Some(d) => {
                    let slot = &mut d[key as usize];
                    if *slot == 0 {
                        self.touched.push(key);
                    }
                    *slot += 1;
                }
                None => {
                    let slot = self.sparse.entry(key).or_insert(0);
                    if *slot == 0 {
                        self.touched.push(key);
                    }
                    *slot += 1;
                }
            }
        }
    }

    fn get(&self, key: u64) -> u32 {
        match &self.dense {
            Some(d) => d[key as usize],
            None => self.sparse.get(&key).copied().unwrap_or(0),
        }
    }

    fn clear(&mut self) {
        if let Some(d) = &mut self.dense {
            for &k in &self.touched {
                d[k as usize] = 0;
            }
        } else {
            self.sparse.clear();
        }
        self.touched.clear();
    }

    fn profile(&self) -> Vec<(u64, u32)> {
        let mut v: Vec<(u64, u32)> = self.touched.iter().map(|&k| (k, self.get(k))).collect();
        v.sort_unstable();
        v
    }
}

fn first_occurrences(colors: &[u32], n: usize, rank: usize) -> Vec<(Point, Point)> {
    let mut rep = vec![(usize::MAX, usize::MAX); rank];
    for (i, &c) in colors.iter().enumerate() {
        let slot = &mut rep[c as usize];
        if slot.0 == usize::MAX {
            *slot = (i / n, i % n);
        }
    }
    rep
}

/// Checks every axiom against the given (not necessarily canonical) labels.
fn check_axioms(colors: &[u32], n: usize, rank: usize) -> std::result::Result<(), AxiomError> {
    // 1_Ω must be a union of relations.
    let mut on_diagonal = vec![None; rank];
    for a in 0..n {
        on_diagonal[colors[a * n + a] as usize].get_or_insert(a);
    }
    for a in 0..n {
        for b in 0..n {
            let c = colors[a * n + b] as usize;
            if a != b {
                if let Some(d) = on_diagonal[c] {
                    return Err(AxiomError::DiagonalCollision {
                        relation: c,
                        diagonal: d,
                        off: (a, b),
                    });
                }
            }
        }
    }

    // |αr ∩ βs*| must be constant on every relation t.
    let rep = first_occurrences(colors, n, rank);
    let profiles: Vec<Vec<(u64, u32)>> = rep
        .par_iter()
        .map_init(
            || PairCounter::new(rank),
            |counter, &(a, b)| {
                counter.count(colors, n, a, b);
                counter.profile()
            },
        )
        .collect();
    let failure = (0..n)
        .into_par_iter()
        .map_init(
            || PairCounter::new(rank),
            |counter, a| check_row(colors, n, rank, &rep, &profiles, counter, a),
        )
        .find_first(Option::is_some)
        .flatten();
    if let Some(err) = failure {
        return Err(err);
    }

    // S* = S.
    let converse: Vec<u32> = rep.iter().map(|&(a, b)| colors[b * n + a]).collect();
    for a in 0..n {
        for b in 0..n {
            let c = colors[a * n + b];
            let found = colors[b * n + a];
            if found != converse[c as usize] {
                return Err(AxiomError::MissingConverse {
                    relation: c as usize,
                    pair: (a, b),
                    expected: converse[c as usize] as usize,
                    found: found as usize,
                });
            }
        }
    }
    Ok(())
}

fn check_row(
    colors: &[u32],
    n: usize,
    rank: usize,
    rep: &[(Point, Point)],
    profiles: &[Vec<(u64, u32)>],
    counter: &mut PairCounter,
    a: Point,
) -> Option<AxiomError> {
    for b in 0..n {
        let t = colors[a * n + b] as usize;
        counter.count(colors, n, a, b);
        let expected = &profiles[t];
        let mismatch = expected
            .iter()
            .find(|&&(k, c)| counter.get(k) != c)
            .map(|&(k, _)| k)
            .or_else(|| {
                (counter.touched.len() != expected.len()).then(|| {
                    *counter
                        .touched
                        .iter()
                        .find(|&&k| expected.binary_search_by_key(&k, |e| e.0).is_err())
                        .expect("extra key present")
                })
            });
        if let Some(key) = mismatch {
            let expected_count = expected
                .binary_search_by_key(&key, |e| e.0)
                .map(|i| expected[i].1)
                .unwrap_or(0);
            return Some(AxiomError::NonCoherent {
                r: (key / rank as u64) as usize,
                s: (key % rank as u64) as usize,
                t,
                first: rep[t],
                first_count: expected_count as usize,
                second: (a, b),
                second_count: counter.get(key) as usize,
            });
        }
    }
    None
}

/// Relabels relations in canonical order; returns the new matrix and rank.
fn canonical_labels(colors: &[u32], n: usize, rank: usize) -> Vec<u32> {
    let mut map = vec![u32::MAX; rank];
    let mut next = 0u32;
    for a in 0..n {
        let c = colors[a * n + a] as usize;
        if map[c] == u32::MAX {
            map[c] = next;
            next += 1;
        }
    }
    for a in 0..n {
        for b in 0..n {
            let c = colors[a * n + b] as usize;
            if map[c] == u32::MAX {
                map[c] = next;
                next += 1;
            }
        }
    }
    colors.iter().map(|&c| map[c as usize]).collect()
}

impl CoherentConfiguration {
    /// Validates a color matrix and builds the configuration.
    ///
    /// Indices must form the contiguous range `0..rank`; they are renumbered
    /// into canonical order. Axioms are checked in the order: diagonal
    /// separation, constancy of intersection numbers, closure under converse.
    pub fn from_color_matrix(matrix: &[Vec<usize>]) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(AxiomError::Empty.into());
        }
        let mut flat = Vec::with_capacity(n * n);
        for (row, entries) in matrix.iter().enumerate() {
            if entries.len() != n {
                return Err(AxiomError::NotSquare {
                    row,
                    len: entries.len(),
                    n,
                }
                .into());
            }
            for &c in entries {
                flat.push(u32::try_from(c).map_err(|_| Error::OutOfRange {
                    what: "relation index",
                    value: c,
                    limit: u32::MAX as usize,
                })?);
            }
        }
        Self::from_flat(n, flat)
    }

    /// Like [`Self::from_color_matrix`] for a row-major matrix.
    pub fn from_flat(n: usize, colors: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(AxiomError::Empty.into());
        }
        if colors.len() != n * n {
            return Err(AxiomError::NotSquare {
                row: colors.len() / n,
                len: colors.len() % n,
                n,
            }
            .into());
        }
        let max = *colors.iter().max().unwrap() as usize;
        let mut used = vec![false; max + 1];
        for &c in &colors {
            used[c as usize] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(AxiomError::NonContiguous { missing, max }.into());
        }
        let rank = max + 1;
        check_axioms(&colors, n, rank)?;
        Ok(Self::assemble(n, rank, canonical_labels(&colors, n, rank)))
    }

    /// Builds from a row-major matrix labelled by first occurrence without
    /// validating the coherence axiom. Only for colorings that are coherent
    /// by construction (closures, orbit partitions).
    pub(crate) fn from_trusted(n: usize, colors: Vec<u32>) -> Self {
        let rank = *colors.iter().max().unwrap() as usize + 1;
        let canon = canonical_labels(&colors, n, rank);
        let cc = Self::assemble(n, rank, canon);
        debug_assert!(n > 400 || check_axioms(&cc.colors, n, rank).is_ok());
        cc
    }

    fn assemble(n: usize, rank: usize, colors: Vec<u32>) -> Self {
        let representative = first_occurrences(&colors, n, rank);
        let converse: Vec<Relation> = representative
            .iter()
            .map(|&(a, b)| colors[b * n + a] as usize)
            .collect();
        let reflexive: Vec<bool> = representative.iter().map(|&(a, b)| a == b).collect();
        // Canonical order puts reflexive relations first, one per fiber.
        let fiber_count = reflexive.iter().filter(|&&r| r).count();
        let mut fibers = vec![Vec::new(); fiber_count];
        let mut fiber_of = vec![0; n];
        for a in 0..n {
            let e = colors[a * n + a] as usize;
            fibers[e].push(a);
            fiber_of[a] = e;
        }
        let valency: Vec<usize> = representative
            .iter()
            .enumerate()
            .map(|(s, &(a, _))| colors[a * n..(a + 1) * n].iter().filter(|&&c| c as usize == s).count())
            .collect();
        let source_fiber = representative.iter().map(|&(a, _)| fiber_of[a]).collect();
        let target_fiber = representative.iter().map(|&(_, b)| fiber_of[b]).collect();
        Self {
            n,
            rank,
            colors,
            converse,
            reflexive,
            valency,
            representative,
            fibers,
            fiber_of,
            source_fiber,
            target_fiber,
            tensor: OnceLock::new(),
        }
    }

    /// Degree `|Ω|`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The relation `r(α, β)`.
    #[inline]
    pub fn color(&self, a: Point, b: Point) -> Relation {
        self.colors[a * self.n + b] as usize
    }

    /// Row-major relation matrix.
    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color_matrix(&self) -> Vec<Vec<usize>> {
        self.colors
            .chunks(self.n)
            .map(|row| row.iter().map(|&c| c as usize).collect())
            .collect()
    }

    pub fn converse(&self, r: Relation) -> Relation {
        self.converse[r]
    }

    pub fn is_reflexive(&self, r: Relation) -> bool {
        self.reflexive[r]
    }

    /// Reflexive relations; they are `0..fibers().len()`.
    pub fn reflexive_relations(&self) -> impl Iterator<Item = Relation> + '_ {
        (0..self.rank).filter(|&r| self.reflexive[r])
    }

    pub fn valency(&self, r: Relation) -> usize {
        self.valency[r]
    }

    pub fn valencies(&self) -> &[usize] {
        &self.valency
    }

    /// Maximal valency `k`.
    pub fn max_valency(&self) -> usize {
        self.valency.iter().copied().max().unwrap_or(0)
    }

    /// Lexicographically least pair of `r`.
    pub fn representative(&self, r: Relation) -> (Point, Point) {
        self.representative[r]
    }

    pub fn fibers(&self) -> &[Vec<Point>] {
        &self.fibers
    }

    pub fn fiber_of(&self, a: Point) -> usize {
        self.fiber_of[a]
    }

    pub fn source_fiber(&self, r: Relation) -> usize {
        self.source_fiber[r]
    }

    pub fn target_fiber(&self, r: Relation) -> usize {
        self.target_fiber[r]
    }

    /// True if `1_Ω` is a single relation.
    pub fn is_homogeneous(&self) -> bool {
        self.fibers.len() == 1
    }

    /// `αr`: the points `β` with `r(α, β) = r`.
    pub fn neighbors(&self, a: Point, r: Relation) -> impl Iterator<Item = Point> + '_ {
        let row = &self.colors[a * self.n..(a + 1) * self.n];
        row.iter()
            .enumerate()
            .filter(move |(_, &c)| c as usize == r)
            .map(|(b, _)| b)
    }

    /// `μm ≠ ∅`.
    pub fn has_out_pairs(&self, a: Point, r: Relation) -> bool {
        self.source_fiber[r] == self.fiber_of[a]
    }

    fn check_relation(&self, r: Relation) -> Result<()> {
        if r >= self.rank {
            return Err(Error::OutOfRange {
                what: "relation",
                value: r,
                limit: self.rank,
            });
        }
        Ok(())
    }

    fn check_point(&self, a: Point) -> Result<()> {
        if a >= self.n {
            return Err(Error::OutOfRange {
                what: "point",
                value: a,
                limit: self.n,
            });
        }
        Ok(())
    }

    /// `c_{rs}^t`, counted directly from the representative pair of `t`.
    pub fn intersection_number(&self, r: Relation, s: Relation, t: Relation) -> Result<usize> {
        self.check_relation(r)?;
        self.check_relation(s)?;
        self.check_relation(t)?;
        let (a, b) = self.representative[t];
        Ok((0..self.n)
            .filter(|&g| self.color(a, g) == r && self.color(g, b) == s)
            .count())
    }

    /// Cached intersection tensor.
    pub fn tensor(&self) -> &IntersectionTensor {
        self.tensor.get_or_init(|| IntersectionTensor::compute(self))
    }

    /// `c_{rs}^t` from the cached tensor.
    #[inline]
    pub fn c(&self, r: Relation, s: Relation, t: Relation) -> usize {
        self.tensor().get(r, s, t)
    }

    /// Complex product `rs = {t : c_{rs}^t ≠ 0}`, sorted.
    pub fn complex_product(&self, r: Relation, s: Relation) -> &[Relation] {
        self.tensor().product(r, s)
    }

    /// The set `c(α, β) = {γ : r(γ, α) = r(γ, β)}`.
    pub fn indistinguishing_set(&self, a: Point, b: Point) -> Vec<Point> {
        (0..self.n).filter(|&g| self.color(g, a) == self.color(g, b)).collect()
    }

    /// `c(s) = Σ_r c_{rr*}^s` for an irreflexive relation `s`.
    pub fn indistinguishing_number(&self, s: Relation) -> Result<usize> {
        self.check_relation(s)?;
        if self.reflexive[s] {
            return Err(Error::InvalidArgument(format!("relation {s} is reflexive")));
        }
        Ok((0..self.rank).map(|r| self.c(r, self.converse[r], s)).sum())
    }

    /// `c(X)`: the maximum of `c(s)` over irreflexive `s`; `None` when every relation is reflexive.
    pub fn max_indistinguishing(&self) -> Option<usize> {
        (0..self.rank)
            .filter(|&s| !self.reflexive[s])
            .map(|s| {
                let (a, b) = self.representative[s];
                (0..self.n).filter(|&g| self.color(g, a) == self.color(g, b)).count()
            })
            .max()
    }

    /// Restriction to `Ω \ {α}` when `{α}` is a fiber.
    ///
    /// Points above `α` shift down by one.
    pub fn restrict_at_singleton(&self, a: Point) -> Result<CoherentConfiguration> {
        self.check_point(a)?;
        if self.fibers[self.fiber_of[a]].len() != 1 {
            return Err(Error::NotAFiber(a));
        }
        if self.n == 1 {
            return Err(Error::InvalidArgument("restriction would leave no points".into()));
        }
        let keep: Vec<Point> = (0..self.n).filter(|&x| x != a).collect();
        let m = keep.len();
        let mut flat = Vec::with_capacity(m * m);
        for &x in &keep {
            for &y in &keep {
                flat.push(self.colors[x * self.n + y]);
            }
        }
        // dropping unused labels keeps the range contiguous
        let mut relabel: HashMap<u32, u32> = HashMap::new();
        for c in flat.iter_mut() {
            let next = relabel.len() as u32;
            *c = *relabel.entry(*c).or_insert(next);
        }
        Self::from_flat(m, flat)
    }

    /// Relabels points: point `α` of `self` becomes point `perm[α]`.
    pub fn permute_points(&self, perm: &[Point]) -> Result<CoherentConfiguration> {
        if perm.len() != self.n {
            return Err(Error::DegreeMismatch(perm.len(), self.n));
        }
        let mut flat = vec![0u32; self.n * self.n];
        for a in 0..self.n {
            for b in 0..self.n {
                flat[perm[a] * self.n + perm[b]] = self.colors[a * self.n + b];
            }
        }
        Self::from_flat(self.n, flat)
    }

    /// Trivial scheme on `n` points (`n ≥ 1`).
    pub fn trivial(n: usize) -> CoherentConfiguration {
        let flat = (0..n * n).map(|i| u32::from(i / n != i % n)).collect();
        Self::from_trusted(n, flat)
    }

    /// Discrete configuration on `n` points: every pair is its own relation.
    pub fn discrete(n: usize) -> CoherentConfiguration {
        Self::from_trusted(n, (0..(n * n) as u32).collect())
    }
}

/// The intersection numbers `c_{rs}^t`, stored sparsely.
#[derive(Debug, Clone)]
pub struct IntersectionTensor {
    rank: usize,
    entries: BTreeMap<(Relation, Relation, Relation), usize>,
    dense: Option<Vec<u32>>,
    products: HashMap<(Relation, Relation), Vec<Relation>>,
}

impl IntersectionTensor {
    fn compute(cc: &CoherentConfiguration) -> Self {
        let rank = cc.rank;
        let n = cc.n;
        let per_t: Vec<Vec<((Relation, Relation), usize)>> = (0..rank)
            .into_par_iter()
            .map(|t| {
                let (a, b) = cc.representative[t];
                let mut counts: HashMap<(Relation, Relation), usize> = HashMap::new();
                for g in 0..n {
                    *counts.entry((cc.color(a, g), cc.color(g, b))).or_default() += 1;
                }
                counts.into_iter().collect()
            })
            .collect();
        let mut entries = BTreeMap::new();
        let mut products: HashMap<(Relation, Relation), Vec<Relation>> = HashMap::new();
        for (t, list) in per_t.into_iter().enumerate() {
            for ((r, s), c) in list {
                entries.insert((r, s, t), c);
                products.entry((r, s)).or_default().push(t);
            }
        }
        for v in products.values_mut() {
            v.sort_unstable();
        }
        let dense = (rank <= DENSE_RANK_LIMIT).then(|| {
            let mut d = vec![0u32; rank * rank * rank];
            for (&(r, s, t), &c) in &entries {
                d[(r * rank + s) * rank + t] = c as u32;
            }
            d
        });
        Self {
            rank,
            entries,
            dense,
            products,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn get(&self, r: Relation, s: Relation, t: Relation) -> usize {
        match &self.dense {
            Some(d) => d[(r * self.rank + s) * self.rank + t] as usize,
            None => self.entries.get(&(r, s, t)).copied().unwrap_or(0),
        }
    }

    /// Nonzero entries in `(r, s, t)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((Relation, Relation, Relation), usize)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }

    pub fn product(&self, r: Relation, s: Relation) -> &[Relation] {
        self.products.get(&(r, s)).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle5() -> CoherentConfiguration {
        let m: Vec<Vec<usize>> = (0..5)
            .map(|a| {
                (0..5)
                    .map(|b| match (b + 5 - a) % 5 {
                        0 => 0,
                        1 | 4 => 1,
                        _ => 2,
                    })
                    .collect()
            })
            .collect();
        CoherentConfiguration::from_color_matrix(&m).unwrap()
    }

    fn brute_c(cc: &CoherentConfiguration, r: usize, s: usize, a: usize, b: usize) -> usize {
        (0..cc.n())
            .filter(|&g| cc.color(a, g) == r && cc.color(g, b) == s)
            .count()
    }

    #[test]
    fn trivial_scheme_from_matrix() {
        let m = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
        let cc = CoherentConfiguration::from_color_matrix(&m).unwrap();
        assert_eq!(cc.rank(), 2);
        assert!(cc.is_homogeneous());
        assert_eq!(cc, CoherentConfiguration::trivial(3));
    }

    #[test]
    fn discrete_is_accepted() {
        let m: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| a * 3 + b).collect()).collect();
        let cc = CoherentConfiguration::from_color_matrix(&m).unwrap();
        assert_eq!(cc.rank(), 9);
        assert_eq!(cc.max_valency(), 1);
        assert_eq!(cc.fibers().len(), 3);
    }

    #[test]
    fn directed_four_cycle_is_not_coherent() {
        let m: Vec<Vec<usize>> = (0..4)
            .map(|a| {
                (0..4)
                    .map(|b| {
                        if a == b {
                            0
                        } else if b == (a + 1) % 4 {
                            1
                        } else {
                            2
                        }
                    })
                    .collect()
            })
            .collect();
        let err = CoherentConfiguration::from_color_matrix(&m).unwrap_err();
        match err {
            Error::Axiom(AxiomError::NonCoherent {
                t,
                first,
                first_count,
                second,
                second_count,
                r,
                s,
            }) => {
                assert_eq!(t, 2);
                assert_ne!(first_count, second_count);
                let count = |(a, b): (usize, usize)| (0..4).filter(|&g| m[a][g] == r && m[g][b] == s).count();
                assert_eq!(count(first), first_count);
                assert_eq!(count(second), second_count);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn axiom_errors_are_distinct() {
        let collide = vec![vec![0, 0], vec![1, 0]];
        assert!(matches!(
            CoherentConfiguration::from_color_matrix(&collide),
            Err(Error::Axiom(AxiomError::DiagonalCollision { .. }))
        ));
        let gap = vec![vec![0, 2], vec![2, 0]];
        assert!(matches!(
            CoherentConfiguration::from_color_matrix(&gap),
            Err(Error::Axiom(AxiomError::NonContiguous { missing: 1, max: 2 }))
        ));
        let ragged = vec![vec![0, 1], vec![1]];
        assert!(matches!(
            CoherentConfiguration::from_color_matrix(&ragged),
            Err(Error::Axiom(AxiomError::NotSquare { row: 1, .. }))
        ));
        // relation 2 and its transpose 3 live in different fiber blocks
        let m = vec![vec![0, 2, 1, 1], vec![3, 0, 1, 1], vec![1, 1, 0, 2], vec![1, 1, 3, 0]];
        let err = CoherentConfiguration::from_color_matrix(&m);
        assert!(err.is_err());
    }

    #[test]
    fn intersection_numbers() {
        let t5 = CoherentConfiguration::trivial(5);
        assert_eq!(t5.intersection_number(1, 1, 1).unwrap(), 3);
        assert_eq!(t5.intersection_number(0, 1, 1).unwrap(), 1);
        let c5 = cycle5();
        assert_eq!(c5.intersection_number(1, 1, 1).unwrap(), 0);
        assert_eq!(c5.intersection_number(1, 1, 2).unwrap(), 1);
        assert!(c5.intersection_number(3, 0, 0).is_err());
    }

    #[test]
    fn tensor_of_trivial_four() {
        let t4 = CoherentConfiguration::trivial(4);
        let t = t4.tensor();
        assert_eq!(t.get(1, 1, 1), 2);
        assert_eq!(t.get(1, 1, 0), 3);
        let d2 = CoherentConfiguration::discrete(2);
        assert!(d2.tensor().entries().all(|(_, c)| c <= 1));
    }

    #[test]
    fn tensor_agrees_with_brute_force() {
        let c5 = cycle5();
        for r in 0..3 {
            for s in 0..3 {
                for t in 0..3 {
                    let (a, b) = c5.representative(t);
                    assert_eq!(c5.c(r, s, t), brute_c(&c5, r, s, a, b));
                    assert_eq!(c5.c(r, s, t), c5.intersection_number(r, s, t).unwrap());
                }
            }
        }
    }

    #[test]
    fn indistinguishing_numbers() {
        let t7 = CoherentConfiguration::trivial(7);
        assert_eq!(t7.indistinguishing_number(1).unwrap(), 5);
        assert_eq!(t7.max_indistinguishing(), Some(5));
        assert!(t7.indistinguishing_number(0).is_err());
        let d = CoherentConfiguration::discrete(4);
        assert_eq!(d.max_indistinguishing(), Some(0));
        assert_eq!(CoherentConfiguration::discrete(1).max_indistinguishing(), None);
    }

    #[test]
    fn complex_products() {
        let t5 = CoherentConfiguration::trivial(5);
        assert_eq!(t5.complex_product(1, 1), &[0, 1]);
        assert_eq!(t5.complex_product(0, 1), &[1]);
        let c5 = cycle5();
        assert_eq!(c5.complex_product(1, 1), &[0, 2]);
    }

    #[test]
    fn valencies() {
        assert_eq!(CoherentConfiguration::discrete(3).max_valency(), 1);
        assert_eq!(CoherentConfiguration::trivial(6).max_valency(), 5);
        assert_eq!(cycle5().valencies(), &[1, 2, 2]);
    }

    #[test]
    fn restriction() {
        let d3 = CoherentConfiguration::discrete(3);
        assert_eq!(d3.restrict_at_singleton(1).unwrap(), CoherentConfiguration::discrete(2));
        assert_eq!(
            CoherentConfiguration::trivial(4).restrict_at_singleton(0).unwrap_err(),
            Error::NotAFiber(0)
        );
    }

    #[test]
    fn round_trip_through_matrix() {
        let c5 = cycle5();
        let again = CoherentConfiguration::from_color_matrix(&c5.color_matrix()).unwrap();
        assert_eq!(again, c5);
        assert_eq!(again.valencies(), c5.valencies());
        assert_eq!(again.fibers(), c5.fibers());
    }

    #[test]
    fn canonical_order_is_independent_of_labels() {
        let m = vec![vec![5, 2, 2], vec![2, 5, 2], vec![2, 2, 5]];
        assert!(CoherentConfiguration::from_color_matrix(&m).is_err());
        let m = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let cc = CoherentConfiguration::from_color_matrix(&m).unwrap();
        assert_eq!(cc.color(0, 0), 0);
        assert_eq!(cc.color(0, 1), 1);
    }
}
