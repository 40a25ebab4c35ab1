//! Combinatorial and algebraic isomorphisms at desk scale.
//!
//! Point searches pair two colored complete digraphs and refine both sides
//! with the same cell names, individualizing one point of the smallest
//! non-singleton cell at each branch.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::budget::Budget;
use crate::builders::{orbital_config, DisjointSets, PermGroup, Permutation};
use crate::cc::{CoherentConfiguration, Point, Relation};
use crate::error::{Error, Result};
use crate::separability::as_string;

/// A pair-colored complete digraph, colors row-major.
struct Board<'a> {
    n: usize,
    col: &'a [u32],
}

impl Board<'_> {
    #[inline]
    fn at(&self, a: Point, b: Point) -> u32 {
        self.col[a * self.n + b]
    }
}

type PointSig = (u32, Vec<(u32, u32, u32)>);

/// Refines both cell vectors to the coarsest common equitable partition.
/// Returns `false` when the two sides cannot correspond.
fn refine(a: &Board, b: &Board, ca: &mut Vec<u32>, cb: &mut Vec<u32>) -> bool {
    let n = a.n;
    let mut cells = distinct(ca);
    loop {
        let sig = |board: &Board, c: &[u32], v: Point| -> PointSig {
            let mut row: Vec<(u32, u32, u32)> = (0..n).map(|w| (c[w], board.at(v, w), board.at(w, v))).collect();
            row.sort_unstable();
            (c[v], row)
        };
        let sa: Vec<PointSig> = (0..n).map(|v| sig(a, ca, v)).collect();
        let sb: Vec<PointSig> = (0..n).map(|v| sig(b, cb, v)).collect();
        let mut all: Vec<&PointSig> = sa.iter().chain(sb.iter()).collect();
        all.sort_unstable();
        all.dedup();
        let name = |s: &PointSig| all.binary_search(&s).unwrap() as u32;
        let na: Vec<u32> = sa.iter().map(name).collect();
        let nb: Vec<u32> = sb.iter().map(name).collect();
        let mut count = vec![0i64; all.len()];
        for (&x, &y) in na.iter().zip(&nb) {
            count[x as usize] += 1;
            count[y as usize] -= 1;
        }
        if count.iter().any(|&c| c != 0) {
            return false;
        }
        *ca = na;
        *cb = nb;
        if all.len() == cells {
            return true;
        }
        cells = all.len();
    }
}

fn distinct(c: &[u32]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    First,
    All(usize),
}

struct Search<'a> {
    a: Board<'a>,
    b: Board<'a>,
    mode: Mode,
    nodes: u64,
    budget: u64,
    found: Vec<Permutation>,
}

impl Search<'_> {
    /// Explores the subtree; `Ok(true)` means stop.
    fn run(&mut self, mut ca: Vec<u32>, mut cb: Vec<u32>) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                what: "search nodes",
                limit: self.budget,
            });
        }
        if !refine(&self.a, &self.b, &mut ca, &mut cb) {
            return Ok(false);
        }
        let n = self.a.n;
        let mut size = vec![0usize; 2 * n + 1];
        for &c in &ca {
            size[c as usize] += 1;
        }
        let target = (0..size.len()).filter(|&c| size[c] > 1).min_by_key(|&c| (size[c], c));
        let Some(target) = target else {
            let mut f = vec![0; n];
            let mut where_b = vec![0; 2 * n + 1];
            for (w, &c) in cb.iter().enumerate() {
                where_b[c as usize] = w;
            }
            for (v, &c) in ca.iter().enumerate() {
                f[v] = where_b[c as usize];
            }
            if (0..n).all(|v| (0..n).all(|w| self.a.at(v, w) == self.b.at(f[v], f[w]))) {
                self.found.push(f);
                return Ok(match self.mode {
                    Mode::First => true,
                    Mode::All(limit) => self.found.len() >= limit,
                });
            }
            return Ok(false);
        };
        let v = ca.iter().position(|&c| c as usize == target).unwrap();
        let fresh = size.len() as u32;
        for w in (0..n).filter(|&w| cb[w] as usize == target) {
            let (mut na, mut nb) = (ca.clone(), cb.clone());
            na[v] = fresh;
            nb[w] = fresh;
            if self.run(na, nb)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn check_degree(n: usize, budget: &Budget) -> Result<()> {
    if n > budget.max_search_degree {
        return Err(Error::BudgetExceeded {
            what: "search degree",
            limit: budget.max_search_degree as u64,
        });
    }
    Ok(())
}

/// Initial cells from the diagonal colors plus individualized pairs.
fn initial_cells(a: &Board, b: &Board, pinned: &[(Point, Point)]) -> (Vec<u32>, Vec<u32>) {
    let n = a.n;
    let shift = pinned.len() as u32;
    let mut ca: Vec<u32> = (0..n).map(|v| a.at(v, v) + shift).collect();
    let mut cb: Vec<u32> = (0..n).map(|v| b.at(v, v) + shift).collect();
    for (i, &(x, y)) in pinned.iter().enumerate() {
        ca[x] = i as u32;
        cb[y] = i as u32;
    }
    (ca, cb)
}

fn point_search(
    a: Board,
    b: Board,
    pinned: &[(Point, Point)],
    mode: Mode,
    budget: &Budget,
) -> Result<Vec<Permutation>> {
    let (ca, cb) = initial_cells(&a, &b, pinned);
    let mut s = Search {
        a,
        b,
        mode,
        nodes: 0,
        budget: budget.search_nodes,
        found: Vec::new(),
    };
    s.run(ca, cb)?;
    Ok(s.found)
}

#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    pub group: PermGroup,
    pub order: BigUint,
    /// Base points and the orbit length of each under the stabilizer of the
    /// previous ones.
    pub base: Vec<(Point, usize)>,
}

/// The color-preserving permutations of `x`, as generators with the exact
/// group order.
pub fn automorphism_group(x: &CoherentConfiguration, budget: &Budget) -> Result<AutomorphismGroup> {
    let n = x.n();
    check_degree(n, budget)?;
    let board = || Board { n, col: x.colors() };

    let mut base = Vec::new();
    let mut cells = Vec::new();
    {
        let (mut ca, mut cb) = initial_cells(&board(), &board(), &[]);
        loop {
            refine(&board(), &board(), &mut ca, &mut cb);
            let mut size: HashMap<u32, usize> = HashMap::new();
            for &c in &ca {
                *size.entry(c).or_default() += 1;
            }
            let Some((&target, _)) = size.iter().filter(|e| *e.1 > 1).min_by_key(|e| (*e.1, *e.0)) else {
                break;
            };
            let v = ca.iter().position(|&c| c == target).unwrap();
            cells.push((0..n).filter(|&w| ca[w] == target).collect::<Vec<_>>());
            base.push(v);
            let fresh = 2 * n as u32 + base.len() as u32;
            ca[v] = fresh;
            cb[v] = fresh;
        }
    }

    let mut gens: Vec<Permutation> = Vec::new();
    let mut order = BigUint::from(1u32);
    let mut lengths = vec![0; base.len()];
    for level in (0..base.len()).rev() {
        let a = base[level];
        let mut orbits = DisjointSets::new(n);
        for g in &gens {
            for (v, &w) in g.iter().enumerate() {
                orbits.union(v, w);
            }
        }
        let mut failed = vec![false; n];
        let prefix: Vec<(Point, Point)> = base[..level].iter().map(|&p| (p, p)).collect();
        for &b in &cells[level] {
            if orbits.find(b) == orbits.find(a) || failed[orbits.find(b)] {
                continue;
            }
            let mut pinned = prefix.clone();
            pinned.push((a, b));
            match point_search(board(), board(), &pinned, Mode::First, budget)?.pop() {
                Some(g) => {
                    for (v, &w) in g.iter().enumerate() {
                        orbits.union(v, w);
                    }
                    gens.push(g);
                }
                None => {
                    let root = orbits.find(b);
                    failed[root] = true;
                }
            }
        }
        let root = orbits.find(a);
        let len = cells[level].iter().filter(|&&b| orbits.find(b) == root).count();
        lengths[level] = len;
        order *= BigUint::from(len);
    }
    Ok(AutomorphismGroup {
        group: PermGroup::new(n, gens)?,
        order,
        base: base.into_iter().zip(lengths).collect(),
    })
}

/// A bijection between the relation sets of two configurations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AlgebraicMap {
    pub phi: Vec<Relation>,
}

impl AlgebraicMap {
    pub fn identity(rank: usize) -> Self {
        Self {
            phi: (0..rank).collect(),
        }
    }

    /// Checks that `phi` is a bijection preserving reflexivity, converses,
    /// valencies and every intersection number.
    pub fn validate(&self, x: &CoherentConfiguration, y: &CoherentConfiguration) -> bool {
        let k = x.rank();
        if y.rank() != k || self.phi.len() != k {
            return false;
        }
        let mut seen = vec![false; k];
        for &t in &self.phi {
            if t >= k || seen[t] {
                return false;
            }
            seen[t] = true;
        }
        let p = &self.phi;
        let local = (0..k).all(|r| {
            x.is_reflexive(r) == y.is_reflexive(p[r])
                && p[x.converse(r)] == y.converse(p[r])
                && x.valency(r) == y.valency(p[r])
        });
        local
            && x.tensor().nonzero_count() == y.tensor().nonzero_count()
            && x.tensor().entries().all(|((r, s, t), c)| y.c(p[r], p[s], p[t]) == c)
    }

    pub fn apply(&self, r: Relation) -> Relation {
        self.phi[r]
    }

    pub fn compose(&self, then: &AlgebraicMap) -> AlgebraicMap {
        AlgebraicMap {
            phi: self.phi.iter().map(|&r| then.phi[r]).collect(),
        }
    }
}

/// The relation map induced by a point bijection, if it is an isomorphism.
pub fn induced_map(x: &CoherentConfiguration, y: &CoherentConfiguration, f: &[Point]) -> Option<AlgebraicMap> {
    let n = x.n();
    if y.n() != n || f.len() != n || x.rank() != y.rank() {
        return None;
    }
    let mut phi = vec![usize::MAX; x.rank()];
    for a in 0..n {
        for b in 0..n {
            let (r, s) = (x.color(a, b), y.color(*f.get(a)?, *f.get(b)?));
            if phi[r] == usize::MAX {
                phi[r] = s;
            } else if phi[r] != s {
                return None;
            }
        }
    }
    let map = AlgebraicMap { phi };
    let mut sorted = map.phi.clone();
    sorted.sort_unstable();
    sorted.dedup();
    (sorted.len() == x.rank()).then_some(map)
}

pub(crate) type RelationPrint = (bool, bool, usize, usize, usize, Vec<usize>, Vec<usize>, Vec<usize>);

/// Invariants of a relation preserved by every algebraic isomorphism.
pub(crate) fn relation_prints(x: &CoherentConfiguration) -> Vec<RelationPrint> {
    let k = x.rank();
    let mut left = vec![Vec::new(); k];
    let mut mid = vec![Vec::new(); k];
    let mut right = vec![Vec::new(); k];
    for ((r, s, t), c) in x.tensor().entries() {
        left[r].push(c);
        mid[s].push(c);
        right[t].push(c);
    }
    (0..k)
        .map(|r| {
            let mut l = std::mem::take(&mut left[r]);
            let mut m = std::mem::take(&mut mid[r]);
            let mut t = std::mem::take(&mut right[r]);
            l.sort_unstable();
            m.sort_unstable();
            t.sort_unstable();
            let (a, b) = x.representative(r);
            let fa = x.fibers()[x.fiber_of(a)].len();
            let fb = x.fibers()[x.fiber_of(b)].len();
            (x.is_reflexive(r), x.converse(r) == r, x.valency(r), fa, fb, l, m, t)
        })
        .collect()
}

/// Nonzero tensor entries touching each relation.
fn entries_by_relation(x: &CoherentConfiguration) -> Vec<Vec<(Relation, Relation, Relation, usize)>> {
    let mut by = vec![Vec::new(); x.rank()];
    for ((r, s, t), c) in x.tensor().entries() {
        by[r].push((r, s, t, c));
        if s != r {
            by[s].push((r, s, t, c));
        }
        if t != r && t != s {
            by[t].push((r, s, t, c));
        }
    }
    by
}

struct AlgebraicSearch<'a> {
    x: &'a CoherentConfiguration,
    y: &'a CoherentConfiguration,
    order: Vec<Relation>,
    candidates: Vec<Vec<Relation>>,
    x_entries: Vec<Vec<(Relation, Relation, Relation, usize)>>,
    y_entries: Vec<Vec<(Relation, Relation, Relation, usize)>>,
    phi: Vec<Relation>,
    inv: Vec<Relation>,
    limit: usize,
    nodes: u64,
    budget: u64,
    found: Vec<AlgebraicMap>,
}

impl AlgebraicSearch<'_> {
    fn consistent(&self, r: Relation, s: Relation) -> bool {
        let unset = usize::MAX;
        let forward = self.x_entries[r].iter().all(|&(a, b, c, v)| {
            let (pa, pb, pc) = (self.phi[a], self.phi[b], self.phi[c]);
            pa == unset || pb == unset || pc == unset || self.y.c(pa, pb, pc) == v
        });
        forward
            && self.y_entries[s].iter().all(|&(a, b, c, v)| {
                let (pa, pb, pc) = (self.inv[a], self.inv[b], self.inv[c]);
                pa == unset || pb == unset || pc == unset || self.x.c(pa, pb, pc) == v
            })
    }

    fn assign(&mut self, r: Relation, s: Relation) {
        self.phi[r] = s;
        self.inv[s] = r;
    }

    fn unassign(&mut self, r: Relation) {
        self.inv[self.phi[r]] = usize::MAX;
        self.phi[r] = usize::MAX;
    }

    fn run(&mut self, depth: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                what: "algebraic search nodes",
                limit: self.budget,
            });
        }
        let Some(&r) = self.order[depth..].iter().find(|&&r| self.phi[r] == usize::MAX) else {
            let map = AlgebraicMap { phi: self.phi.clone() };
            debug_assert!(map.validate(self.x, self.y));
            self.found.push(map);
            return Ok(self.found.len() >= self.limit);
        };
        let rc = self.x.converse(r);
        for i in 0..self.candidates[r].len() {
            let s = self.candidates[r][i];
            if self.inv[s] != usize::MAX {
                continue;
            }
            let sc = self.y.converse(s);
            if rc != r && (self.inv[sc] != usize::MAX || sc == s) {
                continue;
            }
            if rc == r && sc != s {
                continue;
            }
            if rc != r && !self.candidates[rc].contains(&sc) {
                continue;
            }
            self.assign(r, s);
            if rc != r {
                self.assign(rc, sc);
            }
            let ok = self.consistent(r, s) && (rc == r || self.consistent(rc, sc));
            if ok && self.run(depth + 1)? {
                return Ok(true);
            }
            if rc != r {
                self.unassign(rc);
            }
            self.unassign(r);
        }
        Ok(false)
    }
}

/// All algebraic isomorphisms from `x` to `y`, sorted.
pub fn algebraic_isomorphisms(
    x: &CoherentConfiguration,
    y: &CoherentConfiguration,
    budget: &Budget,
) -> Result<Vec<AlgebraicMap>> {
    algebraic_search(x, y, budget.max_listed, budget)
}

/// Some algebraic isomorphism from `x` to `y`, if one exists.
pub fn first_algebraic_isomorphism(
    x: &CoherentConfiguration,
    y: &CoherentConfiguration,
    budget: &Budget,
) -> Result<Option<AlgebraicMap>> {
    Ok(algebraic_search_raw(x, y, 1, budget)?.pop())
}

fn algebraic_search(
    x: &CoherentConfiguration,
    y: &CoherentConfiguration,
    limit: usize,
    budget: &Budget,
) -> Result<Vec<AlgebraicMap>> {
    let mut found = algebraic_search_raw(x, y, limit.saturating_add(1), budget)?;
    if found.len() > limit {
        return Err(Error::BudgetExceeded {
            what: "listed algebraic isomorphisms",
            limit: limit as u64,
        });
    }
    found.sort();
    Ok(found)
}

fn algebraic_search_raw(
    x: &CoherentConfiguration,
    y: &CoherentConfiguration,
    stop_after: usize,
    budget: &Budget,
) -> Result<Vec<AlgebraicMap>> {
    let k = x.rank();
    if y.rank() != k || x.tensor().nonzero_count() != y.tensor().nonzero_count() {
        return Ok(Vec::new());
    }
    let (px, py) = (relation_prints(x), relation_prints(y));
    let candidates: Vec<Vec<Relation>> = (0..k).map(|r| (0..k).filter(|&s| px[r] == py[s]).collect()).collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let mut order: Vec<Relation> = (0..k).collect();
    order.sort_by_key(|&r| (!x.is_reflexive(r), candidates[r].len(), r));
    let mut s = AlgebraicSearch {
        x,
        y,
        order,
        candidates,
        x_entries: entries_by_relation(x),
        y_entries: entries_by_relation(y),
        phi: vec![usize::MAX; k],
        inv: vec![usize::MAX; k],
        limit: stop_after,
        nodes: 0,
        budget: budget.search_nodes,
        found: Vec::new(),
    };
    s.run(0)?;
    Ok(s.found)
}

fn recolored(x: &CoherentConfiguration, phi: &AlgebraicMap) -> Vec<u32> {
    x.colors().iter().map(|&c| phi.phi[c as usize] as u32).collect()
}

/// One point bijection inducing `phi`, if any.
pub fn realize(
    x: &CoherentConfiguration,
    y: &CoherentConfiguration,
    phi: &AlgebraicMap,
    budget: &Budget,
) -> Result<Option<Permutation>> {
    check_degree(x.n(), budget)?;
    if x.n() != y.n() {
        return Ok(None);
    }
    let col = recolored(x, phi);
    let a = Board { n: x.n(), col: &col };
    let b = Board {
        n: y.n(),
        col: y.colors(),
    };
    Ok(point_search(a, b, &[], Mode::First, budget)?.pop())
}

/// All isomorphisms from `x` to `y`, sorted.
pub fn isomorphisms(x: &CoherentConfiguration, y: &CoherentConfiguration, budget: &Budget) -> Result<Vec<Permutation>> {
    check_degree(x.n(), budget)?;
    if x.n() != y.n() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for phi in algebraic_isomorphisms(x, y, budget)? {
        let col = recolored(x, &phi);
        let a = Board { n: x.n(), col: &col };
        let b = Board {
            n: y.n(),
            col: y.colors(),
        };
        let left = budget.max_listed + 1 - out.len().min(budget.max_listed);
        out.extend(point_search(a, b, &[], Mode::All(left), budget)?);
        if out.len() > budget.max_listed {
            return Err(Error::BudgetExceeded {
                what: "listed isomorphisms",
                limit: budget.max_listed as u64,
            });
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsomorphismCount {
    #[serde(serialize_with = "as_string")]
    pub isomorphisms: BigUint,
    #[serde(serialize_with = "as_string")]
    pub automorphisms: BigUint,
    pub algebraic: usize,
    pub induced: usize,
}

/// `|iso(X, Y)| = |aut(Y)| · #(algebraic isomorphisms realized by a point map)`.
pub fn count_isomorphisms(
    x: &CoherentConfiguration,
    y: &CoherentConfiguration,
    budget: &Budget,
) -> Result<IsomorphismCount> {
    check_degree(x.n(), budget)?;
    let aut = automorphism_group(y, budget)?;
    let algebraic = algebraic_isomorphisms(x, y, budget)?;
    let mut induced = 0;
    for phi in &algebraic {
        if realize(x, y, phi, budget)?.is_some() {
            induced += 1;
        }
    }
    Ok(IsomorphismCount {
        isomorphisms: &aut.order * BigUint::from(induced),
        automorphisms: aut.order,
        algebraic: algebraic.len(),
        induced,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparabilityWitness {
    #[serde(serialize_with = "as_string")]
    pub isomorphisms: BigUint,
    #[serde(serialize_with = "as_string")]
    pub automorphisms: BigUint,
    pub algebraic_automorphisms: usize,
    pub holds: bool,
}

/// Whether `|iso(X)| / |aut(X)| = |Aiso(X)|`, i.e. every algebraic
/// automorphism is induced by an isomorphism.
pub fn separability_witness(x: &CoherentConfiguration, budget: &Budget) -> Result<SeparabilityWitness> {
    let count = count_isomorphisms(x, x, budget)?;
    let quotient = &count.isomorphisms / &count.automorphisms;
    Ok(SeparabilityWitness {
        holds: quotient == BigUint::from(count.algebraic),
        isomorphisms: count.isomorphisms,
        automorphisms: count.automorphisms,
        algebraic_automorphisms: count.algebraic,
    })
}

/// Whether `x` equals the orbital configuration of its automorphism group.
pub fn is_schurian(x: &CoherentConfiguration, budget: &Budget) -> Result<bool> {
    let aut = automorphism_group(x, budget)?;
    Ok(orbital_config(&aut.group)?.colors() == x.colors())
}
