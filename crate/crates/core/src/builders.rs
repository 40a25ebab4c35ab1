//! Permutation groups, orbital configurations and the field schemes.

use std::collections::HashSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::cc::{CoherentConfiguration, Point};
use crate::closure::graph_closure;
use crate::error::{Error, FieldError, Result};
use crate::gf::{FieldElement, FiniteField};

pub type Permutation = Vec<Point>;

/// A permutation group on `0..n` given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    n: usize,
    generators: Vec<Permutation>,
}

fn check_permutation(n: usize, p: &[Point]) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidArgument(format!(
            "permutation has {} images, expected {n}",
            p.len()
        )));
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return Err(Error::InvalidArgument(format!("{p:?} is not a bijection")));
        }
        seen[x] = true;
    }
    Ok(())
}

fn compose(first: &[Point], then: &[Point]) -> Permutation {
    first.iter().map(|&x| then[x]).collect()
}

impl PermGroup {
    pub fn new(n: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            check_permutation(n, g)?;
        }
        Ok(Self { n, generators })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            generators: Vec::new(),
        }
    }

    /// `Sym(n)` from an `n`-cycle and a transposition.
    pub fn symmetric(n: usize) -> Self {
        let mut generators = Vec::new();
        if n >= 2 {
            generators.push((0..n).map(|i| (i + 1) % n).collect());
            let mut t: Permutation = (0..n).collect();
            t.swap(0, 1);
            generators.push(t);
        }
        Self { n, generators }
    }

    /// The cyclic group generated by `i -> i + 1 mod n`.
    pub fn cyclic(n: usize) -> Self {
        Self {
            n,
            generators: vec![(0..n).map(|i| (i + 1) % n).collect()],
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// The subgroup generated by the listed generators.
    pub fn subgroup(&self, indices: &[usize]) -> Self {
        Self {
            n: self.n,
            generators: indices.iter().map(|&i| self.generators[i].clone()).collect(),
        }
    }

    /// All elements, by closing the generator set under composition.
    pub fn elements(&self, budget: &Budget) -> Result<Vec<Permutation>> {
        let id: Permutation = (0..self.n).collect();
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            for g in &self.generators {
                let next = compose(&out[i], g);
                if seen.insert(next.clone()) {
                    if out.len() as u64 >= budget.group_elements {
                        return Err(Error::BudgetExceeded {
                            what: "group elements",
                            limit: budget.group_elements,
                        });
                    }
                    out.push(next);
                }
            }
            i += 1;
        }
        Ok(out)
    }

    pub fn order(&self, budget: &Budget) -> Result<BigUint> {
        Ok(BigUint::from(self.elements(budget)?.len()))
    }
}

/// Union-find over `0..len` with path halving.
pub(crate) struct DisjointSets(Vec<usize>);

impl DisjointSets {
    pub(crate) fn new(len: usize) -> Self {
        Self((0..len).collect())
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

/// The orbits of the group on pairs; orbits are merged along generators so
/// no element list is needed.
pub fn orbital_config(k: &PermGroup) -> Result<CoherentConfiguration> {
    let n = k.n;
    if n == 0 {
        return Err(Error::InvalidArgument("group acts on the empty set".into()));
    }
    let mut sets = DisjointSets::new(n * n);
    for g in &k.generators {
        for a in 0..n {
            for b in 0..n {
                sets.union(a * n + b, g[a] * n + g[b]);
            }
        }
    }
    let mut label = vec![u32::MAX; n * n];
    let mut next = 0u32;
    let colors = (0..n * n)
        .map(|i| {
            let root = sets.find(i);
            if label[root] == u32::MAX {
                label[root] = next;
                next += 1;
            }
            label[root]
        })
        .collect();
    Ok(CoherentConfiguration::from_trusted(n, colors))
}

fn check_degree(n: u64, budget: &Budget) -> Result<()> {
    if n > budget.max_build_degree as u64 {
        return Err(Error::BudgetExceeded {
            what: "scheme degree",
            limit: budget.max_build_degree as u64,
        });
    }
    Ok(())
}

/// Index of `m` in the multiplicative group, after checking it is a subgroup.
fn subgroup_index(field: &FiniteField, m: &[FieldElement]) -> Result<u64> {
    let not_subgroup = |why: String| Error::from(FieldError::NotSubgroup(why));
    if m.is_empty() {
        return Err(not_subgroup("empty set".into()));
    }
    let mut reps = HashSet::new();
    for e in m {
        if e.field().p() != field.p() || e.field().d() != field.d() {
            return Err(FieldError::MixedFields.into());
        }
        if e.is_zero() {
            return Err(not_subgroup("contains zero".into()));
        }
        reps.insert(e.rep());
    }
    let order = field.order() - 1;
    if !order.is_multiple_of(reps.len() as u64) {
        return Err(not_subgroup(format!("size {} does not divide {order}", reps.len())));
    }
    for &a in &reps {
        for &b in &reps {
            if !reps.contains(&field.mul_rep(a, b)) {
                return Err(not_subgroup(format!(
                    "{} * {} is missing",
                    field.element(a),
                    field.element(b)
                )));
            }
        }
    }
    Ok(order / reps.len() as u64)
}

/// The scheme on `F` whose irreflexive relations are `{(x, y) : y - x ∈ Ma}`.
pub fn cyclotomic_scheme(field: &FiniteField, m: &[FieldElement]) -> Result<CoherentConfiguration> {
    cyclotomic_with_budget(field, m, &Budget::default())
}

pub fn cyclotomic_with_budget(
    field: &FiniteField,
    m: &[FieldElement],
    budget: &Budget,
) -> Result<CoherentConfiguration> {
    let index = subgroup_index(field, m)?;
    check_degree(field.order(), budget)?;
    let q = field.order() as usize;
    let mut colors = Vec::with_capacity(q * q);
    for x in 0..q as u64 {
        for y in 0..q as u64 {
            colors.push(match field.log_rep(field.sub_rep(y, x)) {
                None => 0,
                Some(l) => 1 + (l % index) as u32,
            });
        }
    }
    Ok(CoherentConfiguration::from_trusted(q, colors))
}

/// The group `F^× ⋊ Aut(F)` acting on `F^×`; point `i` is the element with rep `i + 1`.
pub fn multiplicative_semilinear_group(field: &FiniteField) -> PermGroup {
    let n = (field.order() - 1) as usize;
    let xi = field.primitive().rep();
    let times_xi = (0..n).map(|i| field.mul_rep(i as u64 + 1, xi) as usize - 1).collect();
    let frobenius = (0..n).map(|i| field.frobenius_rep(i as u64 + 1) as usize - 1).collect();
    PermGroup {
        n,
        generators: vec![times_xi, frobenius],
    }
}

/// The scheme `C(F)`: orbitals of `F^× ⋊ Aut(F)` on `F^×`.
pub fn c_scheme(field: &FiniteField) -> Result<CoherentConfiguration> {
    c_scheme_with_budget(field, &Budget::default())
}

pub fn c_scheme_with_budget(field: &FiniteField, budget: &Budget) -> Result<CoherentConfiguration> {
    if field.order() < 3 {
        return Err(Error::InvalidArgument(
            "C(F) needs at least two nonzero elements".into(),
        ));
    }
    check_degree(field.order() - 1, budget)?;
    orbital_config(&multiplicative_semilinear_group(field))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaleyKind {
    Graph,
    Tournament,
}

impl PaleyKind {
    /// The kind whose congruence condition `q` satisfies, for odd `q`.
    pub fn for_order(q: u64) -> Option<Self> {
        match q % 4 {
            1 => Some(Self::Graph),
            3 => Some(Self::Tournament),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Paley {
    pub field: FiniteField,
    pub kind: PaleyKind,
    pub arcs: Vec<(Point, Point)>,
    pub scheme: CoherentConfiguration,
}

/// Paley graph or tournament on `GF(q)`: arcs `(x, y)` with `y - x` a nonzero square.
pub fn paley(q: u64, kind: PaleyKind) -> Result<Paley> {
    let (p, d) = crate::gf::prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
    if p == 2 {
        return Err(Error::InvalidArgument(format!("Paley structures need odd q, got {q}")));
    }
    if PaleyKind::for_order(q) != Some(kind) {
        return Err(Error::InvalidArgument(format!(
            "q = {q} is {} mod 4, which does not admit a Paley {}",
            q % 4,
            match kind {
                PaleyKind::Graph => "graph",
                PaleyKind::Tournament => "tournament",
            }
        )));
    }
    check_degree(q, &Budget::default())?;
    let field = FiniteField::new(p, d)?;
    let mut arcs = Vec::new();
    for x in 0..q {
        for y in 0..q {
            if let Some(l) = field.log_rep(field.sub_rep(y, x)) {
                if l % 2 == 0 {
                    arcs.push((x as usize, y as usize));
                }
            }
        }
    }
    let scheme = graph_closure(&arcs, q as usize)?;
    Ok(Paley {
        field,
        kind,
        arcs,
        scheme,
    })
}
