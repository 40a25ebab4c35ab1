//! Weisfeiler-Leman stabilization and the fissions built from it.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::budget::Budget;
use crate::cc::{CoherentConfiguration, Point};
use crate::error::{Error, Result};

/// An arbitrary coloring of `Ω x Ω`, not necessarily coherent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairColoring {
    n: usize,
    color: Vec<u64>,
}

impl PairColoring {
    /// Row-major labels; panics if `labels.len() != n * n`.
    pub fn new(n: usize, labels: Vec<u64>) -> Self {
        assert_eq!(labels.len(), n * n, "pair coloring must have n * n labels");
        Self { n, color: labels }
    }

    pub fn from_fn(n: usize, f: impl Fn(Point, Point) -> u64) -> Self {
        let color = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self { n, color }
    }

    pub fn from_configuration(cc: &CoherentConfiguration) -> Self {
        Self {
            n: cc.n(),
            color: cc.colors().iter().map(|&c| c as u64).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: Point, b: Point) -> u64 {
        self.color[a * self.n + b]
    }

    /// Splits the diagonal off and makes the coloring transpose-compatible,
    /// relabelling by first occurrence.
    fn normalized(&self) -> (Vec<u32>, usize) {
        let n = self.n;
        let mut ids: HashMap<(bool, u64, u64), u32> = HashMap::new();
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let key = (a == b, self.get(a, b), self.get(b, a));
                let next = ids.len() as u32;
                out.push(*ids.entry(key).or_insert(next));
            }
        }
        (out, ids.len())
    }
}

type Signature = (u32, Vec<(u64, u32)>);

const ROW_CHUNK: usize = 64;

/// One refinement round. Returns the new coloring and its number of colors.
fn refine_round(n: usize, cur: &[u32], count: usize) -> (Vec<u32>, usize) {
    let k = count as u64;
    let mut ids: HashMap<Signature, u32> = HashMap::new();
    let mut next = Vec::with_capacity(n * n);
    let rows: Vec<usize> = (0..n).collect();
    for chunk in rows.chunks(ROW_CHUNK) {
        let sigs: Vec<Vec<Signature>> = chunk
            .par_iter()
            .map(|&a| {
                let mut keys = Vec::with_capacity(n);
                (0..n)
                    .map(|b| {
                        keys.clear();
                        keys.extend((0..n).map(|g| cur[a * n + g] as u64 * k + cur[g * n + b] as u64));
                        keys.sort_unstable();
                        let mut runs: Vec<(u64, u32)> = Vec::new();
                        for &key in &keys {
                            match runs.last_mut() {
                                Some((last, c)) if *last == key => *c += 1,
                                _ => runs.push((key, 1)),
                            }
                        }
                        (cur[a * n + b], runs)
                    })
                    .collect()
            })
            .collect();
        for row in sigs {
            for sig in row {
                let fresh = ids.len() as u32;
                next.push(*ids.entry(sig).or_insert(fresh));
            }
        }
    }
    let c = ids.len();
    (next, c)
}

fn stabilize(n: usize, mut cur: Vec<u32>, mut count: usize) -> CoherentConfiguration {
    loop {
        let (next, next_count) = refine_round(n, &cur, count);
        if next_count == count {
            return CoherentConfiguration::from_trusted(n, cur);
        }
        cur = next;
        count = next_count;
    }
}

/// The coarsest coherent configuration whose relations refine the coloring.
pub fn coherent_closure(c: &PairColoring) -> CoherentConfiguration {
    let (cur, count) = c.normalized();
    stabilize(c.n, cur, count)
}

/// The minimal fission of `x` in which `{(α, α)}` is a basis relation.
pub fn point_extension(x: &CoherentConfiguration, a: Point) -> Result<CoherentConfiguration> {
    if a >= x.n() {
        return Err(Error::OutOfRange {
            what: "point",
            value: a,
            limit: x.n(),
        });
    }
    let fresh = x.rank() as u64;
    let coloring = PairColoring::from_fn(
        x.n(),
        |u, v| {
            if u == a && v == a {
                fresh
            } else {
                x.color(u, v) as u64
            }
        },
    );
    Ok(coherent_closure(&coloring))
}

/// True iff every relation of `x` is a union of relations of `y`.
pub fn is_fission(y: &CoherentConfiguration, x: &CoherentConfiguration) -> Result<bool> {
    if y.n() != x.n() {
        return Err(Error::DegreeMismatch(y.n(), x.n()));
    }
    let mut image = vec![u32::MAX; y.rank()];
    for (&cy, &cx) in y.colors().iter().zip(x.colors()) {
        let slot = &mut image[cy as usize];
        if *slot == u32::MAX {
            *slot = cx;
        } else if *slot != cx {
            return Ok(false);
        }
    }
    debug_assert!(y.max_valency() <= x.max_valency());
    debug_assert!(y.max_indistinguishing().unwrap_or(0) <= x.max_indistinguishing().unwrap_or(0));
    Ok(true)
}

/// The 2-extension: closure of the tensor square of `x` on `Ω²` with the
/// diagonal `{(α, α)}` split off. Point `(α₁, α₂)` is labelled `α₁·n + α₂`.
pub fn m_extension(x: &CoherentConfiguration, m: usize, budget: &Budget) -> Result<CoherentConfiguration> {
    if m != 2 {
        return Err(Error::InvalidArgument(format!(
            "only the 2-extension is supported, got m = {m}"
        )));
    }
    let n = x.n();
    if n > budget.max_extension_degree {
        return Err(Error::BudgetExceeded {
            what: "2-extension degree",
            limit: budget.max_extension_degree as u64,
        });
    }
    let rank = x.rank() as u64;
    let coloring = PairColoring::from_fn(n * n, |u, v| {
        let (a1, a2) = (u / n, u % n);
        let (b1, b2) = (v / n, v % n);
        if u == v && a1 == a2 {
            rank * rank + x.color(a1, a1) as u64
        } else {
            x.color(a1, b1) as u64 * rank + x.color(a2, b2) as u64
        }
    });
    Ok(coherent_closure(&coloring))
}

/// The configuration WL(X) of a graph given by its arc set.
pub fn graph_closure(arcs: &[(Point, Point)], n: usize) -> Result<CoherentConfiguration> {
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    let mut adj = vec![false; n * n];
    for &(a, b) in arcs {
        if a >= n || b >= n {
            return Err(Error::OutOfRange {
                what: "arc endpoint",
                value: a.max(b),
                limit: n,
            });
        }
        if a == b {
            return Err(Error::InvalidArgument(format!("reflexive arc ({a}, {a})")));
        }
        adj[a * n + b] = true;
    }
    let coloring = PairColoring::from_fn(n, |a, b| {
        if a == b {
            0
        } else if adj[a * n + b] {
            1
        } else {
            2
        }
    });
    Ok(coherent_closure(&coloring))
}
