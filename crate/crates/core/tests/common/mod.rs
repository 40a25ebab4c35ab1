#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use cyclosep::builders::{cyclotomic_scheme, multiplicative_semilinear_group, orbital_config, PermGroup};
use cyclosep::closure::{coherent_closure, is_fission, point_extension, PairColoring};
use cyclosep::couples::{arrow_valency_monotone, couple_at, find_m_extension, Couple};
use cyclosep::gf::{multiplicative_subgroup, prime_power};
use cyclosep::io::{parse_ccf, parse_ccf_bytes, write_ccf};
use cyclosep::iso::algebraic_isomorphisms;
use cyclosep::{Budget, CoherentConfiguration, FiniteField, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub struct Entry {
    pub name: String,
    pub x: CoherentConfiguration,
}

pub fn prime_powers(limit: u64) -> Vec<(u64, u64, u32)> {
    (2..=limit)
        .filter_map(|q| prime_power(q).map(|(p, d)| (q, p, d)))
        .collect()
}

pub fn cyclotomic_entries(limit: u64) -> Vec<Entry> {
    let mut out = Vec::new();
    for (q, p, d) in prime_powers(limit) {
        let field = FiniteField::new(p, d).unwrap();
        for index in (1..q).filter(|i| (q - 1) % i == 0) {
            let m = multiplicative_subgroup(&field, index).unwrap();
            out.push(Entry {
                name: format!("cyclotomic q={q} index={index}"),
                x: cyclotomic_scheme(&field, &m).unwrap(),
            });
        }
    }
    out
}

fn cycle(n: usize, points: &[usize]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for (i, &a) in points.iter().enumerate() {
        perm[a] = points[(i + 1) % points.len()];
    }
    perm
}

fn product(n: usize, cycles: &[&[usize]]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for c in cycles {
        let next = cycle(n, c);
        perm = perm.iter().map(|&a| next[a]).collect();
    }
    perm
}

pub fn small_groups() -> Vec<(String, PermGroup)> {
    let affine7 = {
        let shift = (0..7).map(|a| (a + 1) % 7).collect();
        let scale = (0..7).map(|a| (3 * a) % 7).collect();
        PermGroup::new(7, vec![shift, scale]).unwrap()
    };
    let g = |n, gens: Vec<Vec<usize>>| PermGroup::new(n, gens).unwrap();
    vec![
        ("Sym(4)".into(), PermGroup::symmetric(4)),
        ("C6".into(), PermGroup::cyclic(6)),
        (
            "D5".into(),
            g(5, vec![cycle(5, &[0, 1, 2, 3, 4]), product(5, &[&[1, 4], &[2, 3]])]),
        ),
        ("D4".into(), g(4, vec![cycle(4, &[0, 1, 2, 3]), cycle(4, &[0, 2])])),
        (
            "Klein".into(),
            g(
                4,
                vec![product(4, &[&[0, 1], &[2, 3]]), product(4, &[&[0, 2], &[1, 3]])],
            ),
        ),
        ("A4".into(), g(4, vec![cycle(4, &[0, 1, 2]), cycle(4, &[1, 2, 3])])),
        ("AGL(1,7)".into(), affine7),
        (
            "GammaL(1,8)".into(),
            multiplicative_semilinear_group(&FiniteField::new(2, 3).unwrap()),
        ),
        ("<(0 1)> on 4".into(), g(4, vec![cycle(4, &[0, 1])])),
        (
            "Sym(3) x Sym(2)".into(),
            g(5, vec![cycle(5, &[0, 1, 2]), cycle(5, &[0, 1]), cycle(5, &[3, 4])]),
        ),
    ]
}

pub fn corpus() -> Vec<Entry> {
    let mut out = cyclotomic_entries(32);
    for (name, group) in small_groups() {
        out.push(Entry {
            name: format!("orbitals of {name}"),
            x: orbital_config(&group).unwrap(),
        });
    }
    for n in 1..=12 {
        out.push(Entry {
            name: format!("trivial n={n}"),
            x: CoherentConfiguration::trivial(n),
        });
        out.push(Entry {
            name: format!("discrete n={n}"),
            x: CoherentConfiguration::discrete(n),
        });
    }
    out
}

fn sorted_image(phi: &[Relation], rs: &[Relation]) -> Vec<Relation> {
    let mut v: Vec<Relation> = rs.iter().map(|&r| phi[r]).collect();
    v.sort_unstable();
    v
}

/// Rebuilding from the matrix, from the flat labels and after relabelling
/// points gives back the same configuration; tensor entries match direct counts.
pub fn axiom_round_trip(x: &CoherentConfiguration) -> Check {
    let back = CoherentConfiguration::from_color_matrix(&x.color_matrix()).map_err(|e| e.to_string())?;
    if &back != x {
        return Err("matrix round trip changed the configuration".into());
    }
    let flat = CoherentConfiguration::from_flat(x.n(), x.colors().to_vec()).map_err(|e| e.to_string())?;
    if &flat != x {
        return Err("flat round trip changed the configuration".into());
    }
    let n = x.n();
    let shift: Vec<usize> = (0..n).map(|a| (a + 1) % n).collect();
    let unshift: Vec<usize> = (0..n).map(|a| (a + n - 1) % n).collect();
    let moved = x.permute_points(&shift).map_err(|e| e.to_string())?;
    if moved.rank() != x.rank() || &moved.permute_points(&unshift).map_err(|e| e.to_string())? != x {
        return Err("relabelling is not invertible".into());
    }
    if x.rank() <= 40 {
        for r in 0..x.rank() {
            for s in 0..x.rank() {
                for t in 0..x.rank() {
                    if x.intersection_number(r, s, t).map_err(|e| e.to_string())? != x.c(r, s, t) {
                        return Err(format!("tensor entry ({r},{s},{t}) differs from direct count"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Triangle symmetry of complex products, the product size bound and the
/// lifting of a `t`-pair through `μr`.
pub fn product_identities(x: &CoherentConfiguration) -> Check {
    let k = x.rank();
    let cv = |r| x.converse(r);
    let has = |r: Relation, s: Relation, t: Relation| x.complex_product(r, s).contains(&t);
    for r in 0..k {
        for s in 0..k {
            let rs = x.complex_product(r, s);
            if rs.len() > x.valency(cv(r)).min(x.valency(s)) {
                return Err(format!("|{r}{s}| = {} exceeds the valency bound", rs.len()));
            }
            if x.is_homogeneous() && rs.len() > x.valency(r).min(x.valency(s)) {
                return Err(format!("|{r}{s}| = {} exceeds both valencies", rs.len()));
            }
            for t in 0..k {
                let a = has(r, s, t);
                if a != has(t, cv(s), r) || a != has(cv(r), t, s) {
                    return Err(format!("triangle symmetry fails at ({r},{s},{t})"));
                }
            }
            for &t in x.complex_product(cv(r), s) {
                for mu in x.fibers()[x.source_fiber(r)].iter().copied() {
                    for b in x.neighbors(mu, s) {
                        if !x.neighbors(mu, r).any(|a| x.color(a, b) == t) {
                            return Err(format!("no lift of ({mu},{b}) for t={t} through r={r}"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn arrows_monotone(x: &CoherentConfiguration) -> Check {
    if arrow_valency_monotone(x) {
        Ok(())
    } else {
        Err("an arrow decreases valency".into())
    }
}

/// For every base point and every couple with an extension over it whose
/// first side is an arrow and second side a weak arrow, the third relation
/// is forced: every realization of `(x, y, z; r, s)` closes with `t`.
pub fn couple_replay(x: &CoherentConfiguration) -> Check {
    couple_replay_count(x).map(|_| ())
}

/// Number of extendable couples the replay checked.
pub fn couple_replay_count(x: &CoherentConfiguration) -> Result<usize, String> {
    let n = x.n();
    let mut checked = 0;
    if n > 20 {
        return Ok(0);
    }
    let cv = |r| x.converse(r);
    for mu in 0..n {
        let mut seen: HashMap<(Relation, Relation, Relation, Relation, Relation), BTreeSet<Relation>> = HashMap::new();
        for a in 0..n {
            for b in 0..n {
                for g in 0..n {
                    let q = couple_at(x, mu, a, b, g);
                    seen.entry((q.x, q.y, q.z, q.r, q.s)).or_default().insert(q.t);
                }
            }
        }
        for (&(qx, qy, qz, r, s), ts) in &seen {
            let forward = x.c(qx, r, qy) == 1;
            let side = x.c(qy, s, qz) == 1 || x.c(qz, cv(s), qy) == 1;
            if !(forward && side) {
                continue;
            }
            for &t in x.complex_product(cv(qz), qx) {
                let q = Couple {
                    x: qx,
                    y: qy,
                    z: qz,
                    r,
                    s,
                    t,
                };
                if !q.is_valid(x) || find_m_extension(x, &q, Some(mu)).is_none() {
                    continue;
                }
                if ts.len() != 1 || !ts.contains(&t) {
                    return Err(format!("mu={mu}: extendable {q:?} but realizations close with {ts:?}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// The point extension is a fission whose valency and indistinguishing
/// number do not grow.
pub fn extension_monotone(x: &CoherentConfiguration) -> Check {
    if x.n() > 32 {
        return Ok(());
    }
    let y = point_extension(x, 0).map_err(|e| e.to_string())?;
    if !is_fission(&y, x).map_err(|e| e.to_string())? {
        return Err("point extension is not a fission".into());
    }
    if y.max_valency() > x.max_valency() {
        return Err("valency grew under point extension".into());
    }
    if y.max_indistinguishing().unwrap_or(0) > x.max_indistinguishing().unwrap_or(0) {
        return Err("indistinguishing number grew under point extension".into());
    }
    Ok(())
}

/// Every algebraic automorphism commutes with converse, complex products,
/// their intersections and arrows.
pub fn algebraic_preservation(x: &CoherentConfiguration, budget: &Budget) -> Check {
    let k = x.rank();
    if k > 10 || x.n() > 32 {
        return Ok(());
    }
    let maps = algebraic_isomorphisms(x, x, budget).map_err(|e| e.to_string())?;
    if maps.is_empty() {
        return Err("identity missing from algebraic automorphisms".into());
    }
    for map in &maps {
        let phi: Vec<Relation> = (0..k).map(|r| map.apply(r)).collect();
        if !map.validate(x, x) {
            return Err(format!("{phi:?} does not preserve intersection numbers"));
        }
        for r in 0..k {
            if phi[x.converse(r)] != x.converse(phi[r]) {
                return Err(format!("{phi:?} does not commute with converse at {r}"));
            }
            for s in 0..k {
                let image = sorted_image(&phi, x.complex_product(r, s));
                if image != x.complex_product(phi[r], phi[s]) {
                    return Err(format!("{phi:?} does not preserve the product {r}{s}"));
                }
                for t in 0..k {
                    if (x.c(r, s, t) == 1) != (x.c(phi[r], phi[s], phi[t]) == 1) {
                        return Err(format!("{phi:?} breaks the arrow ({r},{s},{t})"));
                    }
                }
            }
        }
        if k <= 8 {
            for r in 0..k {
                for s in 0..k {
                    let rs: BTreeSet<Relation> = x.complex_product(r, s).iter().copied().collect();
                    for u in 0..k {
                        for v in 0..k {
                            let meet: Vec<Relation> = x
                                .complex_product(u, v)
                                .iter()
                                .copied()
                                .filter(|t| rs.contains(t))
                                .collect();
                            let left = sorted_image(&phi, &meet);
                            let other: BTreeSet<Relation> = x.complex_product(phi[u], phi[v]).iter().copied().collect();
                            let right: Vec<Relation> = x
                                .complex_product(phi[r], phi[s])
                                .iter()
                                .copied()
                                .filter(|t| other.contains(t))
                                .collect();
                            if left != right {
                                return Err(format!("{phi:?} breaks {r}{s} meet {u}{v}"));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn closure_idempotent(x: &CoherentConfiguration) -> Check {
    if &coherent_closure(&PairColoring::from_configuration(x)) != x {
        return Err("closure of a coherent coloring changed it".into());
    }
    Ok(())
}

pub fn ccf_round_trip(x: &CoherentConfiguration) -> Check {
    let text = write_ccf(x);
    match parse_ccf(&text) {
        Ok(back) if &back == x => Ok(()),
        Ok(_) => Err("CCF round trip changed the configuration".into()),
        Err(e) => Err(format!("written CCF does not parse: {e}")),
    }
}

/// Random byte edits of a valid file: parsing must return, never panic,
/// and anything accepted must satisfy the axioms again.
pub fn parser_fuzz(x: &CoherentConfiguration, seed: u64, rounds: usize) -> Check {
    let base = write_ccf(x).into_bytes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ALPHABET: &[u8] = b"0123456789 \n\r-+ccf#x\t";
    for _ in 0..rounds {
        let mut bytes = base.clone();
        for _ in 0..rng.gen_range(1..=4) {
            let at = rng.gen_range(0..=bytes.len());
            match rng.gen_range(0..4) {
                0 if at < bytes.len() => {
                    bytes.remove(at);
                }
                1 => bytes.insert(at, ALPHABET[rng.gen_range(0..ALPHABET.len())]),
                2 if at < bytes.len() => bytes[at] = rng.gen(),
                _ => bytes.truncate(at),
            }
        }
        let parsed = std::panic::catch_unwind(|| parse_ccf_bytes(&bytes))
            .map_err(|_| format!("parser panicked on {:?}", String::from_utf8_lossy(&bytes)))?;
        if let Ok(y) = parsed {
            CoherentConfiguration::from_flat(y.n(), y.colors().to_vec())
                .map_err(|e| format!("accepted input fails the axioms: {e}"))?;
        }
    }
    Ok(())
}

pub fn all_properties(x: &CoherentConfiguration, budget: &Budget, seed: u64) -> Vec<(&'static str, Check)> {
    vec![
        ("axiom round trip", axiom_round_trip(x)),
        ("product identities", product_identities(x)),
        ("arrow valency", arrows_monotone(x)),
        ("couple replay", couple_replay(x)),
        ("extension monotone", extension_monotone(x)),
        ("algebraic preservation", algebraic_preservation(x, budget)),
        ("closure idempotent", closure_idempotent(x)),
        ("ccf round trip", ccf_round_trip(x)),
        ("parser fuzz", parser_fuzz(x, seed, 200)),
    ]
}
