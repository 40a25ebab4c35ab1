//! Exact arithmetic in GF(p^d) over a polynomial basis.
//!
//! An element is stored by its coefficient vector `(c_0, ..., c_{d-1})`
//! packed as the base-p integer `c_0 + c_1 p + ... + c_{d-1} p^{d-1}`.
//! That integer (the *rep*) doubles as the point label used by the scheme
//! builders, so the zero element is always point 0.

use std::fmt;
use std::sync::Arc;

use crate::error::FieldError;

/// Fields up to this order get discrete log / exp tables.
const TABLE_LIMIT: u64 = 1 << 22;

#[derive(Debug)]
struct FieldData {
    p: u64,
    d: u32,
    q: u64,
    /// Low coefficients `c_0..c_{d-1}` of the monic modulus.
    modulus: Vec<u64>,
    xi: u64,
    tables: Option<LogTables>,
}

#[derive(Debug)]
struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// A finite field GF(p^d) with a fixed irreducible modulus and primitive element.
///
/// Cloning is cheap: the field data is shared.
#[derive(Clone)]
pub struct FiniteField(Arc<FieldData>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.d == other.0.d && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.0.p)
            .field("d", &self.0.d)
            .field("modulus", &self.modulus())
            .field("xi", &self.0.xi)
            .finish()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i.saturating_mul(i) <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Splits `q` into `(p, d)` with `q = p^d`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..)
        .take_while(|i: &u64| i.saturating_mul(*i) <= q)
        .find(|i| q.is_multiple_of(*i))
        .unwrap_or(q);
    let mut rest = q;
    let mut d = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        d += 1;
    }
    (rest == 1).then_some((p, d))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = 2u64;
    while i.saturating_mul(i) <= n {
        if n.is_multiple_of(i) {
            out.push(i);
            while n.is_multiple_of(i) {
                n /= i;
            }
        }
        i += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Remainder of `num` modulo the monic polynomial `div` (coefficients low to high, leading 1 included).
fn poly_rem(num: &[u64], div: &[u64], p: u64) -> Vec<u64> {
    let mut r = num.to_vec();
    let dd = div.len() - 1;
    while r.len() > dd {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - dd;
            for (i, &c) in div[..dd].iter().enumerate() {
                let sub = mulmod(lead, c, p);
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
    }
    r
}

fn digits_of(mut idx: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for c in out.iter_mut() {
        *c = idx % p;
        idx /= p;
    }
    out
}

/// Trial division by every monic polynomial of degree `1..=d/2`.
fn is_irreducible(low: &[u64], p: u64) -> bool {
    let d = low.len();
    let mut full = low.to_vec();
    full.push(1);
    for deg in 1..=d / 2 {
        let count = p.pow(deg as u32);
        for idx in 0..count {
            let mut div = digits_of(idx, p, deg);
            div.push(1);
            if poly_rem(&full, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// Builds GF(p^d) deterministically.
    ///
    /// The modulus is the least monic irreducible polynomial of degree `d`,
    /// ordering candidates by `(c_{d-1}, ..., c_0)` read as a base-p integer.
    /// The primitive element is the generator with the smallest rep.
    pub fn new(p: u64, d: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if d == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = p.checked_pow(d).ok_or(FieldError::Overflow { p, d })?;
        let modulus = (0..q)
            .map(|idx| digits_of(idx, p, d as usize))
            .find(|low| is_irreducible(low, p))
            .expect("an irreducible polynomial of every degree exists");
        let mut data = FieldData {
            p,
            d,
            q,
            modulus,
            xi: 0,
            tables: None,
        };
        let factors = prime_factors(q - 1);
        data.xi = (1..q)
            .find(|&a| factors.iter().all(|&r| data.pow_poly(a, (q - 1) / r) != 1))
            .expect("the multiplicative group of a finite field is cyclic");
        if q <= TABLE_LIMIT {
            let mut exp = Vec::with_capacity((q - 1) as usize);
            let mut log = vec![0u32; q as usize];
            let mut cur = 1u64;
            for i in 0..q - 1 {
                exp.push(cur as u32);
                log[cur as usize] = i as u32;
                cur = data.mul_poly(cur, data.xi);
            }
            data.tables = Some(LogTables { exp, log });
        }
        Ok(FiniteField(Arc::new(data)))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn d(&self) -> u32 {
        self.0.d
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }

    /// Full modulus coefficients `c_0, ..., c_{d-1}, 1`.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.0.modulus.clone();
        m.push(1);
        m
    }

    pub fn primitive(&self) -> FieldElement {
        self.element(self.0.xi)
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// The element with the given rep. Panics if `rep >= q`.
    pub fn element(&self, rep: u64) -> FieldElement {
        assert!(rep < self.0.q, "rep {rep} out of range for field of order {}", self.0.q);
        FieldElement {
            field: self.clone(),
            rep,
        }
    }

    /// Builds an element from coefficients `c_0, ..., c_{d-1}`.
    pub fn from_coefficients(&self, coeffs: &[u64]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.0.d as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(FieldError::InvalidElement(format!(
                "coefficient vector {coeffs:?} is not an element of GF({}^{})",
                self.0.p, self.0.d
            )));
        }
        Ok(self.element(self.0.digits_to_rep(coeffs)))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.q).map(|r| self.element(r))
    }

    pub fn add_rep(&self, a: u64, b: u64) -> u64 {
        self.0.add(a, b)
    }

    pub fn sub_rep(&self, a: u64, b: u64) -> u64 {
        self.0.add(a, self.0.neg(b))
    }

    pub fn neg_rep(&self, a: u64) -> u64 {
        self.0.neg(a)
    }

    pub fn mul_rep(&self, a: u64, b: u64) -> u64 {
        match &self.0.tables {
            Some(t) => {
                if a == 0 || b == 0 {
                    return 0;
                }
                let e = (t.log[a as usize] as u64 + t.log[b as usize] as u64) % (self.0.q - 1);
                t.exp[e as usize] as u64
            }
            None => self.0.mul_poly(a, b),
        }
    }

    pub fn pow_rep(&self, a: u64, e: u64) -> u64 {
        self.0.pow_poly(a, e)
    }

    /// Inverse of a nonzero rep.
    pub fn inv_rep(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.0.pow_poly(a, self.0.q - 2))
    }

    /// Discrete logarithm to base `xi` of a nonzero rep.
    pub fn log_rep(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        match &self.0.tables {
            Some(t) => Some(t.log[a as usize] as u64),
            None => {
                let mut cur = 1;
                for i in 0..self.0.q - 1 {
                    if cur == a {
                        return Some(i);
                    }
                    cur = self.0.mul_poly(cur, self.0.xi);
                }
                None
            }
        }
    }

    /// `xi^e` as a rep.
    pub fn exp_rep(&self, e: u64) -> u64 {
        match &self.0.tables {
            Some(t) => t.exp[(e % (self.0.q - 1)) as usize] as u64,
            None => self.0.pow_poly(self.0.xi, e % (self.0.q - 1)),
        }
    }

    /// The image of a rep under the Frobenius map `x -> x^p`.
    pub fn frobenius_rep(&self, a: u64) -> u64 {
        self.0.pow_poly(a, self.0.p)
    }
}

impl FieldData {
    fn digits(&self, rep: u64) -> Vec<u64> {
        digits_of(rep, self.p, self.d as usize)
    }

    fn digits_to_rep(&self, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.digits_to_rep(&sum)
    }

    fn neg(&self, a: u64) -> u64 {
        if self.p == 2 {
            return a;
        }
        let neg: Vec<u64> = self.digits(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.digits_to_rep(&neg)
    }

    fn mul_poly(&self, a: u64, b: u64) -> u64 {
        let (da, db) = (self.digits(a), self.digits(b));
        let d = self.d as usize;
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulmod(x, y, self.p)) % self.p;
            }
        }
        let mut full = self.modulus.clone();
        full.push(1);
        self.digits_to_rep(&poly_rem(&prod, &full, self.p))
    }

    fn pow_poly(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }
}

/// An element of a [`FiniteField`].
///
/// Elements of different fields never compare: use [`FieldElement::try_eq`],
/// which reports mixing as an error.
#[derive(Clone)]
pub struct FieldElement {
    field: FiniteField,
    rep: u64,
}

/// Arithmetic operation selector for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn rep(&self) -> u64 {
        self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep == 0
    }

    pub fn coefficients(&self) -> Vec<u64> {
        self.field.0.digits(self.rep)
    }

    fn same_field(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::MixedFields)
        }
    }

    pub fn try_eq(&self, other: &FieldElement) -> Result<bool, FieldError> {
        self.same_field(other)?;
        Ok(self.rep == other.rep)
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arith(self, other, FieldOp::Add)
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arith(self, other, FieldOp::Sub)
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arith(self, other, FieldOp::Mul)
    }

    pub fn try_div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arith(self, other, FieldOp::Div)
    }

    pub fn inverse(&self) -> Result<FieldElement, FieldError> {
        let inv = self.field.inv_rep(self.rep).ok_or(FieldError::DivisionByZero)?;
        Ok(self.field.element(inv))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.field.element(self.field.pow_rep(self.rep, e))
    }

    /// Multiplicative order; `None` for zero.
    pub fn multiplicative_order(&self) -> Option<u64> {
        let q1 = self.field.order() - 1;
        let log = self.field.log_rep(self.rep)?;
        Some(q1 / num_integer::gcd(log, q1))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({} in GF({}^{}))", self, self.field.p(), self.field.d())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs = self.coefficients();
        let terms: Vec<String> = coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

/// Adds, subtracts, multiplies or divides two elements of the same field.
pub fn field_arith(a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement, FieldError> {
    a.same_field(b)?;
    let f = &a.field;
    let rep = match op {
        FieldOp::Add => f.add_rep(a.rep, b.rep),
        FieldOp::Sub => f.sub_rep(a.rep, b.rep),
        FieldOp::Mul => f.mul_rep(a.rep, b.rep),
        FieldOp::Div => {
            let inv = f.inv_rep(b.rep).ok_or(FieldError::DivisionByZero)?;
            f.mul_rep(a.rep, inv)
        }
    };
    Ok(f.element(rep))
}

/// The orbit `{a, a^p, a^{p^2}, ...}` of `a` under the Frobenius automorphism.
pub fn frobenius_orbit(a: &FieldElement) -> Vec<FieldElement> {
    let f = a.field();
    let mut orbit = vec![a.clone()];
    let mut cur = f.frobenius_rep(a.rep);
    while cur != a.rep {
        orbit.push(f.element(cur));
        cur = f.frobenius_rep(cur);
    }
    orbit
}

/// The unique subgroup of index `index` in the multiplicative group,
/// `{xi^(index * j)}`, sorted by rep.
pub fn multiplicative_subgroup(field: &FiniteField, index: u64) -> Result<Vec<FieldElement>, FieldError> {
    let order = field.order() - 1;
    if index == 0 || !order.is_multiple_of(index) {
        return Err(FieldError::IndexNotDivisor { index, order });
    }
    let mut reps: Vec<u64> = (0..order / index).map(|j| field.exp_rep(index * j)).collect();
    reps.sort_unstable();
    Ok(reps.into_iter().map(|r| field.element(r)).collect())
}
