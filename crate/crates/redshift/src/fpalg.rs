//! Graded-commutative monomial algebras over F_p with Koszul signs.
//!
//! Every page of every spectral sequence in this crate lives inside one of
//! these algebras: a fixed ordered list of named generators, each exterior,
//! polynomial, truncated polynomial or Laurent, each with a bidegree
//! `(s, n)` (filtration, total degree).  Elements are finite F_p-linear
//! combinations of monomials.  Products collect exponents in the declared
//! generator order and pick up a sign for every transposition of two
//! odd-degree generators.
//!
//! All values are immutable and every operation is a pure function.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// An odd prime, the characteristic of every coefficient field in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Prime, FpalgError> {
        if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
            return Err(FpalgError::NotAnOddPrime { p });
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `true` when the algebra is running below the range where the
    /// topology applies; the combinatorics are identical.
    pub fn is_formal(self) -> bool {
        self.0 < 7
    }

    pub fn reduce(self, c: i64) -> u32 {
        c.rem_euclid(self.0 as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a % self.0) % self.0
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// Multiplicative inverse of a nonzero residue, via Fermat.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "inverse of zero mod {}", self.0);
        let mut acc = 1u32;
        let mut base = a % self.0;
        let mut e = self.0 - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exponent discipline of one generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeneratorKind {
    /// Exponents in `{0, 1}`; squares vanish.  Total degree must be odd.
    Exterior,
    /// Exponents `>= 0`.
    Polynomial,
    /// Exponents in `[0, h)`; `x^h = 0`.
    Truncated(u64),
    /// Any integer exponent.
    Laurent,
}

impl GeneratorKind {
    pub fn allows(self, e: i64) -> bool {
        match self {
            GeneratorKind::Exterior => e == 0 || e == 1,
            GeneratorKind::Polynomial => e >= 0,
            GeneratorKind::Truncated(h) => e >= 0 && (e as u64) < h,
            GeneratorKind::Laurent => true,
        }
    }
}

/// A named bigraded generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub kind: GeneratorKind,
    /// `(s, n)`: filtration and total degree.
    pub bidegree: (i64, i64),
}

impl GeneratorSpec {
    pub fn new(name: &str, kind: GeneratorKind, s: i64, n: i64) -> GeneratorSpec {
        GeneratorSpec {
            name: name.to_string(),
            kind,
            bidegree: (s, n),
        }
    }

    pub fn is_odd(&self) -> bool {
        self.bidegree.1.rem_euclid(2) == 1
    }
}

/// The ambient algebra of a page: an odd prime and an ordered generator list.
///
/// The declaration order is the canonical monomial order; all Koszul signs
/// are computed relative to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialAlgebraSpec {
    pub prime: Prime,
    pub generators: Vec<GeneratorSpec>,
}

impl MonomialAlgebraSpec {
    pub fn new(prime: Prime, generators: Vec<GeneratorSpec>) -> Result<Self, FpalgError> {
        for (i, g) in generators.iter().enumerate() {
            if let GeneratorKind::Truncated(h) = g.kind {
                if h < 1 {
                    return Err(FpalgError::BadTruncationHeight {
                        name: g.name.clone(),
                    });
                }
            }
            let odd = g.is_odd();
            if odd && g.kind != GeneratorKind::Exterior {
                return Err(FpalgError::OddNonExterior {
                    name: g.name.clone(),
                });
            }
            if !odd && g.kind == GeneratorKind::Exterior {
                return Err(FpalgError::EvenExterior {
                    name: g.name.clone(),
                });
            }
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(FpalgError::DuplicateName {
                    name: g.name.clone(),
                });
            }
        }
        Ok(MonomialAlgebraSpec { prime, generators })
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn unit(&self) -> Monomial {
        Monomial {
            exps: vec![0; self.generators.len()],
        }
    }

    /// Monomial with a single exponent set, e.g. `t^5`.
    pub fn power(&self, name: &str, e: i64) -> Monomial {
        let mut m = self.unit();
        let i = self
            .gen_index(name)
            .unwrap_or_else(|| panic!("no generator named {name}"));
        m.exps[i] = e;
        m
    }

    /// Monomial from (name, exponent) pairs.
    pub fn monomial(&self, parts: &[(&str, i64)]) -> Monomial {
        let mut m = self.unit();
        for &(name, e) in parts {
            let i = self
                .gen_index(name)
                .unwrap_or_else(|| panic!("no generator named {name}"));
            m.exps[i] += e;
        }
        m
    }

    pub fn validate(&self, m: &Monomial) -> Result<(), FpalgError> {
        if m.exps.len() != self.generators.len() {
            return Err(FpalgError::WrongGeneratorCount {
                got: m.exps.len(),
                expected: self.generators.len(),
            });
        }
        for (g, &e) in self.generators.iter().zip(&m.exps) {
            if !g.kind.allows(e) {
                return Err(FpalgError::ExponentOutOfRange {
                    name: g.name.clone(),
                    exponent: e,
                });
            }
        }
        Ok(())
    }

    /// Render a monomial in the canonical grammar: factors joined by `*`,
    /// powers with `^`, unit as `1`.
    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (g, &e) in self.generators.iter().zip(&m.exps) {
            if e == 0 {
                continue;
            }
            if e == 1 {
                parts.push(g.name.clone());
            } else {
                parts.push(format!("{}^{}", g.name, e));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn format_element(&self, el: &Element) -> String {
        if el.is_zero() {
            return "0".to_string();
        }
        el.terms
            .iter()
            .map(|(m, c)| {
                if *c == 1 {
                    self.format_monomial(m)
                } else {
                    format!("{}*{}", c, self.format_monomial(m))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A monomial: one integer exponent per generator, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub exps: Vec<i64>,
}

impl Monomial {
    pub fn exp(&self, i: usize) -> i64 {
        self.exps[i]
    }

    pub fn is_unit(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }
}

/// A finite F_p-linear combination of monomials.  Zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    pub terms: BTreeMap<Monomial, u32>,
}

impl Element {
    pub fn zero() -> Element {
        Element {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_monomial(m: Monomial) -> Element {
        let mut terms = BTreeMap::new();
        terms.insert(m, 1);
        Element { terms }
    }

    pub fn term(p: Prime, m: Monomial, c: i64) -> Element {
        let c = p.reduce(c);
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Element { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: Prime, m: Monomial, c: u32) {
        if c.is_multiple_of(p.get()) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c % p.get());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = p.add(*o.get(), c);
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, p: Prime, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(p, m.clone(), c);
        }
        out
    }

    pub fn scale(&self, p: Prime, c: i64) -> Element {
        let c = p.reduce(c);
        if c == 0 {
            return Element::zero();
        }
        Element {
            terms: self
                .terms
                .iter()
                .map(|(m, &v)| (m.clone(), p.mul(v, c)))
                .collect(),
        }
    }

    /// Bidegree when homogeneous and nonzero, `None` otherwise.
    pub fn bidegree(&self, alg: &MonomialAlgebraSpec) -> Option<(i64, i64)> {
        let mut it = self.terms.keys();
        let first = bidegree_of(alg, it.next()?).ok()?;
        for m in it {
            if bidegree_of(alg, m).ok()? != first {
                return None;
            }
        }
        Some(first)
    }
}

/// A finite bidegree box: `s` in `[s_min, s_max]`, `n` in `[n_min, n_max]`,
/// all inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub s_min: i64,
    pub s_max: i64,
    pub n_min: i64,
    pub n_max: i64,
}

impl Window {
    pub fn new(s_min: i64, s_max: i64, n_min: i64, n_max: i64) -> Window {
        Window {
            s_min,
            s_max,
            n_min,
            n_max,
        }
    }

    pub fn contains(&self, s: i64, n: i64) -> bool {
        s >= self.s_min && s <= self.s_max && n >= self.n_min && n <= self.n_max
    }

    pub fn is_empty(&self) -> bool {
        self.s_min > self.s_max || self.n_min > self.n_max
    }

    /// Shrink by `ds` in filtration and `dn` in degree on each side.
    pub fn shrunk(&self, ds: i64, dn: i64) -> Window {
        Window {
            s_min: self.s_min + ds,
            s_max: self.s_max - ds,
            n_min: self.n_min + dn,
            n_max: self.n_max - dn,
        }
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window {
            s_min: self.s_min.max(other.s_min),
            s_max: self.s_max.min(other.s_max),
            n_min: self.n_min.max(other.n_min),
            n_max: self.n_max.min(other.n_max),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s={}..{},n={}..{}",
            self.s_min, self.s_max, self.n_min, self.n_max
        )
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FpalgError {
    #[error("{p} is not an odd prime")]
    NotAnOddPrime { p: u32 },
    #[error("duplicate generator name {name}")]
    DuplicateName { name: String },
    #[error("generator {name} has odd total degree but is not exterior")]
    OddNonExterior { name: String },
    #[error("generator {name} is exterior but has even total degree")]
    EvenExterior { name: String },
    #[error("generator {name}: truncation height must be >= 1")]
    BadTruncationHeight { name: String },
    #[error("monomial has {got} exponents, algebra has {expected} generators")]
    WrongGeneratorCount { got: usize, expected: usize },
    #[error("exponent {exponent} out of range for generator {name}")]
    ExponentOutOfRange { name: String, exponent: i64 },
    #[error("window enumeration is infinite; unbounded along {names:?}")]
    EnumerationInfinite { names: Vec<String> },
}

/// Componentwise sum of `exponent * bidegree` over the generators.
pub fn bidegree_of(alg: &MonomialAlgebraSpec, m: &Monomial) -> Result<(i64, i64), FpalgError> {
    alg.validate(m)?;
    Ok(bidegree_unchecked(alg, m))
}

pub(crate) fn bidegree_unchecked(alg: &MonomialAlgebraSpec, m: &Monomial) -> (i64, i64) {
    let mut s = 0i64;
    let mut n = 0i64;
    for (g, &e) in alg.generators.iter().zip(&m.exps) {
        s += e * g.bidegree.0;
        n += e * g.bidegree.1;
    }
    (s, n)
}

/// Product of two monomials: collected exponents and the Koszul sign, or
/// `None` when an exterior square or truncation overflow kills the product.
pub fn mono_mul(alg: &MonomialAlgebraSpec, a: &Monomial, b: &Monomial) -> Option<(Monomial, i32)> {
    let mut exps = Vec::with_capacity(alg.generators.len());
    for ((g, &ea), &eb) in alg.generators.iter().zip(&a.exps).zip(&b.exps) {
        let e = ea + eb;
        match g.kind {
            GeneratorKind::Exterior if e > 1 => return None,
            GeneratorKind::Truncated(h) if e as u64 >= h => return None,
            _ => {}
        }
        exps.push(e);
    }
    // Sign: each odd generator of b moves left past every odd generator of a
    // that sits later in the declaration order.
    let n = alg.generators.len();
    let mut suffix = vec![0u64; n + 1]; // odd gens of a at positions > i
    for i in (0..n).rev() {
        let cnt = u64::from(alg.generators[i].is_odd() && a.exps[i] != 0);
        suffix[i] = suffix[i + 1] + cnt;
    }
    let mut transpositions = 0u64;
    for i in 0..n {
        if alg.generators[i].is_odd() && b.exps[i] != 0 {
            transpositions += suffix[i + 1];
        }
    }
    let sign = if transpositions.is_multiple_of(2) {
        1
    } else {
        -1
    };
    Some((Monomial { exps }, sign))
}

/// F_p-bilinear product with the Koszul sign convention.
pub fn multiply(alg: &MonomialAlgebraSpec, a: &Element, b: &Element) -> Element {
    let p = alg.prime;
    let mut out = Element::zero();
    for (ma, &ca) in &a.terms {
        for (mb, &cb) in &b.terms {
            if let Some((m, sign)) = mono_mul(alg, ma, mb) {
                let c = p.mul(ca, cb);
                let c = if sign < 0 { p.neg(c) } else { c };
                out.add_term(p, m, c);
            }
        }
    }
    out
}

/// Complete, duplicate-free enumeration of the monomials whose bidegree lies
/// in `window`, in graded-lex order by `(n, s, exponent vector)`.
///
/// Errors with [`FpalgError::EnumerationInfinite`] when the window cannot be
/// finite, e.g. two Laurent generators with proportional bidegrees.
pub fn basis_in_window(
    alg: &MonomialAlgebraSpec,
    window: &Window,
) -> Result<Vec<Monomial>, FpalgError> {
    if window.is_empty() {
        return Ok(Vec::new());
    }
    let n = alg.generators.len();
    // Enumerate in an order that keeps interval propagation sharp: bounded
    // kinds first, unbounded kinds last.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| match alg.generators[i].kind {
        GeneratorKind::Exterior => 0,
        GeneratorKind::Truncated(_) => 1,
        GeneratorKind::Polynomial => 2,
        GeneratorKind::Laurent => 3,
    });

    let mut out = Vec::new();
    let mut exps = vec![0i64; n];
    enumerate(alg, window, &order, 0, &mut exps, 0, 0, &mut out)?;
    type Keyed = ((i64, i64, Vec<i64>), Monomial);
    let mut keyed: Vec<Keyed> = out
        .into_iter()
        .map(|m| {
            let (s, nn) = bidegree_unchecked(alg, &m);
            ((nn, s, m.exps.clone()), m)
        })
        .collect();
    keyed.sort();
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(keyed.into_iter().map(|(_, m)| m).collect())
}

/// Range of the functional `f` over all legal exponent choices of the
/// generators listed in `rest`.  `f` is given by its values on `(s, n)`.
fn functional_range(
    alg: &MonomialAlgebraSpec,
    rest: &[usize],
    f: (i64, i64),
) -> (Option<i64>, Option<i64>) {
    let mut lo = Some(0i64);
    let mut hi = Some(0i64);
    for &i in rest {
        let g = &alg.generators[i];
        let v = f.0 * g.bidegree.0 + f.1 * g.bidegree.1;
        let (e_lo, e_hi): (Option<i64>, Option<i64>) = match g.kind {
            GeneratorKind::Exterior => (Some(0), Some(1)),
            GeneratorKind::Truncated(h) => (Some(0), Some(h as i64 - 1)),
            GeneratorKind::Polynomial => (Some(0), None),
            GeneratorKind::Laurent => (None, None),
        };
        let (c_lo, c_hi) = contribution_range(v, e_lo, e_hi);
        lo = match (lo, c_lo) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        hi = match (hi, c_hi) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
    }
    (lo, hi)
}

fn contribution_range(v: i64, e_lo: Option<i64>, e_hi: Option<i64>) -> (Option<i64>, Option<i64>) {
    if v == 0 {
        return (Some(0), Some(0));
    }
    if v > 0 {
        (e_lo.map(|e| v * e), e_hi.map(|e| v * e))
    } else {
        (e_hi.map(|e| v * e), e_lo.map(|e| v * e))
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    alg: &MonomialAlgebraSpec,
    window: &Window,
    order: &[usize],
    level: usize,
    exps: &mut Vec<i64>,
    s_acc: i64,
    n_acc: i64,
    out: &mut Vec<Monomial>,
) -> Result<(), FpalgError> {
    if level == order.len() {
        if window.contains(s_acc, n_acc) {
            out.push(Monomial { exps: exps.clone() });
        }
        return Ok(());
    }
    let idx = order[level];
    let g = &alg.generators[idx];
    let rest = &order[level + 1..];
    // Feasible exponent interval for this generator from the six functionals
    // s, -s, n, -n, n-s, s-n.
    let mut e_lo: Option<i64> = None;
    let mut e_hi: Option<i64> = None;
    for f in [(1i64, 0i64), (0, 1), (-1, 1)] {
        let fv = f.0 * g.bidegree.0 + f.1 * g.bidegree.1;
        if fv == 0 {
            continue;
        }
        let (w_lo, w_hi) = match f {
            (1, 0) => (window.s_min, window.s_max),
            (0, 1) => (window.n_min, window.n_max),
            _ => (window.n_min - window.s_max, window.n_max - window.s_min),
        };
        let f_acc = f.0 * s_acc + f.1 * n_acc;
        let (r_lo, r_hi) = functional_range(alg, rest, f);
        // Need: w_lo <= f_acc + fv * e + r for some r in [r_lo, r_hi].
        if let Some(r_hi) = r_hi {
            // f_acc + fv*e + r_hi >= w_lo
            let bound = w_lo - f_acc - r_hi;
            update_interval(&mut e_lo, &mut e_hi, fv, bound, true);
        }
        if let Some(r_lo) = r_lo {
            // f_acc + fv*e + r_lo <= w_hi
            let bound = w_hi - f_acc - r_lo;
            update_interval(&mut e_lo, &mut e_hi, fv, bound, false);
        }
    }
    // Intrinsic kind bounds.
    let (k_lo, k_hi): (Option<i64>, Option<i64>) = match g.kind {
        GeneratorKind::Exterior => (Some(0), Some(1)),
        GeneratorKind::Truncated(h) => (Some(0), Some(h as i64 - 1)),
        GeneratorKind::Polynomial => (Some(0), None),
        GeneratorKind::Laurent => (None, None),
    };
    let lo = match (e_lo, k_lo) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => {
            return Err(infinite_error(alg, order, level));
        }
    };
    let hi = match (e_hi, k_hi) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => {
            return Err(infinite_error(alg, order, level));
        }
    };
    for e in lo..=hi {
        exps[idx] = e;
        enumerate(
            alg,
            window,
            order,
            level + 1,
            exps,
            s_acc + e * g.bidegree.0,
            n_acc + e * g.bidegree.1,
            out,
        )?;
    }
    exps[idx] = 0;
    Ok(())
}

fn infinite_error(alg: &MonomialAlgebraSpec, order: &[usize], level: usize) -> FpalgError {
    let names = order[level..]
        .iter()
        .map(|&i| alg.generators[i].name.clone())
        .collect();
    FpalgError::EnumerationInfinite { names }
}

fn update_interval(e_lo: &mut Option<i64>, e_hi: &mut Option<i64>, fv: i64, bound: i64, ge: bool) {
    // Constraint: fv * e >= bound (ge) or fv * e <= bound (!ge), fv != 0.
    let gives_upper = ge == (fv < 0);
    if gives_upper {
        let b = floor_div(bound, fv);
        *e_hi = Some(match *e_hi {
            Some(h) => h.min(b),
            None => b,
        });
    } else {
        let b = ceil_div(bound, fv);
        *e_lo = Some(match *e_lo {
            Some(l) => l.max(b),
            None => b,
        });
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    let r = a % b;
    if r != 0 && ((r < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}
