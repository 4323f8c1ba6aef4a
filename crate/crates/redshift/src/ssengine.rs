//! Bigraded pages with derivation-defined differentials, and windowed
//! homology by exact Gaussian elimination mod p.
//!
//! A [`Page`] holds, per bidegree inside a finite window, a chosen basis of
//! cycle representatives expressed in the ambient monomial algebra.  A
//! [`DerivationRule`] gives the differential's value on the page's declared
//! multiplicative generators; [`extend_derivation`] extends it to arbitrary
//! page monomials by the Leibniz rule with Koszul signs.  [`run_schedule`]
//! plays an ordered list of rules against the E² page and returns every
//! intermediate page.
//!
//! Homology is only trusted on a page's `safe_region`: applying a rule of
//! page index `r` shrinks the safe region by `r` in filtration and by `1`
//! in total degree on each side, because cells nearer the window edge can
//! receive or emit differentials whose other end was never enumerated.
//! Outside the safe region the data is carried best-effort and is
//! provisional by that contract.

use std::collections::BTreeMap;

use serde_json::json;
use thiserror::Error;

use crate::fpalg::{
    basis_in_window, bidegree_of, bidegree_unchecked, mono_mul, multiply, Element, FpalgError,
    GeneratorKind, Monomial, MonomialAlgebraSpec, Prime, Window,
};

/// A multiplicative generator of a page's free sector, e.g. `t^{p^m}`.
///
/// `kind` describes the module structure of the sector it generates on the
/// page (Laurent for two-sided powers, truncated once a height has been
/// imposed).  For Leibniz extension the exponent extracted for a
/// non-exterior generator may be any integer: the extension is formal and
/// only the ambient validity of the final value is enforced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageGenerator {
    pub base: Monomial,
    pub kind: GeneratorKind,
}

/// A differential `d^r`, given by its values on page generators.
///
/// Generators absent from `values` are cycles for this differential.  Every
/// value must be homogeneous of bidegree `(s - r, n - 1)` relative to its
/// source.
#[derive(Debug, Clone)]
pub struct DerivationRule {
    pub page_index: i64,
    /// The declared free-sector generators of the page this rule acts on.
    pub generators: Vec<PageGenerator>,
    /// Index into `generators` -> differential value.
    pub values: BTreeMap<usize, Element>,
}

impl DerivationRule {
    pub fn validate(&self, alg: &MonomialAlgebraSpec) -> Result<(), SsError> {
        for (&i, v) in &self.values {
            let g = &self.generators[i];
            let (s, n) = bidegree_of(alg, &g.base).map_err(SsError::Algebra)?;
            if v.is_zero() {
                continue;
            }
            let expected = (s - self.page_index, n - 1);
            match v.bidegree(alg) {
                Some(b) if b == expected => {}
                got => {
                    return Err(SsError::ValueNotHomogeneous {
                        page_index: self.page_index,
                        generator: alg.format_monomial(&g.base),
                        expected,
                        got: got
                            .map(|(a, b)| format!("({a}, {b})"))
                            .unwrap_or_else(|| "inhomogeneous".to_string()),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error)]
pub enum SsError {
    #[error(transparent)]
    Algebra(FpalgError),
    #[error("monomial {monomial} is not expressible in the page generators at page {page_index}")]
    Factorization { monomial: String, page_index: i64 },
    #[error(
        "rule at page {page_index}: value on {generator} has bidegree {got}, expected {expected:?}"
    )]
    ValueNotHomogeneous {
        page_index: i64,
        generator: String,
        expected: (i64, i64),
        got: String,
    },
    #[error("schedule not in strictly increasing page order at index {page_index}")]
    ScheduleOrder { page_index: i64 },
    #[error("schedule inconsistency at page {page_index}: generator {generator} {reason}")]
    ScheduleInconsistency {
        page_index: i64,
        generator: String,
        reason: String,
    },
    #[error("target shadow of cell ({s}, {n}) exits the enumerated window at page {page_index}")]
    IncompleteWindow { s: i64, n: i64, page_index: i64 },
    #[error("derivation output of {monomial} is not valid in the ambient algebra")]
    InvalidOutput { monomial: String },
}

// ---------------------------------------------------------------------------
// Exact linear algebra mod p
// ---------------------------------------------------------------------------

/// Reduced-echelon subspace over F_p with a deterministic canonical form.
#[derive(Debug, Clone, Default)]
struct Rref {
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Rref {
    fn new() -> Rref {
        Rref::default()
    }

    fn reduce(&self, p: Prime, v: &mut [u32]) {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                let c = p.neg(c);
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = p.add(*x, p.mul(c, r));
                }
            }
        }
    }

    /// Insert `v` after reduction; returns the new pivot column, or `None`
    /// when `v` reduced to zero.
    fn insert(&mut self, p: Prime, mut v: Vec<u32>) -> Option<usize> {
        self.reduce(p, &mut v);
        let piv = v.iter().position(|&x| x != 0)?;
        let inv = p.inv(v[piv]);
        for x in v.iter_mut() {
            *x = p.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                let c = p.neg(c);
                for (x, &r) in row.iter_mut().zip(&v) {
                    *x = p.add(*x, p.mul(c, r));
                }
            }
        }
        let at = self
            .pivots
            .iter()
            .position(|&q| q > piv)
            .unwrap_or(self.pivots.len());
        self.pivots.insert(at, piv);
        self.rows.insert(at, v);
        Some(piv)
    }
}

/// Minimal exact rational arithmetic for the tiny factorization systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rat {
    num: i128,
    den: i128, // > 0
}

impl Rat {
    fn int(v: i64) -> Rat {
        Rat {
            num: v as i128,
            den: 1,
        }
    }
    fn is_zero(self) -> bool {
        self.num == 0
    }
    fn normalize(num: i128, den: i128) -> Rat {
        debug_assert!(den != 0);
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let g = g.max(1);
        if den < 0 {
            Rat {
                num: -num / g,
                den: -den / g,
            }
        } else {
            Rat {
                num: num / g,
                den: den / g,
            }
        }
    }
    fn mul(self, o: Rat) -> Rat {
        Rat::normalize(self.num * o.num, self.den * o.den)
    }
    fn div(self, o: Rat) -> Rat {
        Rat::normalize(self.num * o.den, self.den * o.num)
    }
    fn sub(self, o: Rat) -> Rat {
        Rat::normalize(self.num * o.den - o.num * self.den, self.den * o.den)
    }
    fn to_integer(self) -> Option<i64> {
        if self.den == 1 {
            i64::try_from(self.num).ok()
        } else {
            None
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// ---------------------------------------------------------------------------
// Factorization and Leibniz extension
// ---------------------------------------------------------------------------

/// Express an ambient monomial as a product of page-generator powers.
///
/// Returns the exponent of each generator, or `None` when the monomial does
/// not lie in the sub-monoid they generate (such classes sit in torsion
/// summands created by earlier differentials and are cycles for every later
/// rule).  The generator base vectors must be linearly independent, which
/// holds for every page in the catalog.
pub fn factor_in_generators(
    alg: &MonomialAlgebraSpec,
    generators: &[PageGenerator],
    m: &Monomial,
) -> Option<Vec<i64>> {
    let n = alg.len();
    let k = generators.len();
    let mut rows: Vec<(Vec<Rat>, Rat)> = (0..n)
        .map(|i| {
            (
                (0..k)
                    .map(|j| Rat::int(generators[j].base.exps[i]))
                    .collect(),
                Rat::int(m.exps[i]),
            )
        })
        .collect();
    // Gauss-Jordan over Q.
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; k];
    let mut used = vec![false; n];
    for (col, pivot_row) in pivot_row_of_col.iter_mut().enumerate() {
        let pivot = (0..n).find(|&r| !used[r] && !rows[r].0[col].is_zero())?;
        used[pivot] = true;
        *pivot_row = Some(pivot);
        let inv = rows[pivot].0[col];
        for r in 0..n {
            if r != pivot && !rows[r].0[col].is_zero() {
                let factor = rows[r].0[col].div(inv);
                for c in 0..k {
                    let delta = rows[pivot].0[c].mul(factor);
                    rows[r].0[c] = rows[r].0[c].sub(delta);
                }
                let delta = rows[pivot].1.mul(factor);
                rows[r].1 = rows[r].1.sub(delta);
            }
        }
    }
    // Rows without pivots must have zero right-hand side.
    for r in 0..n {
        if !used[r] && !rows[r].1.is_zero() {
            return None;
        }
    }
    let mut out = Vec::with_capacity(k);
    for col in 0..k {
        let r = pivot_row_of_col[col]?;
        let e = rows[r].1.div(rows[r].0[col]).to_integer()?;
        if generators[col].kind == GeneratorKind::Exterior && !(e == 0 || e == 1) {
            return None;
        }
        out.push(e);
    }
    Some(out)
}

/// Formal power of a page generator: exponent vector scaled by `a`.
fn generator_power(alg: &MonomialAlgebraSpec, g: &PageGenerator, a: i64) -> Monomial {
    let mut m = alg.unit();
    for (x, &w) in m.exps.iter_mut().zip(&g.base.exps) {
        *x = w * a;
    }
    m
}

/// Leibniz extension of `rule` to one monomial.
///
/// `None` means the monomial does not factor through the rule's generators;
/// the matrix assembly treats such classes as cycles.
pub fn derive_monomial(
    alg: &MonomialAlgebraSpec,
    rule: &DerivationRule,
    m: &Monomial,
) -> Option<Element> {
    let p = alg.prime;
    let exps = factor_in_generators(alg, &rule.generators, m)?;
    // Sign between m and the ordered product of the generator powers.
    let mut prod = alg.unit();
    let mut sigma = 1i32;
    for (g, &a) in rule.generators.iter().zip(&exps) {
        if a == 0 {
            continue;
        }
        let (next, sg) = mono_mul(alg, &prod, &generator_power(alg, g, a))?;
        prod = next;
        sigma *= sg;
    }
    debug_assert_eq!(prod, *m, "factorization must reassemble the monomial");

    let mut total = Element::zero();
    for (&i, value) in &rule.values {
        let a_i = exps[i];
        let coeff = p.reduce(a_i);
        if coeff == 0 || value.is_zero() {
            continue;
        }
        // Parity of the degree of the prefix g_1^{a_1} ... g_{i-1}^{a_{i-1}},
        // the sign of moving d past the prefix.
        let mut prefix_odd = false;
        for (j, (g, &a)) in rule.generators.iter().zip(&exps).enumerate() {
            if j >= i || a == 0 {
                continue;
            }
            let n_deg = bidegree_unchecked(alg, &g.base).1;
            if a.rem_euclid(2) == 1 && n_deg.rem_euclid(2) == 1 {
                prefix_odd = !prefix_odd;
            }
        }
        // Build the summand as an honest element product so every Koszul
        // sign is produced by the multiplication itself:
        //   prefix * g_i^{a_i - 1} * value * suffix
        let mut summand = Element::from_monomial(alg.unit());
        for (j, (g, &a)) in rule.generators.iter().zip(&exps).enumerate() {
            if j == i {
                if a - 1 != 0 {
                    summand = mono_times(alg, &summand, &generator_power(alg, g, a - 1))?;
                }
                summand = multiply(alg, &summand, value);
                if summand.is_zero() {
                    break;
                }
            } else if a != 0 {
                summand = mono_times(alg, &summand, &generator_power(alg, g, a))?;
                if summand.is_zero() {
                    break;
                }
            }
        }
        let mut c = coeff as i64;
        if prefix_odd {
            c = -c;
        }
        if sigma < 0 {
            c = -c;
        }
        total = total.add(p, &summand.scale(p, c));
    }
    Some(total)
}

/// Multiply every term of `el` by the monomial `m` on the right.
fn mono_times(alg: &MonomialAlgebraSpec, el: &Element, m: &Monomial) -> Option<Element> {
    let p = alg.prime;
    let mut out = Element::zero();
    for (t, &c) in &el.terms {
        if let Some((prod, sg)) = mono_mul(alg, t, m) {
            let c = if sg < 0 { p.neg(c) } else { c };
            out.add_term(p, prod, c);
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Pages
// ---------------------------------------------------------------------------

/// One bidegree cell of a page.
#[derive(Debug, Clone)]
struct Cell {
    /// Ambient monomial basis of the cell, ascending by exponent vector.
    monomials: Vec<Monomial>,
    /// Current page representatives: reduced echelon, then reduced against
    /// `boundaries`.
    basis: Vec<Vec<u32>>,
    /// Accumulated boundary subspace.
    boundaries: Rref,
}

/// A bigraded F_p vector space with a chosen basis per bidegree.
#[derive(Debug, Clone)]
pub struct Page {
    pub ambient: MonomialAlgebraSpec,
    pub index: i64,
    pub window: Window,
    pub safe_region: Window,
    pub is_infinity: bool,
    /// Declared free-sector generators (maintained by the schedule runner).
    pub generators: Vec<PageGenerator>,
    cells: BTreeMap<(i64, i64), Cell>,
}

impl Page {
    /// The E² page: every ambient monomial in the window is a basis element.
    pub fn e2(
        ambient: &MonomialAlgebraSpec,
        generators: Vec<PageGenerator>,
        window: &Window,
    ) -> Result<Page, SsError> {
        let all = basis_in_window(ambient, window).map_err(SsError::Algebra)?;
        let mut grouped: BTreeMap<(i64, i64), Vec<Monomial>> = BTreeMap::new();
        for m in all {
            let bd = bidegree_unchecked(ambient, &m);
            grouped.entry(bd).or_default().push(m);
        }
        let cells = grouped
            .into_iter()
            .map(|(bd, mut monos)| {
                monos.sort();
                let dim = monos.len();
                let mut basis = Vec::with_capacity(dim);
                for i in 0..dim {
                    let mut v = vec![0u32; dim];
                    v[i] = 1;
                    basis.push(v);
                }
                (
                    bd,
                    Cell {
                        monomials: monos,
                        basis,
                        boundaries: Rref::new(),
                    },
                )
            })
            .collect();
        Ok(Page {
            ambient: ambient.clone(),
            index: 2,
            window: *window,
            safe_region: *window,
            is_infinity: false,
            generators,
            cells,
        })
    }

    pub fn dim(&self, s: i64, n: i64) -> usize {
        self.cells.get(&(s, n)).map_or(0, |c| c.basis.len())
    }

    /// Per-bidegree dimensions of all nonzero cells.
    pub fn dims(&self) -> BTreeMap<(i64, i64), usize> {
        self.cells
            .iter()
            .filter(|(_, c)| !c.basis.is_empty())
            .map(|(&bd, c)| (bd, c.basis.len()))
            .collect()
    }

    /// Basis representatives at one bidegree, as ambient elements.
    pub fn basis_elements(&self, s: i64, n: i64) -> Vec<Element> {
        let p = self.ambient.prime;
        match self.cells.get(&(s, n)) {
            None => Vec::new(),
            Some(c) => c
                .basis
                .iter()
                .map(|v| vec_to_element(p, &c.monomials, v))
                .collect(),
        }
    }

    /// Whether the monomial's class is nonzero on this page.  `None` when
    /// its bidegree lies outside the window.
    pub fn class_is_alive(&self, m: &Monomial) -> Option<bool> {
        let p = self.ambient.prime;
        let bd = bidegree_unchecked(&self.ambient, m);
        if !self.window.contains(bd.0, bd.1) {
            return None;
        }
        let cell = match self.cells.get(&bd) {
            Some(c) => c,
            None => return Some(false),
        };
        let idx = match cell.monomials.binary_search(m) {
            Ok(i) => i,
            Err(_) => return Some(false),
        };
        let mut v = vec![0u32; cell.monomials.len()];
        v[idx] = 1;
        cell.boundaries.reduce(p, &mut v);
        if v.iter().all(|&x| x == 0) {
            return Some(false);
        }
        // Must also lie in the current cycle span.
        let mut span = Rref::new();
        for b in &cell.basis {
            span.insert(p, b.clone());
        }
        span.reduce(p, &mut v);
        Some(v.iter().all(|&x| x == 0))
    }

    /// JSON dump: `{prime, page_index, window, safe_region, cells}` with one
    /// entry per nonzero cell.
    pub fn dump_json(&self) -> serde_json::Value {
        let cells: Vec<serde_json::Value> = self
            .cells
            .iter()
            .filter(|(_, c)| !c.basis.is_empty())
            .map(|(&(s, n), c)| {
                let basis: Vec<String> = c
                    .basis
                    .iter()
                    .map(|v| {
                        self.ambient.format_element(&vec_to_element(
                            self.ambient.prime,
                            &c.monomials,
                            v,
                        ))
                    })
                    .collect();
                json!({"s": s, "n": n, "dim": c.basis.len(), "basis": basis})
            })
            .collect();
        json!({
            "prime": self.ambient.prime.get(),
            "formal": self.ambient.prime.is_formal(),
            "page_index": self.index,
            "is_infinity": self.is_infinity,
            "window": self.window,
            "safe_region": self.safe_region,
            "cells": cells,
        })
    }
}

fn vec_to_element(p: Prime, monomials: &[Monomial], v: &[u32]) -> Element {
    let mut el = Element::zero();
    for (m, &c) in monomials.iter().zip(v) {
        if c != 0 {
            el.add_term(p, m.clone(), c);
        }
    }
    el
}

/// Public Leibniz extension; errors when the monomial does not factor.
pub fn extend_derivation(
    page: &Page,
    rule: &DerivationRule,
    m: &Monomial,
) -> Result<Element, SsError> {
    match derive_monomial(&page.ambient, rule, m) {
        Some(el) => {
            for mono in el.terms.keys() {
                page.ambient
                    .validate(mono)
                    .map_err(|_| SsError::InvalidOutput {
                        monomial: page.ambient.format_monomial(mono),
                    })?;
            }
            Ok(el)
        }
        None => Err(SsError::Factorization {
            monomial: page.ambient.format_monomial(m),
            page_index: rule.page_index,
        }),
    }
}

// ---------------------------------------------------------------------------
// Differential matrices and homology
// ---------------------------------------------------------------------------

/// Coordinates available at a differential's target cell.
#[derive(Debug, Clone)]
enum TargetSpace {
    /// Target cell lies in the window: coordinates in its page basis.
    Page { cell: (i64, i64) },
    /// Target cell lies outside the window: raw ambient coordinates,
    /// without boundary history.  Only cells already excluded from the safe
    /// region ever see such a target.
    Raw,
}

/// A block of the differential per source bidegree.
#[derive(Debug, Clone)]
pub struct LinearMapModP {
    pub page_index: i64,
    blocks: BTreeMap<(i64, i64), Block>,
}

#[derive(Debug, Clone)]
struct Block {
    /// Target coordinates of `d(basis_j)`, one column per source basis
    /// vector.
    columns: Vec<Vec<u32>>,
    /// Ambient form of `d(basis_j)`, kept for boundary accumulation.
    images: Vec<Element>,
    target: TargetSpace,
}

impl LinearMapModP {
    pub fn is_zero(&self) -> bool {
        self.blocks
            .values()
            .all(|b| b.columns.iter().all(|c| c.iter().all(|&x| x == 0)))
    }

    pub fn block_matrix(&self, s: i64, n: i64) -> Option<Vec<Vec<u32>>> {
        self.blocks.get(&(s, n)).map(|b| b.columns.clone())
    }
}

/// Assemble the matrix of `rule` on `page` over the page's window.
///
/// `strict` demands that every nonzero image lands inside the enumerated
/// window and errors otherwise; the schedule runner uses the lenient form,
/// which expresses such images in raw ambient coordinates (sound because the
/// affected cells are outside the safe region the runner reports).
pub fn differential_matrix(
    page: &Page,
    rule: &DerivationRule,
    strict: bool,
) -> Result<LinearMapModP, SsError> {
    rule.validate(&page.ambient)?;
    let p = page.ambient.prime;
    let r = rule.page_index;
    let mut blocks = BTreeMap::new();
    for (&(s, n), cell) in &page.cells {
        if cell.basis.is_empty() {
            continue;
        }
        let target_bd = (s - r, n - 1);
        let mut images = Vec::with_capacity(cell.basis.len());
        let mut nonzero = false;
        for v in &cell.basis {
            let el = vec_to_element(p, &cell.monomials, v);
            let mut image = Element::zero();
            for (m, &c) in &el.terms {
                if let Some(dm) = derive_monomial(&page.ambient, rule, m) {
                    image = image.add(p, &dm.scale(p, c as i64));
                }
            }
            for mono in image.terms.keys() {
                page.ambient
                    .validate(mono)
                    .map_err(|_| SsError::InvalidOutput {
                        monomial: page.ambient.format_monomial(mono),
                    })?;
            }
            if !image.is_zero() {
                nonzero = true;
            }
            images.push(image);
        }
        let in_window = page.window.contains(target_bd.0, target_bd.1);
        if !in_window && nonzero && strict {
            return Err(SsError::IncompleteWindow {
                s,
                n,
                page_index: r,
            });
        }
        let (target, coords) = if in_window {
            let tcell = page.cells.get(&target_bd);
            let coords = images
                .iter()
                .map(|im| page_coordinates(p, tcell, im))
                .collect::<Vec<_>>();
            (TargetSpace::Page { cell: target_bd }, coords)
        } else {
            // Raw coordinates over the single out-of-window cell.
            let monos = cell_monomials(&page.ambient, target_bd);
            let coords = images
                .iter()
                .map(|im| raw_coordinates(&monos, im))
                .collect::<Vec<_>>();
            (TargetSpace::Raw, coords)
        };
        blocks.insert(
            (s, n),
            Block {
                columns: coords,
                images,
                target,
            },
        );
    }
    Ok(LinearMapModP {
        page_index: r,
        blocks,
    })
}

fn cell_monomials(alg: &MonomialAlgebraSpec, bd: (i64, i64)) -> Vec<Monomial> {
    let w = Window::new(bd.0, bd.0, bd.1, bd.1);
    let mut monos = basis_in_window(alg, &w).unwrap_or_default();
    monos.sort();
    monos
}

fn raw_coordinates(monomials: &[Monomial], el: &Element) -> Vec<u32> {
    let mut v = vec![0u32; monomials.len()];
    for (m, &c) in &el.terms {
        if let Ok(i) = monomials.binary_search(m) {
            v[i] = c;
        }
    }
    v
}

/// Coordinates of a page-`r` cycle in the page basis at a cell, i.e. modulo
/// the accumulated boundaries.  Panics when the element is not in the cycle
/// span: the Leibniz values must be cycles of all earlier differentials, so
/// a failure here is an engine bug, not a user error.
fn page_coordinates(p: Prime, cell: Option<&Cell>, el: &Element) -> Vec<u32> {
    let cell = match cell {
        Some(c) => c,
        None => {
            assert!(
                el.is_zero(),
                "nonzero differential image at a cell with no enumerated basis"
            );
            return Vec::new();
        }
    };
    let mut v = raw_coordinates(&cell.monomials, el);
    // Confirm nothing of the element fell outside the cell's monomial list.
    let mut count = 0usize;
    for m in el.terms.keys() {
        if cell.monomials.binary_search(m).is_ok() {
            count += 1;
        }
    }
    assert_eq!(
        count,
        el.terms.len(),
        "differential image contains monomials outside the enumerated cell"
    );
    cell.boundaries.reduce(p, &mut v);
    // Solve v = sum c_j basis_j by elimination.
    let mut span = Rref::new();
    let mut combos: Vec<Vec<u32>> = Vec::new();
    let dim = cell.basis.len();
    let width = cell.monomials.len();
    for (j, b) in cell.basis.iter().enumerate() {
        let mut aug = b.clone();
        aug.resize(width + dim, 0);
        aug[width + j] = 1;
        span.insert(p, aug);
        combos.push(Vec::new());
    }
    let _ = combos;
    let mut aug = v;
    aug.resize(width + dim, 0);
    span.reduce(p, &mut aug);
    assert!(
        aug[..width].iter().all(|&x| x == 0),
        "singular bookkeeping: differential image is not a page cycle"
    );
    // The trailing coordinates hold -c_j (reduction subtracted them).
    aug[width..].iter().map(|&c| p.neg(c)).collect()
}

/// Pass from `E^r` to `E^{r+1}`: per bidegree, kernel of the outgoing
/// differential modulo the incoming image, by exact elimination mod p.
///
/// The safe region shrinks by the map's reach: `r` in filtration and `1` in
/// degree on each side.
pub fn homology_page(page: &Page, map: &LinearMapModP) -> Page {
    let p = page.ambient.prime;
    let r = map.page_index;
    let mut new_cells: BTreeMap<(i64, i64), Cell> = BTreeMap::new();

    // Phase A: kernels per source cell, and boundary contributions per
    // target cell.
    let mut kernels: BTreeMap<(i64, i64), Vec<Vec<u32>>> = BTreeMap::new();
    let mut incoming: BTreeMap<(i64, i64), Vec<Element>> = BTreeMap::new();
    for (&(s, n), cell) in &page.cells {
        let block = map.blocks.get(&(s, n));
        let kern = match block {
            None => {
                // No assembled block: zero map on this cell.
                (0..cell.basis.len())
                    .map(|j| {
                        let mut v = vec![0u32; cell.basis.len()];
                        v[j] = 1;
                        v
                    })
                    .collect::<Vec<_>>()
            }
            Some(b) => {
                if let TargetSpace::Page { cell: tbd } = b.target {
                    let entry = incoming.entry(tbd).or_default();
                    for im in &b.images {
                        if !im.is_zero() {
                            entry.push(im.clone());
                        }
                    }
                }
                kernel_of_columns(p, &b.columns, cell.basis.len())
            }
        };
        kernels.insert((s, n), kern);
    }

    // Phase B: assemble the new page cell by cell.
    for (&(s, n), cell) in &page.cells {
        let old_dim = cell.basis.len();
        let kern = kernels.remove(&(s, n)).unwrap_or_default();
        let rank_out = old_dim - kern.len();

        let mut boundaries = cell.boundaries.clone();
        let mut rank_in = 0usize;
        if let Some(images) = incoming.get(&(s, n)) {
            for im in images {
                let v = raw_coordinates(&cell.monomials, im);
                debug_assert_eq!(
                    v.iter().filter(|&&x| x != 0).count() > 0,
                    !im.is_zero(),
                    "incoming boundary must be enumerable at its cell"
                );
                if boundaries.insert(p, v).is_some() {
                    rank_in += 1;
                }
            }
        }

        // New basis: kernel vectors in ambient cell coordinates, echelonized,
        // then fully reduced against the updated boundary space.
        let mut echelon = Rref::new();
        for combo in &kern {
            let mut v = vec![0u32; cell.monomials.len()];
            for (j, &c) in combo.iter().enumerate() {
                if c != 0 {
                    for (x, &b) in v.iter_mut().zip(&cell.basis[j]) {
                        *x = p.add(*x, p.mul(c, b));
                    }
                }
            }
            boundaries.reduce(p, &mut v);
            echelon.insert(p, v);
        }
        let new_basis: Vec<Vec<u32>> = echelon.rows.clone();
        assert_eq!(
            new_basis.len(),
            old_dim - rank_out - rank_in,
            "singular bookkeeping: rank conservation failed at ({s}, {n}) page {r}"
        );
        new_cells.insert(
            (s, n),
            Cell {
                monomials: cell.monomials.clone(),
                basis: new_basis,
                boundaries,
            },
        );
    }

    Page {
        ambient: page.ambient.clone(),
        index: r + 1,
        window: page.window,
        safe_region: page.safe_region.shrunk(r, 1),
        is_infinity: false,
        generators: page.generators.clone(),
        cells: new_cells,
    }
}

/// Kernel of a block given by columns, as combination vectors over the
/// source basis (echelon form, deterministic).
fn kernel_of_columns(p: Prime, columns: &[Vec<u32>], dim: usize) -> Vec<Vec<u32>> {
    assert_eq!(columns.len(), dim);
    let width = columns.first().map_or(0, |c| c.len());
    let mut tracked = Rref::new();
    let mut kernel = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        // Augmented vector: [image | combo], combo tracks source coords.
        let mut aug = col.clone();
        aug.resize(width + dim, 0);
        aug[width + j] = 1;
        tracked.reduce(p, &mut aug);
        if aug[..width].iter().all(|&x| x == 0) {
            kernel.push(aug[width..].to_vec());
        } else {
            tracked.insert(p, aug);
        }
    }
    kernel
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

/// Survival evidence for a rule's source generators, checked before the rule
/// is applied.
///
/// Two symbolic checks run without reference to the window: the generator
/// must be a cycle for every earlier rule, and no earlier rule's single
/// source cell may emit a boundary hitting the generator's monomial.  When
/// the generator's bidegree lies inside the window, its class is also
/// required to be alive on the current page.
fn check_rule_sources(
    ambient: &MonomialAlgebraSpec,
    earlier: &[DerivationRule],
    rule: &DerivationRule,
    page: &Page,
) -> Result<(), SsError> {
    for (&i, v) in &rule.values {
        if v.is_zero() {
            continue;
        }
        let g = &rule.generators[i];
        let gname = ambient.format_monomial(&g.base);
        let bd = bidegree_unchecked(ambient, &g.base);
        for prev in earlier {
            if let Some(d) = derive_monomial(ambient, prev, &g.base) {
                if !d.is_zero() {
                    return Err(SsError::ScheduleInconsistency {
                        page_index: rule.page_index,
                        generator: gname,
                        reason: format!(
                            "supports a nonzero d^{} and cannot survive to page {}",
                            prev.page_index, rule.page_index
                        ),
                    });
                }
            }
            // Probe the unique cell that could hit the generator.
            let src = (bd.0 + prev.page_index, bd.1 + 1);
            for m in cell_monomials(ambient, src) {
                if let Some(d) = derive_monomial(ambient, prev, &m) {
                    if d.terms.contains_key(&g.base) {
                        return Err(SsError::ScheduleInconsistency {
                            page_index: rule.page_index,
                            generator: gname,
                            reason: format!(
                                "is hit by d^{} from {}",
                                prev.page_index,
                                ambient.format_monomial(&m)
                            ),
                        });
                    }
                }
            }
        }
        if let Some(false) = page.class_is_alive(&g.base) {
            return Err(SsError::ScheduleInconsistency {
                page_index: rule.page_index,
                generator: gname,
                reason: format!("is dead on page {}", page.index),
            });
        }
    }
    Ok(())
}

/// Run an ordered differential schedule from the E² term.
///
/// Returns the E² page followed by one page per applied rule; the last page
/// is flagged `E^∞` on its safe region once the schedule is exhausted.
/// Pages between scheduled indices are carried forward unchanged.
pub fn run_schedule(
    ambient: &MonomialAlgebraSpec,
    e2_generators: Vec<PageGenerator>,
    schedule: &[DerivationRule],
    window: &Window,
) -> Result<Vec<Page>, SsError> {
    let mut last_index = 1i64;
    for rule in schedule {
        if rule.page_index <= last_index.max(1) || rule.page_index < 2 {
            return Err(SsError::ScheduleOrder {
                page_index: rule.page_index,
            });
        }
        last_index = rule.page_index;
    }
    let mut pages = vec![Page::e2(ambient, e2_generators, window)?];
    for (k, rule) in schedule.iter().enumerate() {
        rule.validate(ambient)?;
        let current = pages.last().unwrap();
        check_rule_sources(ambient, &schedule[..k], rule, current)?;
        let map = differential_matrix(current, rule, false)?;
        let mut next = homology_page(current, &map);
        next.generators = rule.generators.clone();
        pages.push(next);
    }
    if let Some(last) = pages.last_mut() {
        last.is_infinity = true;
    }
    Ok(pages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpalg::GeneratorSpec;

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    /// Koszul toy: E(x) ⊗ P(y) with d²(y) = x, degrees arranged so the
    /// differential has bidegree (-2, -1).
    fn koszul() -> (MonomialAlgebraSpec, DerivationRule) {
        let alg = MonomialAlgebraSpec::new(
            p(3),
            vec![
                GeneratorSpec::new("x", GeneratorKind::Exterior, -2, 1),
                GeneratorSpec::new("y", GeneratorKind::Polynomial, 0, 2),
            ],
        )
        .unwrap();
        let gens = vec![
            PageGenerator {
                base: alg.power("x", 1),
                kind: GeneratorKind::Exterior,
            },
            PageGenerator {
                base: alg.power("y", 1),
                kind: GeneratorKind::Polynomial,
            },
        ];
        let mut values = BTreeMap::new();
        values.insert(1, Element::from_monomial(alg.power("x", 1)));
        let rule = DerivationRule {
            page_index: 2,
            generators: gens,
            values,
        };
        (alg, rule)
    }

    fn koszul_page(alg: &MonomialAlgebraSpec, w: &Window) -> Page {
        let gens = vec![
            PageGenerator {
                base: alg.power("x", 1),
                kind: GeneratorKind::Exterior,
            },
            PageGenerator {
                base: alg.power("y", 1),
                kind: GeneratorKind::Polynomial,
            },
        ];
        Page::e2(alg, gens, w).unwrap()
    }

    #[test]
    fn koszul_complex_is_acyclic_below_p() {
        // Acyclic while the y-exponent stays below p: d(y^p) = p y^{p-1} x
        // vanishes mod p, so the window stops at n = 2(p-1).
        let (alg, rule) = koszul();
        let w = Window::new(-30, 0, 0, 4);
        let page = koszul_page(&alg, &w);
        let map = differential_matrix(&page, &rule, false).unwrap();
        let next = homology_page(&page, &map);
        let dims = next.dims();
        assert_eq!(dims.len(), 1, "survivors: {dims:?}");
        assert_eq!(next.dim(0, 0), 1);
    }

    #[test]
    fn koszul_divided_power_class_survives() {
        // At p = 3 the class x y^2 is a permanent cycle: d(y^3) = 3 y^2 x = 0.
        let (alg, rule) = koszul();
        let w = Window::new(-30, 0, 0, 25);
        let page = koszul_page(&alg, &w);
        let map = differential_matrix(&page, &rule, false).unwrap();
        let next = homology_page(&page, &map);
        assert_eq!(next.dim(-2, 5), 1);
        assert_eq!(next.dim(0, 6), 1); // y^3
        assert_eq!(next.dim(0, 2), 0); // y dies
        assert_eq!(next.dim(-2, 1), 0); // x is hit
    }

    #[test]
    fn koszul_matrix_is_identity_block() {
        let (alg, rule) = koszul();
        let w = Window::new(-10, 0, 0, 8);
        let page = koszul_page(&alg, &w);
        let map = differential_matrix(&page, &rule, false).unwrap();
        // In the bidegree of y, d(y) = x: a 1x1 identity block.
        let block = map.block_matrix(0, 2).unwrap();
        assert_eq!(block, vec![vec![1u32]]);
    }

    #[test]
    fn zero_map_reproduces_page() {
        let (alg, _) = koszul();
        let w = Window::new(-10, 0, 0, 8);
        let page = koszul_page(&alg, &w);
        let rule = DerivationRule {
            page_index: 2,
            generators: page.generators.clone(),
            values: BTreeMap::new(),
        };
        let map = differential_matrix(&page, &rule, false).unwrap();
        assert!(map.is_zero());
        let next = homology_page(&page, &map);
        assert_eq!(page.dims(), next.dims());
        // Idempotence: run it again.
        let rule2 = DerivationRule {
            page_index: 3,
            ..rule
        };
        let map2 = differential_matrix(&next, &rule2, false).unwrap();
        let next2 = homology_page(&next, &map2);
        assert_eq!(next.dims(), next2.dims());
        for &(s, n) in next.dims().keys() {
            assert_eq!(next.basis_elements(s, n), next2.basis_elements(s, n));
        }
    }

    #[test]
    fn empty_schedule_returns_e2_as_infinity() {
        let (alg, _rule) = koszul();
        let w = Window::new(-10, 0, 0, 8);
        let gens = koszul_page(&alg, &w).generators.clone();
        let pages = run_schedule(&alg, gens, &[], &w).unwrap();
        assert_eq!(pages.len(), 1);
        let e2 = &pages[0];
        assert_eq!(e2.index, 2);
        assert!(e2.is_infinity);
        assert_eq!(e2.safe_region, w);
    }

    #[test]
    fn leibniz_examples_laurent() {
        // d(t) = t^{p+1} l1 at p = 7; then d(t^{1-p}) = (1-p) t λ1 = t λ1.
        let alg = MonomialAlgebraSpec::new(
            p(7),
            vec![
                GeneratorSpec::new("t", GeneratorKind::Laurent, -2, -2),
                GeneratorSpec::new("l1", GeneratorKind::Exterior, 0, 13),
                GeneratorSpec::new("l2", GeneratorKind::Exterior, 0, 97),
                GeneratorSpec::new("mu", GeneratorKind::Polynomial, 0, 686),
            ],
        )
        .unwrap();
        let gens = vec![
            PageGenerator {
                base: alg.power("t", 1),
                kind: GeneratorKind::Laurent,
            },
            PageGenerator {
                base: alg.monomial(&[("t", 1), ("mu", 1)]),
                kind: GeneratorKind::Polynomial,
            },
            PageGenerator {
                base: alg.power("l1", 1),
                kind: GeneratorKind::Exterior,
            },
            PageGenerator {
                base: alg.power("l2", 1),
                kind: GeneratorKind::Exterior,
            },
        ];
        let mut values = BTreeMap::new();
        values.insert(
            0,
            Element::from_monomial(alg.monomial(&[("t", 8), ("l1", 1)])),
        );
        let rule = DerivationRule {
            page_index: 14,
            generators: gens,
            values,
        };

        let d = derive_monomial(&alg, &rule, &alg.power("t", -6)).unwrap();
        let expected = Element::from_monomial(alg.monomial(&[("t", 1), ("l1", 1)]));
        assert_eq!(d, expected);

        // d(t^p) = p t^{p-1} d(t) = 0 mod p.
        let d = derive_monomial(&alg, &rule, &alg.power("t", 7)).unwrap();
        assert!(d.is_zero());

        // d(l2 * t) = (-1)^{|l2|} l2 d(t) = -t^{p+1} l1 l2.
        let d = derive_monomial(&alg, &rule, &alg.monomial(&[("t", 1), ("l2", 1)])).unwrap();
        let m = alg.monomial(&[("t", 8), ("l1", 1), ("l2", 1)]);
        // l2 * t^8 l1 = -(t^8 l1 l2) after reordering, and the Leibniz sign
        // contributes another -1; net +1... verify against a hand product:
        let l2 = Element::from_monomial(alg.power("l2", 1));
        let dt = Element::from_monomial(alg.monomial(&[("t", 8), ("l1", 1)]));
        let hand = multiply(&alg, &l2, &dt).scale(alg.prime, -1);
        assert_eq!(d, hand);
        let _ = m;

        // tmu is a cycle: d(t*mu) = 0 requires d(mu) = -t^p mu l1 via the
        // factorization mu = t^{-1} (tmu).
        let d = derive_monomial(&alg, &rule, &alg.monomial(&[("t", 1), ("mu", 1)])).unwrap();
        assert!(d.is_zero());
        let d = derive_monomial(&alg, &rule, &alg.power("mu", 1)).unwrap();
        let expected = Element::term(
            alg.prime,
            alg.monomial(&[("t", 7), ("mu", 1), ("l1", 1)]),
            -1,
        );
        assert_eq!(d, expected);
    }

    #[test]
    fn extend_derivation_rejects_non_factorable() {
        let (alg, _rule) = koszul();
        let w = Window::new(-10, 0, 0, 8);
        let page = koszul_page(&alg, &w);
        // A monomial of a different algebra shape cannot occur; simulate a
        // non-factorable case with a fresh generator set missing y.
        let bad_rule = DerivationRule {
            page_index: 2,
            generators: vec![PageGenerator {
                base: alg.power("x", 1),
                kind: GeneratorKind::Exterior,
            }],
            values: BTreeMap::new(),
        };
        let err = extend_derivation(&page, &bad_rule, &alg.power("y", 1));
        assert!(matches!(err, Err(SsError::Factorization { .. })));
    }

    #[test]
    fn d_squared_is_zero_on_random_monomials() {
        // For the C_p-Tate style rule, d∘d = 0 symbolically.
        let alg = MonomialAlgebraSpec::new(
            p(3),
            vec![
                GeneratorSpec::new("t", GeneratorKind::Laurent, -2, -2),
                GeneratorSpec::new("l1", GeneratorKind::Exterior, 0, 5),
                GeneratorSpec::new("mu", GeneratorKind::Polynomial, 0, 54),
            ],
        )
        .unwrap();
        let gens = vec![
            PageGenerator {
                base: alg.power("t", 1),
                kind: GeneratorKind::Laurent,
            },
            PageGenerator {
                base: alg.monomial(&[("t", 1), ("mu", 1)]),
                kind: GeneratorKind::Polynomial,
            },
            PageGenerator {
                base: alg.power("l1", 1),
                kind: GeneratorKind::Exterior,
            },
        ];
        let mut values = BTreeMap::new();
        values.insert(
            0,
            Element::from_monomial(alg.monomial(&[("t", 4), ("l1", 1)])),
        );
        let rule = DerivationRule {
            page_index: 6,
            generators: gens,
            values,
        };
        for a in -6..=6i64 {
            for c in 0..=4i64 {
                for l in 0..=1i64 {
                    let m = alg.monomial(&[("t", a), ("mu", c), ("l1", l)]);
                    if alg.validate(&m).is_err() {
                        continue;
                    }
                    if let Some(d1) = derive_monomial(&alg, &rule, &m) {
                        let mut dd = Element::zero();
                        for (mm, &cc) in &d1.terms {
                            if let Some(d2) = derive_monomial(&alg, &rule, mm) {
                                dd = dd.add(alg.prime, &d2.scale(alg.prime, cc as i64));
                            }
                        }
                        assert!(dd.is_zero(), "d(d({})) != 0", alg.format_monomial(&m));
                    }
                }
            }
        }
    }
}
