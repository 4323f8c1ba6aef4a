//! E²-terms, differential schedules and closed-form page descriptions for
//! the Tate and homotopy fixed-point spectral sequences computed by this
//! crate, plus the `r(k)`/`[k]` combinatorics they are indexed by.
//!
//! The input algebra is `E(l1, l2, l3) ⊗ P(mu)` with `|l_i| = 2p^i - 1` and
//! `|mu| = 2p^3`; group cohomology contributes `t` in bidegree `(-2, -2)`
//! and, for the cyclic groups `C_{p^n}`, an exterior class `u_n` in
//! `(-1, -1)`.  The differential families are
//!
//! ```text
//! d^{2r(k)}(t^{p^{k-1}})  = t^{p^{k-1} + p^k} (t mu)^{r(k-3)} l_[k]
//! d^{2r(3n)+1}(u_n)       = t^{p^{3n}} (t mu)^{r(3n-3)+1}
//! ```
//!
//! in generator form (all units fixed to +1), together with their
//! mu-localized analogues; `r(k) = p^k + r(k-3)` with `r(k) = 0` for
//! `k <= 0`, and `[k]` is the representative of `k mod 3` in `{1, 2, 3}`.
//!
//! The engine accepts any odd prime.  For `p < 7` the outputs are labeled
//! formal: the pattern is prime-uniform and small primes make full
//! brute-force verification tractable.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fpalg::{
    basis_in_window, bidegree_unchecked, Element, GeneratorKind, GeneratorSpec, Monomial,
    MonomialAlgebraSpec, Prime, Window,
};
use crate::ssengine::{DerivationRule, PageGenerator};

/// Sentinel page index for the E^∞ page of the circle-group sequences.
pub const INFINITY: i64 = i64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupTag {
    Circle,
    CyclicPPower(u32),
}

impl GroupTag {
    pub fn subgroup_index(self) -> Option<u32> {
        match self {
            GroupTag::Circle => None,
            GroupTag::CyclicPPower(n) => Some(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VariantTag {
    HomotopyFixedPoint,
    Tate,
    MuLocalizedHFP,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("r(k) is defined for k >= -2, got {k}")]
    ROutOfDomain { k: i64 },
    #[error("[k] is defined for k >= 1, got {k}")]
    BracketOutOfDomain { k: i64 },
    #[error("p-adic valuation of 0 is undefined")]
    ValuationOfZero,
    #[error("cyclic group index must be >= 1")]
    BadGroupIndex,
    #[error("no closed form is displayed for page {r} of this spectral sequence")]
    NoClosedForm { r: i64 },
}

/// `r(k) = p^k + r(k-3)`, with `r(0) = r(-1) = r(-2) = 0`.
pub fn r_of(k: i64, p: Prime) -> Result<i64, CatalogError> {
    if k < -2 {
        return Err(CatalogError::ROutOfDomain { k });
    }
    let mut total = 0i64;
    let mut j = k;
    while j >= 1 {
        total += (p.get() as i64).pow(j as u32);
        j -= 3;
    }
    Ok(total)
}

/// `[k]` in `{1,2,3}` with `k ≡ [k] mod 3`.
pub fn bracket(k: i64) -> Result<usize, CatalogError> {
    if k < 1 {
        return Err(CatalogError::BracketOutOfDomain { k });
    }
    let m = (k % 3) as usize;
    Ok(if m == 0 { 3 } else { m })
}

/// Largest e with `p^e | i`, for `i != 0`.
pub fn p_adic_valuation(i: i64, p: Prime) -> Result<u32, CatalogError> {
    if i == 0 {
        return Err(CatalogError::ValuationOfZero);
    }
    let q = p.get() as i64;
    let mut v = 0u32;
    let mut i = i.abs();
    while i % q == 0 {
        i /= q;
        v += 1;
    }
    Ok(v)
}

fn lambda_name(i: usize) -> String {
    format!("l{i}")
}

fn u_name(n: u32) -> String {
    format!("u{n}")
}

/// The E²-term as an ambient monomial algebra.
///
/// `t` is Laurent in the Tate variant and polynomial otherwise; `mu` is
/// Laurent in the localized variant and polynomial otherwise; `C_{p^n}`
/// contributes the exterior class `u_n`.
pub fn e2_term(group: GroupTag, variant: VariantTag, p: Prime) -> MonomialAlgebraSpec {
    let q = p.get() as i64;
    let t_kind = match variant {
        VariantTag::Tate => GeneratorKind::Laurent,
        _ => GeneratorKind::Polynomial,
    };
    let mu_kind = match variant {
        VariantTag::MuLocalizedHFP => GeneratorKind::Laurent,
        _ => GeneratorKind::Polynomial,
    };
    let mut gens = Vec::new();
    if let GroupTag::CyclicPPower(n) = group {
        gens.push(GeneratorSpec::new(
            &u_name(n),
            GeneratorKind::Exterior,
            -1,
            -1,
        ));
    }
    gens.push(GeneratorSpec::new("t", t_kind, -2, -2));
    for i in 1..=3usize {
        gens.push(GeneratorSpec::new(
            &lambda_name(i),
            GeneratorKind::Exterior,
            0,
            2 * q.pow(i as u32) - 1,
        ));
    }
    gens.push(GeneratorSpec::new("mu", mu_kind, 0, 2 * q.pow(3)));
    MonomialAlgebraSpec::new(p, gens).expect("catalog algebras are well-formed")
}

/// The ambient generators viewed as the E² page's multiplicative generators.
pub fn e2_page_generators(alg: &MonomialAlgebraSpec) -> Vec<PageGenerator> {
    alg.generators
        .iter()
        .map(|g| PageGenerator {
            base: alg.power(&g.name, 1),
            kind: g.kind,
        })
        .collect()
}

/// Declared free-sector generators of the page a rule acts on: the period
/// generator (`t^{p^m}` or `mu^{p^m}`), `t mu`, the lambdas, and `u_n`.
fn page_generators_at(
    alg: &MonomialAlgebraSpec,
    group: GroupTag,
    variant: VariantTag,
    step: i64,
) -> Vec<PageGenerator> {
    let mut gens = Vec::new();
    if let GroupTag::CyclicPPower(n) = group {
        gens.push(PageGenerator {
            base: alg.power(&u_name(n), 1),
            kind: GeneratorKind::Exterior,
        });
    }
    match variant {
        VariantTag::MuLocalizedHFP => gens.push(PageGenerator {
            base: alg.power("mu", step),
            kind: GeneratorKind::Laurent,
        }),
        VariantTag::Tate => gens.push(PageGenerator {
            base: alg.power("t", step),
            kind: GeneratorKind::Laurent,
        }),
        VariantTag::HomotopyFixedPoint => gens.push(PageGenerator {
            base: alg.power("t", step),
            kind: GeneratorKind::Polynomial,
        }),
    }
    gens.push(PageGenerator {
        base: alg.monomial(&[("t", 1), ("mu", 1)]),
        kind: GeneratorKind::Polynomial,
    });
    for i in 1..=3usize {
        gens.push(PageGenerator {
            base: alg.power(&lambda_name(i), 1),
            kind: GeneratorKind::Exterior,
        });
    }
    gens
}

/// The even-family rule `d^{2r(k)}` in generator form.
fn even_rule(
    alg: &MonomialAlgebraSpec,
    group: GroupTag,
    variant: VariantTag,
    p: Prime,
    k: i64,
) -> DerivationRule {
    let q = p.get() as i64;
    let rk = r_of(k, p).unwrap();
    let rk3 = r_of(k - 3, p).unwrap();
    let step = q.pow((k - 1) as u32);
    let lam = lambda_name(bracket(k).unwrap());
    let generators = page_generators_at(alg, group, variant, step);
    let src = usize::from(matches!(group, GroupTag::CyclicPPower(_)));
    let value = match variant {
        VariantTag::MuLocalizedHFP => {
            // d(mu^{p^{k-1}}) = t^{r(k)} mu^{r(k) + p^{k-1} - p^k} l_[k]
            alg.monomial(&[("t", rk), ("mu", rk + step - q.pow(k as u32)), (&lam, 1)])
        }
        _ => {
            // d(t^{p^{k-1}}) = t^{p^{k-1} + p^k + r(k-3)} mu^{r(k-3)} l_[k]
            alg.monomial(&[("t", step + q.pow(k as u32) + rk3), ("mu", rk3), (&lam, 1)])
        }
    };
    let mut values = BTreeMap::new();
    values.insert(src, Element::from_monomial(value));
    DerivationRule {
        page_index: 2 * rk,
        generators,
        values,
    }
}

/// The odd rule `d^{2r(3n)+1}(u_n) = ...` closing a cyclic-group sequence.
fn odd_rule(alg: &MonomialAlgebraSpec, n: u32, variant: VariantTag, p: Prime) -> DerivationRule {
    let q = p.get() as i64;
    let r3n = r_of(3 * n as i64, p).unwrap();
    let r3n3 = r_of(3 * n as i64 - 3, p).unwrap();
    let step = q.pow(3 * n);
    let generators = page_generators_at(alg, GroupTag::CyclicPPower(n), variant, step);
    let value = match variant {
        VariantTag::MuLocalizedHFP => {
            // d(u_n) = t^{r(3n)+1} mu^{r(3n)+1-p^{3n}}
            alg.monomial(&[("t", r3n + 1), ("mu", r3n + 1 - step)])
        }
        _ => {
            // d(u_n) = t^{p^{3n} + r(3n-3) + 1} mu^{r(3n-3)+1}
            alg.monomial(&[("t", step + r3n3 + 1), ("mu", r3n3 + 1)])
        }
    };
    let mut values = BTreeMap::new();
    values.insert(0, Element::from_monomial(value));
    DerivationRule {
        page_index: 2 * r3n + 1,
        generators,
        values,
    }
}

/// The differential schedule in increasing page order.
///
/// Cyclic groups get `k = 1..3n` plus the closing odd rule.  The circle's
/// infinite family is truncated at the largest k whose differential length
/// `2r(k)` fits in the window's filtration span (`max(|s_min|, |s_max|)`);
/// longer differentials vanish identically within the window.
pub fn schedule(
    group: GroupTag,
    variant: VariantTag,
    p: Prime,
    window: &Window,
) -> Vec<DerivationRule> {
    let alg = e2_term(group, variant, p);
    let mut rules = Vec::new();
    match group {
        GroupTag::CyclicPPower(n) => {
            for k in 1..=3 * n as i64 {
                rules.push(even_rule(&alg, group, variant, p, k));
            }
            rules.push(odd_rule(&alg, n, variant, p));
        }
        GroupTag::Circle => {
            let span = window.s_min.abs().max(window.s_max.abs());
            let mut k = 1i64;
            while 2 * r_of(k, p).unwrap() <= span {
                rules.push(even_rule(&alg, group, variant, p, k));
                k += 1;
            }
        }
    }
    rules
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Free or truncated `P(t mu)`-height of a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Height {
    Free,
    Trunc(i64),
}

/// The `t`/`mu`-power family a sector is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorBase {
    /// No power family: the sector is `P_h(t mu) ⊗ E(cofactor)`.
    One,
    /// `t^{a * step}`, two-sided when `laurent`.
    TPowers { step: i64, laurent: bool },
    /// `mu^{a * step}`.
    MuPowers { step: i64, laurent: bool },
    /// `t^i` with `v_p(i) = val`, `i != 0` of either sign.
    TValuation { val: u32 },
    /// `mu^j` with `v_p(j) = val`.
    MuValuation { val: u32 },
}

/// One summand of a displayed page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    pub label: String,
    /// Tensor an `E(u_n)` factor.
    pub u_exterior: bool,
    pub base: SectorBase,
    pub tmu: Height,
    /// A lambda included in every monomial of the sector (its index), as in
    /// the torsion families `F_p{t^i l_[k]}`.
    pub lambda_fixed: Option<usize>,
    /// Indices of the exterior cofactor lambdas.
    pub lambda_cofactor: Vec<usize>,
}

/// A displayed page: its index and summand inventory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormPage {
    pub page_index: i64,
    pub sectors: Vec<Sector>,
}

fn free_sector(
    group: GroupTag,
    variant: VariantTag,
    step: i64,
    tmu: Height,
    with_u: bool,
) -> Sector {
    let laurent = true;
    let base = match variant {
        VariantTag::MuLocalizedHFP => SectorBase::MuPowers { step, laurent },
        VariantTag::Tate => SectorBase::TPowers { step, laurent },
        VariantTag::HomotopyFixedPoint => SectorBase::TPowers {
            step,
            laurent: false,
        },
    };
    Sector {
        label: format!("free step {step}"),
        u_exterior: with_u && matches!(group, GroupTag::CyclicPPower(_)),
        base,
        tmu,
        lambda_fixed: None,
        lambda_cofactor: vec![1, 2, 3],
    }
}

fn torsion_sector(variant: VariantTag, p: Prime, k: i64, with_u: bool) -> Sector {
    let kk = bracket(k).unwrap();
    let cof = vec![bracket(k + 1).unwrap(), bracket(k + 2).unwrap()];
    let (base, height) = match variant {
        VariantTag::MuLocalizedHFP => (
            SectorBase::MuValuation {
                val: (k - 1) as u32,
            },
            r_of(k, p).unwrap(),
        ),
        _ => (
            SectorBase::TValuation {
                val: (k - 1) as u32,
            },
            r_of(k - 3, p).unwrap(),
        ),
    };
    Sector {
        label: format!("torsion k={k}"),
        u_exterior: with_u,
        base,
        tmu: Height::Trunc(height),
        lambda_fixed: Some(kk),
        lambda_cofactor: cof,
    }
}

/// The closed-form description of a displayed page for the given tags, or
/// a no-closed-form error.
///
/// Displayed indices are `2` (the E²-echo), `2r(m)+1` for `m = 1..3n`
/// (cyclic; any `m >= 1` for the circle), `2r(3n)+2` (the cyclic E^∞), and
/// [`INFINITY`] for the circle-group E^∞.
pub fn closed_form(
    group: GroupTag,
    variant: VariantTag,
    r: i64,
    p: Prime,
) -> Result<ClosedFormPage, CatalogError> {
    if r == 2 {
        let tmu = Height::Free;
        return Ok(ClosedFormPage {
            page_index: 2,
            sectors: vec![free_sector(group, variant, 1, tmu, true)],
        });
    }
    let q = p.get() as i64;
    match group {
        GroupTag::CyclicPPower(n) => {
            let n3 = 3 * n as i64;
            if variant == VariantTag::HomotopyFixedPoint {
                return Err(CatalogError::NoClosedForm { r });
            }
            // r = 2r(m)+1 for some 1 <= m <= 3n?
            for m in 1..=n3 {
                if r == 2 * r_of(m, p).unwrap() + 1 {
                    let mut sectors = vec![free_sector(
                        group,
                        variant,
                        q.pow(m as u32),
                        Height::Free,
                        true,
                    )];
                    let k_lo = torsion_start(variant);
                    for k in k_lo..=m {
                        sectors.push(torsion_sector(variant, p, k, true));
                    }
                    return Ok(ClosedFormPage {
                        page_index: r,
                        sectors,
                    });
                }
            }
            if r == 2 * r_of(n3, p).unwrap() + 2 || r == INFINITY {
                let final_height = match variant {
                    VariantTag::MuLocalizedHFP => r_of(n3, p).unwrap() + 1,
                    _ => r_of(n3 - 3, p).unwrap() + 1,
                };
                let mut sectors = vec![free_sector(
                    group,
                    variant,
                    q.pow(n3 as u32),
                    Height::Trunc(final_height),
                    false,
                )];
                let k_lo = torsion_start(variant);
                for k in k_lo..=n3 {
                    sectors.push(torsion_sector(variant, p, k, true));
                }
                return Ok(ClosedFormPage {
                    page_index: 2 * r_of(n3, p).unwrap() + 2,
                    sectors,
                });
            }
            Err(CatalogError::NoClosedForm { r })
        }
        GroupTag::Circle => {
            if variant == VariantTag::HomotopyFixedPoint {
                return Err(CatalogError::NoClosedForm { r });
            }
            if r == INFINITY {
                let free = Sector {
                    label: "free".to_string(),
                    u_exterior: false,
                    base: SectorBase::One,
                    tmu: Height::Free,
                    lambda_fixed: None,
                    lambda_cofactor: vec![1, 2, 3],
                };
                // Torsion families for every k >= start; materialization
                // bounds k against the window.
                return Ok(ClosedFormPage {
                    page_index: INFINITY,
                    sectors: vec![free],
                });
            }
            let mut m = 1i64;
            loop {
                let rm = r_of(m, p).unwrap();
                if 2 * rm + 1 > r {
                    return Err(CatalogError::NoClosedForm { r });
                }
                if r == 2 * rm + 1 {
                    let mut sectors = vec![free_sector(
                        group,
                        variant,
                        q.pow(m as u32),
                        Height::Free,
                        false,
                    )];
                    for k in torsion_start(variant)..=m {
                        sectors.push(torsion_sector(variant, p, k, false));
                    }
                    return Ok(ClosedFormPage {
                        page_index: r,
                        sectors,
                    });
                }
                m += 1;
            }
        }
    }
}

/// First k with a nonzero torsion family: the Tate-side heights `r(k-3)`
/// vanish for `k <= 3`.
fn torsion_start(variant: VariantTag) -> i64 {
    match variant {
        VariantTag::MuLocalizedHFP => 1,
        _ => 4,
    }
}

/// Materialize the circle-group E^∞ torsion families against a window (the
/// sector list of `closed_form(Circle, _, INFINITY, _)` holds only the free
/// part; the k-families are window-dependent).
pub fn circle_infinity_sectors(variant: VariantTag, p: Prime, window: &Window) -> Vec<Sector> {
    let q = p.get() as i64;
    // Bound: the valuation family at k needs |i| >= p^{k-1} with
    // |i| <= max |t-exp| + max mu-exp within the window.
    let half_s = (window.s_min.abs().max(window.s_max.abs()) + 1) / 2 + 1;
    let mu_span = (window.n_max - window.n_min + window.s_max - window.s_min) / (2 * q.pow(3)) + 2;
    let bound = half_s + mu_span;
    let mut sectors = Vec::new();
    let mut k = torsion_start(variant);
    while q.pow((k - 1) as u32) <= bound {
        sectors.push(torsion_sector(variant, p, k, false));
        k += 1;
    }
    sectors
}

/// Expand a sector to its ambient monomials inside the window.
pub fn materialize_sector(
    alg: &MonomialAlgebraSpec,
    p: Prime,
    sector: &Sector,
    window: &Window,
) -> Vec<Monomial> {
    let q = p.get() as i64;
    // Virtual algebra: u?, base family, t*mu, cofactor lambdas.  The fixed
    // lambda translates the window instead.
    let mut vgens = Vec::new();
    let mut u_pos = None;
    if sector.u_exterior {
        u_pos = Some(vgens.len());
        vgens.push(GeneratorSpec::new("u", GeneratorKind::Exterior, -1, -1));
    }
    let base_pos = match sector.base {
        SectorBase::One => None,
        SectorBase::TPowers { step, laurent } => {
            let kind = if laurent {
                GeneratorKind::Laurent
            } else {
                GeneratorKind::Polynomial
            };
            vgens.push(GeneratorSpec::new("b", kind, -2 * step, -2 * step));
            Some(vgens.len() - 1)
        }
        SectorBase::MuPowers { step, laurent } => {
            let kind = if laurent {
                GeneratorKind::Laurent
            } else {
                GeneratorKind::Polynomial
            };
            vgens.push(GeneratorSpec::new("b", kind, 0, 2 * q.pow(3) * step));
            Some(vgens.len() - 1)
        }
        SectorBase::TValuation { .. } => {
            vgens.push(GeneratorSpec::new("b", GeneratorKind::Laurent, -2, -2));
            Some(vgens.len() - 1)
        }
        SectorBase::MuValuation { .. } => {
            vgens.push(GeneratorSpec::new(
                "b",
                GeneratorKind::Laurent,
                0,
                2 * q.pow(3),
            ));
            Some(vgens.len() - 1)
        }
    };
    let tmu_pos = vgens.len();
    let tmu_kind = match sector.tmu {
        Height::Free => GeneratorKind::Polynomial,
        Height::Trunc(h) => {
            if h <= 0 {
                return Vec::new();
            }
            GeneratorKind::Truncated(h as u64)
        }
    };
    vgens.push(GeneratorSpec::new("j", tmu_kind, -2, 2 * q.pow(3) - 2));
    let mut cof_pos = Vec::new();
    for &i in &sector.lambda_cofactor {
        cof_pos.push((vgens.len(), i));
        vgens.push(GeneratorSpec::new(
            &format!("c{i}"),
            GeneratorKind::Exterior,
            0,
            2 * q.pow(i as u32) - 1,
        ));
    }
    let valg = MonomialAlgebraSpec::new(p, vgens).expect("virtual sector algebra");

    // Translate the window by the fixed lambda's bidegree.
    let mut w = *window;
    if let Some(i) = sector.lambda_fixed {
        let d = 2 * q.pow(i as u32) - 1;
        w = Window::new(w.s_min, w.s_max, w.n_min - d, w.n_max - d);
    }
    let virt = match basis_in_window(&valg, &w) {
        Ok(v) => v,
        Err(_) => return Vec::new(),
    };

    let mut out = Vec::new();
    for vm in virt {
        // Valuation filter on the base exponent.
        if let Some(bp) = base_pos {
            let e = vm.exps[bp];
            match sector.base {
                SectorBase::TValuation { val } | SectorBase::MuValuation { val }
                    if e == 0 || p_adic_valuation(e, p) != Ok(val) =>
                {
                    continue;
                }
                _ => {}
            }
        }
        // Assemble the ambient monomial.
        let mut m = alg.unit();
        if let Some(up) = u_pos {
            if vm.exps[up] != 0 {
                let uname = alg
                    .generators
                    .iter()
                    .find(|g| g.name.starts_with('u'))
                    .map(|g| g.name.clone())
                    .expect("ambient algebra has a u generator");
                m.exps[alg.gen_index(&uname).unwrap()] = vm.exps[up];
            }
        }
        let ti = alg.gen_index("t").unwrap();
        let mi = alg.gen_index("mu").unwrap();
        if let Some(bp) = base_pos {
            let e = vm.exps[bp];
            match sector.base {
                SectorBase::TPowers { step, .. } => m.exps[ti] += e * step,
                SectorBase::TValuation { .. } => m.exps[ti] += e,
                SectorBase::MuPowers { step, .. } => m.exps[mi] += e * step,
                SectorBase::MuValuation { .. } => m.exps[mi] += e,
                SectorBase::One => {}
            }
        }
        let j = vm.exps[tmu_pos];
        m.exps[ti] += j;
        m.exps[mi] += j;
        for &(pos, i) in &cof_pos {
            if vm.exps[pos] != 0 {
                m.exps[alg.gen_index(&lambda_name(i)).unwrap()] = 1;
            }
        }
        if let Some(i) = sector.lambda_fixed {
            m.exps[alg.gen_index(&lambda_name(i)).unwrap()] = 1;
        }
        if alg.validate(&m).is_err() {
            // Sector classes outside the ambient's exponent discipline (for
            // example mu^{-1}-divided classes against a polynomial mu) do
            // not exist on this page.
            continue;
        }
        let bd = bidegree_unchecked(alg, &m);
        if window.contains(bd.0, bd.1) {
            out.push(m);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Per-bidegree monomial count of a full closed-form page inside a window.
///
/// For the circle E^∞ pages the window-dependent torsion families are
/// appended automatically.
pub fn materialize_dims(
    alg: &MonomialAlgebraSpec,
    p: Prime,
    group: GroupTag,
    variant: VariantTag,
    page: &ClosedFormPage,
    window: &Window,
) -> BTreeMap<(i64, i64), usize> {
    let mut sectors = page.sectors.clone();
    if group == GroupTag::Circle && page.page_index == INFINITY {
        sectors.extend(circle_infinity_sectors(variant, p, window));
    }
    let mut dims: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut seen: BTreeMap<(i64, i64), Vec<Monomial>> = BTreeMap::new();
    for sector in &sectors {
        for m in materialize_sector(alg, p, sector, window) {
            let bd = bidegree_unchecked(alg, &m);
            let cell = seen.entry(bd).or_default();
            debug_assert!(
                !cell.contains(&m),
                "closed-form sectors overlap at {}",
                alg.format_monomial(&m)
            );
            cell.push(m);
            *dims.entry(bd).or_insert(0) += 1;
        }
    }
    dims
}

/// Displayed page indices for the tags, usable with [`closed_form`].
pub fn displayed_page_indices(group: GroupTag, variant: VariantTag, p: Prime) -> Vec<i64> {
    match group {
        GroupTag::CyclicPPower(n) => {
            if variant == VariantTag::HomotopyFixedPoint {
                return vec![2];
            }
            let n3 = 3 * n as i64;
            let mut out = vec![2];
            for m in 1..=n3 {
                out.push(2 * r_of(m, p).unwrap() + 1);
            }
            out.push(2 * r_of(n3, p).unwrap() + 2);
            out
        }
        GroupTag::Circle => {
            if variant == VariantTag::HomotopyFixedPoint {
                vec![2]
            } else {
                vec![2, INFINITY]
            }
        }
    }
}
