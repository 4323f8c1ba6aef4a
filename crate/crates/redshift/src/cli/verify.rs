//! The cross-module verification suites behind `redshift verify` and the
//! acceptance test target.
//!
//! Every check compares an engine computation against an independent
//! description: brute-force pages against closed forms, E^∞ terms against
//! materialized summand inventories, assembled tables against closed-form
//! counts and Poincaré series.  All comparisons are exact; there are no
//! tolerances to calibrate.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use crate::catalog::{self, e2_page_generators, e2_term, r_of, GroupTag, VariantTag};
use crate::decomp::{self, Side};
use crate::fpalg::{
    bidegree_unchecked, multiply, Element, Monomial, MonomialAlgebraSpec, Prime, Window,
};
use crate::ssengine::{derive_monomial, run_schedule, DerivationRule, Page};
use crate::tcasm;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn render(&self) -> String {
        format!(
            "{} {} ({}) [{:.2}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn outcome(name: &str, started: Instant, result: Result<String, String>) -> CheckOutcome {
    let seconds = started.elapsed().as_secs_f64();
    match result {
        Ok(detail) => CheckOutcome {
            name: name.to_string(),
            passed: true,
            detail,
            seconds,
        },
        Err(detail) => CheckOutcome {
            name: name.to_string(),
            passed: false,
            detail,
            seconds,
        },
    }
}

fn prime(q: u32) -> Prime {
    Prime::new(q).expect("verification primes are odd primes")
}

/// Compare engine page dimensions against a reference dimension table on
/// the intersection of the page's safe region with `region`.
fn diff_dims(
    page: &Page,
    reference: &std::collections::BTreeMap<(i64, i64), usize>,
    region: &Window,
) -> Result<usize, String> {
    let safe = page.safe_region.intersect(region);
    if safe.is_empty() {
        return Err("safe region is empty; widen the window".to_string());
    }
    let engine = page.dims();
    let mut keys: BTreeSet<(i64, i64)> = engine.keys().copied().collect();
    keys.extend(reference.keys().copied());
    let mut checked = 0usize;
    for k in keys {
        if !safe.contains(k.0, k.1) {
            continue;
        }
        checked += 1;
        let a = engine.get(&k).copied().unwrap_or(0);
        let b = reference.get(&k).copied().unwrap_or(0);
        if a != b {
            return Err(format!(
                "dim mismatch at (s,n)=({},{}): engine {a}, reference {b}",
                k.0, k.1
            ));
        }
    }
    Ok(checked)
}

// ---------------------------------------------------------------------------
// Table checks
// ---------------------------------------------------------------------------

/// TC tables: `12p + 4` free generators within the stated degree range, for
/// p in {3, 5, 7, 11}.
pub fn check_tc_tables() -> CheckOutcome {
    let t0 = Instant::now();
    let run = || -> Result<String, String> {
        for (q, count) in [(3u32, 40usize), (5, 64), (7, 88), (11, 136)] {
            let p = prime(q);
            let table = tcasm::assemble_tc(p).map_err(|e| e.to_string())?;
            if table.generators.len() != count {
                return Err(format!(
                    "p={q}: expected {count} generators, got {}",
                    table.generators.len()
                ));
            }
            let qi = q as i64;
            let hi = 2 * qi.pow(3) + 2 * qi.pow(2) + 2 * qi - 3;
            for g in &table.generators {
                if g.degree < -1 || g.degree > hi {
                    return Err(format!("p={q}: {} in degree {}", g.name, g.degree));
                }
            }
        }
        Ok("counts 40/64/88/136 with degrees in [-1, 2p^3+2p^2+2p-3]".to_string())
    };
    outcome("tc-generator-table", t0, run())
}

/// Poincaré series of the TC table equals the closed formula exactly.
pub fn check_poincare_identity() -> CheckOutcome {
    let t0 = Instant::now();
    let run = || -> Result<String, String> {
        for q in [3u32, 5, 7, 11] {
            let p = prime(q);
            let table = tcasm::assemble_tc(p).map_err(|e| e.to_string())?;
            let series = tcasm::poincare_series(&table).map_err(|e| e.to_string())?;
            let reference = tcasm::reference_poincare(p);
            if series != reference {
                return Err(format!("p={q}: series differs from the closed formula"));
            }
        }
        Ok("exact polynomial equality for p in {3,5,7,11}".to_string())
    };
    outcome("poincare-identity", t0, run())
}

/// Height-0 and height-1 regression families: ranks `p+3` and `4p+4` with
/// the displayed summand shapes.
pub fn check_height_families() -> CheckOutcome {
    let t0 = Instant::now();
    let run2 = || -> Result<String, String> {
        for q in [3u32, 5, 7] {
            let p = prime(q);
            let qi = q as i64;
            let t0h = tcasm::assemble_tc_height(0, p).map_err(|e| e.to_string())?;
            if t0h.generators.len() as i64 != qi + 3 {
                return Err(format!("p={q}: height-0 rank {}", t0h.generators.len()));
            }
            let names: BTreeSet<&str> = t0h.generators.iter().map(|g| g.name.as_str()).collect();
            for want in ["1", "del", "l1", "del*l1"] {
                if !names.contains(want) {
                    return Err(format!("p={q}: height-0 table lacks {want}"));
                }
            }
            for d in 1..qi {
                if !names.contains(format!("Xi(1,{d})").as_str()) {
                    return Err(format!("p={q}: height-0 table lacks Xi(1,{d})"));
                }
            }
            let t1h = tcasm::assemble_tc_height(1, p).map_err(|e| e.to_string())?;
            if t1h.generators.len() as i64 != 4 * qi + 4 {
                return Err(format!("p={q}: height-1 rank {}", t1h.generators.len()));
            }
            let names: BTreeSet<&str> = t1h.generators.iter().map(|g| g.name.as_str()).collect();
            for d in 1..qi {
                for want in [
                    format!("Xi(1,{d})"),
                    format!("l2*Xi(1,{d})"),
                    format!("Xi(2,{d})"),
                    format!("l1*Xi(2,{d})"),
                ] {
                    if !names.contains(want.as_str()) {
                        return Err(format!("p={q}: height-1 table lacks {want}"));
                    }
                }
            }
            let rep = tcasm::check_map_tc2_to_tc1(p).map_err(|e| e.to_string())?;
            if !rep.ok {
                return Err(format!(
                    "p={q}: height 2 -> 1 map check failed at degree {:?}",
                    rep.first_failing_degree
                ));
            }
        }
        Ok("ranks p+3 and 4p+4; truncation map verified below 2p^2-1".to_string())
    };
    outcome("height-regression-families", t0, run2())
}

/// K-theory tables at p = 7: the p-complete table's shifted boundary class
/// and torsion degrees, and the p-local table's unresolved block.
pub fn check_k_tables() -> CheckOutcome {
    let t0 = Instant::now();
    let run = || -> Result<String, String> {
        let p = prime(7);
        let k = tcasm::assemble_k_padic(p).map_err(|e| e.to_string())?;
        let v3del = k
            .generators
            .iter()
            .find(|g| g.name == "v3*del")
            .ok_or("v3*del missing")?;
        if v3del.degree != 683 {
            return Err(format!("v3*del degree {}", v3del.degree));
        }
        let torsion: Vec<i64> = k
            .generators
            .iter()
            .filter(|g| g.v3_height != tcasm::V3Height::Free)
            .map(|g| g.degree)
            .collect();
        if torsion != vec![11, 95, 108] {
            return Err(format!("torsion degrees {torsion:?}"));
        }
        let kl = tcasm::assemble_k_local(p).map_err(|e| e.to_string())?;
        let block = kl.unresolved_blocks.first().ok_or("no unresolved block")?;
        if (block.degree_min, block.degree_max) != (1, 109) {
            return Err(format!(
                "unresolved block [{}, {}]",
                block.degree_min, block.degree_max
            ));
        }
        if kl.localization_threshold != Some(112) {
            return Err(format!("threshold {:?}", kl.localization_threshold));
        }
        Ok("v3*del at 683; torsion {11,95,108}; block [1,109]; threshold 112".to_string())
    };
    outcome("k-theory-tables", t0, run())
}

/// Torsion-height integrality and consistency for k <= 9, 0 < d < p.
pub fn check_torsion_heights() -> CheckOutcome {
    let t0 = Instant::now();
    let run = || -> Result<String, String> {
        for q in [3u32, 5, 7] {
            let p = prime(q);
            let qi = q as i64;
            let alg = e2_term(GroupTag::Circle, VariantTag::HomotopyFixedPoint, p);
            for k in 1..=9i64 {
                for d in 1..qi {
                    let h = decomp::torsion_height(k, d, p).map_err(|e| e.to_string())?;
                    let rk = r_of(k, p).map_err(|e| e.to_string())?;
                    if h * qi != (qi - d) * rk {
                        return Err(format!("p={q} k={k} d={d}: height {h} not (1-d/p)r(k)"));
                    }
                    if k <= 3 && h != qi.pow(k as u32) - d * qi.pow((k - 1) as u32) {
                        return Err(format!("p={q} k={k} d={d}: height {h} vs p^k - dp^(k-1)"));
                    }
                    // Equals the truncation height of <x_{k,d}>.
                    let b =
                        decomp::module_b(&alg, k, d, p, Side::Hfp).map_err(|e| e.to_string())?;
                    let base = b
                        .summands
                        .iter()
                        .find(|s| !s.label.contains("(tmu)^-1") && s.label.ends_with(":gen"))
                        .ok_or("no base generator summand")?;
                    if base.tmu_height != decomp::TmuHeight::Trunc(h) {
                        return Err(format!(
                            "p={q} k={k} d={d}: module height {:?} vs {h}",
                            base.tmu_height
                        ));
                    }
                }
            }
        }
        Ok("(1-d/p) r(k) integral and consistent for k <= 9, p in {3,5,7}".to_string())
    };
    outcome("torsion-heights", t0, run())
}

// ---------------------------------------------------------------------------
// Engine pipelines
// ---------------------------------------------------------------------------

/// Full Tate oracle for `C_p`: run the schedule and compare E^∞ against
/// the closed form.
pub fn check_cp_tate_oracle(q: u32, window: Window) -> CheckOutcome {
    let t0 = Instant::now();
    let name = format!("cp-tate-oracle-p{q}");
    let run = || -> Result<String, String> {
        let p = prime(q);
        let group = GroupTag::CyclicPPower(1);
        let variant = VariantTag::Tate;
        let alg = e2_term(group, variant, p);
        let sched = catalog::schedule(group, variant, p, &window);
        let pages = run_schedule(&alg, e2_page_generators(&alg), &sched, &window)
            .map_err(|e| e.to_string())?;
        let last = pages.last().ok_or("no pages")?;
        if !last.is_infinity {
            return Err("final page not flagged E^inf".to_string());
        }
        let cf = catalog::closed_form(group, variant, last.index, p).map_err(|e| e.to_string())?;
        let dims = catalog::materialize_dims(&alg, p, group, variant, &cf, &window);
        let checked = diff_dims(last, &dims, &window)?;
        Ok(format!(
            "E^inf = P(t^{{±p^3}}) x E(l1,l2,l3) on {checked} cells"
        ))
    };
    outcome(&name, t0, run())
}

/// All displayed pages of the `C_{p^n}`-Tate sequence against their closed
/// forms, plus per-cell monotonicity of dimensions.
pub fn check_cpn_tate_pages(q: u32, n: u32, window: Window) -> CheckOutcome {
    let t0 = Instant::now();
    let name = format!("cp{n}-tate-pages-p{q}");
    let run = || -> Result<String, String> {
        let p = prime(q);
        let group = GroupTag::CyclicPPower(n);
        let variant = VariantTag::Tate;
        let alg = e2_term(group, variant, p);
        let sched = catalog::schedule(group, variant, p, &window);
        let pages = run_schedule(&alg, e2_page_generators(&alg), &sched, &window)
            .map_err(|e| e.to_string())?;
        let mut checked_total = 0usize;
        for pair in pages.windows(2) {
            let (prev, next) = (&pair[0], &pair[1]);
            let safe = next.safe_region;
            for (&(s, nn), &d) in &next.dims() {
                if safe.contains(s, nn) && d > prev.dim(s, nn) {
                    return Err(format!(
                        "dimension grew at ({s},{nn}) from page {} to {}",
                        prev.index, next.index
                    ));
                }
            }
        }
        for page in &pages[1..] {
            let cf =
                catalog::closed_form(group, variant, page.index, p).map_err(|e| e.to_string())?;
            let dims = catalog::materialize_dims(&alg, p, group, variant, &cf, &window);
            let checked =
                diff_dims(page, &dims, &window).map_err(|e| format!("page {}: {e}", page.index))?;
            checked_total += checked;
        }
        Ok(format!(
            "{} displayed pages match closed forms on {checked_total} cells",
            pages.len() - 1
        ))
    };
    outcome(&name, t0, run())
}

/// The circle-group E^∞ terms against the materialized decompositions
/// `A ⊕ B ⊕ C`, `Â ⊕ B̂ ⊕ Ĉ` and `A ⊕ B' ⊕ C`, plus the `4p - 2` classes
/// separating `B'` from `B`.
pub fn check_t_family_vs_decomp(q: u32, window: Window, degree_cap: i64) -> CheckOutcome {
    let t0 = Instant::now();
    let name = format!("t-family-vs-decomp-p{q}");
    let run = || -> Result<String, String> {
        let p = prime(q);
        let qi = q as i64;
        let mut details = String::new();
        for (variant, side) in [
            (VariantTag::HomotopyFixedPoint, Side::Hfp),
            (VariantTag::Tate, Side::Tate),
            (VariantTag::MuLocalizedHFP, Side::Loc),
        ] {
            let alg = e2_term(GroupTag::Circle, variant, p);
            let sched = catalog::schedule(GroupTag::Circle, variant, p, &window);
            let pages = run_schedule(&alg, e2_page_generators(&alg), &sched, &window)
                .map_err(|e| e.to_string())?;
            let last = pages.last().ok_or("no pages")?;
            let inv = decomp::inventory_abc(&alg, side, p, &window).map_err(|e| e.to_string())?;
            let mat = decomp::materialize(&alg, &inv, &window).map_err(|e| e.to_string())?;
            let region = Window::new(window.s_min, window.s_max, 0, degree_cap);
            let checked =
                diff_dims(last, &mat.dims(), &region).map_err(|e| format!("{side:?}: {e}"))?;
            let _ = write!(details, "{side:?}:{checked} ");
        }
        // B' vs B: exactly 4p - 2 extra classes, each a mu^{-1}-divided
        // monomial in the stated degrees.
        let loc = e2_term(GroupTag::Circle, VariantTag::MuLocalizedHFP, p);
        let build = |side: Side| -> Result<decomp::Materialized, String> {
            let mut inv = decomp::SummandInventory::default();
            for k in 1..=3i64 {
                for d in 1..qi {
                    inv = inv
                        .concat(decomp::module_b(&loc, k, d, p, side).map_err(|e| e.to_string())?);
                }
            }
            inv.degree_floor = Some(0);
            decomp::materialize(&loc, &inv, &window).map_err(|e| e.to_string())
        };
        let bprime = build(Side::Loc)?;
        let bplain = build(Side::Hfp)?;
        let mut extra = Vec::new();
        for (cell, monos) in &bprime.by_cell {
            let have: BTreeSet<&Monomial> = bplain
                .by_cell
                .get(cell)
                .map(|v| v.iter().collect())
                .unwrap_or_default();
            for m in monos {
                if !have.contains(m) {
                    extra.push(m.clone());
                }
            }
        }
        if extra.len() as i64 != 4 * qi - 2 {
            return Err(format!(
                "B' minus B has {} classes, expected {}",
                extra.len(),
                4 * qi - 2
            ));
        }
        // The exact list: t^{d-1} l1 l2^e l3 mu^-1, t^{dp-1} l1^e l2 l3 mu^-1
        // for 0 < d < p, and t^{p^2-1} l1^e l2 l3 mu^-1.
        let mut expected: BTreeSet<Monomial> = BTreeSet::new();
        for eps in 0..=1i64 {
            for d in 1..qi {
                expected.insert(loc.monomial(&[
                    ("t", d - 1),
                    ("l1", 1),
                    ("l2", eps),
                    ("l3", 1),
                    ("mu", -1),
                ]));
                expected.insert(loc.monomial(&[
                    ("t", d * qi - 1),
                    ("l1", eps),
                    ("l2", 1),
                    ("l3", 1),
                    ("mu", -1),
                ]));
            }
            expected.insert(loc.monomial(&[
                ("t", qi * qi - 1),
                ("l1", eps),
                ("l2", 1),
                ("l3", 1),
                ("mu", -1),
            ]));
        }
        let extra_set: BTreeSet<Monomial> = extra.iter().cloned().collect();
        if extra_set != expected {
            return Err("B' minus B classes differ from the stated list".to_string());
        }
        let _ = write!(details, "B'-B:{}", extra.len());
        Ok(details)
    };
    outcome(&name, t0, run())
}

// ---------------------------------------------------------------------------
// Property suites
// ---------------------------------------------------------------------------

/// SplitMix64: deterministic, seedable, dependency-free.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % (hi - lo + 1) as u64) as i64
    }
}

fn random_monomial(alg: &MonomialAlgebraSpec, rng: &mut Rng, spread: i64) -> Monomial {
    let mut m = alg.unit();
    for (i, g) in alg.generators.iter().enumerate() {
        m.exps[i] = match g.kind {
            crate::fpalg::GeneratorKind::Exterior => rng.range(0, 1),
            crate::fpalg::GeneratorKind::Polynomial => rng.range(0, spread),
            crate::fpalg::GeneratorKind::Truncated(h) => rng.range(0, h as i64 - 1),
            crate::fpalg::GeneratorKind::Laurent => rng.range(-spread, spread),
        };
    }
    m
}

/// Associativity, bilinearity and graded commutativity of the product, on
/// `iterations` random inputs per prime in {3, 5, 7}.
pub fn check_fpalg_properties(iterations: usize) -> CheckOutcome {
    let t0 = Instant::now();
    let run = || -> Result<String, String> {
        for q in [3u32, 5, 7] {
            let p = prime(q);
            let alg = e2_term(GroupTag::CyclicPPower(1), VariantTag::Tate, p);
            let mut rng = Rng(0x5eed_0000 + q as u64);
            for i in 0..iterations {
                let a = random_monomial(&alg, &mut rng, 6);
                let b = random_monomial(&alg, &mut rng, 6);
                let c = random_monomial(&alg, &mut rng, 6);
                let ea = Element::term(p, a.clone(), rng.range(1, q as i64 - 1));
                let eb = Element::term(p, b.clone(), rng.range(1, q as i64 - 1));
                let ec = Element::term(p, c.clone(), rng.range(1, q as i64 - 1));
                // Associativity.
                let ab_c = multiply(&alg, &multiply(&alg, &ea, &eb), &ec);
                let a_bc = multiply(&alg, &ea, &multiply(&alg, &eb, &ec));
                if ab_c != a_bc {
                    return Err(format!("p={q} iter {i}: associativity failed"));
                }
                // Bilinearity.
                let sum = ea.add(p, &ec);
                let lhs = multiply(&alg, &sum, &eb);
                let rhs = multiply(&alg, &ea, &eb).add(p, &multiply(&alg, &ec, &eb));
                if lhs != rhs {
                    return Err(format!("p={q} iter {i}: bilinearity failed"));
                }
                // Graded commutativity on homogeneous (monomial) inputs.
                let na = bidegree_unchecked(&alg, &a).1;
                let nb = bidegree_unchecked(&alg, &b).1;
                let sign = if na.rem_euclid(2) == 1 && nb.rem_euclid(2) == 1 {
                    -1
                } else {
                    1
                };
                let ab = multiply(&alg, &ea, &eb);
                let ba = multiply(&alg, &eb, &ea).scale(p, sign);
                if ab != ba {
                    return Err(format!("p={q} iter {i}: graded commutativity failed"));
                }
            }
        }
        Ok(format!("{iterations} random cases per prime in {{3,5,7}}"))
    };
    outcome("fpalg-properties", t0, run())
}

fn schedule_rules_for_properties(p: Prime) -> Vec<(MonomialAlgebraSpec, DerivationRule)> {
    let w = Window::new(-3000, 3000, -100, 100);
    let mut out = Vec::new();
    for (group, variant) in [
        (GroupTag::CyclicPPower(1), VariantTag::Tate),
        (GroupTag::CyclicPPower(1), VariantTag::MuLocalizedHFP),
        (GroupTag::Circle, VariantTag::Tate),
        (GroupTag::Circle, VariantTag::HomotopyFixedPoint),
    ] {
        let alg = e2_term(group, variant, p);
        for rule in catalog::schedule(group, variant, p, &w) {
            out.push((alg.clone(), rule));
        }
    }
    out
}

/// `d∘d = 0` and the Leibniz identity on random page monomials, across the
/// catalog's rule families.
pub fn check_derivation_properties(iterations: usize) -> CheckOutcome {
    let t0 = Instant::now();
    let run = || -> Result<String, String> {
        for q in [3u32, 5, 7] {
            let p = prime(q);
            let rules = schedule_rules_for_properties(p);
            let mut rng = Rng(0xd00d_0000 + q as u64);
            let per_rule = iterations / rules.len() + 1;
            for (alg, rule) in &rules {
                for i in 0..per_rule {
                    let m = random_monomial(alg, &mut rng, 10);
                    if alg.validate(&m).is_err() {
                        continue;
                    }
                    // d(d(m)) = 0.
                    if let Some(dm) = derive_monomial(alg, rule, &m) {
                        let mut dd = Element::zero();
                        for (mm, &c) in &dm.terms {
                            match derive_monomial(alg, rule, mm) {
                                Some(d2) => dd = dd.add(p, &d2.scale(p, c as i64)),
                                None => {
                                    return Err(format!(
                                        "p={q} page {}: image monomial not factorable",
                                        rule.page_index
                                    ))
                                }
                            }
                        }
                        if !dd.is_zero() {
                            return Err(format!(
                                "p={q} page {} iter {i}: d(d({})) != 0",
                                rule.page_index,
                                alg.format_monomial(&m)
                            ));
                        }
                    }
                    // Leibniz on a random factorable pair.
                    let m2 = random_monomial(alg, &mut rng, 10);
                    if alg.validate(&m2).is_err() {
                        continue;
                    }
                    let (d1, d2) = match (
                        derive_monomial(alg, rule, &m),
                        derive_monomial(alg, rule, &m2),
                    ) {
                        (Some(a), Some(b)) => (a, b),
                        _ => continue,
                    };
                    let prod = multiply(
                        &alg.clone(),
                        &Element::from_monomial(m.clone()),
                        &Element::from_monomial(m2.clone()),
                    );
                    let mut d_prod = Element::zero();
                    for (mm, &c) in &prod.terms {
                        if let Some(d) = derive_monomial(alg, rule, mm) {
                            d_prod = d_prod.add(p, &d.scale(p, c as i64));
                        }
                    }
                    let sign = if bidegree_unchecked(alg, &m).1.rem_euclid(2) == 1 {
                        -1
                    } else {
                        1
                    };
                    let rhs = multiply(alg, &d1, &Element::from_monomial(m2.clone())).add(
                        p,
                        &multiply(alg, &Element::from_monomial(m.clone()), &d2).scale(p, sign),
                    );
                    if d_prod != rhs {
                        return Err(format!(
                            "p={q} page {} iter {i}: Leibniz failed on {} * {}",
                            rule.page_index,
                            alg.format_monomial(&m),
                            alg.format_monomial(&m2)
                        ));
                    }
                }
            }
        }
        Ok(format!(
            "d∘d = 0 and Leibniz on >= {iterations} cases per prime in {{3,5,7}}"
        ))
    };
    outcome("derivation-properties", t0, run())
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// Window constants pinned for the verification pipelines.
pub mod windows {
    use crate::fpalg::Window;

    /// `C_p`-Tate at p = 3: filtration half-span 400 >= 2(2p^3+1) = 110.
    pub const CP_TATE_P3: Window = Window {
        s_min: -400,
        s_max: 400,
        n_min: -60,
        n_max: 80,
    };
    /// `C_{p^2}`-Tate at p = 3: total shrinkage 3793 per side.
    pub const CP2_TATE_P3: Window = Window {
        s_min: -4100,
        s_max: 4100,
        n_min: -10,
        n_max: 85,
    };
    /// Circle family at p = 3: k <= 6 rules, safe filtration ±238.
    pub const T_FAMILY_P3: Window = Window {
        s_min: -2500,
        s_max: 2500,
        n_min: -12,
        n_max: 88,
    };
    /// `C_p`-Tate at p = 5.
    pub const CP_TATE_P5: Window = Window {
        s_min: -1300,
        s_max: 1300,
        n_min: -60,
        n_max: 80,
    };
    /// `C_{p^2}`-Tate at p = 5: total shrinkage 70871 per side.
    pub const CP2_TATE_P5: Window = Window {
        s_min: -71500,
        s_max: 71500,
        n_min: -10,
        n_max: 85,
    };
    /// Circle family at p = 5: k <= 5 rules.
    pub const T_FAMILY_P5: Window = Window {
        s_min: -8500,
        s_max: 8500,
        n_min: -12,
        n_max: 272,
    };
    /// `C_p`-Tate spot check at p = 7 on total degrees [0, 200].
    pub const CP_TATE_P7_SPOT: Window = Window {
        s_min: -3200,
        s_max: 3200,
        n_min: -2,
        n_max: 201,
    };
}

/// The p = 7 spot check: `C_p`-Tate on total degrees `[0, 200]`.
pub fn check_p7_spot() -> CheckOutcome {
    let t0 = Instant::now();
    let run = || -> Result<String, String> {
        let inner = check_cp_tate_oracle(7, windows::CP_TATE_P7_SPOT);
        if inner.passed {
            Ok(inner.detail)
        } else {
            Err(inner.detail)
        }
    };
    outcome("cp-tate-spot-p7", t0, run())
}

/// The quick suite: full pipeline at the given prime (default 3) plus the
/// p = 7 tables.
pub fn quick_suite(pipeline_prime: u32) -> Vec<CheckOutcome> {
    let q = pipeline_prime;
    let (cp, cp2, tf, cap) = match q {
        3 => (
            windows::CP_TATE_P3,
            windows::CP2_TATE_P3,
            windows::T_FAMILY_P3,
            75,
        ),
        5 => (
            windows::CP_TATE_P5,
            windows::CP2_TATE_P5,
            windows::T_FAMILY_P5,
            260,
        ),
        _ => (
            windows::CP_TATE_P3,
            windows::CP2_TATE_P3,
            windows::T_FAMILY_P3,
            75,
        ),
    };
    vec![
        check_cp_tate_oracle(q, cp),
        check_cpn_tate_pages(q, 1, cp),
        check_cpn_tate_pages(q, 2, cp2),
        check_t_family_vs_decomp(q, tf, cap),
        check_tc_tables(),
        check_poincare_identity(),
        check_height_families(),
        check_k_tables(),
    ]
}

/// The full suite: the quick suite plus the p = 5 pipeline, the p = 7 spot
/// check, the property suites and the torsion-height table.
pub fn full_suite(pipeline_prime: u32) -> Vec<CheckOutcome> {
    let mut out = quick_suite(pipeline_prime);
    if pipeline_prime != 5 {
        out.push(check_cp_tate_oracle(5, windows::CP_TATE_P5));
        out.push(check_cpn_tate_pages(5, 2, windows::CP2_TATE_P5));
        out.push(check_t_family_vs_decomp(5, windows::T_FAMILY_P5, 260));
    }
    out.push(check_p7_spot());
    out.push(check_fpalg_properties(10_000));
    out.push(check_derivation_properties(10_000));
    out.push(check_torsion_heights());
    out
}
