//! Structured E^∞ inventories: the summands `S(k,d)` and their Tate
//! analogues, the generators `x_{k,d}` and `y_{k,d}`, the modules `B(k,d)`,
//! and the degree-`>= 0` decompositions `A ⊕ B ⊕ C` with torsion-height
//! bookkeeping.
//!
//! Everything here is a finite list of cyclic `P(t mu)`-module summands:
//! a generator monomial, a truncation height (or free), and an exterior
//! cofactor.  [`materialize`] expands an inventory to its monomial basis
//! inside a window and asserts that the summands stay disjoint, which is
//! the direct-sum claim the engine cross-checks.

use std::collections::BTreeMap;

use serde_json::json;
use thiserror::Error;

use crate::catalog::{bracket, r_of, CatalogError};
use crate::fpalg::{bidegree_unchecked, Monomial, MonomialAlgebraSpec, Prime, Window};

/// Which E^∞ decomposition a module lives in: the plain fixed-point side,
/// the mu-localized side, or the Tate side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Hfp,
    Loc,
    Tate,
}

/// Truncation height of a cyclic `P(t mu)`-summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmuHeight {
    Free,
    Trunc(i64),
}

/// A cyclic `P(t mu)`-module summand `P_h(t mu) ⊗ E(cofactor) ⊗ F_p{gen}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicSummand {
    pub generator: Monomial,
    pub tmu_height: TmuHeight,
    /// Lambda indices of the exterior cofactor, disjoint from the lambdas
    /// of the generator.
    pub exterior_cofactor: Vec<usize>,
    pub label: String,
}

/// A list of summands with an optional total-degree floor.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SummandInventory {
    pub summands: Vec<CyclicSummand>,
    pub degree_floor: Option<i64>,
}

impl SummandInventory {
    pub fn concat(mut self, other: SummandInventory) -> SummandInventory {
        self.summands.extend(other.summands);
        self
    }

    /// JSON dump: `[{label, generator, height, cofactor, bidegree}]`.
    pub fn dump_json(&self, alg: &MonomialAlgebraSpec) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .summands
            .iter()
            .map(|s| {
                let bd = bidegree_unchecked(alg, &s.generator);
                let height = match s.tmu_height {
                    TmuHeight::Free => json!("free"),
                    TmuHeight::Trunc(h) => json!(h),
                };
                json!({
                    "label": s.label,
                    "generator": alg.format_monomial(&s.generator),
                    "height": height,
                    "cofactor": s.exterior_cofactor,
                    "bidegree": {"s": bd.0, "n": bd.1},
                })
            })
            .collect();
        json!(rows)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DecompError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("d must satisfy 0 < d < p, got {d}")]
    DOutOfRange { d: i64 },
    #[error("k must be >= {min} on this side, got {k}")]
    KOutOfRange { k: i64, min: i64 },
    #[error("summands overlap at monomial {monomial}: {first} and {second}")]
    DecompositionViolation {
        monomial: String,
        first: String,
        second: String,
    },
}

fn check_kd(k: i64, d: i64, p: Prime, k_min: i64) -> Result<(), DecompError> {
    if k < k_min {
        return Err(DecompError::KOutOfRange { k, min: k_min });
    }
    if d <= 0 || d >= p.get() as i64 {
        return Err(DecompError::DOutOfRange { d });
    }
    Ok(())
}

fn lambda_index(alg: &MonomialAlgebraSpec, i: usize) -> usize {
    alg.gen_index(&format!("l{i}"))
        .unwrap_or_else(|| panic!("ambient algebra lacks l{i}"))
}

/// `x_{k,d} = t^{(d/p) r(k)} l_[k] mu^{(d/p) r(k-3)}`, the submodule
/// generator detecting the torsion class `xi_{k,d}`.
pub fn x_kd(alg: &MonomialAlgebraSpec, k: i64, d: i64, p: Prime) -> Result<Monomial, DecompError> {
    check_kd(k, d, p, 1)?;
    let q = p.get() as i64;
    let rk = r_of(k, p)?;
    let rk3 = r_of(k - 3, p)?;
    debug_assert_eq!(d * rk % q, 0, "d r(k)/p must be integral");
    let mut m = alg.unit();
    m.exps[alg.gen_index("t").unwrap()] = d * rk / q;
    m.exps[alg.gen_index("mu").unwrap()] = d * rk3 / q;
    m.exps[lambda_index(alg, bracket(k)?)] = 1;
    Ok(m)
}

/// `y_{k,d} = t^{d p^{k-1}} (t mu)^{(d/p) r(k-3)} l_[k]`, the image of
/// `x_{k,d}` on the Tate side; same exponent vector, same total degree.
pub fn y_kd(alg: &MonomialAlgebraSpec, k: i64, d: i64, p: Prime) -> Result<Monomial, DecompError> {
    check_kd(k, d, p, 4)?;
    let q = p.get() as i64;
    let rk3 = r_of(k - 3, p)?;
    let step = q.pow((k - 1) as u32);
    let mut m = alg.unit();
    m.exps[alg.gen_index("t").unwrap()] = d * step + d * rk3 / q;
    m.exps[alg.gen_index("mu").unwrap()] = d * rk3 / q;
    m.exps[lambda_index(alg, bracket(k)?)] = 1;
    Ok(m)
}

/// Smallest power of the periodicity class annihilating `xi_{k,d}`:
/// `(1 - d/p) r(k)`; equals `p^k - d p^{k-1}` for `k <= 3`.
pub fn torsion_height(k: i64, d: i64, p: Prime) -> Result<i64, DecompError> {
    check_kd(k, d, p, 1)?;
    let q = p.get() as i64;
    let rk = r_of(k, p)?;
    debug_assert_eq!(d * rk % q, 0);
    Ok(rk - d * rk / q)
}

/// `A = P(t mu) ⊗ E(l1, l2, l3)`: a single free summand on the unit.
pub fn inventory_a(alg: &MonomialAlgebraSpec) -> SummandInventory {
    SummandInventory {
        summands: vec![CyclicSummand {
            generator: alg.unit(),
            tmu_height: TmuHeight::Free,
            exterior_cofactor: vec![1, 2, 3],
            label: "A".to_string(),
        }],
        degree_floor: None,
    }
}

/// Upper bound for the k-enumeration of window-indexed families: a summand
/// at level k has `|t-exp - mu-exp| >= p^{k-1}` in every monomial, and both
/// exponents are bounded by the window.
fn k_bound(p: Prime, window: &Window) -> i64 {
    let q = p.get() as i64;
    let half_s = window.s_min.abs().max(window.s_max.abs()) / 2 + 2;
    let mu_span = (window.n_max - window.n_min + window.s_max - window.s_min) / (2 * q.pow(3)) + 2;
    let bound = half_s + mu_span;
    let mut k = 1i64;
    while q.checked_pow(k as u32).is_some_and(|v| v <= bound) && k < 35 {
        k += 1;
    }
    k + 1
}

/// `C = ⊕ S(k,d)` over `k >= 1, p∤d, d < 0` (fixed-point and localized
/// sides) or `Ĉ = ⊕ Ŝ(k,d)` over `k >= 4, d < 0` (Tate side), restricted to
/// the pairs whose summands meet the window.
pub fn inventory_c(
    alg: &MonomialAlgebraSpec,
    side: Side,
    p: Prime,
    window: &Window,
) -> Result<SummandInventory, DecompError> {
    let q = p.get() as i64;
    let k_start = match side {
        Side::Tate => 4,
        _ => 1,
    };
    let mut summands = Vec::new();
    for k in k_start..=k_bound(p, window) {
        let step = match q.checked_pow((k - 1) as u32) {
            Some(v) => v,
            None => break,
        };
        let kk = bracket(k)?;
        let cof = vec![bracket(k + 1)?, bracket(k + 2)?];
        let mut d = -1i64;
        loop {
            if d % q == 0 {
                d -= 1;
                continue;
            }
            let mut gen = alg.unit();
            let (height, label) = match side {
                Side::Tate => {
                    gen.exps[alg.gen_index("t").unwrap()] = d * step;
                    (r_of(k - 3, p)?, format!("Shat({k},{d})"))
                }
                _ => {
                    gen.exps[alg.gen_index("mu").unwrap()] = -d * step;
                    (r_of(k, p)?, format!("S({k},{d})"))
                }
            };
            gen.exps[lambda_index(alg, kk)] = 1;
            // The generator is the lowest-degree class of its summand; once
            // it exits above the window (degree grows with |d|), stop.
            let (gs, gn) = bidegree_unchecked(alg, &gen);
            let in_reach = gn <= window.n_max && gs >= window.s_min - 2 * (height.max(0)) - 2
                || match side {
                    Side::Tate => gs <= window.s_max,
                    _ => true,
                };
            if gn > window.n_max && -d > q {
                break;
            }
            if in_reach && gn <= window.n_max {
                summands.push(CyclicSummand {
                    generator: gen,
                    tmu_height: TmuHeight::Trunc(height),
                    exterior_cofactor: cof.clone(),
                    label,
                });
            }
            d -= 1;
            if -d > 4 * (window.n_max.abs() + window.s_max.abs() + 2) {
                break;
            }
        }
    }
    Ok(SummandInventory {
        summands,
        degree_floor: None,
    })
}

/// `B(k,d)` on the requested side, as its four cyclic generators over
/// `P(t mu)`:
///
/// * side `Hfp`, `k <= 3`: the submodule `<x_{k,d}>` alone;
/// * side `Hfp`/`Loc`, `k >= 4` resp. `k >= 1`: `B'(k,d)`, where a product
///   `l^e x_{k,d}` of total degree `>= 2p^3 - 2` is once divisible by
///   `t mu` and its divided generator carries height one larger;
/// * side `Tate`, `k >= 4`: `B̂(k,d)`, the same shape on `y_{k,d}` with the
///   lower heights `(1 - d/p) r(k-3)`.
pub fn module_b(
    alg: &MonomialAlgebraSpec,
    k: i64,
    d: i64,
    p: Prime,
    side: Side,
) -> Result<SummandInventory, DecompError> {
    let q = p.get() as i64;
    let (base, base_height, name) = match side {
        Side::Tate => {
            check_kd(k, d, p, 4)?;
            let rk3 = r_of(k - 3, p)?;
            (
                y_kd(alg, k, d, p)?,
                rk3 - d * rk3 / q,
                format!("Bhat({k},{d})"),
            )
        }
        Side::Loc => {
            check_kd(k, d, p, 1)?;
            (
                x_kd(alg, k, d, p)?,
                torsion_height(k, d, p)?,
                format!("B'({k},{d})"),
            )
        }
        Side::Hfp => {
            check_kd(k, d, p, 1)?;
            (
                x_kd(alg, k, d, p)?,
                torsion_height(k, d, p)?,
                format!("B({k},{d})"),
            )
        }
    };
    let plain = side == Side::Hfp && k <= 3;
    let cof = [bracket(k + 1)?, bracket(k + 2)?];
    let ti = alg.gen_index("t").unwrap();
    let mi = alg.gen_index("mu").unwrap();
    let mut summands = Vec::new();
    for eps in 0..4u32 {
        let mut gen = base.clone();
        let mut parts = Vec::new();
        for (b, &ci) in [(eps & 1 != 0, &cof[0]), (eps & 2 != 0, &cof[1])] {
            if b {
                gen.exps[lambda_index(alg, ci)] = 1;
                parts.push(format!("l{ci}"));
            }
        }
        let n = bidegree_unchecked(alg, &gen).1;
        let divided = !plain && n >= 2 * q.pow(3) - 2;
        let mut height = base_height;
        if divided {
            gen.exps[ti] -= 1;
            gen.exps[mi] -= 1;
            height += 1;
            parts.insert(0, "(tmu)^-1".to_string());
        }
        let suffix = if parts.is_empty() {
            "gen".to_string()
        } else {
            parts.join("*")
        };
        summands.push(CyclicSummand {
            generator: gen,
            tmu_height: TmuHeight::Trunc(height),
            exterior_cofactor: Vec::new(),
            label: format!("{name}:{suffix}"),
        });
    }
    Ok(SummandInventory {
        summands,
        degree_floor: None,
    })
}

/// The full degree-`>= 0` decomposition of the requested E^∞ page:
/// `A ⊕ B ⊕ C` (`Hfp`), `A ⊕ B' ⊕ C` (`Loc`) or `Â ⊕ B̂ ⊕ Ĉ` (`Tate`),
/// with the B-family restricted to levels reaching the window.
pub fn inventory_abc(
    alg: &MonomialAlgebraSpec,
    side: Side,
    p: Prime,
    window: &Window,
) -> Result<SummandInventory, DecompError> {
    let mut inv = inventory_a(alg);
    let k_start = match side {
        Side::Tate => 4,
        _ => 1,
    };
    let q = p.get() as i64;
    for k in k_start..=k_bound(p, window) {
        if q.checked_pow((k - 1) as u32).is_none() {
            break;
        }
        for d in 1..q {
            inv = inv.concat(module_b(alg, k, d, p, side)?);
        }
    }
    inv = inv.concat(inventory_c(alg, side, p, window)?);
    inv.degree_floor = Some(0);
    Ok(inv)
}

/// Monomial basis of a materialized inventory, grouped by bidegree.
#[derive(Debug, Clone, Default)]
pub struct Materialized {
    pub by_cell: BTreeMap<(i64, i64), Vec<Monomial>>,
}

impl Materialized {
    pub fn dims(&self) -> BTreeMap<(i64, i64), usize> {
        self.by_cell
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(&k, v)| (k, v.len()))
            .collect()
    }

    pub fn total(&self) -> usize {
        self.by_cell.values().map(Vec::len).sum()
    }

    /// Dimensions per total degree (summed over filtration).
    pub fn degree_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (&(_, n), v) in &self.by_cell {
            if !v.is_empty() {
                *out.entry(n).or_insert(0) += v.len();
            }
        }
        out
    }
}

/// Expand each summand to `generator * (t mu)^j * cofactor`, intersect the
/// window and degree floor, and assert global disjointness.
pub fn materialize(
    alg: &MonomialAlgebraSpec,
    inv: &SummandInventory,
    window: &Window,
) -> Result<Materialized, DecompError> {
    let q = alg.prime.get() as i64;
    let ti = alg.gen_index("t").unwrap();
    let mi = alg.gen_index("mu").unwrap();
    let tmu_n = 2 * q.pow(3) - 2;
    let mut owner: BTreeMap<Monomial, &str> = BTreeMap::new();
    let mut out: BTreeMap<(i64, i64), Vec<Monomial>> = BTreeMap::new();
    for summand in &inv.summands {
        for eps in 0..(1u32 << summand.exterior_cofactor.len()) {
            let mut m0 = summand.generator.clone();
            let mut ok = true;
            for (bit, &ci) in summand
                .exterior_cofactor
                .iter()
                .enumerate()
                .map(|(b, c)| (eps & (1 << b) != 0, c))
            {
                if bit {
                    let li = lambda_index(alg, ci);
                    if m0.exps[li] != 0 {
                        ok = false;
                        break;
                    }
                    m0.exps[li] = 1;
                }
            }
            if !ok {
                continue;
            }
            let (s0, n0) = bidegree_unchecked(alg, &m0);
            // j range from the window: n grows by tmu_n, s falls by 2.
            let mut j_hi = if tmu_n > 0 {
                (window.n_max - n0).div_euclid(tmu_n)
            } else {
                0
            };
            let j_hi_s = (s0 - window.s_min).div_euclid(2);
            j_hi = j_hi.min(j_hi_s);
            if let TmuHeight::Trunc(h) = summand.tmu_height {
                j_hi = j_hi.min(h - 1);
            }
            for j in 0..=j_hi.max(-1) {
                let mut m = m0.clone();
                m.exps[ti] += j;
                m.exps[mi] += j;
                if alg.validate(&m).is_err() {
                    continue;
                }
                let (s, n) = bidegree_unchecked(alg, &m);
                if !window.contains(s, n) {
                    continue;
                }
                if let Some(floor) = inv.degree_floor {
                    if n < floor {
                        continue;
                    }
                }
                if let Some(prev) = owner.insert(m.clone(), &summand.label) {
                    return Err(DecompError::DecompositionViolation {
                        monomial: alg.format_monomial(&m),
                        first: prev.to_string(),
                        second: summand.label.clone(),
                    });
                }
                out.entry((s, n)).or_default().push(m);
            }
        }
    }
    for v in out.values_mut() {
        v.sort();
    }
    Ok(Materialized { by_cell: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{e2_term, GroupTag, VariantTag};

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    fn hfp_alg(q: u32) -> MonomialAlgebraSpec {
        e2_term(GroupTag::Circle, VariantTag::HomotopyFixedPoint, p(q))
    }

    fn loc_alg(q: u32) -> MonomialAlgebraSpec {
        e2_term(GroupTag::Circle, VariantTag::MuLocalizedHFP, p(q))
    }

    fn tate_alg(q: u32) -> MonomialAlgebraSpec {
        e2_term(GroupTag::Circle, VariantTag::Tate, p(q))
    }

    #[test]
    fn x_kd_low_cases() {
        // x_{1,d} = t^d l1, x_{3,d} = t^{dp^2} l3.
        let alg = hfp_alg(7);
        let pr = p(7);
        for d in 1..7 {
            let x = x_kd(&alg, 1, d, pr).unwrap();
            assert_eq!(x, alg.monomial(&[("t", d), ("l1", 1)]));
            let x = x_kd(&alg, 3, d, pr).unwrap();
            assert_eq!(x, alg.monomial(&[("t", 49 * d), ("l3", 1)]));
        }
        // p=3, k=4, d=2: x_{4,2} = t^56 l1 mu^2.
        let alg = hfp_alg(3);
        let x = x_kd(&alg, 4, 2, p(3)).unwrap();
        assert_eq!(x, alg.monomial(&[("t", 56), ("l1", 1), ("mu", 2)]));
    }

    #[test]
    fn y_kd_cases() {
        // p=3, k=4, d=1: y_{4,1} = t^28 mu l1.
        let alg = tate_alg(3);
        let y = y_kd(&alg, 4, 1, p(3)).unwrap();
        assert_eq!(y, alg.monomial(&[("t", 28), ("mu", 1), ("l1", 1)]));
        // |y_{5,3}| at p=7 is 2p^2 - 2*3*p - 1 = 55.
        let alg = tate_alg(7);
        let y = y_kd(&alg, 5, 3, p(7)).unwrap();
        assert_eq!(bidegree_unchecked(&alg, &y).1, 55);
    }

    #[test]
    fn degree_formula() {
        // |x_{k,d}| = |y_{k,d}| = 2 p^[k] - 2 d p^{[k]-1} - 1 for k <= 9.
        for q in [3u32, 5, 7] {
            let pr = p(q);
            let alg = hfp_alg(q);
            let talg = tate_alg(q);
            let qi = q as i64;
            for k in 1..=9i64 {
                for d in 1..qi {
                    let kk = bracket(k).unwrap() as u32;
                    let expected = 2 * qi.pow(kk) - 2 * d * qi.pow(kk - 1) - 1;
                    let x = x_kd(&alg, k, d, pr).unwrap();
                    assert_eq!(bidegree_unchecked(&alg, &x).1, expected);
                    if k >= 4 {
                        let y = y_kd(&talg, k, d, pr).unwrap();
                        assert_eq!(bidegree_unchecked(&talg, &y).1, expected);
                    }
                }
            }
        }
    }

    #[test]
    fn torsion_heights() {
        // k=2, d=1, p=7: p^2 - p = 42.
        assert_eq!(torsion_height(2, 1, p(7)).unwrap(), 42);
        // k=4, d=2, p=3: (1 - 2/3)(81 + 3) = 28.
        assert_eq!(torsion_height(4, 2, p(3)).unwrap(), 28);
        // k <= 3: equals p^k - d p^{k-1}; integrality for k <= 9.
        for q in [3u32, 5, 7] {
            let pr = p(q);
            let qi = q as i64;
            for k in 1..=9i64 {
                for d in 1..qi {
                    let h = torsion_height(k, d, pr).unwrap();
                    let rk = r_of(k, pr).unwrap();
                    assert_eq!(h * qi, (qi - d) * rk, "height is (1 - d/p) r(k)");
                    if k <= 3 {
                        assert_eq!(h, qi.pow(k as u32) - d * qi.pow((k - 1) as u32));
                    }
                }
            }
        }
    }

    #[test]
    fn b_module_case_split() {
        let pr = p(7);
        let alg = loc_alg(7);
        // k ≡ 3 mod 3, 2 <= d < p: four generators of uniform height.
        let b = module_b(&alg, 6, 3, pr, Side::Loc).unwrap();
        let h = torsion_height(6, 3, pr).unwrap();
        assert_eq!(b.summands.len(), 4);
        assert!(b
            .summands
            .iter()
            .all(|s| s.tmu_height == TmuHeight::Trunc(h)));
        // k ≡ 1 mod 3: two divided generators of height h+1.
        let b = module_b(&alg, 4, 2, pr, Side::Loc).unwrap();
        let h = torsion_height(4, 2, pr).unwrap();
        let divided: Vec<_> = b
            .summands
            .iter()
            .filter(|s| s.tmu_height == TmuHeight::Trunc(h + 1))
            .collect();
        assert_eq!(divided.len(), 2);
        assert!(divided.iter().all(|s| s.label.contains("(tmu)^-1")));
        assert!(divided.iter().all(|s| s.label.contains("l3")));
    }

    #[test]
    fn b_codimension_two_or_zero() {
        // <x_{k,d}> in B'(k,d) has F_p-codimension 2 in cases (1)-(3) and 0
        // in case (4).
        let pr = p(3);
        let alg = loc_alg(3);
        let w = Window::new(-4000, 100, -10, 4000);
        for (k, d, expect) in [(4, 1, 2), (4, 2, 2), (5, 1, 2), (6, 1, 2), (6, 2, 0)] {
            let bprime = module_b(&alg, k, d, pr, Side::Loc).unwrap();
            let x = x_kd(&alg, k, d, pr).unwrap();
            let plain = SummandInventory {
                summands: vec![CyclicSummand {
                    generator: x,
                    tmu_height: TmuHeight::Trunc(torsion_height(k, d, pr).unwrap()),
                    exterior_cofactor: vec![bracket(k + 1).unwrap(), bracket(k + 2).unwrap()],
                    label: "plain".to_string(),
                }],
                degree_floor: None,
            };
            let a = materialize(&alg, &bprime, &w).unwrap().total();
            let b = materialize(&alg, &plain, &w).unwrap().total();
            assert_eq!(a - b, expect, "codim of <x> in B'({k},{d})");
        }
    }

    #[test]
    fn inventory_a_shape() {
        let alg = hfp_alg(3);
        let inv = inventory_a(&alg);
        assert_eq!(inv.summands.len(), 1);
        assert_eq!(inv.summands[0].exterior_cofactor.len(), 3);
        // Materialized at p=3 over n in [0,10]: {1, l1} only.
        let w = Window::new(-100, 0, 0, 10);
        let m = materialize(&alg, &inv, &w).unwrap();
        assert_eq!(m.total(), 2);
        assert_eq!(m.dims().get(&(0, 0)), Some(&1));
        assert_eq!(m.dims().get(&(0, 5)), Some(&1));
    }

    #[test]
    fn c_degree_floor() {
        // The C-family starts at total degree 2p^3 + 2p - 1.
        for q in [3u32, 7] {
            let pr = p(q);
            let qi = q as i64;
            let floor = 2 * qi.pow(3) + 2 * qi - 1;
            let alg = hfp_alg(q);
            let w = Window::new(-200, 200, 0, floor + 40);
            let inv = inventory_c(&alg, Side::Hfp, pr, &w).unwrap();
            let m = materialize(&alg, &inv, &w).unwrap();
            let min_n = m.dims().keys().map(|&(_, n)| n).min();
            if let Some(min_n) = min_n {
                assert_eq!(min_n, floor);
            }
            // At p=3 on n in [0,75], C contributes exactly one class: the
            // generator of S(1,-1) at degree 59.
            if q == 3 {
                let w = Window::new(-400, 400, 0, 75);
                let inv = inventory_c(&alg, Side::Hfp, pr, &w).unwrap();
                let m = materialize(&alg, &inv, &w).unwrap();
                assert_eq!(m.total(), 1);
                let only = m.by_cell.values().next().unwrap();
                assert_eq!(only[0], alg.monomial(&[("l1", 1), ("mu", 1)]));
                assert_eq!(bidegree_unchecked(&alg, &only[0]).1, 59);
            }
        }
    }

    #[test]
    fn materialize_detects_overlap() {
        let alg = hfp_alg(3);
        let inv = SummandInventory {
            summands: vec![
                CyclicSummand {
                    generator: alg.unit(),
                    tmu_height: TmuHeight::Free,
                    exterior_cofactor: vec![],
                    label: "one".to_string(),
                },
                CyclicSummand {
                    generator: alg.unit(),
                    tmu_height: TmuHeight::Trunc(1),
                    exterior_cofactor: vec![],
                    label: "two".to_string(),
                },
            ],
            degree_floor: None,
        };
        let w = Window::new(-10, 10, -10, 10);
        assert!(matches!(
            materialize(&alg, &inv, &w),
            Err(DecompError::DecompositionViolation { .. })
        ));
    }

    #[test]
    fn empty_inventory_is_zero() {
        let alg = hfp_alg(3);
        let w = Window::new(-10, 10, -10, 10);
        let m = materialize(&alg, &SummandInventory::default(), &w).unwrap();
        assert_eq!(m.total(), 0);
    }
}
