//! Acceptance suite: every criterion runs exactly, with its window and
//! runtime budget pinned here.  One line is printed per criterion
//! (`cargo test --test acceptance -- --nocapture` shows them all).

use redshift::cli::verify::{self, windows, CheckOutcome};

fn report(criterion: &str, budget_seconds: f64, outcome: CheckOutcome) {
    println!("[{criterion}] {}", outcome.render());
    assert!(
        outcome.passed,
        "criterion {criterion} failed: {}",
        outcome.detail
    );
    assert!(
        outcome.seconds < budget_seconds,
        "criterion {criterion} exceeded its {budget_seconds}s budget: {:.2}s",
        outcome.seconds
    );
}

/// 1. TC generator table: 12p+4 free generators in degrees
///    [-1, 2p^3+2p^2+2p-3] for p in {3,5,7,11}; counts 40/64/88/136.
#[test]
fn criterion_01_tc_generator_table() {
    report("1 tc-table", 1.0, verify::check_tc_tables());
}

/// 2. Poincaré identity: exact polynomial equality with the closed formula
///    for p in {3,5,7,11}.
#[test]
fn criterion_02_poincare_identity() {
    report("2 poincare", 1.0, verify::check_poincare_identity());
}

/// 3. Regression family: height-0 rank p+3 and height-1 rank 4p+4 with the
///    displayed summand shapes, p in {3,5,7}.
#[test]
fn criterion_03_height_families() {
    report("3 heights", 10.0, verify::check_height_families());
}

/// 4. C_p-Tate oracle at p=3: full schedule from the E² term on a window
///    with filtration span >= 2(2p^3+1) = 110 and total degrees [-60, 80];
///    E^∞ equals P(t^{±p^3}) ⊗ E(l1,l2,l3) per bidegree on the safe region.
#[test]
fn criterion_04_cp_tate_oracle() {
    const _: () = assert!(windows::CP_TATE_P3.s_max >= 2 * (2 * 27 + 1));
    const _: () = assert!(windows::CP_TATE_P3.n_min <= -60 && windows::CP_TATE_P3.n_max >= 80);
    report(
        "4 cp-tate-p3",
        60.0,
        verify::check_cp_tate_oracle(3, windows::CP_TATE_P3),
    );
}

/// 5. C_{p^2}-Tate displayed pages at p=3: each of the seven pages matches
///    its closed-form inventory per bidegree on the safe region.
#[test]
fn criterion_05_cp2_tate_pages() {
    report(
        "5 cp2-tate-p3",
        600.0,
        verify::check_cpn_tate_pages(3, 2, windows::CP2_TATE_P3),
    );
}

/// 6. T-Tate / localized-HFP E^∞ vs decomposition at p=3 on total degrees
///    [0, 75], plus the exact 4p-2 = 10 classes separating B' from B.
#[test]
fn criterion_06_t_family_vs_decomposition() {
    report(
        "6 t-family-p3",
        120.0,
        verify::check_t_family_vs_decomp(3, windows::T_FAMILY_P3, 75),
    );
}

/// 7. Property suites: d∘d = 0 and Leibniz on >= 10^4 randomized inputs per
///    prime in {3,5,7}; graded-commutativity and associativity likewise.
#[test]
fn criterion_07_property_suites() {
    report(
        "7 fpalg-props",
        60.0,
        verify::check_fpalg_properties(10_000),
    );
    report(
        "7 derivation-props",
        60.0,
        verify::check_derivation_properties(10_000),
    );
}

/// 8. Torsion-height integrality and consistency for all k <= 9,
///    0 < d < p, p in {3,5,7}.
#[test]
fn criterion_08_torsion_heights() {
    report("8 torsion-heights", 10.0, verify::check_torsion_heights());
}

/// 9. K-theory variants at p=7: v3*del in degree 683 plus torsion classes
///    at {11, 95, 108}; the p-local table reports block [1, 109] and
///    threshold 112.
#[test]
fn criterion_09_k_theory_variants() {
    report("9 k-tables", 10.0, verify::check_k_tables());
}

/// 10. p=7 spot check: C_p-Tate on total degrees [0, 200] with sufficient
///     filtration margin; E^∞ matches the closed form on the safe region.
#[test]
fn criterion_10_p7_spot_check() {
    report("10 p7-spot", 600.0, verify::check_p7_spot());
}
