//! Property tests for the algebra and engine invariants.

use std::collections::BTreeMap;

use proptest::prelude::*;

use redshift::catalog::{e2_term, GroupTag, VariantTag};
use redshift::fpalg::{
    basis_in_window, bidegree_of, mono_mul, multiply, Element, Monomial, MonomialAlgebraSpec,
    Prime, Window,
};
use redshift::ssengine::{derive_monomial, DerivationRule, PageGenerator};

fn tate_alg(q: u32) -> MonomialAlgebraSpec {
    e2_term(
        GroupTag::CyclicPPower(1),
        VariantTag::Tate,
        Prime::new(q).unwrap(),
    )
}

prop_compose! {
    fn arb_monomial(q: u32)(
        u in 0..=1i64,
        t in -8..=8i64,
        l1 in 0..=1i64,
        l2 in 0..=1i64,
        l3 in 0..=1i64,
        mu in 0..=5i64,
    ) -> Monomial {
        tate_alg(q).monomial(&[("u1", u), ("t", t), ("l1", l1), ("l2", l2), ("l3", l3), ("mu", mu)])
    }
}

proptest! {
    /// Bidegree additivity: deg(m1 * m2) = deg(m1) + deg(m2) when nonzero.
    #[test]
    fn bidegree_additive(a in arb_monomial(5), b in arb_monomial(5)) {
        let alg = tate_alg(5);
        if let Some((prod, _sign)) = mono_mul(&alg, &a, &b) {
            if alg.validate(&prod).is_ok() {
                let da = bidegree_of(&alg, &a).unwrap();
                let db = bidegree_of(&alg, &b).unwrap();
                let dp = bidegree_of(&alg, &prod).unwrap();
                prop_assert_eq!(dp, (da.0 + db.0, da.1 + db.1));
            }
        }
    }

    /// Graded commutativity with the total-degree sign.
    #[test]
    fn graded_commutative(a in arb_monomial(7), b in arb_monomial(7)) {
        let alg = tate_alg(7);
        let p = alg.prime;
        let ea = Element::from_monomial(a.clone());
        let eb = Element::from_monomial(b.clone());
        let na = bidegree_of(&alg, &a).unwrap().1;
        let nb = bidegree_of(&alg, &b).unwrap().1;
        let sign = if na.rem_euclid(2) == 1 && nb.rem_euclid(2) == 1 { -1 } else { 1 };
        prop_assert_eq!(
            multiply(&alg, &ea, &eb),
            multiply(&alg, &eb, &ea).scale(p, sign)
        );
    }

    /// Associativity on random triples.
    #[test]
    fn associative(a in arb_monomial(3), b in arb_monomial(3), c in arb_monomial(3)) {
        let alg = tate_alg(3);
        let (ea, eb, ec) = (
            Element::from_monomial(a),
            Element::from_monomial(b),
            Element::from_monomial(c),
        );
        prop_assert_eq!(
            multiply(&alg, &multiply(&alg, &ea, &eb), &ec),
            multiply(&alg, &ea, &multiply(&alg, &eb, &ec))
        );
    }

    /// Window enumeration: every monomial inside, exactly once, and the
    /// count matches a brute-force recount over exponent boxes.
    #[test]
    fn window_enumeration_complete(
        s_lo in -40..=-1i64, s_span in 0..=30i64,
        n_lo in -30..=10i64, n_span in 0..=40i64,
    ) {
        let alg = tate_alg(3);
        let w = Window::new(s_lo, s_lo + s_span, n_lo, n_lo + n_span);
        let basis = basis_in_window(&alg, &w).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for m in &basis {
            let (s, n) = bidegree_of(&alg, m).unwrap();
            prop_assert!(w.contains(s, n));
            prop_assert!(seen.insert(m.clone()));
        }
        // Brute force over a box provably containing the window.
        let mut count = 0usize;
        for u in 0..=1i64 {
            for t in -30..=30i64 {
                for l1 in 0..=1i64 {
                    for l2 in 0..=1i64 {
                        for l3 in 0..=1i64 {
                            for mu in 0..=3i64 {
                                let m = alg.monomial(&[
                                    ("u1", u), ("t", t), ("l1", l1),
                                    ("l2", l2), ("l3", l3), ("mu", mu),
                                ]);
                                let (s, n) = bidegree_of(&alg, &m).unwrap();
                                if w.contains(s, n) {
                                    count += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        prop_assert_eq!(basis.len(), count);
    }

    /// The Leibniz identity for the first Tate differential at p = 3.
    #[test]
    fn leibniz_rule(a in arb_monomial(3), b in arb_monomial(3)) {
        let alg = tate_alg(3);
        let p = alg.prime;
        let gens = vec![
            PageGenerator { base: alg.power("u1", 1), kind: redshift::fpalg::GeneratorKind::Exterior },
            PageGenerator { base: alg.power("t", 1), kind: redshift::fpalg::GeneratorKind::Laurent },
            PageGenerator { base: alg.monomial(&[("t", 1), ("mu", 1)]), kind: redshift::fpalg::GeneratorKind::Polynomial },
            PageGenerator { base: alg.power("l1", 1), kind: redshift::fpalg::GeneratorKind::Exterior },
            PageGenerator { base: alg.power("l2", 1), kind: redshift::fpalg::GeneratorKind::Exterior },
            PageGenerator { base: alg.power("l3", 1), kind: redshift::fpalg::GeneratorKind::Exterior },
        ];
        let mut values = BTreeMap::new();
        values.insert(1, Element::from_monomial(alg.monomial(&[("t", 4), ("l1", 1)])));
        let rule = DerivationRule { page_index: 6, generators: gens, values };

        let da = derive_monomial(&alg, &rule, &a);
        let db = derive_monomial(&alg, &rule, &b);
        if let (Some(da), Some(db)) = (da, db) {
            let prod = multiply(
                &alg,
                &Element::from_monomial(a.clone()),
                &Element::from_monomial(b.clone()),
            );
            let mut d_prod = Element::zero();
            for (m, &c) in &prod.terms {
                if let Some(d) = derive_monomial(&alg, &rule, m) {
                    d_prod = d_prod.add(p, &d.scale(p, c as i64));
                }
            }
            let sign = if bidegree_of(&alg, &a).unwrap().1.rem_euclid(2) == 1 { -1 } else { 1 };
            let rhs = multiply(&alg, &da, &Element::from_monomial(b.clone()))
                .add(p, &multiply(&alg, &Element::from_monomial(a.clone()), &db).scale(p, sign));
            prop_assert_eq!(d_prod, rhs);
        }
    }
}
