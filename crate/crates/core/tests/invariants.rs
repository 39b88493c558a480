use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use pvi_core::connection::gamma;
use pvi_core::exactnum::{elem_from_cos, field_new, FieldElement};
use pvi_core::triples::{
    apply_gen, braid_apply, quadratic_invariant, symmetry_apply, BraidWord, Gen, Symmetry, Triple,
};

const FIELDS: [u64; 5] = [3, 5, 7, 8, 12];

/// Small integer-rational combinations of powers of 2cos(π/n).
fn coord(n: u64, c: [i64; 3], d: i64) -> FieldElement {
    let ctx = field_new(n);
    let t = elem_from_cos(n as i64 - 1, n, &ctx).unwrap();
    let mut acc = FieldElement::from_rational(&ctx, BigRational::new(c[0].into(), d.into()));
    let mut p = t.clone();
    for &k in &c[1..] {
        acc = acc + p.clone() * FieldElement::from_int(&ctx, k);
        p = p * t.clone();
    }
    acc
}

fn exact_triple() -> impl Strategy<Value = Triple<FieldElement>> {
    (0..FIELDS.len(), prop::array::uniform3(prop::array::uniform3(-3i64..=3)), prop::array::uniform3(1i64..=4))
        .prop_map(|(f, cs, ds)| {
            let n = FIELDS[f];
            Triple::new(coord(n, cs[0], ds[0]), coord(n, cs[1], ds[1]), coord(n, cs[2], ds[2]))
        })
}

fn word(s: &str) -> BraidWord {
    s.parse().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn quadratic_invariant_is_preserved(t in exact_triple()) {
        let q = quadratic_invariant(&t);
        for g in [Gen::B1, Gen::B1Inv, Gen::B2, Gen::B2Inv] {
            prop_assert_eq!(quadratic_invariant(&apply_gen(g, &t)), q.clone());
            prop_assert_eq!(apply_gen(g.inverse(), &apply_gen(g, &t)), t.clone());
        }
        for s in [Symmetry::I1, Symmetry::I2] {
            prop_assert_eq!(quadratic_invariant(&symmetry_apply(s, &t)), q.clone());
        }
    }

    #[test]
    fn braid_relation(t in exact_triple()) {
        let l = braid_apply(&word("b1 b2 b1"), &t);
        let r = braid_apply(&word("b2 b1 b2"), &t);
        prop_assert_eq!(l, r);
    }

    #[test]
    fn full_twist_is_trivial_on_classes(t in exact_triple()) {
        let w = word("b1 b2").pow(3);
        prop_assert_eq!(braid_apply(&w, &t).class(), t.class());
    }

    #[test]
    fn canonical_representative_is_stable(t in exact_triple()) {
        let c = t.class();
        prop_assert_eq!(c.representative.class(), c.clone());
        for v in t.sign_variants() {
            prop_assert_eq!(v.class(), c.clone());
        }
    }

    #[test]
    fn gamma_recurrence(re in -6.0f64..6.0, im in -3.0f64..3.0) {
        let z = Complex64::new(re, im);
        prop_assume!((0..8).all(|k| (z + k as f64).norm() > 1e-3));
        let lhs = gamma(z + 1.0);
        let rhs = z * gamma(z);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-300), "{lhs} vs {rhs}");
    }
}
