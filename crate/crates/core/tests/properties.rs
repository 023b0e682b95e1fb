//! Property tests for the arithmetic substrate and the series algebra.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use proptest::prelude::*;

use ltforge_core::arith::big;
use ltforge_core::json::{
    element_from_json, element_to_json, field_from_json, field_to_json, series1_from_json,
    series1_to_json,
};
use ltforge_core::padic::{
    make_field, norm_to_qp, q_p, teichmuller, LocalFieldModel, PadicNumber, Valuation,
};
use ltforge_core::series::Series1;

fn sqrt2_field() -> LocalFieldModel {
    make_field(
        2,
        &[big(-1), big(1)],
        &[vec![big(-2)], vec![big(0)], vec![big(1)]],
        "Q_2(sqrt2)",
    )
    .unwrap()
}

fn unram_q9() -> LocalFieldModel {
    make_field(
        3,
        &[big(2), big(1), big(1)],
        &[vec![big(-3), big(0)], vec![big(1)]],
        "Q_9",
    )
    .unwrap()
}

fn rational_strategy() -> impl Strategy<Value = BigRational> {
    (-40i64..40, 1i64..12)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn element_strategy(field: LocalFieldModel) -> impl Strategy<Value = PadicNumber> {
    let e = field.e();
    let f = field.f();
    proptest::collection::vec(rational_strategy(), e * f).prop_map(move |flat| {
        let coords: Vec<Vec<BigRational>> = flat.chunks(f).map(|c| c.to_vec()).collect();
        field.from_coords(coords).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms_exact_ramified(
        a in element_strategy(sqrt2_field()),
        b in element_strategy(sqrt2_field()),
        c in element_strategy(sqrt2_field()),
    ) {
        let ab_c = a.mul(&b).mul(&c);
        let a_bc = a.mul(&b.mul(&c));
        prop_assert_eq!(&ab_c, &a_bc);
        let dist = a.mul(&b.add(&c).unwrap());
        let dist2 = a.mul(&b).add(&a.mul(&c)).unwrap();
        prop_assert_eq!(&dist, &dist2);
        prop_assert_eq!(&a.mul(&b), &b.mul(&a));
    }

    #[test]
    fn ring_axioms_exact_unramified(
        a in element_strategy(unram_q9()),
        b in element_strategy(unram_q9()),
        c in element_strategy(unram_q9()),
    ) {
        let ab_c = a.mul(&b).mul(&c);
        let a_bc = a.mul(&b.mul(&c));
        prop_assert_eq!(&ab_c, &a_bc);
        let dist = a.mul(&b.add(&c).unwrap());
        let dist2 = a.mul(&b).add(&a.mul(&c)).unwrap();
        prop_assert_eq!(&dist, &dist2);
    }

    #[test]
    fn capped_ring_axioms_mod_pn(
        a in element_strategy(sqrt2_field()),
        b in element_strategy(sqrt2_field()),
    ) {
        // exact product reduced at N agrees with the capped product
        let n = Rational64::from_integer(6);
        let ac = a.to_capped_at(n).unwrap();
        let bc = b.to_capped_at(n).unwrap();
        let capped = ac.checked_mul(&bc).unwrap();
        let exact = a.mul(&b);
        let diff = exact.sub(&capped.to_exact_lift()).unwrap();
        let promised = capped.abs_prec().unwrap();
        match diff.valuation() {
            Valuation::Exact(v) => prop_assert!(v >= promised, "v = {} < {}", v, promised),
            Valuation::AtLeast(_) => {}
        }
    }

    #[test]
    fn valuation_is_additive(
        a in element_strategy(sqrt2_field()),
        b in element_strategy(sqrt2_field()),
    ) {
        if let (Valuation::Exact(va), Valuation::Exact(vb)) = (a.valuation(), b.valuation()) {
            match a.mul(&b).valuation() {
                Valuation::Exact(vab) => prop_assert_eq!(vab, va + vb),
                Valuation::AtLeast(_) => prop_assert!(false, "product of nonzeros is nonzero"),
            }
        }
    }

    #[test]
    fn norm_is_multiplicative(
        a in element_strategy(sqrt2_field()),
        b in element_strategy(sqrt2_field()),
    ) {
        let nab = norm_to_qp(&a.mul(&b)).unwrap();
        let na = norm_to_qp(&a).unwrap();
        let nb = norm_to_qp(&b).unwrap();
        prop_assert_eq!(nab, na * nb);
    }

    #[test]
    fn exact_capped_roundtrip(
        a in element_strategy(unram_q9()),
        n in 2i64..8,
    ) {
        let prec = Rational64::from_integer(n);
        let capped = a.to_capped_at(prec).unwrap();
        let back = capped.to_exact_lift();
        let diff = a.sub(&back).unwrap();
        match diff.valuation() {
            Valuation::Exact(v) => prop_assert!(v >= prec),
            Valuation::AtLeast(v) => prop_assert!(v >= prec),
        }
    }

    #[test]
    fn element_json_roundtrip(a in element_strategy(sqrt2_field())) {
        let k = sqrt2_field();
        let v = element_to_json(&a);
        let a2 = element_from_json(&v, &k).unwrap();
        prop_assert_eq!(a, a2);
    }

    #[test]
    fn teichmuller_is_root_of_unity(r in 1u64..9, n in 2i64..7) {
        let k = unram_q9();
        // r encodes a nonzero residue c0 + 3 c1
        let res = vec![big((r % 3) as i64), big((r / 3) as i64)];
        if res.iter().all(|c| c.is_zero()) {
            return Ok(());
        }
        let t = teichmuller(&k, &res, n).unwrap();
        // t^(q-1) = 1 at precision n: check via exact lift powering mod 3^n
        let lift = t.to_exact_lift();
        let mut acc = k.one();
        for _ in 0..8 {
            acc = acc.mul(&lift);
        }
        let diff = acc.sub(&k.one()).unwrap();
        match diff.valuation() {
            Valuation::Exact(v) => prop_assert!(v >= Rational64::from_integer(n)),
            Valuation::AtLeast(_) => {}
        }
    }
}

fn small_series(field: &LocalFieldModel, trunc: u32, coeffs: &[i64]) -> Series1 {
    let terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i as u32 + 1, field.from_integer(c)))
        .collect();
    Series1::from_terms(field, trunc, terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn composition_is_associative(
        f in proptest::collection::vec(-9i64..9, 6),
        g in proptest::collection::vec(-9i64..9, 6),
        h in proptest::collection::vec(-9i64..9, 6),
    ) {
        let k = q_p(3);
        let fs = small_series(&k, 7, &f);
        let gs = small_series(&k, 7, &g);
        let hs = small_series(&k, 7, &h);
        let lhs = fs.compose(&gs).unwrap().compose(&hs).unwrap();
        let rhs = fs.compose(&gs.compose(&hs).unwrap()).unwrap();
        prop_assert!(lhs.agrees_through(&rhs, 7));
    }

    #[test]
    fn reversion_roundtrip(
        f in proptest::collection::vec(-9i64..9, 5),
        unit in 1i64..5,
    ) {
        let k = q_p(5);
        // force a unit linear coefficient (not divisible by 5)
        let mut coeffs = vec![if unit % 5 == 0 { 1 } else { unit }];
        coeffs.extend(&f);
        let fs = small_series(&k, 6, &coeffs);
        let gs = fs.invert().unwrap();
        let x = Series1::x(&k, 6).unwrap();
        prop_assert!(fs.compose(&gs).unwrap().agrees_through(&x, 6));
        prop_assert!(gs.compose(&fs).unwrap().agrees_through(&x, 6));
    }

    #[test]
    fn series_json_roundtrip(
        f in proptest::collection::vec(-20i64..20, 6),
        trunc in 6u32..12,
    ) {
        let k = q_p(3);
        let fs = small_series(&k, trunc, &f);
        let v = series1_to_json(&fs);
        let fs2 = series1_from_json(&v, &k).unwrap();
        prop_assert_eq!(&fs, &fs2);
        // bit-exact: identical serialization
        let s1 = serde_json::to_string(&v).unwrap();
        let s2 = serde_json::to_string(&series1_to_json(&fs2)).unwrap();
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn field_json_roundtrip(p_idx in 0usize..3) {
        let k = match p_idx {
            0 => q_p(2),
            1 => sqrt2_field(),
            _ => unram_q9(),
        };
        let v = field_to_json(&k);
        let k2 = field_from_json(&v).unwrap();
        prop_assert_eq!(&k, &k2);
    }
}
