//! Property tests for the coefficient field: field axioms on random
//! triples, render/parse round trip, idempotent normalisation.

use ncdiffop::scalar::{parse_scalar, GaussianRational, Monomial, MultiPoly, Scalar, VarSet};
use proptest::prelude::*;

fn vars() -> VarSet {
    VarSet::new(vec!["q", "r", "mu_p"])
}

fn arb_coeff() -> impl Strategy<Value = GaussianRational> {
    (-6_i64..=6, 1_i64..=4, -3_i64..=3).prop_map(|(n, d, im)| {
        let re = GaussianRational::from_ratio(n, d);
        let imc = GaussianRational::from_int(im);
        let i = GaussianRational::i();
        &re + &(&imc * &i)
    })
}

fn arb_poly() -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec(
        (
            proptest::collection::vec(0u32..3, 3),
            arb_coeff(),
        ),
        0..4,
    )
    .prop_map(|terms| {
        let mut p = MultiPoly::zero(vars());
        for (exps, c) in terms {
            p.add_term(Monomial(exps), c);
        }
        p
    })
}

prop_compose! {
    fn arb_scalar()(num in arb_poly(), den in arb_poly()) -> Scalar {
        let den = if den.is_zero() { MultiPoly::one(vars()) } else { den };
        Scalar::new(num, den).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        // associativity and commutativity
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        // distributivity
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        // additive inverse and unit laws
        prop_assert!(a.add(&a.neg()).is_zero());
        prop_assert_eq!(a.add(&Scalar::zero(vars())), a.clone());
        prop_assert_eq!(a.mul(&Scalar::one(vars())), a.clone());
        // multiplicative inverse
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
        }
        // division undoes multiplication
        if !b.is_zero() {
            prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a.clone());
        }
    }

    #[test]
    fn render_parse_round_trip(a in arb_scalar()) {
        let text = a.to_string();
        let back = parse_scalar(&text, &vars()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn normalisation_is_idempotent(a in arb_scalar()) {
        prop_assert_eq!(a.normalize(), a.clone());
        prop_assert_eq!(a.normalize().normalize(), a);
    }
}
