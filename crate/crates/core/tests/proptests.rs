//! Structural invariants of the coefficient ring under proptest generation.

use std::sync::Arc;

use num_rational::BigRational;
use proptest::prelude::*;

use superflag::superpoly::{Parity, SuperPolynomial, Substitution, RationalSuperFunction, VarTable};

fn table() -> Arc<VarTable> {
    VarTable::new(vec!["x", "y"], vec!["ξ", "η"])
}

fn arb_poly() -> impl Strategy<Value = SuperPolynomial> {
    // coefficients for the 13 monomials of degree ≤ 2 over (x, y | ξ, η)
    proptest::collection::vec(-4i64..=4, 13).prop_map(|coeffs| {
        let t = table();
        let monomials = superflag::solver::monomials_up_to(&t, 2);
        SuperPolynomial::from_terms(
            &t,
            monomials
                .into_iter()
                .zip(coeffs)
                .map(|(m, c)| (m, BigRational::from_integer(c.into()))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn multiplication_is_supercommutative(a in arb_poly(), b in arb_poly()) {
        for pa in [Parity::Even, Parity::Odd] {
            for pb in [Parity::Even, Parity::Odd] {
                let ah = a.parity_part(pa);
                let bh = b.parity_part(pb);
                let ab = &ah * &bh;
                let ba = &bh * &ah;
                let expect = if pa.sign_of_swap(pb) < 0 { -&ba } else { ba.clone() };
                prop_assert_eq!(&ab, &expect);
            }
        }
    }

    #[test]
    fn multiplication_is_associative(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(&(&(&a * &b) * &c), &(&a * &(&b * &c)));
    }

    #[test]
    fn substitution_is_functorial(a in arb_poly()) {
        // substituting a composition equals composing substitutions:
        // first x ↦ x + 1, then scale the odd variables by −1
        let t = table();
        let mut s1 = Substitution::identity(&t);
        let x = t.lookup("x").unwrap();
        s1.insert(
            x,
            RationalSuperFunction::from_poly(
                &SuperPolynomial::var(&t, x) + &SuperPolynomial::one(&t),
            ),
        )
        .unwrap();
        let mut s2 = Substitution::identity(&t);
        for name in ["ξ", "η"] {
            let v = t.lookup(name).unwrap();
            s2.insert(
                v,
                RationalSuperFunction::from_poly(-&SuperPolynomial::var(&t, v)),
            )
            .unwrap();
        }
        // composed: apply s1's images through s2
        let mut composed = Substitution::new(&t);
        for v in t.vars() {
            let img = s1.get(v).unwrap().substitute(&s2).unwrap();
            composed.insert(v, img).unwrap();
        }
        let lhs = a.substitute(&composed).unwrap();
        let rhs = a.substitute(&s1).unwrap().substitute(&s2).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
