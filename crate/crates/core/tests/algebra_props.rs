use open_tr::algebra::{Exponents, LaurentDifferential, Rational, Variable};
use proptest::prelude::*;

fn vars() -> Vec<Variable> {
    vec![Variable::scalar("x"), Variable::scalar("y")]
}

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d))
}

fn laurent() -> impl Strategy<Value = LaurentDifferential> {
    prop::collection::vec(((-4i32..=4, -4i32..=4), rational()), 0..6).prop_map(|terms| {
        LaurentDifferential::from_terms(
            vars(),
            terms.into_iter().map(|((a, b), c)| (Exponents::from_slice(&[a, b]), c)),
        )
    })
}

proptest! {
    #[test]
    fn addition_is_a_group(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert_eq!(a.add(&a.neg()).unwrap(), LaurentDifferential::zero(vars()));
    }

    #[test]
    fn multiplication_distributes(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()), a.mul(&b).add(&a.mul(&c)).unwrap());
        let one = LaurentDifferential::monomial(vars(), &[0, 0], Rational::one());
        prop_assert_eq!(a.mul(&one), a.clone());
    }

    #[test]
    fn leibniz_rule(a in laurent(), b in laurent()) {
        let lhs = a.mul(&b).differentiate("x").unwrap();
        let rhs = a.differentiate("x").unwrap().mul(&b).add(&a.mul(&b.differentiate("x").unwrap())).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn diagonal_is_a_ring_map(a in laurent(), b in laurent()) {
        let d = |p: &LaurentDifferential| p.set_equal(&["y"], "x").unwrap();
        prop_assert_eq!(d(&a.add(&b).unwrap()), d(&a).add(&d(&b)).unwrap());
        prop_assert_eq!(d(&a.mul(&b)), d(&a).mul(&d(&b)));
    }

    #[test]
    fn substitution_matches_diagonal_at_one(a in laurent()) {
        let at_one = a.substitute("y", &Rational::one()).unwrap();
        let summed = a.set_equal(&["y"], "x").unwrap().substitute("x", &Rational::one()).unwrap();
        prop_assert_eq!(at_one.substitute("x", &Rational::one()).unwrap(), summed);
    }

    #[test]
    fn residue_of_derivative_vanishes(a in laurent()) {
        let exact = a.differentiate("x").unwrap().shift("x", 0, 1);
        prop_assert!(exact.residue_at_zero("x").unwrap().is_zero());
    }

    #[test]
    fn rationals_are_normalized(n in -1000i64..1000, d in 1i64..1000, k in 1i64..50) {
        let r = Rational::new(n * k, d * k);
        prop_assert!(r.is_normalized());
        prop_assert_eq!(r.clone(), Rational::new(n, d));
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r.clone());
        if !r.is_zero() {
            prop_assert_eq!(r.clone() * r.recip(), Rational::one());
        }
    }
}
