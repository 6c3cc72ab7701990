use std::sync::Arc;

use proptest::prelude::*;
use pvcalc::diffpoly::{element_from_json, element_to_json, koszul, Element, Parity, Signature};
use pvcalc::random::{random_element, rng, Shape};
use pvcalc::varcalc::field_signature;

fn sig() -> Arc<Signature> {
    Signature::builder()
        .even("u", 0)
        .even("v", 1)
        .odd("phi", 0)
        .odd("psi", 1)
        .build()
        .unwrap()
}

fn shape() -> Shape {
    Shape::new(3, 3, 3).with_constants()
}

/// Homogeneous pieces by parity.
fn parts(e: &Element) -> [(Element, Parity); 2] {
    let (even, odd) = e.parity_parts();
    [(even, Parity::Even), (odd, Parity::Odd)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(seed in any::<u64>()) {
        let s = sig();
        let mut r = rng(seed);
        let a = random_element(&s, &mut r, &shape());
        let b = random_element(&s, &mut r, &shape());
        let c = random_element(&s, &mut r, &shape());
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Element::zero(&s));
        for (x, px) in parts(&a) {
            for (y, py) in parts(&b) {
                let yx = &y * &x;
                let want = if koszul(px, py) { -&yx } else { yx };
                prop_assert_eq!(&x * &y, want);
            }
        }
    }

    #[test]
    fn total_derivative_is_an_even_derivation(seed in any::<u64>()) {
        let s = sig();
        let mut r = rng(seed);
        let a = random_element(&s, &mut r, &shape());
        let b = random_element(&s, &mut r, &shape());
        prop_assert_eq!((&a * &b).t(), &(&a.t() * &b) + &(&a * &b.t()));
        prop_assert_eq!(a.t().t(), a.t_pow(2));
        if let Some(w) = a.weight() {
            if !a.t().is_zero() {
                prop_assert_eq!(a.t().weight(), Some(w + 1));
            }
        }
    }

    #[test]
    fn total_derivatives_are_variationally_trivial(seed in any::<u64>()) {
        let s = sig();
        let mut r = rng(seed);
        let a = random_element(&s, &mut r, &shape());
        let ta = a.t();
        for g in 0..s.num_generators() {
            prop_assert!(ta.variational_derivative(g).is_zero());
        }
        let prim = ta.is_exact().unwrap();
        prop_assert!(prim.is_some());
        prop_assert_eq!(prim.unwrap().t(), ta);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let s = sig();
        let mut r = rng(seed);
        let a = random_element(&s, &mut r, &shape());
        prop_assert_eq!(element_from_json(&s, &element_to_json(&a)).unwrap(), a);
    }

    #[test]
    fn space_and_time_derivatives_commute(seed in any::<u64>()) {
        let s = field_signature(2).unwrap();
        let mut r = rng(seed);
        let a = random_element(&s, &mut r, &shape());
        prop_assert_eq!(a.t().tau_derivative(), a.tau_derivative().t());
    }
}

#[test]
fn laurent_leibniz() {
    let s = Signature::builder().invertible("x").even("p", 1).build().unwrap();
    let x = Element::gen(&s, "x").unwrap();
    let xi = Element::inverse_of(&s, "x").unwrap();
    let mut r = rng(2);
    for _ in 0..20 {
        let a = &random_element(&s, &mut r, &shape()) * &xi;
        let b = random_element(&s, &mut r, &shape());
        assert_eq!((&a * &b).t(), &(&a.t() * &b) + &(&a * &b.t()));
    }
    // T(x⁻¹) = −x⁻²x'
    assert_eq!(xi.t(), -&(&(&xi * &xi) * &x.t()));
    assert!(xi.t().is_exact().is_err());
}
