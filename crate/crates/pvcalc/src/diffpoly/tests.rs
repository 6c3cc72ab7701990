use std::sync::Arc;

use super::*;
use crate::rational::{q, qf};

fn sig() -> Arc<Signature> {
    Signature::builder()
        .invertible("x")
        .even("y", 0)
        .odd("phi", 0)
        .odd("psi", 1)
        .even("p", 1)
        .base("sigma")
        .parameter("t", Parity::Even, 2)
        .parameter("s", Parity::Odd, 2)
        .build()
        .unwrap()
}

fn g(s: &Arc<Signature>, n: &str) -> Element {
    Element::gen(s, n).unwrap()
}

#[test]
fn odd_square_and_anticommutation() {
    let s = sig();
    let phi = g(&s, "phi");
    let psi = g(&s, "psi");
    assert!((&phi * &phi).is_zero());
    assert!((&(&phi * &psi) + &(&psi * &phi)).is_zero());
}

#[test]
fn laurent_unit() {
    let s = sig();
    let x = g(&s, "x");
    let xi = Element::inverse_of(&s, "x").unwrap();
    assert_eq!(&x * &xi, Element::one(&s));
}

#[test]
fn total_derivative_examples() {
    let s = sig();
    let x = g(&s, "x");
    let x1 = Element::jet(&s, 0, 1);
    let x2 = Element::jet(&s, 0, 2);
    assert_eq!(x.t(), x1);
    assert_eq!((&x * &x).t(), (&x * &x1).scale(&q(2)));
    let xi = Element::inverse_of(&s, "x").unwrap();
    let lhs = (&xi * &x1).t();
    let rhs = &(&(&xi * &xi) * &(&x1 * &x1)).scale(&q(-1)) + &(&xi * &x2);
    assert_eq!(lhs, rhs);
    // base variables and parameters are T-constants
    let sigma = Element::base(&s, "sigma").unwrap();
    let t = Element::param(&s, "t").unwrap();
    assert!(sigma.t().is_zero());
    assert!(t.t().is_zero());
}

#[test]
fn partial_examples() {
    let s = sig();
    let x1 = Element::jet(&s, 0, 1);
    assert_eq!((&x1 * &x1).partial(&Var::jet(0, 1)), x1.scale(&q(2)));
    let phi = g(&s, "phi");
    let psi = g(&s, "psi");
    let phi_i = s.generator_index("phi").unwrap();
    let psi_i = s.generator_index("psi").unwrap();
    assert_eq!((&phi * &psi).partial(&Var::jet(phi_i, 0)), psi.clone());
    assert_eq!((&phi * &psi).partial(&Var::jet(psi_i, 0)), -&phi);
    assert_eq!((&phi * &psi).right_partial(&Var::jet(psi_i, 0)), phi.clone());
    let xi = Element::inverse_of(&s, "x").unwrap();
    assert_eq!(xi.partial(&Var::jet(0, 0)), (&xi * &xi).scale(&q(-1)));
}

#[test]
fn variational_examples() {
    let s = sig();
    let x1 = Element::jet(&s, 0, 1);
    let l = (&x1 * &x1).scale(&qf(1, 2));
    assert_eq!(l.variational_derivative(0), Element::jet(&s, 0, 2).scale(&q(-1)));
    let xi = Element::inverse_of(&s, "x").unwrap();
    assert!((&xi * &x1).variational_derivative(0).is_zero());
}

#[test]
fn exactness_examples() {
    let s = sig();
    let y = g(&s, "y");
    let yi = s.generator_index("y").unwrap();
    let y1 = Element::jet(&s, yi, 1);
    let w = (&y * &y1).is_exact().unwrap().unwrap();
    assert_eq!(w, (&y * &y).scale(&qf(1, 2)));
    assert!((&y1 * &y1).is_exact().unwrap().is_none());
    let w = Element::jet(&s, yi, 2).is_exact().unwrap().unwrap();
    assert_eq!(w, y1);
    let xi = Element::inverse_of(&s, "x").unwrap();
    assert!(matches!((&xi * &Element::jet(&s, 0, 1)).is_exact(), Err(crate::Error::LaurentUnsupported)));
}

#[test]
fn nilpotent_parameters() {
    let s = sig();
    let t = Element::param(&s, "t").unwrap();
    let sp = Element::param(&s, "s").unwrap();
    assert!((&t * &t).is_zero());
    assert!((&sp * &sp).is_zero());
    assert!(!(&t * &sp).is_zero());
    let phi = g(&s, "phi");
    assert_eq!(&sp * &phi, -&(&phi * &sp));
}

#[test]
fn unit_normal_form() {
    let s = Signature::builder()
        .even("a", 0)
        .even("b", 0)
        .even("c", 0)
        .even("e", 0)
        .unit("det", vec![(vec![("a", 1), ("e", 1)], q(1)), (vec![("b", 1), ("c", 1)], q(-1))])
        .build()
        .unwrap();
    let det_inv = Element::inverse_of(&s, "det").unwrap();
    let a = g(&s, "a");
    let b = g(&s, "b");
    let c = g(&s, "c");
    let d = g(&s, "e");
    let det = &(&a * &d) - &(&b * &c);
    assert_eq!(&det * &det_inv, Element::one(&s));
    assert_eq!(&(&det * &det) * &(&det_inv * &det_inv), Element::one(&s));
    // T(det⁻¹)·det² = −T(det)
    let lhs = &det_inv.t() * &(&det * &det);
    assert_eq!(lhs, -&det.t());
    // ∂(det⁻¹)/∂a = −d·det⁻²
    let pa = det_inv.partial(&Var::jet(0, 0));
    assert_eq!(pa, -&(&d * &(&det_inv * &det_inv)));
}

#[test]
fn display_and_json_round_trip() {
    let s = sig();
    let x = g(&s, "x");
    let e = &(&x * &Element::jet(&s, 0, 1)).scale(&qf(-3, 2)) + &Element::inverse_of(&s, "x").unwrap();
    let j = element_to_json(&e);
    let back = element_from_json(&s, &j).unwrap();
    assert_eq!(back, e);
    assert_eq!(serde_json::to_string(&element_to_json(&back)).unwrap(), serde_json::to_string(&j).unwrap());
    assert_eq!(format!("{e}"), "inv(x) - 3/2*x*x'");
}

#[test]
fn substitution_is_a_homomorphism() {
    let s = sig();
    let x = g(&s, "x");
    let y = g(&s, "y");
    let p = g(&s, "p");
    let e = &(&x * &y) + &p;
    let pi = s.generator_index("p").unwrap();
    let ss = s.clone();
    let img = e
        .substitute(&s, &|v| {
            Ok(match v {
                Var::Jet(j) if j.gen as usize == pi => &Element::jet(&ss, pi, 0) + &Element::jet(&ss, 0, 1),
                _ => Element::var(&ss, *v),
            })
        })
        .unwrap();
    assert_eq!(img, &(&(&x * &y) + &p) + &x.t());
}
