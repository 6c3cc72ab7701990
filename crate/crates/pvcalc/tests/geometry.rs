use proptest::prelude::*;
use pvcalc::diffpoly::{Element, Var};
use pvcalc::geometry::{
    apply_shear, b_field_shear, canonical_svdo, check_homomorphism, dorfman, form, h_twist, pairing, Coords,
    CourantSection, TargetForm,
};
use pvcalc::pva::{LambdaPolynomial, Pva};
use pvcalc::random::{random_element, rng, Shape};
use pvcalc::rational::q;

fn x(p: &Pva, i: usize) -> Element {
    let c = Coords::detect(p.signature()).unwrap();
    Element::jet(p.signature(), c.x[i], 0)
}

fn mom(p: &Pva, i: usize) -> Element {
    let c = Coords::detect(p.signature()).unwrap();
    Element::jet(p.signature(), c.p[i], 0)
}

#[test]
fn momenta_differentiate_functions() {
    let p = canonical_svdo(2).unwrap();
    let f = &(&x(&p, 0) * &x(&p, 0)) * &x(&p, 1);
    for i in 0..2 {
        let d = f.partial(&Var::jet(Coords::detect(p.signature()).unwrap().x[i], 0));
        assert_eq!(p.nth_product(&mom(&p, i), &f, 0).unwrap(), d);
    }
    for n in 0..3 {
        assert!(p.nth_product(&x(&p, 0), &x(&p, 1), n).unwrap().is_zero());
    }
}

#[test]
fn dorfman_examples() {
    let p = canonical_svdo(1).unwrap();
    let (x, pp) = (x(&p, 0), mom(&p, 0));
    let a = &(&x * &x) * &pp;
    let b = &x * &pp;
    let d = dorfman(&p, &a, &b).unwrap();
    assert_eq!(d.to_element(&p).unwrap(), -&a);
    let d = dorfman(&p, &pp, &(&x * &x.t())).unwrap();
    assert_eq!(d.to_element(&p).unwrap(), x.t());
    let w1 = &x * &x.t();
    let w2 = &(&x * &x) * &x.t();
    assert!(dorfman(&p, &w1, &w2).unwrap().to_element(&p).unwrap().is_zero());
    assert!(matches!(dorfman(&p, &x, &pp), Err(pvcalc::Error::NotWeightOne(_))));
}

#[test]
fn pairing_examples() {
    let p = canonical_svdo(2).unwrap();
    let x1 = x(&p, 0);
    assert_eq!(pairing(&p, &mom(&p, 0), &(&x1 * &x1.t())).unwrap(), x1);
    assert!(pairing(&p, &mom(&p, 0), &mom(&p, 1)).unwrap().is_zero());
}

/// A random section with polynomial coefficients of degree ≤ 2.
fn random_section(p: &Pva, seed: u64) -> CourantSection {
    let c = Coords::detect(p.signature()).unwrap();
    let mut r = rng(seed);
    let s = Shape::new(0, 2, 2).with_generators(c.x.clone()).with_constants();
    let vector = (0..c.dim()).map(|_| random_element(p.signature(), &mut r, &s)).collect();
    let form = (0..c.dim()).map(|_| random_element(p.signature(), &mut r, &s)).collect();
    CourantSection { vector, form }
}

/// `[ξ,ξ'] + Lie_ξω' − Lie_ξ'ω + d(ι_ξ'ω)` from textbook formulas.
fn dorfman_oracle(p: &Pva, a: &CourantSection, b: &CourantSection) -> CourantSection {
    let c = Coords::detect(p.signature()).unwrap();
    let n = c.dim();
    let d = |f: &Element, j: usize| f.partial(&Var::jet(c.x[j], 0));
    let zero = Element::zero(p.signature());
    let mut vector = vec![zero.clone(); n];
    let mut form = vec![zero.clone(); n];
    for i in 0..n {
        for j in 0..n {
            vector[i] = &vector[i] + &(&(&a.vector[j] * &d(&b.vector[i], j)) - &(&b.vector[j] * &d(&a.vector[i], j)));
            // (Lie_ξ ω)_i = ξʲ∂_j ω_i + ω_j ∂_i ξʲ
            form[i] = &form[i] + &(&(&a.vector[j] * &d(&b.form[i], j)) + &(&b.form[j] * &d(&a.vector[j], i)));
            form[i] = &form[i] - &(&(&b.vector[j] * &d(&a.form[i], j)) + &(&a.form[j] * &d(&b.vector[j], i)));
        }
    }
    let mut contraction = zero;
    for j in 0..n {
        contraction = &contraction + &(&b.vector[j] * &a.form[j]);
    }
    for (i, f) in form.iter_mut().enumerate() {
        *f = &*f + &d(&contraction, i);
    }
    CourantSection { vector, form }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn dorfman_matches_classical_formula(seed in any::<u64>()) {
        let p = canonical_svdo(2).unwrap();
        let a = random_section(&p, seed);
        let b = random_section(&p, seed.wrapping_add(1));
        let ae = a.to_element(&p).unwrap();
        let be = b.to_element(&p).unwrap();
        prop_assert_eq!(dorfman(&p, &ae, &be).unwrap(), dorfman_oracle(&p, &a, &b));
        let pr = pairing(&p, &ae, &be).unwrap();
        prop_assert_eq!(&pr, &pairing(&p, &be, &ae).unwrap());
        let mut want = Element::zero(p.signature());
        for i in 0..2 {
            want = &want + &(&(&a.vector[i] * &b.form[i]) + &(&b.vector[i] * &a.form[i]));
        }
        prop_assert_eq!(pr, want);
    }
}

#[test]
fn h_twist_examples() {
    let p = canonical_svdo(3).unwrap();
    let sig = p.signature().clone();
    let h = form(&p, 3).unwrap().with_term(&[0, 1, 2], &Element::int(&sig, 5)).unwrap();
    let tw = h_twist(&p, &h).unwrap();
    let b = tw.lambda_bracket(&mom(&p, 0), &mom(&p, 1)).unwrap();
    assert_eq!(b, LambdaPolynomial::constant(x(&p, 2).t().scale(&q(5))));
    let b = tw.lambda_bracket(&mom(&p, 1), &mom(&p, 0)).unwrap();
    assert_eq!(b, LambdaPolynomial::constant(x(&p, 2).t().scale(&q(-5))));
    let z = h_twist(&p, &form(&p, 3).unwrap()).unwrap();
    assert_eq!(z.table().to_json(), p.table().to_json());
}

fn three_forms_n4(p: &Pva) -> (Vec<TargetForm>, Vec<TargetForm>) {
    let sig = p.signature().clone();
    let xs: Vec<Element> = (0..4).map(|i| x(p, i)).collect();
    let f = |idx: [usize; 3], c: Element| form(p, 3).unwrap().with_term(&idx, &c).unwrap();
    let b = |idx: [usize; 2], c: Element| form(p, 2).unwrap().with_term(&idx, &c).unwrap();
    let closed = vec![
        f([0, 1, 2], Element::int(&sig, 1)),
        f([0, 1, 2], xs[0].clone()),
        f([1, 2, 3], &xs[1] * &xs[2]),
        b([1, 2], &(&xs[0] * &xs[0]) * &xs[3]).de_rham(),
        b([0, 3], &xs[1] * &xs[2]).de_rham().add(&f([0, 2, 3], Element::int(&sig, 2))).unwrap(),
    ];
    let open = vec![
        f([1, 2, 3], xs[0].clone()),
        f([0, 1, 2], xs[3].clone()),
        f([0, 2, 3], &xs[1] * &xs[1]),
        f([1, 2, 3], &xs[0] * &xs[2]),
        f([0, 1, 3], &xs[2] * &xs[3]).add(&f([0, 1, 2], Element::int(&sig, 1))).unwrap(),
    ];
    (closed, open)
}

#[test]
fn h_twist_jacobi_detects_closedness() {
    let p = canonical_svdo(4).unwrap();
    let (closed, open) = three_forms_n4(&p);
    for h in &closed {
        assert!(h.is_closed());
        let r = h_twist(&p, h).unwrap().validate(3);
        assert!(r.passed(), "{h}: {r}");
    }
    for h in &open {
        assert!(!h.is_closed());
        let r = h_twist(&p, h).unwrap().validate(3);
        assert!(r.has("jacobi"), "{h}: {r}");
    }
}

#[test]
fn shear_intertwines_with_twist() {
    let p = canonical_svdo(3).unwrap();
    let alpha = form(&p, 2).unwrap().with_term(&[0, 1], &x(&p, 2)).unwrap();
    let da = alpha.de_rham();
    assert_eq!(da.component(&[2, 0, 1]), Element::one(p.signature()));
    let rep = b_field_shear(&p, &alpha).unwrap();
    assert!(!rep.automorphism);
    assert!(rep.consistent);
    assert_eq!(rep.discrepancy, da);
    let tw = h_twist(&p, &da).unwrap();
    let phi = |e: &Element| apply_shear(&p, &alpha, e);
    assert_eq!(check_homomorphism(&tw, &p, &phi).unwrap(), None);
    assert!(check_homomorphism(&p, &p, &phi).unwrap().is_some());
}

#[test]
fn closed_shears_are_automorphisms() {
    let p = canonical_svdo(3).unwrap();
    let sig = p.signature().clone();
    let xs: Vec<Element> = (0..3).map(|i| x(&p, i)).collect();
    let b = |idx: [usize; 2], c: Element| form(&p, 2).unwrap().with_term(&idx, &c).unwrap();
    let one = form(&p, 1).unwrap();
    let alphas = vec![
        b([0, 1], Element::one(&sig)),
        b([0, 1], xs[0].clone()),
        b([1, 2], Element::int(&sig, 3)).add(&b([0, 2], Element::int(&sig, -2))).unwrap(),
        one.clone().with_term(&[0], &(&xs[1] * &xs[2])).unwrap().de_rham(),
        one.with_term(&[2], &xs[0].pow(3)).unwrap().de_rham(),
    ];
    for a in &alphas {
        assert!(a.is_closed());
        let rep = b_field_shear(&p, a).unwrap();
        assert!(rep.automorphism, "{a}");
        assert!(rep.discrepancy.is_zero());
        for g in 0..sig.num_generators() {
            let e = Element::jet(&sig, g, 0);
            let back = apply_shear(&p, &a.neg(), &apply_shear(&p, a, &e).unwrap()).unwrap();
            assert_eq!(back, e);
        }
    }
}

#[test]
fn de_rham_examples() {
    let p = canonical_svdo(2).unwrap();
    let sig = p.signature().clone();
    let c = form(&p, 2).unwrap().with_term(&[0, 1], &Element::int(&sig, 7)).unwrap();
    assert!(c.de_rham().is_zero());
    let w = form(&p, 1).unwrap().with_term(&[1], &x(&p, 0)).unwrap();
    assert_eq!(w.de_rham(), form(&p, 2).unwrap().with_term(&[0, 1], &Element::one(&sig)).unwrap());
    assert!(w.de_rham().de_rham().is_zero());
    let j = w.de_rham().to_json();
    let coords = Coords::detect(&sig).unwrap();
    assert_eq!(TargetForm::from_json(&sig, &coords.x, &j).unwrap(), w.de_rham());
}
