use std::sync::Arc;

use proptest::prelude::*;
use pvcalc::diffpoly::{Element, Jet, Signature};
use pvcalc::pva::LieClass;
use pvcalc::random::{random_element, rng, Shape};
use pvcalc::rational::q;
use pvcalc::varcalc::{
    euler_lagrange, euler_lagrange_residual, field_signature, free_particle, legendre, noether, prolong,
    verify_symmetry, Characteristic, FormVar, JetForm, Lagrangian, OnShell, Orientation, SigmaModel,
};
use pvcalc::Q;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn jet(sig: &Arc<Signature>, g: usize, tau: u32, order: u32) -> Element {
    Element::jet2(sig, g, tau, order)
}

#[test]
fn differential_examples() {
    let sig = field_signature(1).unwrap();
    let x = jet(&sig, 0, 0, 0);
    let want = JetForm::dtau(&sig)
        .mul_function(&jet(&sig, 0, 1, 0))
        .add(&JetForm::dsigma(&sig).mul_function(&jet(&sig, 0, 0, 1)));
    assert_eq!(JetForm::function(&x).d_rho(), want);

    let f = x.pow(3);
    let want = JetForm::delta_jet(&sig, Jet::new(0, 0)).mul_function(&(&x * &x).scale(&q(3)));
    assert_eq!(JetForm::function(&f).delta(), want);

    let dx = JetForm::delta_jet(&sig, Jet::new(0, 0));
    let want = JetForm::delta_jet(&sig, Jet::new2(0, 1, 0))
        .wedge(&JetForm::dtau(&sig))
        .add(&JetForm::delta_jet(&sig, Jet::new2(0, 0, 1)).wedge(&JetForm::dsigma(&sig)))
        .neg();
    assert_eq!(dx.d_rho(), want);
    // d_ρ on a (0,1)-form is minus δ of d_ρ
    assert_eq!(dx.d_rho(), JetForm::function(&x).d_rho().delta().neg());
}

#[test]
fn wedge_signs() {
    let sig = field_signature(1).unwrap();
    let a = JetForm::dsigma(&sig);
    let b = JetForm::delta_jet(&sig, Jet::new(0, 0));
    assert_eq!(a.wedge(&b), b.wedge(&a).neg());
    assert!(a.wedge(&a).is_zero());
    assert!(b.wedge(&b).is_zero());
    assert_eq!(a.wedge(&b).coefficient(&[FormVar::DSigma, FormVar::Delta(Jet::new(0, 0))]), Element::one(&sig));
}

#[test]
fn prolongation_examples() {
    let sig = field_signature(1).unwrap();
    let xs = jet(&sig, 0, 0, 1);
    let one = Characteristic::new(vec![(0, Element::one(&sig))]);
    assert!(prolong(&one)(&xs).is_zero());
    let id = Characteristic::new(vec![(0, jet(&sig, 0, 0, 0))]);
    assert_eq!(prolong(&id)(&xs), xs);
    assert_eq!(prolong(&id)(&(&xs * &jet(&sig, 0, 1, 0))), (&xs * &jet(&sig, 0, 1, 0)).scale(&q(2)));
}

fn random_coefficient(sig: &Arc<Signature>, r: &mut ChaCha8Rng) -> Element {
    let s = Shape::new(2, 2, 2).with_constants();
    let a = random_element(sig, r, &s);
    let b = random_element(sig, r, &s);
    let tau = Element::base(sig, "tau").unwrap();
    let sigma = Element::base(sig, "sigma").unwrap();
    let mut e = &a + &(&b.tau_derivative() * &random_element(sig, r, &s));
    if r.gen_bool(0.3) {
        e = &e * &(&tau + &sigma);
    }
    e
}

fn random_factor(r: &mut ChaCha8Rng, n: usize) -> FormVar {
    match r.gen_range(0..4) {
        0 => FormVar::DTau,
        1 => FormVar::DSigma,
        _ => FormVar::Delta(Jet::new2(r.gen_range(0..n), r.gen_range(0..2), r.gen_range(0..2))),
    }
}

fn random_form(sig: &Arc<Signature>, r: &mut ChaCha8Rng) -> JetForm {
    let n = sig.num_generators();
    let mut f = JetForm::zero(sig);
    for _ in 0..r.gen_range(1..4) {
        let k = r.gen_range(0..3);
        let factors: Vec<FormVar> = (0..k).map(|_| random_factor(r, n)).collect();
        f.add_term(factors, &random_coefficient(sig, r));
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bicomplex_identities(seed in any::<u64>()) {
        let sig = field_signature(2).unwrap();
        let mut r = rng(seed);
        let w = random_form(&sig, &mut r);
        prop_assert!(w.d_rho().d_rho().is_zero());
        prop_assert!(w.delta().delta().is_zero());
        prop_assert!(w.d_rho().delta().add(&w.delta().d_rho()).is_zero());
        let ch = Characteristic::new(vec![(0, random_coefficient(&sig, &mut r)), (1, random_coefficient(&sig, &mut r))]);
        prop_assert!(w.iota(&ch).d_rho().add(&w.d_rho().iota(&ch)).is_zero());
    }

    #[test]
    fn derivations_obey_leibniz(seed in any::<u64>()) {
        let sig = field_signature(2).unwrap();
        let mut r = rng(seed);
        let a = random_form(&sig, &mut r);
        let b = random_form(&sig, &mut r);
        // the sign only depends on the parity of the form degree of `a`
        for (k, c) in a.terms() {
            let mut ak = JetForm::zero(&sig);
            ak.add_term(k.clone(), c);
            let even = k.len() % 2 == 0;
            let sgn = |f: JetForm| if even { f } else { f.neg() };
            prop_assert_eq!(ak.wedge(&b).d_rho(), ak.d_rho().wedge(&b).add(&sgn(ak.wedge(&b.d_rho()))));
            prop_assert_eq!(ak.wedge(&b).delta(), ak.delta().wedge(&b).add(&sgn(ak.wedge(&b.delta()))));
        }
    }

    #[test]
    fn euler_lagrange_identity_on_random_densities(seed in any::<u64>()) {
        let sig = field_signature(2).unwrap();
        let mut r = rng(seed);
        let vars: Vec<Element> = (0..2)
            .flat_map(|g| [jet(&sig, g, 0, 0), jet(&sig, g, 1, 0), jet(&sig, g, 0, 1)])
            .collect();
        let mut dens = Element::zero(&sig);
        for _ in 0..3 {
            let mut m = Element::int(&sig, r.gen_range(-3..4));
            for _ in 0..r.gen_range(0..4) {
                m = &m * &vars[r.gen_range(0..vars.len())];
            }
            dens = &dens + &m;
        }
        for o in [Orientation::TauSigma, Orientation::SigmaTau] {
            let l = Lagrangian::new(dens.clone(), o).unwrap();
            let el = euler_lagrange(&l).unwrap();
            prop_assert!(euler_lagrange_residual(&l, &el).is_zero());
            prop_assert_eq!(el.gamma.bidegree().unwrap_or((1, 1)), (1, 1));
        }
    }
}

#[test]
fn euler_lagrange_examples() {
    for n in 1..=3 {
        let m = SigmaModel::flat(n).unwrap();
        let sig = m.signature().clone();
        let el = euler_lagrange(&m.lagrangian).unwrap();
        for (j, e) in &el.equations {
            assert_eq!(*e, &jet(&sig, *j, 2, 0) - &jet(&sig, *j, 0, 2));
        }
        assert!(euler_lagrange_residual(&m.lagrangian, &el).is_zero());
    }

    let sig = field_signature(1).unwrap();
    let l = Lagrangian::new(jet(&sig, 0, 0, 0), Orientation::TauSigma).unwrap();
    let el = euler_lagrange(&l).unwrap();
    assert!(el.gamma.is_zero());
    assert_eq!(el.equations[0].1, Element::one(&sig));

    let l = free_particle().unwrap();
    let sig = l.signature().clone();
    let el = euler_lagrange(&l).unwrap();
    assert_eq!(el.equations[0].1, -&jet(&sig, 0, 2, 0));
    let want = JetForm::delta_jet(&sig, Jet::new(0, 0)).wedge(&JetForm::dsigma(&sig)).mul_function(&jet(&sig, 0, 1, 0));
    assert_eq!(el.gamma, want);
    assert!(euler_lagrange_residual(&l, &el).is_zero());

    let l = Lagrangian::new(jet(&sig, 0, 0, 2), Orientation::TauSigma);
    assert!(matches!(l, Err(pvcalc::Error::HigherOrderLagrangian)));
}

fn profiles() -> Vec<Vec<Q>> {
    vec![vec![q(1)], vec![q(0), q(1)], vec![q(2), q(-1), q(3)], vec![q(0), q(0), q(0), q(1) / q(2)]]
}

#[test]
fn symmetries_of_the_sigma_model() {
    for n in 1..=2 {
        let m = SigmaModel::flat(n).unwrap();
        let (ch, alpha) = m.time_translation();
        assert!(verify_symmetry(&ch, &m.lagrangian, &alpha));
        for f in profiles() {
            let (ch, alpha) = m.xi_minus(&f);
            assert!(verify_symmetry(&ch, &m.lagrangian, &alpha), "ξ⁻ {f:?}");
            let (ch, alpha) = m.xi_plus(&f);
            assert!(verify_symmetry(&ch, &m.lagrangian, &alpha), "ξ⁺ {f:?}");
            // the wrong α
            assert!(!verify_symmetry(&ch, &m.lagrangian, &alpha.neg()));
        }
    }
    let m = SigmaModel::with_metric(vec![vec![q(2), q(1)], vec![q(1), q(3)]]).unwrap();
    let (ch, alpha) = m.xi_minus(&[q(1), q(1)]);
    assert!(verify_symmetry(&ch, &m.lagrangian, &alpha));

    // explicit time dependence
    let sig = field_signature(1).unwrap();
    let tau = Element::base(&sig, "tau").unwrap();
    let l = Lagrangian::new(&tau * &jet(&sig, 0, 0, 0), Orientation::TauSigma).unwrap();
    let ch = Characteristic::new(vec![(0, jet(&sig, 0, 1, 0))]);
    let alpha = JetForm::dsigma(&sig).mul_function(&l.density);
    assert!(!verify_symmetry(&ch, &l, &alpha));
}

#[test]
fn noether_currents() {
    let m = SigmaModel::flat(2).unwrap();
    let sig = m.signature().clone();
    let el = euler_lagrange(&m.lagrangian).unwrap();
    let shell = OnShell::new(&m.lagrangian, &el).unwrap();
    let s = |j| jet(&sig, j, 0, 1);
    let t = |j| jet(&sig, j, 1, 0);
    let sum = |f: &dyn Fn(usize) -> Element| &f(0) + &f(1);

    let (ch, alpha) = m.time_translation();
    let h = noether(&ch, &alpha, &el.gamma);
    let energy = sum(&|j| &(&s(j) * &s(j)) + &(&t(j) * &t(j))).scale(&(q(-1) / q(2)));
    assert_eq!(h.coefficient(&[FormVar::DSigma]), energy);
    assert_eq!(h.coefficient(&[FormVar::DTau]), -&sum(&|j| &s(j) * &t(j)));
    shell.check_conserved(&h).unwrap();

    for f in profiles() {
        let (ch, alpha) = m.xi_minus(&f);
        let fm = noether(&ch, &alpha, &el.gamma);
        let want = (&m.profile(&f, -1) * &sum(&|j| (&s(j) - &t(j)).pow(2))).scale(&(q(1) / q(4)));
        assert_eq!(fm.coefficient(&[FormVar::DSigma]), want);
        shell.check_conserved(&fm).unwrap();

        let (ch, alpha) = m.xi_plus(&f);
        let fp = noether(&ch, &alpha, &el.gamma);
        let want = (&m.profile(&f, 1) * &sum(&|j| (&s(j) + &t(j)).pow(2))).scale(&(q(-1) / q(4)));
        assert_eq!(fp.coefficient(&[FormVar::DSigma]), want);
        shell.check_conserved(&fp).unwrap();
    }

    assert!(noether(&Characteristic::zero(), &JetForm::zero(&sig), &el.gamma).is_zero());

    // a non-conserved current leaves a residue
    let bogus = JetForm::dsigma(&sig).mul_function(&t(0));
    assert!(matches!(shell.check_conserved(&bogus), Err(pvcalc::Error::Reduction(_))));
}

#[test]
fn legendre_maps_currents_to_virasoro_generators() {
    let m = SigmaModel::flat(2).unwrap();
    let el = euler_lagrange(&m.lagrangian).unwrap();
    let lg = legendre(&m.lagrangian).unwrap();
    let tp = &lg.target;
    let tsig = tp.signature().clone();
    let x = |i: usize| tp.element(&format!("x{}", i + 1)).unwrap();
    let p = |i: usize| tp.element(&format!("p{}", i + 1)).unwrap();
    let sum = |f: &dyn Fn(usize) -> Element| &f(0) + &f(1);
    let quarter = q(1) / q(4);
    let l_plus = &sum(&|i| &(&p(i) * &p(i)) + &(&x(i).t() * &x(i).t())).scale(&quarter)
        - &sum(&|i| &p(i) * &x(i).t()).scale(&(q(1) / q(2)));
    let l_minus = &sum(&|i| &(&p(i) * &p(i)) + &(&x(i).t() * &x(i).t())).scale(&-quarter.clone())
        - &sum(&|i| &p(i) * &x(i).t()).scale(&(q(1) / q(2)));
    let l_zero = -&sum(&|i| &p(i) * &x(i).t());
    assert_eq!(&l_plus + &l_minus, l_zero);

    // momenta are +∂_τx at the identity metric
    let sig = m.signature().clone();
    assert_eq!(lg.momentum(0), jet(&sig, 0, 1, 0));

    let (ch, alpha) = m.xi_minus(&[q(1)]);
    let fm = lg.push(&noether(&ch, &alpha, &el.gamma)).unwrap();
    assert_eq!(fm, l_plus);
    let (ch, alpha) = m.xi_plus(&[q(1)]);
    let fp = lg.push(&noether(&ch, &alpha, &el.gamma)).unwrap();
    assert_eq!(fp, l_minus);

    // with a profile: f(σ) times the generator
    let f = vec![q(1), q(2), q(-1)];
    let (ch, alpha) = m.xi_minus(&f);
    let sigma = Element::base(&tsig, "sigma").unwrap();
    let prof = &(&Element::one(&tsig) + &sigma.scale(&q(2))) - &(&sigma * &sigma);
    assert_eq!(lg.push(&noether(&ch, &alpha, &el.gamma)).unwrap(), &prof * &l_plus);

    // the two chiral families commute
    assert!(tp.lambda_bracket(&fm, &fp).unwrap().is_zero());
    assert!(tp.lambda_bracket(&fp, &fm).unwrap().is_zero());
}

#[test]
fn legendre_errors_and_trivial_case() {
    let l = free_particle().unwrap();
    let lg = legendre(&l).unwrap();
    assert_eq!(lg.metric, vec![vec![q(1)]]);
    let p = lg.target.element("p").unwrap();
    assert_eq!(lg.velocity(0).unwrap(), p);

    let sig = field_signature(1).unwrap();
    let degenerate = Lagrangian::new(jet(&sig, 0, 0, 1).pow(2), Orientation::TauSigma).unwrap();
    assert!(matches!(legendre(&degenerate), Err(pvcalc::Error::NonInvertibleFiberMetric)));
    let x = jet(&sig, 0, 0, 0);
    let t = jet(&sig, 0, 1, 0);
    let curved = Lagrangian::new(&(&x * &t) * &t, Orientation::TauSigma).unwrap();
    assert!(matches!(legendre(&curved), Err(pvcalc::Error::NonInvertibleFiberMetric)));
}

/// `{L_f, L_g} ≡ (fg′ − f′g) L` on classes, for the pushed chiral generators.
#[test]
fn chiral_currents_close_on_classes() {
    let m = SigmaModel::flat(1).unwrap();
    let el = euler_lagrange(&m.lagrangian).unwrap();
    let lg = legendre(&m.lagrangian).unwrap();
    let tp = &lg.target;
    let tsig = tp.signature().clone();
    let sigma = Element::base(&tsig, "sigma").unwrap();
    let poly = |c: &[Q]| {
        let mut out = Element::zero(&tsig);
        for a in c.iter().rev() {
            out = &(&out * &sigma) + &Element::constant(&tsig, a.clone());
        }
        out
    };
    let fams: [(i64, &dyn Fn(&[Q]) -> _); 2] = [(-1, &|f: &[Q]| m.xi_minus(f)), (1, &|f: &[Q]| m.xi_plus(f))];
    for (_, family) in fams {
        let gen = |f: &[Q]| {
            let (ch, alpha) = family(f);
            lg.push(&noether(&ch, &alpha, &el.gamma)).unwrap()
        };
        let base = gen(&[q(1)]);
        let fs: Vec<Vec<Q>> = vec![vec![q(1)], vec![q(0), q(1)], vec![q(0), q(0), q(1)], vec![q(2), q(-1), q(1)]];
        for f in &fs {
            for g in &fs {
                let (pf, pg) = (poly(f), poly(g));
                let wr = &(&pf * &tp.xi(&pg)) - &(&tp.xi(&pf) * &pg);
                let lhs = tp.lie_bracket(&LieClass::new(gen(f)), &LieClass::new(gen(g))).unwrap();
                let rhs = LieClass::new(&wr * &base);
                assert!(tp.class_eq(&lhs, &rhs).unwrap(), "f={f:?} g={g:?}: {}", lhs.rep);
            }
        }
    }
}
