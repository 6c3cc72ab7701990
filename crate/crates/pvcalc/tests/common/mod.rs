//! Helpers shared by the CLI and acceptance tests.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use pvcalc::cli::{main_with, parse_value, Value};
use pvcalc::diffpoly::{Element, Parity, Signature};
use pvcalc::pva::LambdaPolynomial;
use pvcalc::random::{random_element, rng, Shape};
use pvcalc::varcalc::field_signature;
use rand::Rng;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn script(name: &str) -> PathBuf {
    crate_dir().join("scripts").join(name)
}

/// Runs the command line in-process; returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["pvcalc".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn run_script_file(name: &str) -> (i32, String, String) {
    let fixtures = crate_dir().join("fixtures");
    let path = script(name);
    run_cli(&["--fixtures", fixtures.to_str().unwrap(), "run", path.to_str().unwrap()])
}

/// Even/odd generators, a Laurent generator, a base variable and parameters.
pub fn rich_signature() -> Arc<Signature> {
    Signature::builder()
        .invertible("x")
        .even("p", 1)
        .odd("phi", 0)
        .odd("psi", 1)
        .even("J", 1)
        .base("sigma")
        .parameter("t", Parity::Even, 3)
        .parameter("eps", Parity::Odd, 2)
        .build()
        .unwrap()
}

/// A random element or λ-polynomial over one of two signatures.
pub fn random_value(r: &mut rand_chacha::ChaCha8Rng) -> (Arc<Signature>, Value) {
    let shape = Shape::new(3, 3, 3).with_constants();
    if r.gen_bool(0.2) {
        let sig = field_signature(2).unwrap();
        let mut e = random_element(&sig, r, &shape);
        for _ in 0..r.gen_range(0..=2) {
            e = e.tau_derivative();
        }
        let tau = Element::base(&sig, "tau").unwrap();
        if r.gen_bool(0.3) {
            e = &e * &tau;
        }
        return (sig, Value::Elem(e));
    }
    let sig = rich_signature();
    let decorate = |mut e: Element, r: &mut rand_chacha::ChaCha8Rng| {
        if r.gen_bool(0.3) {
            e = &e * &Element::inverse_of(&sig, "x").unwrap();
        }
        if r.gen_bool(0.3) {
            e = &e + &(&Element::base(&sig, "sigma").unwrap() * &random_element(&sig, r, &shape));
        }
        if r.gen_bool(0.3) {
            e = &e * &(&Element::one(&sig) + &Element::param(&sig, "t").unwrap());
        }
        if r.gen_bool(0.2) {
            e = &e + &(&Element::param(&sig, "eps").unwrap() * &random_element(&sig, r, &shape));
        }
        e
    };
    if r.gen_bool(0.4) {
        let terms: Vec<(u32, Element)> = (0..r.gen_range(1..=3))
            .map(|_| {
                let e = random_element(&sig, r, &shape);
                (r.gen_range(0..=3), decorate(e, r))
            })
            .collect();
        let mut l = LambdaPolynomial::zero(&sig);
        for (n, e) in terms {
            l = l.add(&LambdaPolynomial::monomial(e, n));
        }
        (sig.clone(), Value::Lam(l))
    } else {
        let e = random_element(&sig, r, &shape);
        let e = decorate(e, r);
        (sig.clone(), Value::Elem(e))
    }
}

/// Prints and reparses `count` random values; returns the first mismatch.
pub fn round_trip(count: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for _ in 0..count {
        let (sig, v) = random_value(&mut r);
        let text = v.to_string();
        let back = parse_value(&sig, None, &text).map_err(|e| format!("`{text}`: {e}"))?;
        let same = match (&v, &back) {
            (Value::Lam(a), Value::Elem(b)) => *a == LambdaPolynomial::constant(b.clone()) || (a.is_zero() && b.is_zero()),
            _ => back == v,
        };
        if !same {
            return Err(format!("`{text}` reparsed as `{back}`"));
        }
    }
    Ok(())
}
