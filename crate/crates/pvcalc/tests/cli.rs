mod common;

use common::*;
use pvcalc::cli::{parse, parse_element, parse_value, Value, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use pvcalc::diffpoly::Element;
use pvcalc::geometry::canonical_svdo;
use pvcalc::pva::LambdaPolynomial;
use pvcalc::rational::q;
use pvcalc::Error;

#[test]
fn parse_examples() {
    let p = canonical_svdo(1).unwrap();
    let sig = p.signature().clone();
    let x = p.element("x").unwrap();
    let pp = p.element("p").unwrap();
    assert_eq!(parse_element(&sig, "T(x*x)").unwrap(), (&x * &x.t()).scale(&q(2)));
    assert_eq!(parse_element(&sig, "x'(2) - T(T(x))").unwrap(), Element::zero(&sig));
    let b = parse_value(&sig, Some(&p), "bracket(p, x*T(x))").unwrap();
    let want = LambdaPolynomial::monomial(x.clone(), 1).add(&LambdaPolynomial::constant(x.t()));
    assert_eq!(b, Value::Lam(want.clone()));
    assert_eq!(b.to_string(), "x*lam + x'");
    assert_eq!(parse_value(&sig, Some(&p), &b.to_string()).unwrap(), b);
    assert_eq!(parse_value(&sig, Some(&p), "bracket(p, x)").unwrap(), Value::Lam(LambdaPolynomial::constant(Element::one(&sig))));
    assert_eq!(parse_element(&sig, "3/2*p - -p").unwrap(), pp.scale(&(q(5) / q(2))));
}

#[test]
fn odd_squares_are_rejected() {
    let sig = rich_signature();
    for text in ["phi*phi", "psi^2", "(phi + x*psi)^3"] {
        let e = parse_element(&sig, text);
        if text == "phi*phi" {
            // the product itself is legal and vanishes
            assert!(e.unwrap().is_zero());
        } else {
            assert!(matches!(e, Err(Error::Parse { .. })), "{text}");
        }
    }
    assert!(parse_element(&sig, "phi^1").is_ok());
    assert!(parse_element(&sig, "x^-1").is_err());
}

#[test]
fn round_trip_on_random_values() {
    round_trip(100, 20).unwrap();
    round_trip(100, 21).unwrap();
}

#[test]
fn syntax_errors_carry_positions() {
    let e = parse("gen x even 0\nlet y = x +* 2").unwrap_err();
    assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    let e = parse("gen x even 0\n\n  check (x == x").unwrap_err();
    assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    let sig = rich_signature();
    match parse_element(&sig, "x + nope").unwrap_err() {
        Error::Parse { line, column, .. } => assert_eq!((line, column), (1, 5)),
        e => panic!("{e}"),
    }
}

#[test]
fn exit_codes() {
    let (code, out, _) = run_script_file("broken_table.pv");
    assert_eq!(code, EXIT_FAIL, "{out}");
    assert!(out.contains("FAIL"));
    let (code, out, err) = run_script_file("c01_axioms.pv");
    assert_eq!(code, EXIT_PASS, "{out}{err}");
    assert_eq!(run_cli(&["no-such-command"]).0, EXIT_USAGE);
    assert_eq!(run_cli(&["eval", "--preset", "canonical:1", "x +"]).0, EXIT_USAGE);
    let (code, out, _) = run_cli(&["eval", "--preset", "canonical:1", "bracket(p, x*T(x))"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out.trim(), "x*lam + x'");
}

#[test]
fn script_failures_are_counted() {
    let dir = std::env::temp_dir().join(format!("pvcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.pv");
    std::fs::write(&bad, "preset canonical:1\ncheck bracket(p, x) == 2\n").unwrap();
    assert_eq!(run_cli(&["run", bad.to_str().unwrap()]).0, EXIT_FAIL);
    std::fs::write(&bad, "preset canonical:1\ncheck bracket(p, x) != 2\ncheck bracket(p, x) == 1\n").unwrap();
    let (code, out, err) = run_cli(&["run", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS, "{out}{err}");
    std::fs::write(&bad, "preset canonical:1\nlet y = x +\n").unwrap();
    let (code, _, err) = run_cli(&["run", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("2:"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}
