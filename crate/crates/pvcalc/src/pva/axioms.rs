//! λ-brackets by direct application of the axioms: sesquilinearity, the
//! left Leibniz rule, skew-symmetry for composite first arguments, and the
//! generator table.

use num_traits::One;

use super::{LambdaPolynomial, Pva};
use crate::diffpoly::{koszul, Element, Jet, Monomial, Var};
use crate::rational::{q, Q};
use crate::Result;

pub fn bracket(p: &Pva, a: &Element, b: &Element) -> Result<LambdaPolynomial> {
    let sig = p.signature();
    let mut out = LambdaPolynomial::zero(sig);
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let c: Q = ca * cb;
            out.add_assign(&monomials(p, ma, mb)?.scale(&c));
        }
    }
    Ok(out)
}

fn mono(p: &Pva, m: &Monomial) -> Element {
    Element::monomial(p.signature(), m.clone(), Q::one())
}

fn monomials(p: &Pva, a: &Monomial, b: &Monomial) -> Result<LambdaPolynomial> {
    let sig = p.signature();
    let zero = LambdaPolynomial::zero(sig);
    if a.is_one() || b.is_one() {
        return Ok(zero);
    }
    let t = |e: &Element| e.total_derivative();
    let fb = b.factors();
    if fb.len() > 1 {
        // {a_λ h·r} = {a_λ h}r + (−1)^{|a||h|} h{a_λ r}
        let head = Monomial(vec![fb[0]]);
        let rest = Monomial(fb[1..].to_vec());
        let he = mono(p, &head);
        let re = mono(p, &rest);
        let first = monomials(p, a, &head)?.mul_right(&re);
        let second = monomials(p, a, &rest)?.mul_left(&he);
        let sign = koszul(a.parity(sig), head.parity(sig));
        return Ok(first.add(&if sign { second.neg() } else { second }));
    }
    let (v, e) = fb[0];
    if e >= 2 {
        let one = Monomial::var(v, 1);
        let rest = Monomial::var(v, e - 1);
        let first = monomials(p, a, &one)?.mul_right(&mono(p, &rest));
        let second = monomials(p, a, &rest)?.mul_left(&mono(p, &one));
        return Ok(first.add(&second));
    }
    if e < 0 {
        // chain rule for an even unit: {a_λ vᵉ} = e vᵉ⁻¹ {a_λ v}
        let inner = match v {
            Var::Unit(u) => bracket(p, &mono(p, a), &Element::unit_polynomial(sig, u as usize))?,
            _ => monomials(p, a, &Monomial::var(v, 1))?,
        };
        let factor = Element::var_pow(sig, v, e - 1).scale(&q(e as i64));
        return Ok(inner.mul_right(&factor));
    }
    let w = match v {
        Var::Jet(j) if j.order > 0 => {
            let lower = Monomial::var(Var::Jet(Jet { order: j.order - 1, ..j }), 1);
            return Ok(monomials(p, a, &lower)?.lambda_plus_d_pow(1, &t));
        }
        Var::Jet(j) => j.gen as usize,
        _ => return Ok(zero),
    };
    // second argument is a bare generator
    let fa = a.factors();
    if fa.len() == 1 && fa[0].1 == 1 {
        match fa[0].0 {
            Var::Jet(j) if j.order > 0 => {
                let lower = Monomial::var(Var::Jet(Jet { order: j.order - 1, ..j }), 1);
                return Ok(monomials(p, &lower, b)?.shift(1).neg());
            }
            Var::Jet(j) => return Ok(p.generator_bracket(j.gen as usize, w)?.clone()),
            _ => return Ok(zero),
        }
    }
    // composite first argument: skew-symmetry
    let rev = monomials(p, b, a)?.reflect(&t);
    let sign = koszul(a.parity(sig), sig.generators[w].parity);
    Ok(if sign { rev } else { rev.neg() })
}
