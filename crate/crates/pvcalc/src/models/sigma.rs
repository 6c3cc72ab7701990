use crate::diffpoly::Element;
use crate::geometry::{canonical_svdo, Coords};
use crate::pva::{LambdaPolynomial, Pva};
use crate::rational::{q, Q};
use crate::Result;

use super::wzw::ratio;

/// The σ-model Virasoro generators in `canonical_svdo(n)` at the identity
/// metric.
#[derive(Clone, Debug)]
pub struct SigmaVirasoro {
    pub pva: Pva,
    /// `¼Σ(x_i x_i + Txⁱ Txⁱ) − ½Σ x_j Txʲ`
    pub plus: Element,
    /// `−¼Σ(x_i x_i + Txⁱ Txⁱ) − ½Σ x_j Txʲ`
    pub minus: Element,
    /// `−Σ x_j Txʲ`
    pub zero: Element,
}

pub fn sigma_virasoro(n: usize) -> Result<SigmaVirasoro> {
    let pva = canonical_svdo(n)?;
    let sig = pva.signature().clone();
    let c = Coords::detect(&sig)?;
    let mut quad = Element::zero(&sig);
    let mut mixed = Element::zero(&sig);
    for i in 0..n {
        let x = Element::jet(&sig, c.x[i], 0);
        let p = Element::jet(&sig, c.p[i], 0);
        quad = &quad + &(&(&p * &p) + &(&x.t() * &x.t()));
        mixed = &mixed + &(&p * &x.t());
    }
    let quarter = q(1) / q(4);
    let half = q(1) / q(2);
    let plus = &quad.scale(&quarter) - &mixed.scale(&half);
    let minus = &quad.scale(&-quarter) - &mixed.scale(&half);
    let zero = -&mixed;
    Ok(SigmaVirasoro { pva, plus, minus, zero })
}

/// `{L_λ L} = ν(T + 2λ)L + c λ³`: returns `(ν, c)` when the bracket has
/// this shape.
pub fn virasoro_shape(p: &Pva, l: &Element) -> Result<Option<(Q, Q)>> {
    let b = p.lambda_bracket(l, l)?;
    let Some(nu) = ratio(&b.coeff(1), &l.scale(&q(2))) else { return Ok(None) };
    let rest = b.sub(
        &LambdaPolynomial::constant(p.derivation(l)).add(&LambdaPolynomial::monomial(l.scale(&q(2)), 1)).scale(&nu),
    );
    let c3 = rest.coeff(3);
    match c3.as_constant() {
        Some(c) if rest.sub(&LambdaPolynomial::monomial(c3.clone(), 3)).is_zero() => Ok(Some((nu, c))),
        None if c3.is_zero() && rest.is_zero() => Ok(Some((nu, Q::from_integer(0.into())))),
        _ => Ok(None),
    }
}
