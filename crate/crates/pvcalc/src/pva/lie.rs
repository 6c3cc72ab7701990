use std::fmt;

use num_traits::Zero;

use super::Pva;
use crate::diffpoly::Element;
use crate::{Error, Result};

/// An element regarded modulo the image of the algebra derivation.
#[derive(Clone, Debug)]
pub struct LieClass {
    pub rep: Element,
}

impl LieClass {
    pub fn new(rep: Element) -> Self {
        LieClass { rep }
    }
}

impl fmt::Display for LieClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

impl Pva {
    /// Decides whether `e` lies in the image of `T` (or `T + ξ`).
    pub fn is_trivial_class(&self, e: &Element) -> Result<bool> {
        if !e.is_polynomial() {
            return Err(Error::LaurentUnsupported);
        }
        let gens: Vec<usize> = e.max_orders().keys().copied().collect();
        match self.twist() {
            None => {
                if !e.jet_free_part().is_zero() {
                    return Ok(false);
                }
                for g in gens {
                    if !e.variational_derivative(g).is_zero() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Some(tw) => {
                // with constant rates every base-variable polynomial is a
                // (T+ξ)-derivative, so only the Euler conditions remain
                let constant_rates = tw.rates.iter().all(|(_, r)| r.as_constant().is_some_and(|c| !c.is_zero()));
                if !constant_rates {
                    return Err(Error::InvalidArgument(
                        "equality modulo the twisted derivation needs constant nonzero rates".into(),
                    ));
                }
                let d = |x: &Element| self.derivation(x);
                for g in gens {
                    if !e.variational_derivative_with(g, &d).is_zero() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    pub fn class_eq(&self, a: &LieClass, b: &LieClass) -> Result<bool> {
        self.is_trivial_class(&a.rep.try_sub(&b.rep)?)
    }

    pub fn lie_bracket(&self, a: &LieClass, b: &LieClass) -> Result<LieClass> {
        if !a.rep.is_polynomial() || !b.rep.is_polynomial() {
            return Err(Error::LaurentUnsupported);
        }
        Ok(LieClass::new(self.nth_product(&a.rep, &b.rep, 0)?))
    }
}
