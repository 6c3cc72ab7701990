use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::diffpoly::{same_sig, Element, Signature};
use crate::rational::{binomial, q, Q};
use crate::{Error, Result};

/// A polynomial in the formal variables λ and μ with Element coefficients,
/// keyed by (λ-degree, μ-degree). Zero coefficients are never stored.
#[derive(Clone)]
pub struct LambdaPolynomial {
    sig: Arc<Signature>,
    coeffs: BTreeMap<(u32, u32), Element>,
}

impl PartialEq for LambdaPolynomial {
    fn eq(&self, other: &Self) -> bool {
        same_sig(&self.sig, &other.sig) && self.coeffs == other.coeffs
    }
}

impl Eq for LambdaPolynomial {}

impl LambdaPolynomial {
    pub fn zero(sig: &Arc<Signature>) -> Self {
        LambdaPolynomial { sig: sig.clone(), coeffs: BTreeMap::new() }
    }

    /// `e·λⁿ`.
    pub fn monomial(e: Element, n: u32) -> Self {
        let mut p = LambdaPolynomial::zero(e.signature());
        p.add_term((n, 0), &e);
        p
    }

    pub fn constant(e: Element) -> Self {
        LambdaPolynomial::monomial(e, 0)
    }

    /// Builds `Σ cₙ λⁿ` from a list of coefficients.
    pub fn from_coefficients(sig: &Arc<Signature>, cs: impl IntoIterator<Item = (u32, Element)>) -> Self {
        let mut p = LambdaPolynomial::zero(sig);
        for (n, c) in cs {
            p.add_term((n, 0), &c);
        }
        p
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Element)> {
        self.coeffs.iter()
    }

    /// Coefficient of λⁿ (μ-degree 0).
    pub fn coeff(&self, n: u32) -> Element {
        self.coeff2(n, 0)
    }

    pub fn coeff2(&self, n: u32, m: u32) -> Element {
        self.coeffs.get(&(n, m)).cloned().unwrap_or_else(|| Element::zero(&self.sig))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|(n, _)| *n).max()
    }

    pub fn add_term(&mut self, key: (u32, u32), e: &Element) {
        if e.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(key).or_insert_with(|| Element::zero(&self.sig));
        *entry = &*entry + e;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add_assign(&mut self, other: &LambdaPolynomial) {
        for (k, e) in &other.coeffs {
            self.add_term(*k, e);
        }
    }

    pub fn add(&self, other: &LambdaPolynomial) -> LambdaPolynomial {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &LambdaPolynomial) -> LambdaPolynomial {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, c: &Q) -> LambdaPolynomial {
        if c.is_zero() {
            return LambdaPolynomial::zero(&self.sig);
        }
        LambdaPolynomial {
            sig: self.sig.clone(),
            coeffs: self.coeffs.iter().map(|(k, e)| (*k, e.scale(c))).collect(),
        }
    }

    pub fn neg(&self) -> LambdaPolynomial {
        self.scale(&q(-1))
    }

    /// Applies `f` to every coefficient.
    pub fn map(&self, f: impl Fn(&Element) -> Element) -> LambdaPolynomial {
        let mut out = LambdaPolynomial::zero(&self.sig);
        for (k, e) in &self.coeffs {
            out.add_term(*k, &f(e));
        }
        out
    }

    /// Right multiplication of every coefficient by `e`.
    pub fn mul_right(&self, e: &Element) -> LambdaPolynomial {
        self.map(|c| c * e)
    }

    pub fn mul_left(&self, e: &Element) -> LambdaPolynomial {
        self.map(|c| e * c)
    }

    /// Multiplication by λᵏ.
    pub fn shift(&self, k: u32) -> LambdaPolynomial {
        LambdaPolynomial {
            sig: self.sig.clone(),
            coeffs: self.coeffs.iter().map(|((n, m), e)| ((n + k, *m), e.clone())).collect(),
        }
    }

    /// `(λ + D)ⁿ` applied coefficient-wise, with `D` an even derivation.
    pub fn lambda_plus_d_pow(&self, n: u32, d: &dyn Fn(&Element) -> Element) -> LambdaPolynomial {
        let mut out = LambdaPolynomial::zero(&self.sig);
        let mut cur = self.clone();
        for j in 0..=n {
            // C(n,j) λ^{n-j} D^j
            out.add_assign(&cur.shift(n - j).scale(&binomial(n, j)));
            if j < n {
                cur = cur.map(d);
            }
        }
        out
    }

    /// Substitutes `λ ↦ −λ − D` where `D` acts on the coefficients:
    /// `Σ cₙλⁿ ↦ Σₙ Σₖ C(n,k)(−1)ⁿ λⁿ⁻ᵏ Dᵏcₙ`.
    pub fn reflect(&self, d: &dyn Fn(&Element) -> Element) -> LambdaPolynomial {
        let mut out = LambdaPolynomial::zero(&self.sig);
        for ((n, m), c) in &self.coeffs {
            let sign = if n % 2 == 0 { Q::one() } else { -Q::one() };
            let mut dc = c.clone();
            for k in 0..=*n {
                out.add_term((n - k, *m), &dc.scale(&(&binomial(*n, k) * &sign)));
                if k < *n {
                    dc = d(&dc);
                }
            }
        }
        out
    }

    /// `∂_λ^i / i!`.
    pub fn divided_lambda_derivative(&self, i: u32) -> LambdaPolynomial {
        let mut out = LambdaPolynomial::zero(&self.sig);
        for ((n, m), c) in &self.coeffs {
            if *n >= i {
                out.add_term((n - i, *m), &c.scale(&binomial(*n, i)));
            }
        }
        out
    }

    /// Reinterprets coefficients over another signature by name.
    pub fn transport(&self, target: &Arc<Signature>) -> Result<LambdaPolynomial> {
        let mut out = LambdaPolynomial::zero(target);
        for (k, e) in &self.coeffs {
            out.add_term(*k, &e.transport(target)?);
        }
        Ok(out)
    }

    pub fn check_sig(&self, sig: &Arc<Signature>) -> Result<()> {
        if same_sig(&self.sig, sig) {
            Ok(())
        } else {
            Err(Error::SignatureMismatch)
        }
    }
}

fn lambda_factor(n: u32, m: u32) -> String {
    let mut parts = Vec::new();
    match n {
        0 => {}
        1 => parts.push("lam".to_string()),
        _ => parts.push(format!("lam^{n}")),
    }
    match m {
        0 => {}
        1 => parts.push("mu".to_string()),
        _ => parts.push(format!("mu^{m}")),
    }
    parts.join("*")
}

impl fmt::Display for LambdaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((n, m), c) in self.coeffs.iter().rev() {
            let lam = lambda_factor(*n, *m);
            let body = c.to_string();
            let mut text = if lam.is_empty() {
                body
            } else if c.len() > 1 {
                format!("({body})*{lam}")
            } else if let Some(v) = c.as_constant() {
                if v.is_one() {
                    lam
                } else if v == -Q::one() {
                    format!("-{lam}")
                } else {
                    format!("{body}*{lam}")
                }
            } else {
                format!("{body}*{lam}")
            };
            if !first {
                if let Some(rest) = text.strip_prefix('-') {
                    text = format!(" - {rest}");
                } else {
                    text = format!(" + {text}");
                }
            }
            first = false;
            write!(f, "{text}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LambdaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
