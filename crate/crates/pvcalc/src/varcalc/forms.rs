use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::diffpoly::{var_name, Element, Jet, Signature, Var};
use crate::rational::{q, to_short, Q};

/// A one-form factor: a vertical differential `δx^j_(a,b)` or `dτ`, `dσ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FormVar {
    Delta(Jet),
    DTau,
    DSigma,
}

impl FormVar {
    pub fn is_horizontal(&self) -> bool {
        !matches!(self, FormVar::Delta(_))
    }
}

/// Total derivative in τ, including explicit dependence on a base
/// variable named `tau`.
pub fn d_tau(e: &Element) -> Element {
    let mut out = e.tau_derivative();
    if let Some(b) = e.signature().base_index("tau") {
        out = &out + &e.partial(&Var::Base(b as u16));
    }
    out
}

/// Total derivative in σ, including explicit dependence on `sigma`.
pub fn d_sigma(e: &Element) -> Element {
    let mut out = e.total_derivative();
    if let Some(b) = e.signature().base_index("sigma") {
        out = &out + &e.partial(&Var::Base(b as u16));
    }
    out
}

/// Sorts one-form factors, returning the sign, or `None` on a repeat.
fn sort_factors(v: &mut [FormVar]) -> Option<bool> {
    let mut neg = false;
    for i in 0..v.len() {
        for j in 0..v.len().saturating_sub(1 + i) {
            match v[j].cmp(&v[j + 1]) {
                std::cmp::Ordering::Greater => {
                    v.swap(j, j + 1);
                    neg = !neg;
                }
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(neg)
}

/// An element of the variational bicomplex on the 2D jet space: wedge
/// monomials in `δx`, `dτ`, `dσ` with (even) Element coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct JetForm {
    sig: Arc<Signature>,
    terms: BTreeMap<Vec<FormVar>, Element>,
}

impl JetForm {
    pub fn zero(sig: &Arc<Signature>) -> Self {
        JetForm { sig: sig.clone(), terms: BTreeMap::new() }
    }

    pub fn function(e: &Element) -> Self {
        let mut f = JetForm::zero(e.signature());
        f.add_term(vec![], e);
        f
    }

    pub fn factor(sig: &Arc<Signature>, v: FormVar) -> Self {
        let mut f = JetForm::zero(sig);
        f.add_term(vec![v], &Element::one(sig));
        f
    }

    pub fn dtau(sig: &Arc<Signature>) -> Self {
        JetForm::factor(sig, FormVar::DTau)
    }

    pub fn dsigma(sig: &Arc<Signature>) -> Self {
        JetForm::factor(sig, FormVar::DSigma)
    }

    pub fn delta_jet(sig: &Arc<Signature>, j: Jet) -> Self {
        JetForm::factor(sig, FormVar::Delta(j))
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<FormVar>, &Element)> {
        self.terms.iter()
    }

    /// Coefficient of an (unsorted) wedge monomial.
    pub fn coefficient(&self, factors: &[FormVar]) -> Element {
        let mut v = factors.to_vec();
        match sort_factors(&mut v) {
            None => Element::zero(&self.sig),
            Some(neg) => {
                let c = self.terms.get(&v).cloned().unwrap_or_else(|| Element::zero(&self.sig));
                if neg {
                    -&c
                } else {
                    c
                }
            }
        }
    }

    pub fn add_term(&mut self, mut factors: Vec<FormVar>, c: &Element) {
        if c.is_zero() {
            return;
        }
        let Some(neg) = sort_factors(&mut factors) else { return };
        let c = if neg { -c } else { c.clone() };
        let entry = self.terms.entry(factors.clone()).or_insert_with(|| Element::zero(&self.sig));
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&factors);
        }
    }

    pub fn add(&self, other: &JetForm) -> JetForm {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &JetForm) -> JetForm {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, c: &Q) -> JetForm {
        self.map_coefficients(|e| e.scale(c))
    }

    pub fn neg(&self) -> JetForm {
        self.scale(&q(-1))
    }

    pub fn mul_function(&self, f: &Element) -> JetForm {
        self.map_coefficients(|e| f * e)
    }

    pub fn map_coefficients(&self, f: impl Fn(&Element) -> Element) -> JetForm {
        let mut out = JetForm::zero(&self.sig);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &f(c));
        }
        out
    }

    pub fn wedge(&self, other: &JetForm) -> JetForm {
        let mut out = JetForm::zero(&self.sig);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut k = ka.clone();
                k.extend(kb.iter().copied());
                out.add_term(k, &(ca * cb));
            }
        }
        out
    }

    /// `(horizontal, vertical)` degree if homogeneous.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(|k| {
            let h = k.iter().filter(|v| v.is_horizontal()).count();
            (h, k.len() - h)
        });
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Applies the odd derivation given by its value on coefficients (a form
    /// placed on the left) and on one-form factors.
    pub fn derive_odd(
        &self,
        on_coeff: &dyn Fn(&Element) -> JetForm,
        on_factor: &dyn Fn(&FormVar) -> JetForm,
    ) -> JetForm {
        let mut out = JetForm::zero(&self.sig);
        for (k, c) in &self.terms {
            let mut rest = JetForm::zero(&self.sig);
            rest.add_term(k.clone(), &Element::one(&self.sig));
            out = out.add(&on_coeff(c).wedge(&rest));
            for i in 0..k.len() {
                let d = on_factor(&k[i]);
                if d.is_zero() {
                    continue;
                }
                let mut left = JetForm::zero(&self.sig);
                left.add_term(k[..i].to_vec(), c);
                let mut right = JetForm::zero(&self.sig);
                right.add_term(k[i + 1..].to_vec(), &Element::one(&self.sig));
                let term = left.wedge(&d).wedge(&right);
                out = if i % 2 == 1 { out.sub(&term) } else { out.add(&term) };
            }
        }
        out
    }

    /// The horizontal differential.
    pub fn d_rho(&self) -> JetForm {
        let sig = self.sig.clone();
        self.derive_odd(
            &|c| {
                let mut f = JetForm::zero(&sig);
                f.add_term(vec![FormVar::DTau], &d_tau(c));
                f.add_term(vec![FormVar::DSigma], &d_sigma(c));
                f
            },
            &|v| match v {
                FormVar::Delta(j) => {
                    let mut f = JetForm::zero(&sig);
                    let one = Element::one(&sig);
                    f.add_term(vec![FormVar::Delta(j.raise_tau()), FormVar::DTau], &-&one);
                    f.add_term(vec![FormVar::Delta(j.raise()), FormVar::DSigma], &-&one);
                    f
                }
                _ => JetForm::zero(&sig),
            },
        )
    }

    /// The vertical differential.
    pub fn delta(&self) -> JetForm {
        let sig = self.sig.clone();
        self.derive_odd(
            &|c| {
                let mut f = JetForm::zero(&sig);
                for j in c.dependency_jets() {
                    f.add_term(vec![FormVar::Delta(j)], &c.partial(&Var::Jet(j)));
                }
                f
            },
            &|_| JetForm::zero(&sig),
        )
    }

    /// Contraction with the evolutionary field of a characteristic.
    pub fn iota(&self, ch: &Characteristic) -> JetForm {
        let sig = self.sig.clone();
        self.derive_odd(&|_| JetForm::zero(&sig), &|v| match v {
            FormVar::Delta(j) => JetForm::function(&ch.prolongation(&sig, *j)),
            _ => JetForm::zero(&sig),
        })
    }

    /// `Lie_ξ = ι_ξ δ + δ ι_ξ`.
    pub fn lie(&self, ch: &Characteristic) -> JetForm {
        self.delta().iota(ch).add(&self.iota(ch).delta())
    }
}

/// Characteristic `F^j` of an evolutionary vector field.
#[derive(Clone, Debug)]
pub struct Characteristic {
    pub components: Vec<(usize, Element)>,
}

impl Characteristic {
    pub fn new(components: Vec<(usize, Element)>) -> Self {
        Characteristic { components }
    }

    pub fn zero() -> Self {
        Characteristic { components: Vec::new() }
    }

    /// `D_τ^a D_σ^b F^j` for the jet `x^j_(a,b)`.
    pub fn prolongation(&self, sig: &Arc<Signature>, j: Jet) -> Element {
        let Some((_, f)) = self.components.iter().find(|(g, _)| *g == j.gen as usize) else {
            return Element::zero(sig);
        };
        let mut e = f.clone();
        for _ in 0..j.tau {
            e = d_tau(&e);
        }
        for _ in 0..j.order {
            e = d_sigma(&e);
        }
        e
    }

    /// The prolonged field acting on functions.
    pub fn apply(&self, e: &Element) -> Element {
        let sig = e.signature().clone();
        e.derive_even(&|v| match v {
            Var::Jet(j) => {
                let p = self.prolongation(&sig, *j);
                if p.is_zero() {
                    None
                } else {
                    Some(p)
                }
            }
            _ => None,
        })
    }
}

impl fmt::Display for JetForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let names: Vec<String> = k
                .iter()
                .map(|v| match v {
                    FormVar::Delta(j) => format!("delta({})", var_name(&self.sig, &Var::Jet(*j))),
                    FormVar::DTau => "dtau".into(),
                    FormVar::DSigma => "dsigma".into(),
                })
                .collect();
            let coeff = match c.as_constant() {
                Some(v) if !v.is_zero() => to_short(&v),
                _ => format!("({c})"),
            };
            if names.is_empty() {
                write!(f, "{coeff}")?;
            } else {
                write!(f, "{coeff}*{}", names.join("^"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for JetForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
