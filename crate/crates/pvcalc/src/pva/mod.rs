//! Poisson vertex superalgebras: bracket tables, λ-brackets and n-products
//! on all elements, axiom checks, the Lie quotient and horizontal twists.

mod axioms;
mod lambda;
mod lie;
mod table;
mod validate;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use lambda::LambdaPolynomial;
pub use lie::LieClass;
pub use table::BracketTable;
pub use validate::{check_jacobi, check_leibniz, check_skew, ValidationReport, Violation};

use crate::diffpoly::{koszul, Element, Jet, Parity, Signature, Var};
use crate::rational::{factorial, q};
use crate::{Error, Result};

pub const DEFAULT_ORDER_CAP: u32 = 12;

/// Horizontal derivation ξ acting on base variables by `ξ(σ) = rate`.
#[derive(Clone, Debug)]
pub struct Twist {
    pub rates: Vec<(usize, Element)>,
}

/// A generator signature with its bracket table, optional horizontal twist
/// and the jet-order cap.
#[derive(Clone, Debug)]
pub struct Pva {
    sig: Arc<Signature>,
    table: BracketTable,
    resolved: Vec<Vec<Option<LambdaPolynomial>>>,
    twist: Option<Twist>,
    order_cap: u32,
}

impl Pva {
    pub fn new(table: BracketTable) -> Result<Pva> {
        let sig = table.signature().clone();
        let n = sig.num_generators();
        let t = |e: &Element| e.total_derivative();
        let mut resolved = vec![vec![None; n]; n];
        for (a, row) in resolved.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = if let Some(p) = table.get(a, b) {
                    Some(p.clone())
                } else if let Some(p) = table.get(b, a) {
                    let s = koszul(sig.generators[a].parity, sig.generators[b].parity);
                    let r = p.reflect(&t);
                    Some(if s { r } else { r.neg() })
                } else if table.zero_default {
                    Some(LambdaPolynomial::zero(&sig))
                } else {
                    None
                };
            }
        }
        Ok(Pva { sig, table, resolved, twist: None, order_cap: DEFAULT_ORDER_CAP })
    }

    /// The abelian PVA on a signature.
    pub fn abelian(sig: &Arc<Signature>) -> Pva {
        Pva::new(BracketTable::new(sig)).expect("empty table")
    }

    pub fn with_order_cap(mut self, cap: u32) -> Pva {
        self.order_cap = cap;
        self
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn table(&self) -> &BracketTable {
        &self.table
    }

    pub fn twist(&self) -> Option<&Twist> {
        self.twist.as_ref()
    }

    pub fn order_cap(&self) -> u32 {
        self.order_cap
    }

    /// Same twist and cap with a replaced table.
    pub fn with_table(&self, table: BracketTable) -> Result<Pva> {
        let mut p = Pva::new(table)?;
        p.twist = self.twist.clone();
        p.order_cap = self.order_cap;
        Ok(p)
    }

    /// Resolved generator bracket `{a_λ b}`.
    pub fn generator_bracket(&self, a: usize, b: usize) -> Result<&LambdaPolynomial> {
        self.resolved[a][b].as_ref().ok_or_else(|| {
            Error::MissingBracket(self.sig.generators[a].name.clone(), self.sig.generators[b].name.clone())
        })
    }

    pub fn element(&self, name: &str) -> Result<Element> {
        Element::gen(&self.sig, name)
    }

    /// The horizontal derivation ξ (zero without a twist).
    pub fn xi(&self, e: &Element) -> Element {
        match &self.twist {
            None => Element::zero(&self.sig),
            Some(tw) => e.derive_even(&|v| match v {
                Var::Base(b) => tw.rates.iter().find(|(i, _)| *i == *b as usize).map(|(_, r)| r.clone()),
                _ => None,
            }),
        }
    }

    /// The algebra derivation: `T`, or `T + ξ` for a twisted PVA.
    pub fn derivation(&self, e: &Element) -> Element {
        let t = e.total_derivative();
        if self.twist.is_some() {
            &t + &self.xi(e)
        } else {
            t
        }
    }

    fn check_input(&self, e: &Element) -> Result<()> {
        if !crate::diffpoly::same_sig(e.signature(), &self.sig) {
            return Err(Error::SignatureMismatch);
        }
        for j in e.jets() {
            if j.tau != 0 {
                return Err(Error::InvalidArgument("τ-jets cannot enter λ-brackets".into()));
            }
            if j.order as u32 > self.order_cap {
                return Err(Error::OrderCap(j.order as u32, self.order_cap));
            }
        }
        Ok(())
    }

    /// `{a_λ b}` (the twisted bracket when a twist is present).
    pub fn lambda_bracket(&self, a: &Element, b: &Element) -> Result<LambdaPolynomial> {
        self.twisted(a, b, &|x, y| self.untwisted_bracket(x, y))
    }

    /// The same bracket computed by step-by-step axiom reductions.
    pub fn lambda_bracket_by_axioms(&self, a: &Element, b: &Element) -> Result<LambdaPolynomial> {
        self.twisted(a, b, &|x, y| {
            self.check_input(x)?;
            self.check_input(y)?;
            axioms::bracket(self, x, y)
        })
    }

    fn twisted(
        &self,
        a: &Element,
        b: &Element,
        base: &dyn Fn(&Element, &Element) -> Result<LambdaPolynomial>,
    ) -> Result<LambdaPolynomial> {
        let mut out = base(a, b)?;
        if self.twist.is_none() {
            return Ok(out);
        }
        let mut xa = self.xi(a);
        let mut i = 1;
        while !xa.is_zero() {
            if i > 64 {
                return Err(Error::InvalidArgument("horizontal twist does not terminate".into()));
            }
            out.add_assign(&base(&xa, b)?.divided_lambda_derivative(i));
            xa = self.xi(&xa);
            i += 1;
        }
        Ok(out)
    }

    /// The untwisted bracket by the closed-form expansion
    /// `{f_λ g} = Σ (λ+T)ⁿ{f_λ w} ∂g/∂w⁽ⁿ⁾`, with `{f_λ w}` obtained by
    /// skew-symmetry from `{w_μ f} = Σ (μ+T)ᵐ{w_μ u} ∂f/∂u⁽ᵐ⁾`.
    pub fn untwisted_bracket(&self, f: &Element, g: &Element) -> Result<LambdaPolynomial> {
        self.check_input(f)?;
        self.check_input(g)?;
        let (fe, fo) = f.parity_parts();
        let mut out = LambdaPolynomial::zero(&self.sig);
        for (part, par) in [(fe, Parity::Even), (fo, Parity::Odd)] {
            if part.is_zero() {
                continue;
            }
            out.add_assign(&self.homogeneous_bracket(&part, par, g)?);
        }
        Ok(out)
    }

    fn homogeneous_bracket(&self, f: &Element, fpar: Parity, g: &Element) -> Result<LambdaPolynomial> {
        let t = |e: &Element| e.total_derivative();
        let mut cache: BTreeMap<usize, LambdaPolynomial> = BTreeMap::new();
        let mut out = LambdaPolynomial::zero(&self.sig);
        for v in g.dependency_jets() {
            let dg = g.partial(&Var::Jet(v));
            if dg.is_zero() {
                continue;
            }
            let w = v.gen as usize;
            if !cache.contains_key(&w) {
                let fw = self.bracket_with_generator(f, fpar, w)?;
                cache.insert(w, fw);
            }
            let fw = &cache[&w];
            if fw.is_zero() {
                continue;
            }
            out.add_assign(&fw.lambda_plus_d_pow(v.order as u32, &t).mul_right(&dg));
        }
        Ok(out)
    }

    /// `{f_λ w}` for a generator `w` and parity-homogeneous `f`.
    fn bracket_with_generator(&self, f: &Element, fpar: Parity, w: usize) -> Result<LambdaPolynomial> {
        let t = |e: &Element| e.total_derivative();
        let mut wf = LambdaPolynomial::zero(&self.sig);
        for u in f.dependency_jets() {
            let df = f.partial(&Var::Jet(u));
            if df.is_zero() {
                continue;
            }
            let tab = self.generator_bracket(w, u.gen as usize)?;
            if tab.is_zero() {
                continue;
            }
            wf.add_assign(&tab.lambda_plus_d_pow(u.order as u32, &t).mul_right(&df));
        }
        let r = wf.reflect(&t);
        Ok(if koszul(fpar, self.sig.generators[w].parity) { r } else { r.neg() })
    }

    /// `a_(n)b`: the product for `n = −1`, else `n!` times the λⁿ coefficient.
    pub fn nth_product(&self, a: &Element, b: &Element, n: i64) -> Result<Element> {
        if n == -1 {
            return a.try_mul(b);
        }
        if n < -1 {
            return Err(Error::UnsupportedProduct(n));
        }
        let br = self.lambda_bracket(a, b)?;
        Ok(br.coeff(n as u32).scale(&factorial(n as u32)))
    }

    /// All products `a_(n)b` for `n ≥ 0` as a vector indexed by `n`.
    pub fn products(&self, a: &Element, b: &Element) -> Result<Vec<Element>> {
        let br = self.lambda_bracket(a, b)?;
        let d = br.degree().unwrap_or(0);
        Ok((0..=d).map(|n| br.coeff(n).scale(&factorial(n))).collect())
    }

    /// The ξ-twist by `ξ(σ) = rate` for the listed base variables.
    pub fn xi_twist(&self, rates: &[(&str, Element)]) -> Result<Pva> {
        let mut out = self.clone();
        let mut list = Vec::new();
        for (name, rate) in rates {
            let b = self.sig.base_index(name).ok_or_else(|| Error::UnknownIdentifier((*name).into()))?;
            rate.check_sig(&Element::zero(&self.sig))?;
            if !rate.jets().is_empty() {
                return Err(Error::InvalidArgument("twist rates must be free of jets".into()));
            }
            if !rate.is_zero() {
                list.push((b, rate.clone()));
            }
        }
        out.twist = if list.is_empty() { None } else { Some(Twist { rates: list }) };
        Ok(out)
    }

    /// Adjoins the base variable `sigma` to the coefficient ring and twists
    /// by `∂/∂σ`.
    pub fn adjoin_functions(&self) -> Result<Pva> {
        self.adjoin_base("sigma")
    }

    pub fn adjoin_base(&self, name: &str) -> Result<Pva> {
        let sig = Arc::new(self.sig.with_base_variable(name)?);
        let table = self.table.transport(&sig)?;
        let mut p = Pva::new(table)?;
        p.order_cap = self.order_cap;
        if let Some(tw) = &self.twist {
            let mut rates = Vec::new();
            for (b, r) in &tw.rates {
                let bn = &self.sig.base_variables[*b];
                rates.push((sig.base_index(bn).unwrap(), r.transport(&sig)?));
            }
            p.twist = Some(Twist { rates });
        }
        let one = Element::one(&sig);
        let b = sig.base_index(name).unwrap();
        let mut rates = p.twist.take().map(|t| t.rates).unwrap_or_default();
        rates.retain(|(i, _)| *i != b);
        rates.push((b, one));
        p.twist = Some(Twist { rates });
        Ok(p)
    }

    /// Moves an element of the source signature into this PVA by name.
    pub fn import(&self, e: &Element) -> Result<Element> {
        e.transport(&self.sig)
    }

    pub fn jet(&self, name: &str, order: u32) -> Result<Element> {
        let g = self.sig.generator_index(name).ok_or_else(|| Error::UnknownIdentifier(name.into()))?;
        Ok(Element::var(&self.sig, Var::Jet(Jet::new(g, order))))
    }

    pub fn int(&self, n: i64) -> Element {
        Element::constant(&self.sig, q(n))
    }
}

