use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::monomial::{mul_monomials, Jet, Monomial, Var};
use super::signature::{Parity, Signature};
use crate::rational::{q, Q};
use crate::{Error, Result};

/// A finite exact-rational combination of canonical monomials.
#[derive(Clone)]
pub struct Element {
    sig: Arc<Signature>,
    terms: BTreeMap<Monomial, Q>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        same_sig(&self.sig, &other.sig) && self.terms == other.terms
    }
}

impl Eq for Element {}

pub fn same_sig(a: &Arc<Signature>, b: &Arc<Signature>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn add_term(map: &mut BTreeMap<Monomial, Q>, m: Monomial, c: Q) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl Element {
    pub fn zero(sig: &Arc<Signature>) -> Self {
        Element { sig: sig.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(sig: &Arc<Signature>, c: Q) -> Self {
        let mut e = Element::zero(sig);
        add_term(&mut e.terms, Monomial::one(), c);
        e
    }

    pub fn one(sig: &Arc<Signature>) -> Self {
        Element::constant(sig, Q::one())
    }

    pub fn int(sig: &Arc<Signature>, n: i64) -> Self {
        Element::constant(sig, q(n))
    }

    /// Builds an element from raw (not necessarily normal) terms.
    pub fn from_terms(sig: &Arc<Signature>, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            add_term(&mut map, m, c);
        }
        let mut e = Element { sig: sig.clone(), terms: map };
        e.normalize_units();
        e
    }

    pub fn monomial(sig: &Arc<Signature>, m: Monomial, c: Q) -> Self {
        Element::from_terms(sig, [(m, c)])
    }

    pub fn var(sig: &Arc<Signature>, v: Var) -> Self {
        Element::monomial(sig, Monomial::var(v, 1), Q::one())
    }

    pub fn var_pow(sig: &Arc<Signature>, v: Var, e: i32) -> Self {
        if e >= 2 && v.parity(sig).is_odd() {
            return Element::zero(sig);
        }
        if let Var::Param(p) = v {
            if e >= 0 && e as u32 >= sig.parameters[p as usize].nilpotency {
                return Element::zero(sig);
            }
        }
        Element::monomial(sig, Monomial::var(v, e), Q::one())
    }

    pub fn jet(sig: &Arc<Signature>, gen: usize, order: u32) -> Self {
        Element::var(sig, Var::jet(gen, order))
    }

    pub fn jet2(sig: &Arc<Signature>, gen: usize, tau: u32, order: u32) -> Self {
        Element::var(sig, Var::Jet(Jet::new2(gen, tau, order)))
    }

    pub fn gen(sig: &Arc<Signature>, name: &str) -> Result<Self> {
        let i = sig.generator_index(name).ok_or_else(|| Error::UnknownIdentifier(name.into()))?;
        Ok(Element::jet(sig, i, 0))
    }

    pub fn base(sig: &Arc<Signature>, name: &str) -> Result<Self> {
        let i = sig.base_index(name).ok_or_else(|| Error::UnknownIdentifier(name.into()))?;
        Ok(Element::var(sig, Var::Base(i as u16)))
    }

    pub fn param(sig: &Arc<Signature>, name: &str) -> Result<Self> {
        let i = sig.parameter_index(name).ok_or_else(|| Error::UnknownIdentifier(name.into()))?;
        Ok(Element::var_pow(sig, Var::Param(i as u16), 1))
    }

    /// `x⁻¹` for an invertible generator or `u⁻¹` for a unit.
    pub fn inverse_of(sig: &Arc<Signature>, name: &str) -> Result<Self> {
        if let Some(i) = sig.generator_index(name) {
            if sig.generators[i].invertible {
                return Ok(Element::var_pow(sig, Var::jet(i, 0), -1));
            }
            return Err(Error::InvalidArgument(format!("`{name}` is not invertible")));
        }
        if let Some(u) = sig.unit_index(name) {
            return Ok(Element::var_pow(sig, Var::Unit(u as u16), -1));
        }
        Err(Error::UnknownIdentifier(name.into()))
    }

    /// The defining polynomial of a unit.
    pub fn unit_polynomial(sig: &Arc<Signature>, u: usize) -> Self {
        let spec = &sig.units[u];
        let terms = spec.terms.iter().map(|(m, c)| {
            let f = m.iter().map(|&(g, e)| (Var::jet(g as usize, 0), e as i32)).collect();
            (Monomial(f), c.clone())
        });
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            add_term(&mut map, m, c);
        }
        Element { sig: sig.clone(), terms: map }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Monomial::one())
    }

    /// The rational value if this element is a constant.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// A single variable with coefficient one.
    pub fn as_var(&self) -> Option<Var> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if c.is_one() && m.0.len() == 1 && m.0[0].1 == 1 {
            Some(m.0[0].0)
        } else {
            None
        }
    }

    pub fn check_sig(&self, other: &Element) -> Result<()> {
        if same_sig(&self.sig, &other.sig) {
            Ok(())
        } else {
            Err(Error::SignatureMismatch)
        }
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.check_sig(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_term(&mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element> {
        self.check_sig(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_term(&mut out.terms, m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn add_assign_scaled(&mut self, other: &Element, c: &Q) {
        debug_assert!(same_sig(&self.sig, &other.sig));
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            add_term(&mut self.terms, m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &Q) -> Element {
        if c.is_zero() {
            return Element::zero(&self.sig);
        }
        Element {
            sig: self.sig.clone(),
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Element {
        self.scale(&q(n))
    }

    pub fn try_mul(&self, other: &Element) -> Result<Element> {
        self.check_sig(other)?;
        let mut map = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = mul_monomials(&self.sig, ma, mb) {
                    let c = ca * cb;
                    add_term(&mut map, m, if neg { -c } else { c });
                }
            }
        }
        let mut e = Element { sig: self.sig.clone(), terms: map };
        e.normalize_units();
        Ok(e)
    }

    pub fn pow(&self, n: u32) -> Element {
        let mut acc = Element::one(&self.sig);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn mul_monomial_left(&self, m: &Monomial, c: &Q) -> Element {
        let mut map = BTreeMap::new();
        for (mb, cb) in &self.terms {
            if let Some((p, neg)) = mul_monomials(&self.sig, m, mb) {
                let v = c * cb;
                add_term(&mut map, p, if neg { -v } else { v });
            }
        }
        let mut e = Element { sig: self.sig.clone(), terms: map };
        e.normalize_units();
        e
    }

    // ---------------------------------------------------------------- grading

    /// `Some(parity)` for parity-homogeneous nonzero elements (zero is even).
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.sig));
        let first = match it.next() {
            Some(p) => p,
            None => return Some(Parity::Even),
        };
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn parity_parts(&self) -> (Element, Element) {
        let mut even = Element::zero(&self.sig);
        let mut odd = Element::zero(&self.sig);
        for (m, c) in &self.terms {
            let target = if m.parity(&self.sig).is_odd() { &mut odd } else { &mut even };
            target.terms.insert(m.clone(), c.clone());
        }
        (even, odd)
    }

    pub fn weight_parts(&self) -> BTreeMap<i64, Element> {
        let mut out: BTreeMap<i64, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight(&self.sig))
                .or_insert_with(|| Element::zero(&self.sig))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// `Some(w)` when all monomials have weight `w` (zero has no weight).
    pub fn weight(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.weight(&self.sig));
        let first = it.next()?;
        if it.all(|w| w == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.is_polynomial())
    }

    /// Sum of the terms without jet variables.
    pub fn jet_free_part(&self) -> Element {
        Element {
            sig: self.sig.clone(),
            terms: self.terms.iter().filter(|(m, _)| !m.has_jets()).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Element {
        Element {
            sig: self.sig.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Jets occurring in this element, sorted.
    pub fn jets(&self) -> Vec<Jet> {
        let mut out: Vec<Jet> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().filter_map(|(v, _)| v.as_jet()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Largest σ-order of each generator that occurs (units expanded through
    /// their defining polynomial).
    pub fn max_orders(&self) -> BTreeMap<usize, u32> {
        let mut out: BTreeMap<usize, u32> = BTreeMap::new();
        for m in self.terms.keys() {
            for (v, _) in &m.0 {
                match v {
                    Var::Jet(j) => {
                        let e = out.entry(j.gen as usize).or_insert(0);
                        *e = (*e).max(j.order as u32);
                    }
                    Var::Unit(u) => {
                        for (pm, _) in &self.sig.units[*u as usize].terms {
                            for (g, _) in pm {
                                out.entry(*g as usize).or_insert(0);
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        out
    }

    /// Jets that an element depends on, including the jets hidden inside
    /// unit factors.
    pub fn dependency_jets(&self) -> Vec<Jet> {
        let mut out = self.jets();
        for m in self.terms.keys() {
            for (v, _) in &m.0 {
                if let Var::Unit(u) = v {
                    for (pm, _) in &self.sig.units[*u as usize].terms {
                        for (g, _) in pm {
                            out.push(Jet::new(*g as usize, 0));
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    // ---------------------------------------------------------- unit normal form

    fn normalize_units(&mut self) {
        if self.sig.units.is_empty() {
            return;
        }
        let needs = self.terms.keys().any(|m| self.reducible_unit(m).is_some());
        if !needs {
            return;
        }
        let sig = self.sig.clone();
        let mut work: Vec<(Monomial, Q)> = std::mem::take(&mut self.terms).into_iter().collect();
        let mut out = BTreeMap::new();
        while let Some((m, c)) = work.pop() {
            match self.reducible_unit(&m) {
                None => add_term(&mut out, m, c),
                Some(u) => {
                    let spec = &sig.units[u];
                    let (lead_mono, lead_c) = &spec.terms[spec.lead];
                    // m = u^{-k} * LM * rest
                    let mut rest = m.0.clone();
                    for &(g, e) in lead_mono {
                        let v = Var::jet(g as usize, 0);
                        let pos = rest.iter().position(|(w, _)| *w == v).unwrap();
                        rest[pos].1 -= e as i32;
                        if rest[pos].1 == 0 {
                            rest.remove(pos);
                        }
                    }
                    let upos = rest.iter().position(|(w, _)| *w == Var::Unit(u as u16)).unwrap();
                    let k = rest[upos].1;
                    let rest_mono = Monomial(rest.clone());
                    // u^{-k+1} * rest / c
                    let raised = rest_mono.with_exponent_at(upos, k + 1);
                    work.push((raised, &c / lead_c));
                    for (idx, (pm, pc)) in spec.terms.iter().enumerate() {
                        if idx == spec.lead {
                            continue;
                        }
                        let pmono = Monomial(pm.iter().map(|&(g, e)| (Var::jet(g as usize, 0), e as i32)).collect());
                        if let Some((prod, _)) = mul_monomials(&sig, &rest_mono, &pmono) {
                            work.push((prod, -(&c * pc) / lead_c));
                        }
                    }
                }
            }
        }
        self.terms = out;
    }

    fn reducible_unit(&self, m: &Monomial) -> Option<usize> {
        for (v, e) in &m.0 {
            if let Var::Unit(u) = v {
                if *e < 0 {
                    let spec = &self.sig.units[*u as usize];
                    let lead = &spec.terms[spec.lead].0;
                    let divisible = lead.iter().all(|&(g, le)| m.exponent(&Var::jet(g as usize, 0)) >= le as i32);
                    if divisible {
                        return Some(*u as usize);
                    }
                }
            }
        }
        None
    }

    // ------------------------------------------------------------ derivations

    /// Applies the even derivation determined by its values on variables.
    /// `on_var` returns `None` for variables that are annihilated; units are
    /// handled through their defining polynomials.
    pub fn derive_even(&self, on_var: &dyn Fn(&Var) -> Option<Element>) -> Element {
        let sig = &self.sig;
        let mut unit_images: BTreeMap<u16, Element> = BTreeMap::new();
        let mut acc = Element::zero(sig);
        for (m, c) in &self.terms {
            for (i, (v, e)) in m.0.iter().enumerate() {
                let (image, factor_exp, coeff) = match v {
                    Var::Unit(u) => {
                        let img = unit_images
                            .entry(*u)
                            .or_insert_with(|| Element::unit_polynomial(sig, *u as usize).derive_even(on_var))
                            .clone();
                        (img, *e - 1, q(*e as i64))
                    }
                    _ => match on_var(v) {
                        Some(img) => (img, *e - 1, q(*e as i64)),
                        None => continue,
                    },
                };
                if image.is_zero() {
                    continue;
                }
                let (left, right) = m.split_at(i);
                let mut left = left;
                if factor_exp != 0 {
                    left.0.push((*v, factor_exp));
                }
                let term = image.mul_monomial_left(&left, &(c * &coeff));
                let term = term.mul_monomial_right(&right);
                acc = &acc + &term;
            }
        }
        acc
    }

    pub fn mul_monomial_right(&self, m: &Monomial) -> Element {
        if m.is_one() {
            return self.clone();
        }
        let mut map = BTreeMap::new();
        for (ma, ca) in &self.terms {
            if let Some((p, neg)) = mul_monomials(&self.sig, ma, m) {
                add_term(&mut map, p, if neg { -ca.clone() } else { ca.clone() });
            }
        }
        let mut e = Element { sig: self.sig.clone(), terms: map };
        e.normalize_units();
        e
    }

    /// The total derivative `T`: raises σ-orders, kills base variables and
    /// parameters.
    pub fn total_derivative(&self) -> Element {
        let sig = self.sig.clone();
        self.derive_even(&|v| match v {
            Var::Jet(j) => Some(Element::var(&sig, Var::Jet(j.raise()))),
            _ => None,
        })
    }

    pub fn t(&self) -> Element {
        self.total_derivative()
    }

    pub fn t_pow(&self, k: u32) -> Element {
        let mut e = self.clone();
        for _ in 0..k {
            e = e.total_derivative();
        }
        e
    }

    /// The vertical time derivative: raises τ-orders.
    pub fn tau_derivative(&self) -> Element {
        let sig = self.sig.clone();
        self.derive_even(&|v| match v {
            Var::Jet(j) => Some(Element::var(&sig, Var::Jet(j.raise_tau()))),
            _ => None,
        })
    }

    /// Left super-derivative `∂/∂v` (for a jet, base variable or parameter).
    pub fn partial(&self, v: &Var) -> Element {
        self.partial_impl(v, true)
    }

    /// Right super-derivative.
    pub fn right_partial(&self, v: &Var) -> Element {
        self.partial_impl(v, false)
    }

    fn partial_impl(&self, v: &Var, left: bool) -> Element {
        let sig = &self.sig;
        let odd = v.parity(sig).is_odd();
        let mut map = BTreeMap::new();
        // chain rule through units whose polynomial contains `v`
        let mut unit_derivs: BTreeMap<u16, Element> = BTreeMap::new();
        if let Var::Jet(j) = v {
            let has_units = self.terms.keys().any(|m| m.0.iter().any(|(w, _)| matches!(w, Var::Unit(_))));
            if j.order == 0 && j.tau == 0 && has_units {
                for (ui, _) in sig.units.iter().enumerate() {
                    let d = Element::unit_polynomial(sig, ui).partial(v);
                    if !d.is_zero() {
                        unit_derivs.insert(ui as u16, d);
                    }
                }
            }
        }
        let mut extra = Element::zero(sig);
        for (m, c) in &self.terms {
            if let Ok(i) = m.0.binary_search_by(|(w, _)| w.cmp(v)) {
                let e = m.0[i].1;
                let passes = if left { m.odd_before(i, sig) } else { m.odd_after(i, sig) };
                let neg = odd && passes % 2 == 1;
                let coeff = c * q(e as i64);
                add_term(&mut map, m.with_exponent_at(i, e - 1), if neg { -coeff } else { coeff });
            }
            if !unit_derivs.is_empty() {
                for (i, (w, e)) in m.0.iter().enumerate() {
                    if let Var::Unit(u) = w {
                        if let Some(d) = unit_derivs.get(u) {
                            let lowered = m.with_exponent_at(i, e - 1);
                            let t = d.mul_monomial_left(&lowered, &(c * q(*e as i64)));
                            extra = &extra + &t;
                        }
                    }
                }
            }
        }
        let mut out = Element { sig: sig.clone(), terms: map };
        out.normalize_units();
        &out + &extra
    }

    /// Euler operator `Σ_m (−T)^m ∂/∂g_(m)`.
    pub fn variational_derivative(&self, gen: usize) -> Element {
        self.variational_derivative_with(gen, &|e: &Element| e.total_derivative())
    }

    /// Euler operator for a custom total derivation (e.g. `T + ξ`).
    pub fn variational_derivative_with(&self, gen: usize, d: &dyn Fn(&Element) -> Element) -> Element {
        let max = match self.max_orders().get(&gen) {
            Some(m) => *m,
            None => return Element::zero(&self.sig),
        };
        let mut acc = Element::zero(&self.sig);
        for m in (0..=max).rev() {
            // Horner: acc = ∂_m − d(acc)
            let p = self.partial(&Var::jet(gen, m));
            acc = &p - &d(&acc);
        }
        acc
    }

    /// Decides membership in the image of `T` for polynomial elements,
    /// returning a primitive when it exists.
    pub fn is_exact(&self) -> Result<Option<Element>> {
        if !self.is_polynomial() {
            return Err(Error::LaurentUnsupported);
        }
        if !self.jet_free_part().is_zero() {
            return Ok(None);
        }
        for g in self.max_orders().keys() {
            if !self.variational_derivative(*g).is_zero() {
                return Ok(None);
            }
        }
        let sig = self.sig.clone();
        let mut rest = self.clone();
        let mut prim = Element::zero(&sig);
        let mut guard = 0usize;
        while !rest.is_zero() {
            guard += 1;
            if guard > 100_000 {
                return Ok(None);
            }
            let top = rest
                .jets()
                .into_iter()
                .max_by_key(|j| (j.order, std::cmp::Reverse(j.gen)))
                .ok_or_else(|| Error::InvalidArgument("exactness witness failed".into()))?;
            if top.order == 0 || top.tau != 0 {
                return Ok(None);
            }
            let a = rest.partial(&Var::Jet(top));
            let v = Var::Jet(Jet { order: top.order - 1, ..top });
            let e = integrate(&a, &v)?;
            prim = &prim + &e;
            rest = &rest - &e.total_derivative();
        }
        Ok(Some(prim))
    }

    /// Applies a ring homomorphism given on variables. Variables with
    /// negative exponents must map to single variables.
    pub fn substitute(
        &self,
        target: &Arc<Signature>,
        on_var: &dyn Fn(&Var) -> Result<Element>,
    ) -> Result<Element> {
        let mut acc = Element::zero(target);
        for (m, c) in &self.terms {
            let mut prod = Element::constant(target, c.clone());
            for (v, e) in &m.0 {
                let img = on_var(v)?;
                if *e > 0 {
                    for _ in 0..*e {
                        prod = prod.try_mul(&img)?;
                    }
                } else {
                    let w = img.as_var().ok_or_else(|| {
                        Error::InvalidArgument("negative powers must map to single variables".into())
                    })?;
                    prod = prod.try_mul(&Element::var_pow(target, w, *e))?;
                }
            }
            acc = acc.try_add(&prod)?;
        }
        Ok(acc)
    }

    /// Reinterprets the element over another signature with the same
    /// generator names (used when base variables are adjoined).
    pub fn transport(&self, target: &Arc<Signature>) -> Result<Element> {
        if same_sig(&self.sig, target) {
            return Ok(self.clone());
        }
        let src = self.sig.clone();
        let map = |v: &Var| -> Result<Var> {
            Ok(match v {
                Var::Jet(j) => {
                    let name = &src.generators[j.gen as usize].name;
                    let g = target.generator_index(name).ok_or_else(|| Error::UnknownIdentifier(name.clone()))?;
                    Var::Jet(Jet { gen: g as u16, ..*j })
                }
                Var::Unit(u) => {
                    let name = &src.units[*u as usize].name;
                    Var::Unit(target.unit_index(name).ok_or_else(|| Error::UnknownIdentifier(name.clone()))? as u16)
                }
                Var::Base(b) => {
                    let name = &src.base_variables[*b as usize];
                    Var::Base(target.base_index(name).ok_or_else(|| Error::UnknownIdentifier(name.clone()))? as u16)
                }
                Var::Param(p) => {
                    let name = &src.parameters[*p as usize].name;
                    Var::Param(target.parameter_index(name).ok_or_else(|| Error::UnknownIdentifier(name.clone()))? as u16)
                }
            })
        };
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let mut f = Vec::new();
            for (v, e) in &m.0 {
                f.push((map(v)?, *e));
            }
            // generator order may differ; rebuild through multiplication
            let mut mono = Element::constant(target, c.clone());
            for (v, e) in f {
                mono = mono.try_mul(&Element::var_pow(target, v, e))?;
            }
            terms.push(mono);
        }
        let mut acc = Element::zero(target);
        for t in terms {
            acc = &acc + &t;
        }
        Ok(acc)
    }
}

/// An antiderivative in the variable `v` (for odd `v`, left multiplication).
fn integrate(a: &Element, v: &Var) -> Result<Element> {
    let sig = a.signature().clone();
    if v.parity(&sig).is_odd() {
        if !a.partial(v).is_zero() {
            return Err(Error::InvalidArgument("odd integration variable occurs in integrand".into()));
        }
        return Ok(&Element::var(&sig, *v) * a);
    }
    let mut acc = Element::zero(&sig);
    for (m, c) in a.terms() {
        let k = m.exponent(v);
        let raised = mul_monomials(&sig, m, &Monomial::var(*v, 1)).map(|(p, _)| p);
        if let Some(p) = raised {
            acc = &acc + &Element::monomial(&sig, p, c / q(k as i64 + 1));
        }
    }
    Ok(acc)
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a Element> for &'a Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("signature mismatch")
    }
}

impl<'a> Sub<&'a Element> for &'a Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.try_sub(rhs).expect("signature mismatch")
    }
}

impl<'a> Mul<&'a Element> for &'a Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.try_mul(rhs).expect("signature mismatch")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&q(-1))
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Mul for Element {
    type Output = Element;
    fn mul(self, rhs: Element) -> Element {
        &self * &rhs
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}
