use super::signature::{Parity, Signature};

/// A jet of a generator: `tau` applications of the time derivative and
/// `order` applications of `T` (the σ-derivative). Everything outside the
/// variational layer has `tau = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jet {
    pub gen: u16,
    pub tau: u16,
    pub order: u16,
}

impl Jet {
    pub fn new(gen: usize, order: u32) -> Self {
        Jet { gen: gen as u16, tau: 0, order: order as u16 }
    }

    pub fn new2(gen: usize, tau: u32, order: u32) -> Self {
        Jet { gen: gen as u16, tau: tau as u16, order: order as u16 }
    }

    pub fn raise(self) -> Self {
        Jet { order: self.order + 1, ..self }
    }

    pub fn raise_tau(self) -> Self {
        Jet { tau: self.tau + 1, ..self }
    }
}

/// A variable of the coefficient ring. Canonical order: jets by
/// (generator, τ-order, σ-order), then units, base variables, parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Jet(Jet),
    Unit(u16),
    Base(u16),
    Param(u16),
}

impl Var {
    pub fn jet(gen: usize, order: u32) -> Self {
        Var::Jet(Jet::new(gen, order))
    }

    pub fn parity(&self, sig: &Signature) -> Parity {
        match self {
            Var::Jet(j) => sig.generators[j.gen as usize].parity,
            Var::Param(p) => sig.parameters[*p as usize].parity,
            Var::Unit(_) | Var::Base(_) => Parity::Even,
        }
    }

    pub fn weight(&self, sig: &Signature) -> i64 {
        match self {
            Var::Jet(j) => sig.generators[j.gen as usize].weight as i64 + j.order as i64 + j.tau as i64,
            _ => 0,
        }
    }

    pub fn as_jet(&self) -> Option<Jet> {
        match self {
            Var::Jet(j) => Some(*j),
            _ => None,
        }
    }
}

/// A canonically ordered product of variables with nonzero exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub Vec<(Var, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, i32)] {
        &self.0
    }

    pub fn exponent(&self, v: &Var) -> i32 {
        match self.0.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn parity(&self, sig: &Signature) -> Parity {
        let mut odd = false;
        for (v, e) in &self.0 {
            if v.parity(sig).is_odd() && e % 2 != 0 {
                odd = !odd;
            }
        }
        Parity::from_odd(odd)
    }

    pub fn weight(&self, sig: &Signature) -> i64 {
        self.0.iter().map(|(v, e)| v.weight(sig) * (*e as i64)).sum()
    }

    pub fn has_jets(&self) -> bool {
        self.0.iter().any(|(v, _)| matches!(v, Var::Jet(_)))
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|(v, e)| *e > 0 && !matches!(v, Var::Unit(_)))
    }

    /// Total degree in jet variables (positive exponents only).
    pub fn jet_degree(&self) -> i64 {
        self.0
            .iter()
            .filter(|(v, _)| matches!(v, Var::Jet(_)))
            .map(|(_, e)| *e as i64)
            .sum()
    }

    /// Number of odd factors strictly before position `i`.
    pub fn odd_before(&self, i: usize, sig: &Signature) -> usize {
        self.0[..i].iter().filter(|(v, _)| v.parity(sig).is_odd()).count()
    }

    pub fn odd_after(&self, i: usize, sig: &Signature) -> usize {
        self.0[i + 1..].iter().filter(|(v, _)| v.parity(sig).is_odd()).count()
    }

    /// Copy with the exponent of the factor at position `i` replaced.
    pub fn with_exponent_at(&self, i: usize, e: i32) -> Monomial {
        let mut f = self.0.clone();
        if e == 0 {
            f.remove(i);
        } else {
            f[i].1 = e;
        }
        Monomial(f)
    }

    pub fn split_at(&self, i: usize) -> (Monomial, Monomial) {
        (Monomial(self.0[..i].to_vec()), Monomial(self.0[i + 1..].to_vec()))
    }
}

/// Multiplies two canonically ordered monomials. Returns `None` when the
/// product vanishes (odd square or nilpotency), otherwise the product and
/// whether the Koszul sign of reordering is negative.
pub fn mul_monomials(sig: &Signature, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
    if a.is_one() {
        return Some((b.clone(), false));
    }
    if b.is_one() {
        return Some((a.clone(), false));
    }
    let fa = &a.0;
    let fb = &b.0;
    // odd factors of `a` at or after index i
    let mut odd_suffix = vec![0usize; fa.len() + 1];
    for i in (0..fa.len()).rev() {
        odd_suffix[i] = odd_suffix[i + 1] + usize::from(fa[i].0.parity(sig).is_odd());
    }
    let mut out = Vec::with_capacity(fa.len() + fb.len());
    let mut neg = false;
    let (mut i, mut j) = (0, 0);
    while i < fa.len() || j < fb.len() {
        if j >= fb.len() || (i < fa.len() && fa[i].0 < fb[j].0) {
            out.push(fa[i]);
            i += 1;
        } else if i >= fa.len() || fb[j].0 < fa[i].0 {
            let (v, e) = fb[j];
            if v.parity(sig).is_odd() && odd_suffix[i] % 2 == 1 {
                neg = !neg;
            }
            out.push((v, e));
            j += 1;
        } else {
            let (v, ea) = fa[i];
            let eb = fb[j].1;
            if v.parity(sig).is_odd() {
                return None;
            }
            let e = ea + eb;
            if e != 0 {
                out.push((v, e));
            }
            i += 1;
            j += 1;
        }
    }
    for (v, e) in &out {
        if let Var::Param(p) = v {
            let spec = &sig.parameters[*p as usize];
            if *e as u32 >= spec.nilpotency {
                return None;
            }
        }
    }
    Some((Monomial(out), neg))
}
