use std::collections::BTreeSet;
use std::sync::Arc;

use crate::rational::Q;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn from_odd(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn plus(self, other: Parity) -> Parity {
        Parity::from_odd(self.is_odd() ^ other.is_odd())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// `(-1)^{|a||b|}` as a boolean "negate".
pub fn koszul(a: Parity, b: Parity) -> bool {
    a.is_odd() && b.is_odd()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub parity: Parity,
    pub weight: u32,
    pub invertible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterSpec {
    pub name: String,
    pub parity: Parity,
    /// Any power `t^N` with `N >= nilpotency` vanishes.
    pub nilpotency: u32,
}

/// A designated unit `u = P(x)` where `P` is a polynomial in order-0 jets of
/// even weight-0 generators. Only negative powers of `u` are stored; positive
/// powers are expanded back into `P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSpec {
    pub name: String,
    /// Monomials as sorted `(generator, exponent)` lists.
    pub terms: Vec<(Vec<(u16, u32)>, Q)>,
    /// Index into `terms` of the leading monomial used for normal forms.
    pub lead: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Signature {
    pub generators: Vec<GeneratorSpec>,
    pub base_variables: Vec<String>,
    pub parameters: Vec<ParameterSpec>,
    pub units: Vec<UnitSpec>,
}

impl Signature {
    pub fn builder() -> SignatureBuilder {
        SignatureBuilder::default()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.base_variables.iter().position(|b| b == name)
    }

    pub fn parameter_index(&self, name: &str) -> Option<usize> {
        self.parameters.iter().position(|p| p.name == name)
    }

    pub fn unit_index(&self, name: &str) -> Option<usize> {
        self.units.iter().position(|u| u.name == name)
    }

    pub fn generator(&self, i: usize) -> &GeneratorSpec {
        &self.generators[i]
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// A copy with an extra base variable (no-op if already present).
    pub fn with_base_variable(&self, name: &str) -> Result<Signature> {
        let mut b = SignatureBuilder::from_signature(self);
        if self.base_index(name).is_none() {
            b = b.base(name);
        }
        b.build_plain()
    }

    /// A copy with an extra deformation parameter.
    pub fn with_parameter(&self, name: &str, parity: Parity, nilpotency: u32) -> Result<Signature> {
        SignatureBuilder::from_signature(self)
            .parameter(name, parity, nilpotency)
            .build_plain()
    }

    fn all_names(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.generators.iter().map(|g| g.name.as_str()).collect();
        v.extend(self.base_variables.iter().map(|s| s.as_str()));
        v.extend(self.parameters.iter().map(|p| p.name.as_str()));
        v.extend(self.units.iter().map(|u| u.name.as_str()));
        v
    }

    fn check(&self) -> Result<()> {
        let names = self.all_names();
        let mut seen = BTreeSet::new();
        for n in &names {
            if !is_identifier(n) {
                return Err(Error::InvalidSignature(format!("`{n}` is not an identifier")));
            }
            if RESERVED.contains(n) {
                return Err(Error::InvalidSignature(format!("`{n}` is reserved")));
            }
            if !seen.insert(*n) {
                return Err(Error::InvalidSignature(format!("duplicate name `{n}`")));
            }
        }
        for g in &self.generators {
            if g.invertible && (g.parity.is_odd() || g.weight != 0) {
                return Err(Error::InvalidSignature(format!(
                    "generator `{}` cannot be invertible",
                    g.name
                )));
            }
        }
        for p in &self.parameters {
            if p.nilpotency == 0 {
                return Err(Error::InvalidSignature(format!(
                    "parameter `{}` needs nilpotency order >= 1",
                    p.name
                )));
            }
        }
        let mut leads: Vec<&Vec<(u16, u32)>> = Vec::new();
        for u in &self.units {
            if u.terms.is_empty() || u.lead >= u.terms.len() {
                return Err(Error::InvalidSignature(format!("unit `{}` is empty", u.name)));
            }
            for (m, _) in &u.terms {
                for &(g, e) in m {
                    let spec = self.generators.get(g as usize).ok_or_else(|| {
                        Error::InvalidSignature(format!("unit `{}` uses a missing generator", u.name))
                    })?;
                    if spec.parity.is_odd() || spec.weight != 0 || spec.invertible || e == 0 {
                        return Err(Error::InvalidSignature(format!(
                            "unit `{}` must be a polynomial in even weight-0 generators",
                            u.name
                        )));
                    }
                }
            }
            let lead = &u.terms[u.lead].0;
            if lead.is_empty() {
                return Err(Error::InvalidSignature(format!(
                    "unit `{}` has a constant leading term",
                    u.name
                )));
            }
            for other in &leads {
                if other.iter().any(|(g, _)| lead.iter().any(|(h, _)| g == h)) {
                    return Err(Error::InvalidSignature(
                        "leading monomials of units must be coprime".into(),
                    ));
                }
            }
            leads.push(lead);
        }
        Ok(())
    }
}

pub const RESERVED: &[&str] = &[
    "T", "lam", "inv", "bracket", "nprod", "lie", "euler", "d", "gen", "let", "set", "base", "param",
    "unit", "even", "odd",
];

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, Default)]
pub struct SignatureBuilder {
    sig: Signature,
    pending_units: Vec<(String, Vec<(Vec<(String, u32)>, Q)>)>,
}

impl SignatureBuilder {
    pub fn from_signature(sig: &Signature) -> Self {
        SignatureBuilder { sig: sig.clone(), pending_units: Vec::new() }
    }

    pub fn generator(mut self, name: &str, parity: Parity, weight: u32) -> Self {
        self.sig.generators.push(GeneratorSpec {
            name: name.to_string(),
            parity,
            weight,
            invertible: false,
        });
        self
    }

    pub fn even(self, name: &str, weight: u32) -> Self {
        self.generator(name, Parity::Even, weight)
    }

    pub fn odd(self, name: &str, weight: u32) -> Self {
        self.generator(name, Parity::Odd, weight)
    }

    pub fn invertible(mut self, name: &str) -> Self {
        self.sig.generators.push(GeneratorSpec {
            name: name.to_string(),
            parity: Parity::Even,
            weight: 0,
            invertible: true,
        });
        self
    }

    pub fn base(mut self, name: &str) -> Self {
        self.sig.base_variables.push(name.to_string());
        self
    }

    pub fn parameter(mut self, name: &str, parity: Parity, nilpotency: u32) -> Self {
        self.sig.parameters.push(ParameterSpec { name: name.to_string(), parity, nilpotency });
        self
    }

    /// Declares a unit by its defining polynomial; the first listed term is
    /// the leading monomial used in the normal form.
    pub fn unit(mut self, name: &str, terms: Vec<(Vec<(&str, u32)>, Q)>) -> Self {
        let terms = terms
            .into_iter()
            .map(|(m, c)| (m.into_iter().map(|(g, e)| (g.to_string(), e)).collect(), c))
            .collect();
        self.pending_units.push((name.to_string(), terms));
        self
    }

    fn build_plain(mut self) -> Result<Signature> {
        for (name, terms) in std::mem::take(&mut self.pending_units) {
            let mut out = Vec::new();
            for (m, c) in terms {
                let mut mono: Vec<(u16, u32)> = Vec::new();
                for (g, e) in m {
                    let gi = self
                        .sig
                        .generator_index(&g)
                        .ok_or_else(|| Error::UnknownIdentifier(g.clone()))?;
                    mono.push((gi as u16, e));
                }
                mono.sort();
                out.push((mono, c));
            }
            self.sig.units.push(UnitSpec { name, terms: out, lead: 0 });
        }
        self.sig.check()?;
        Ok(self.sig)
    }

    pub fn build(self) -> Result<Arc<Signature>> {
        self.build_plain().map(Arc::new)
    }
}
