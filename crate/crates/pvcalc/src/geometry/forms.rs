use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::diffpoly::{element_from_json, element_to_json, Element, Signature, Var};
use crate::rational::q;
use crate::{Error, Result};

/// Sorts `idx` and returns the permutation sign, or `None` on a repeat.
pub fn sort_indices(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut neg = false;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                neg = !neg;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, neg))
}

/// A polynomial differential form on the target: components indexed by
/// strictly increasing tuples of coordinate positions.
#[derive(Clone, PartialEq, Eq)]
pub struct TargetForm {
    sig: Arc<Signature>,
    /// Generator index of each target coordinate.
    pub coords: Vec<usize>,
    pub degree: usize,
    comps: BTreeMap<Vec<usize>, Element>,
}

impl TargetForm {
    pub fn zero(sig: &Arc<Signature>, coords: &[usize], degree: usize) -> Self {
        TargetForm { sig: sig.clone(), coords: coords.to_vec(), degree, comps: BTreeMap::new() }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Adds `c·dx^{i₁}∧…∧dx^{i_p}` for arbitrary (0-based) positions.
    pub fn add_term(&mut self, idx: &[usize], c: &Element) -> Result<()> {
        if idx.len() != self.degree {
            return Err(Error::InvalidArgument(format!("expected {} indices", self.degree)));
        }
        if idx.iter().any(|i| *i >= self.dim()) {
            return Err(Error::InvalidArgument("form index out of range".into()));
        }
        c.check_sig(&Element::zero(&self.sig))?;
        let Some((sorted, neg)) = sort_indices(idx) else {
            return Ok(());
        };
        let c = if neg { -c } else { c.clone() };
        let entry = self.comps.entry(sorted.clone()).or_insert_with(|| Element::zero(&self.sig));
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.comps.remove(&sorted);
        }
        Ok(())
    }

    pub fn with_term(mut self, idx: &[usize], c: &Element) -> Result<Self> {
        self.add_term(idx, c)?;
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Element)> {
        self.comps.iter()
    }

    /// Component for an arbitrary index tuple (antisymmetric extension).
    pub fn component(&self, idx: &[usize]) -> Element {
        match sort_indices(idx) {
            None => Element::zero(&self.sig),
            Some((s, neg)) => {
                let c = self.comps.get(&s).cloned().unwrap_or_else(|| Element::zero(&self.sig));
                if neg {
                    -&c
                } else {
                    c
                }
            }
        }
    }

    pub fn scale(&self, c: &crate::Q) -> TargetForm {
        let mut out = TargetForm::zero(&self.sig, &self.coords, self.degree);
        for (k, e) in &self.comps {
            out.add_term(k, &e.scale(c)).expect("same shape");
        }
        out
    }

    pub fn neg(&self) -> TargetForm {
        self.scale(&q(-1))
    }

    pub fn add(&self, other: &TargetForm) -> Result<TargetForm> {
        if other.degree != self.degree || other.coords != self.coords {
            return Err(Error::InvalidArgument("forms of different shape".into()));
        }
        let mut out = self.clone();
        for (k, e) in &other.comps {
            out.add_term(k, e)?;
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &TargetForm) -> Result<TargetForm> {
        if other.coords != self.coords {
            return Err(Error::InvalidArgument("forms on different coordinates".into()));
        }
        let mut out = TargetForm::zero(&self.sig, &self.coords, self.degree + other.degree);
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                let mut idx = i.clone();
                idx.extend(j.iter().copied());
                out.add_term(&idx, &(a * b))?;
            }
        }
        Ok(out)
    }

    /// The exterior derivative `Σ_k ∂_k f dx^k ∧ dx^I`.
    pub fn de_rham(&self) -> TargetForm {
        let mut out = TargetForm::zero(&self.sig, &self.coords, self.degree + 1);
        for (idx, f) in &self.comps {
            for (k, g) in self.coords.iter().enumerate() {
                let d = f.partial(&Var::jet(*g, 0));
                if d.is_zero() {
                    continue;
                }
                let mut full = vec![k];
                full.extend(idx.iter().copied());
                out.add_term(&full, &d).expect("valid indices");
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.de_rham().is_zero()
    }

    /// `{degree, terms: [[indices...], Element]}` with 1-based indices.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .comps
            .iter()
            .map(|(k, e)| json!([k.iter().map(|i| i + 1).collect::<Vec<_>>(), element_to_json(e)]))
            .collect();
        json!({"degree": self.degree, "terms": terms})
    }

    pub fn from_json(sig: &Arc<Signature>, coords: &[usize], v: &Value) -> Result<TargetForm> {
        let bad = |m: &str| Error::Serialization(m.to_string());
        let degree = v.get("degree").and_then(|d| d.as_u64()).ok_or_else(|| bad("degree"))? as usize;
        let mut out = TargetForm::zero(sig, coords, degree);
        for t in v.get("terms").and_then(|t| t.as_array()).ok_or_else(|| bad("terms"))? {
            let pair = t.as_array().ok_or_else(|| bad("term"))?;
            if pair.len() != 2 {
                return Err(bad("term"));
            }
            let idx: Vec<usize> = pair[0]
                .as_array()
                .ok_or_else(|| bad("indices"))?
                .iter()
                .map(|i| i.as_u64().filter(|i| *i >= 1).map(|i| i as usize - 1).ok_or_else(|| bad("index")))
                .collect::<Result<_>>()?;
            let e = element_from_json(sig, &pair[1])?;
            out.add_term(&idx, &e)?;
        }
        Ok(out)
    }
}

impl fmt::Display for TargetForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.comps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let names: Vec<String> = idx.iter().map(|i| self.sig.generators[self.coords[*i]].name.clone()).collect();
            if c.len() > 1 {
                write!(f, "({c})*d({})", names.join(","))?;
            } else {
                write!(f, "{c}*d({})", names.join(","))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TargetForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
