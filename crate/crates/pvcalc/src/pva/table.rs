use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use super::lambda::LambdaPolynomial;
use crate::diffpoly::{element_from_json, element_to_json, Element, Signature};
use crate::{Error, Result};

/// λ-brackets of ordered generator pairs. Pairs that are neither stored nor
/// derivable by skew-symmetry are zero when `zero_default` is set and an
/// error otherwise.
#[derive(Clone, Debug)]
pub struct BracketTable {
    sig: Arc<Signature>,
    entries: BTreeMap<(usize, usize), LambdaPolynomial>,
    pub zero_default: bool,
}

impl BracketTable {
    /// An empty table in which unspecified pairs bracket to zero.
    pub fn new(sig: &Arc<Signature>) -> Self {
        BracketTable { sig: sig.clone(), entries: BTreeMap::new(), zero_default: true }
    }

    /// An empty table in which every pair must be given (directly or by skew).
    pub fn strict(sig: &Arc<Signature>) -> Self {
        BracketTable { sig: sig.clone(), entries: BTreeMap::new(), zero_default: false }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn set(&mut self, a: usize, b: usize, p: LambdaPolynomial) -> Result<()> {
        p.check_sig(&self.sig)?;
        if a >= self.sig.num_generators() || b >= self.sig.num_generators() {
            return Err(Error::InvalidArgument("generator index out of range".into()));
        }
        self.entries.insert((a, b), p);
        Ok(())
    }

    pub fn set_named(&mut self, a: &str, b: &str, p: LambdaPolynomial) -> Result<()> {
        let ai = self.sig.generator_index(a).ok_or_else(|| Error::UnknownIdentifier(a.into()))?;
        let bi = self.sig.generator_index(b).ok_or_else(|| Error::UnknownIdentifier(b.into()))?;
        self.set(ai, bi, p)
    }

    /// Adds `p` to the stored entry (creating it if absent).
    pub fn add_to(&mut self, a: usize, b: usize, p: &LambdaPolynomial) -> Result<()> {
        let cur = self.entries.get(&(a, b)).cloned().unwrap_or_else(|| LambdaPolynomial::zero(&self.sig));
        self.set(a, b, cur.add(p))
    }

    pub fn get(&self, a: usize, b: usize) -> Option<&LambdaPolynomial> {
        self.entries.get(&(a, b))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &LambdaPolynomial)> {
        self.entries.iter()
    }

    pub fn max_lambda_degree(&self) -> u32 {
        self.entries.values().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    /// Copy with every coefficient moved to `target` (same generator names).
    pub fn transport(&self, target: &Arc<Signature>) -> Result<BracketTable> {
        let mut out = BracketTable { sig: target.clone(), entries: BTreeMap::new(), zero_default: self.zero_default };
        for ((a, b), p) in &self.entries {
            let an = &self.sig.generators[*a].name;
            let bn = &self.sig.generators[*b].name;
            out.set_named(an, bn, p.transport(target)?)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let list: Vec<Value> = self
            .entries
            .iter()
            .map(|((a, b), p)| {
                let br: Vec<Value> = p
                    .terms()
                    .filter(|((_, m), _)| *m == 0)
                    .map(|((n, _), e)| json!([n, element_to_json(e)]))
                    .collect();
                json!({
                    "left": self.sig.generators[*a].name,
                    "right": self.sig.generators[*b].name,
                    "bracket": br,
                })
            })
            .collect();
        Value::Array(list)
    }

    pub fn from_json(sig: &Arc<Signature>, v: &Value) -> Result<BracketTable> {
        let bad = |m: &str| Error::Serialization(m.to_string());
        let mut t = BracketTable::new(sig);
        for rec in v.as_array().ok_or_else(|| bad("table must be a list"))? {
            let l = rec.get("left").and_then(|x| x.as_str()).ok_or_else(|| bad("left"))?;
            let r = rec.get("right").and_then(|x| x.as_str()).ok_or_else(|| bad("right"))?;
            let mut p = LambdaPolynomial::zero(sig);
            for term in rec.get("bracket").and_then(|x| x.as_array()).ok_or_else(|| bad("bracket"))? {
                let pair = term.as_array().ok_or_else(|| bad("bracket term"))?;
                if pair.len() != 2 {
                    return Err(bad("bracket term"));
                }
                let n = pair[0].as_u64().ok_or_else(|| bad("lambda degree"))? as u32;
                let e: Element = element_from_json(sig, &pair[1])?;
                p.add_term((n, 0), &e);
            }
            t.set_named(l, r, p)?;
        }
        Ok(t)
    }
}
