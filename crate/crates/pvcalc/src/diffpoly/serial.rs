use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::element::Element;
use super::monomial::{Jet, Monomial, Var};
use super::signature::Signature;
use crate::rational::{parse_q, to_pq, to_short};
use crate::{Error, Result};

/// Text form of a single variable (exponent one).
pub fn var_name(sig: &Signature, v: &Var) -> String {
    match v {
        Var::Jet(j) => {
            let name = &sig.generators[j.gen as usize].name;
            match (j.tau, j.order) {
                (0, 0) => name.clone(),
                (0, 1) => format!("{name}'"),
                (0, m) => format!("{name}'({m})"),
                (t, m) => format!("{name}'({t},{m})"),
            }
        }
        Var::Unit(u) => sig.units[*u as usize].name.clone(),
        Var::Base(b) => sig.base_variables[*b as usize].clone(),
        Var::Param(p) => sig.parameters[*p as usize].name.clone(),
    }
}

fn monomial_text(sig: &Signature, m: &Monomial) -> Vec<String> {
    let mut parts = Vec::new();
    for (v, e) in &m.0 {
        let name = var_name(sig, v);
        if *e > 0 {
            for _ in 0..*e {
                parts.push(name.clone());
            }
        } else {
            for _ in 0..(-*e) {
                parts.push(format!("inv({name})"));
            }
        }
    }
    parts
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let sig = self.signature().clone();
        let mut first = true;
        for (m, c) in self.terms() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut parts = monomial_text(&sig, m);
            if !a.is_one() || parts.is_empty() {
                parts.insert(0, to_short(&a));
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Canonical JSON serialization (a list of term records in monomial order).
pub fn element_to_json(e: &Element) -> Value {
    let sig = e.signature();
    let mut out = Vec::new();
    for (m, c) in e.terms() {
        let mut mono = Vec::new();
        let mut base = Vec::new();
        let mut params = Vec::new();
        for (v, ex) in &m.0 {
            match v {
                Var::Jet(j) => {
                    let name = &sig.generators[j.gen as usize].name;
                    let order = if j.tau == 0 { json!(j.order) } else { json!([j.tau, j.order]) };
                    mono.push(json!([name, order, ex]));
                }
                Var::Unit(u) => mono.push(json!([sig.units[*u as usize].name, 0, ex])),
                Var::Base(b) => base.push(json!([sig.base_variables[*b as usize], ex])),
                Var::Param(p) => params.push(json!([sig.parameters[*p as usize].name, ex])),
            }
        }
        out.push(json!({"monomial": mono, "base": base, "params": params, "coeff": to_pq(c)}));
    }
    Value::Array(out)
}

fn bad(msg: &str) -> Error {
    Error::Serialization(msg.to_string())
}

pub fn element_from_json(sig: &Arc<Signature>, v: &Value) -> Result<Element> {
    let arr = v.as_array().ok_or_else(|| bad("element must be a list"))?;
    let mut acc = Element::zero(sig);
    for rec in arr {
        let coeff = parse_q(rec.get("coeff").and_then(|c| c.as_str()).ok_or_else(|| bad("missing coeff"))?)?;
        if coeff.is_zero() {
            return Err(bad("zero coefficient"));
        }
        let mut term = Element::constant(sig, coeff);
        for f in rec.get("monomial").and_then(|m| m.as_array()).ok_or_else(|| bad("missing monomial"))? {
            let f = f.as_array().ok_or_else(|| bad("bad factor"))?;
            if f.len() != 3 {
                return Err(bad("factor must have three entries"));
            }
            let name = f[0].as_str().ok_or_else(|| bad("factor name"))?;
            let exp = f[2].as_i64().ok_or_else(|| bad("factor exponent"))? as i32;
            let var = if let Some(g) = sig.generator_index(name) {
                let (tau, order) = match &f[1] {
                    Value::Number(n) => (0, n.as_u64().ok_or_else(|| bad("order"))? as u32),
                    Value::Array(a) if a.len() == 2 => (
                        a[0].as_u64().ok_or_else(|| bad("order"))? as u32,
                        a[1].as_u64().ok_or_else(|| bad("order"))? as u32,
                    ),
                    _ => return Err(bad("order")),
                };
                Var::Jet(Jet::new2(g, tau, order))
            } else if let Some(u) = sig.unit_index(name) {
                Var::Unit(u as u16)
            } else {
                return Err(Error::UnknownIdentifier(name.into()));
            };
            term = term.try_mul(&checked_pow(sig, var, exp)?)?;
        }
        for (key, is_base) in [("base", true), ("params", false)] {
            if let Some(list) = rec.get(key).and_then(|m| m.as_array()) {
                for f in list {
                    let f = f.as_array().ok_or_else(|| bad("bad factor"))?;
                    let name = f.first().and_then(|n| n.as_str()).ok_or_else(|| bad("factor name"))?;
                    let exp = f.get(1).and_then(|e| e.as_i64()).ok_or_else(|| bad("factor exponent"))? as i32;
                    let var = if is_base {
                        Var::Base(sig.base_index(name).ok_or_else(|| Error::UnknownIdentifier(name.into()))? as u16)
                    } else {
                        Var::Param(sig.parameter_index(name).ok_or_else(|| Error::UnknownIdentifier(name.into()))? as u16)
                    };
                    term = term.try_mul(&checked_pow(sig, var, exp)?)?;
                }
            }
        }
        acc = acc.try_add(&term)?;
    }
    Ok(acc)
}

fn checked_pow(sig: &Arc<Signature>, v: Var, e: i32) -> Result<Element> {
    let allowed_negative = match v {
        Var::Jet(j) => j.order == 0 && j.tau == 0 && sig.generators[j.gen as usize].invertible,
        Var::Unit(_) => true,
        _ => false,
    };
    if e == 0 || (e < 0 && !allowed_negative) || (matches!(v, Var::Unit(_)) && e > 0) {
        return Err(bad("exponent not allowed"));
    }
    Ok(Element::var_pow(sig, v, e))
}
