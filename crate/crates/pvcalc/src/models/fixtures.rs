use serde_json::{json, Value};

use super::n2::{mc_residual, n2_closure, N2Model};
use super::sigma::{sigma_virasoro, virasoro_shape};
use super::wzw::WzwModel;
use crate::diffpoly::{element_to_json, Element};
use crate::rational::{q, to_pq, Q};
use crate::{Error, Result};

fn qs(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|c| json!(to_pq(c))).collect())
}

/// The Maurer–Cartan witness `γ = t·x̄·φ_x̄` on `n2-flat:1` with `t² = 0`.
pub fn mc_witness() -> Result<(N2Model, Element)> {
    let m = N2Model::flat(1)?.with_parameter("t", 2)?;
    let sig = m.signature().clone();
    let t = Element::param(&sig, "t")?;
    let gamma = &(&t * &m.gen(m.xb[0])) * &m.gen(m.psib[0]);
    Ok((m, gamma))
}

/// Structure constants computed by the engine: Sugawara and σ-model
/// Virasoro constants, N=2 closure constants and the Maurer–Cartan witness.
pub fn derived_fixtures() -> Result<Value> {
    let mut sugawara = Vec::new();
    for (n, k) in [(1, q(1)), (1, q(3)), (2, q(1))] {
        let r = WzwModel::new(n, k.clone())?.sugawara_report()?;
        sugawara.push(json!({
            "model": format!("wzw:gl{n}:{}", to_pq(&k)),
            "normalization": to_pq(&r.normalization),
            "current_central": qs(&r.current_central),
            "virasoro_central": to_pq(&r.virasoro_central),
            "passed": r.passed(),
        }));
    }
    let mut sigma = Vec::new();
    for n in 1..=2 {
        let v = sigma_virasoro(n)?;
        let mut entry = json!({ "n": n });
        for (name, l) in [("plus", &v.plus), ("minus", &v.minus), ("zero", &v.zero)] {
            let (nu, c) = virasoro_shape(&v.pva, l)?
                .ok_or_else(|| Error::InvalidArgument(format!("{name} is not of Virasoro shape")))?;
            entry[name] = json!({ "nu": to_pq(&nu), "central": to_pq(&c) });
        }
        sigma.push(entry);
    }
    let model = N2Model::flat(1)?;
    let closure = n2_closure(&model)?;
    let generators: serde_json::Map<String, Value> =
        closure.generators.iter().map(|(n, e)| (n.clone(), element_to_json(e))).collect();
    let constants: Vec<Value> = closure
        .constants
        .iter()
        .map(|(a, b, n, terms)| {
            let terms: Vec<Value> = terms.iter().map(|(c, g, k)| json!([to_pq(c), g, k])).collect();
            json!({ "a": a, "b": b, "n": n, "terms": terms })
        })
        .collect();
    let (m, gamma) = mc_witness()?;
    let residual = mc_residual(&m, &gamma)?;
    Ok(json!({
        "sugawara": sugawara,
        "sigma_virasoro": sigma,
        "n2_closure": {
            "model": "n2-flat:1",
            "generators": generators,
            "constants": constants,
            "failures": closure.failures,
        },
        "mc_witness": {
            "model": "n2-flat:1",
            "parameter": "t",
            "gamma": element_to_json(&gamma),
            "residual": element_to_json(&residual.rep),
        },
    }))
}
