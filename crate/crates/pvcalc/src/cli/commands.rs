use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use super::session::{form_text, parse_form, preset_bindings, Outcome, Scope, Session, Value};
use super::syntax::parse_expr;
use crate::diffpoly::{element_to_json, Element, Parity};
use crate::geometry::{apply_shear, b_field_shear, h_twist};
use crate::models::{
    deformed_square_identity, derived_fixtures, gauge_action, mc_residual, n2_closure, preset, q_cohomology,
    random_polyvector, schouten, schouten_oracle, sigma_virasoro, virasoro_shape, Differential, N2Model, Preset,
    WzwModel, PRESET_NAMES,
};
use crate::pva::{LambdaPolynomial, Pva};
use crate::random::{random_element, rng, Shape};
use crate::rational::{parse_q, to_pq, to_short, Q};
use crate::varcalc::{euler_lagrange, euler_lagrange_residual, legendre, noether, verify_symmetry, FormVar, OnShell, SigmaModel};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "pvcalc", version, about = "Exact Poisson vertex algebra calculator")]
pub struct Cli {
    /// Directory holding derived structure-constant files (`derived.json`).
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Xi {
    /// `ρ(∂_τ)`
    Time,
    Minus,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QModel {
    Half,
    A,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run script files.
    Run { files: Vec<PathBuf> },
    /// Evaluate an expression.
    Eval {
        expr: String,
        #[arg(long)]
        preset: Option<String>,
    },
    /// Check skew-symmetry, Jacobi, grading and parity of a PVA.
    Validate {
        /// A preset name; defaults to the PVA in scope.
        pva: Option<String>,
        #[arg(long, default_value_t = 3)]
        nmax: u32,
    },
    /// Load a preset.
    Preset { name: String },
    /// List preset names.
    Presets,
    /// Twist by a 3-form and validate the result.
    Htwist {
        pva: String,
        form: String,
        #[arg(long, default_value_t = 3)]
        nmax: u32,
    },
    /// Shear by a 2-form and compare with the twist by its differential.
    Shear { pva: String, form: String },
    /// Affine relations of the WZW currents.
    WzwVerify {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<String>,
    },
    /// Sugawara element, its normalization and central terms.
    Sugawara {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<String>,
    },
    /// Euler–Lagrange equations of a σ-model.
    EulerLagrange {
        #[arg(long)]
        preset: Option<String>,
    },
    /// Noether current of a symmetry of a σ-model.
    Noether {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, value_enum)]
        xi: Xi,
        /// Coefficients `c0,c1,…` of the profile `f`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        profile: Vec<String>,
    },
    /// Push the chiral currents of a flat σ-model into the canonical SVDO.
    Legendre {
        #[arg(long)]
        preset: Option<String>,
    },
    /// Nilpotency, cross-family vanishing and closure of the N=2 generators.
    N2Verify {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 30)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Schouten bracket of two polyvectors, or an oracle comparison on random pairs.
    Schouten {
        a: Option<String>,
        b: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Maurer–Cartan residual of an odd weight-1 element.
    McCheck {
        element: String,
        #[arg(long)]
        preset: Option<String>,
        /// Parameters with square zero.
        #[arg(long = "param", default_values_t = vec!["t".to_string()])]
        params: Vec<String>,
        /// Number of random vectors for the deformed-differential identity.
        #[arg(long, default_value_t = 0)]
        deformed: usize,
        /// Number of random gauge directions.
        #[arg(long, default_value_t = 0)]
        gauge: usize,
        /// Report the residual without requiring it to vanish.
        #[arg(long)]
        report_only: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Truncated cohomology of the N=2 model.
    Qcoh {
        #[arg(long, default_value_t = 0)]
        w: u32,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, value_enum, default_value_t = QModel::Half)]
        model: QModel,
    },
    /// Print a value or a preset's bracket table.
    Dump {
        value: String,
        #[arg(long)]
        json: bool,
    },
    /// Compare derived constants with the fixture file.
    Fixtures {
        #[arg(long)]
        write: bool,
    },
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn yes(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "no"
    }
}

fn load_preset(name: &str) -> Result<Preset> {
    // dimensionless shorthands
    let full = match name {
        "canonical" | "sigma-flat" | "n2-flat" => format!("{name}:1"),
        _ => name.to_string(),
    };
    preset(&full)
}

fn resolve_pva(s: &mut Session, name: Option<&str>) -> Result<(String, Pva)> {
    match name {
        Some(".") | None => {
            let p = s.pva()?.ok_or_else(|| Error::InvalidArgument("no PVA in scope".into()))?;
            let label = s.preset.as_ref().map_or("script table".to_string(), |(n, _)| n.clone());
            Ok((label, p))
        }
        Some(n) => Ok((n.to_string(), load_preset(n)?.pva()?)),
    }
}

fn sigma_model(s: &Session, name: Option<&str>) -> Result<(String, SigmaModel)> {
    let named = |n: &str| match load_preset(n)? {
        Preset::Sigma(m) => Ok((n.to_string(), m)),
        _ => Err(Error::InvalidArgument(format!("`{n}` is not a σ-model preset"))),
    };
    match (name, &s.preset) {
        (Some(n), _) => named(n),
        (None, Some((n, Preset::Sigma(m)))) => Ok((n.clone(), m.clone())),
        (None, _) => named("sigma-flat:1"),
    }
}

fn n2_model(s: &Session, name: Option<&str>, default: &str) -> Result<(String, N2Model)> {
    let named = |n: &str| match load_preset(n)? {
        Preset::N2(m) => Ok((n.to_string(), m)),
        _ => Err(Error::InvalidArgument(format!("`{n}` is not an N=2 preset"))),
    };
    match (name, &s.preset) {
        (Some(n), _) => named(n),
        (None, Some((n, Preset::N2(m)))) => Ok((n.clone(), m.clone())),
        (None, _) => named(default),
    }
}

fn wzw_model(s: &Session, n: Option<usize>, k: Option<&str>) -> Result<WzwModel> {
    if let (None, None, Some((_, Preset::Wzw(m)))) = (n, k, &s.preset) {
        return Ok(m.clone());
    }
    let k = match k {
        Some(k) => parse_q(k)?,
        None => Q::from_integer(1.into()),
    };
    WzwModel::new(n.unwrap_or(1), k)
}

fn lines(v: Vec<String>) -> String {
    v.join("\n")
}

fn cmd_validate(s: &mut Session, pva: Option<&str>, nmax: u32) -> Result<Outcome> {
    let (label, p) = resolve_pva(s, pva)?;
    let r = p.validate(nmax);
    Ok(Outcome::with(format!("validate {label} (nmax {nmax}): {r}"), r.passed()))
}

fn cmd_preset(s: &mut Session, name: &str) -> Result<Outcome> {
    let p = load_preset(name)?;
    s.load_preset(name, p)?;
    let sig = s.signature()?;
    let gens: Vec<String> = sig
        .generators
        .iter()
        .map(|g| format!("{} ({}, {})", g.name, g.parity.as_str(), g.weight))
        .collect();
    Ok(Outcome::pass(format!("preset {name}: {}", gens.join(", "))))
}

fn cmd_htwist(s: &mut Session, pva: &str, form: &str, nmax: u32) -> Result<Outcome> {
    let (label, p) = resolve_pva(s, Some(pva))?;
    let h = parse_form(p.signature(), 3, form)?;
    let closed = h.is_closed();
    let r = h_twist(&p, &h)?.validate(nmax);
    let text = lines(vec![
        format!("htwist {label} by H = {}", form_text(&h)),
        format!("dH = 0: {}", yes(closed)),
        format!("validate (nmax {nmax}): {r}"),
    ]);
    Ok(Outcome::with(text, r.passed()))
}

fn cmd_shear(s: &mut Session, pva: &str, form: &str) -> Result<Outcome> {
    let (label, p) = resolve_pva(s, Some(pva))?;
    let alpha = parse_form(p.signature(), 2, form)?;
    let da = alpha.de_rham();
    let r = b_field_shear(&p, &alpha)?;
    let sig = p.signature().clone();
    let mut inverse_ok = true;
    for g in 0..sig.num_generators() {
        let e = Element::jet(&sig, g, 0);
        let back = apply_shear(&p, &alpha.neg(), &apply_shear(&p, &alpha, &e)?)?;
        inverse_ok &= back == e;
    }
    let closed = da.is_zero();
    let ok = r.consistent && r.discrepancy == da && r.automorphism == closed && inverse_ok;
    let text = lines(vec![
        format!("shear {label} by alpha = {}", form_text(&alpha)),
        format!("d(alpha) = {}", form_text(&da)),
        format!("bracket discrepancy = {}", form_text(&r.discrepancy)),
        format!("sheared brackets equal the twist by d(alpha): {}", yes(r.consistent && r.discrepancy == da)),
        format!("automorphism: {}", yes(r.automorphism)),
        format!("inverse shear restores the generators: {}", yes(inverse_ok)),
        verdict(ok).to_string(),
    ]);
    Ok(Outcome::with(text, ok))
}

fn cmd_wzw(s: &Session, n: Option<usize>, k: Option<&str>) -> Result<Outcome> {
    let m = wzw_model(s, n, k)?;
    let r = m.verify_affine()?;
    let mut out = vec![format!("wzw gl({}) k = {}: {} current pairs", m.n, to_short(&m.k), r.pairs)];
    let mut ok = r.passed();
    if m.n == 1 {
        let (jl, jr) = (m.left_current(0, 0), m.right_current(0, 0));
        let sig = m.signature().clone();
        let want = |c: &Q| {
            if c == &Q::from_integer(0.into()) {
                LambdaPolynomial::zero(&sig)
            } else {
                LambdaPolynomial::monomial(Element::constant(&sig, c.clone()), 1)
            }
        };
        for (name, a, b, c) in [("jl", &jl, &jl, m.k.clone()), ("jl_jr", &jl, &jr, Q::from_integer(0.into())), ("jr", &jr, &jr, -m.k.clone())] {
            let got = m.pva.lambda_bracket(a, b)?;
            let good = got == want(&c);
            ok &= good;
            let label = if name == "jl_jr" { "{jl_lam jr}".to_string() } else { format!("{{{name}_lam {name}}}") };
            out.push(format!("{label} = {got}: {}", verdict(good)));
        }
    }
    out.push(r.to_string());
    Ok(Outcome::with(lines(out), ok))
}

fn fixture_file(s: &Session) -> Option<PathBuf> {
    s.fixtures.as_ref().map(|d| d.join("derived.json"))
}

fn read_fixtures(path: &Path) -> Result<Json> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Serialization(e.to_string()))
}

fn cmd_sugawara(s: &Session, n: Option<usize>, k: Option<&str>) -> Result<Outcome> {
    let m = wzw_model(s, n, k)?;
    let r = m.sugawara_report()?;
    let central: Vec<String> = r.current_central.iter().map(to_pq).collect();
    let mut out = vec![
        format!("sugawara gl({}) k = {}", m.n, to_short(&m.k)),
        format!("normalization {}", to_short(&r.normalization)),
        format!("current central terms [{}]", r.current_central.iter().map(to_short).collect::<Vec<_>>().join(", ")),
        format!("virasoro central term {}", to_short(&r.virasoro_central)),
    ];
    for p in &r.problems {
        out.push(format!("problem: {p}"));
    }
    let mut ok = r.passed();
    if let Some(path) = fixture_file(s) {
        let fx = read_fixtures(&path)?;
        let model = format!("wzw:gl{}:{}", m.n, to_pq(&m.k));
        let entry = fx["sugawara"].as_array().and_then(|v| v.iter().find(|e| e["model"] == json!(model)));
        match entry {
            Some(e) => {
                let same = e["normalization"] == json!(to_pq(&r.normalization))
                    && e["virasoro_central"] == json!(to_pq(&r.virasoro_central))
                    && e["current_central"] == json!(central);
                ok &= same;
                out.push(format!("fixtures {}: {}", model, if same { "match" } else { "MISMATCH" }));
            }
            None => out.push(format!("fixtures: no entry for {model}")),
        }
    }
    out.push(verdict(ok).to_string());
    Ok(Outcome::with(lines(out), ok))
}

fn cmd_euler_lagrange(s: &Session, name: Option<&str>) -> Result<Outcome> {
    let (label, m) = sigma_model(s, name)?;
    let el = euler_lagrange(&m.lagrangian)?;
    let sig = m.signature().clone();
    let mut out = vec![format!("euler-lagrange {label}")];
    for (j, e) in &el.equations {
        out.push(format!("E[{}] = {e}", sig.generators[*j].name));
    }
    out.push(format!("gamma = {}", el.gamma));
    let ok = euler_lagrange_residual(&m.lagrangian, &el).is_zero();
    out.push(format!("decomposition: {}", verdict(ok)));
    Ok(Outcome::with(lines(out), ok))
}

fn profile(p: &[String]) -> Result<Vec<Q>> {
    if p.is_empty() {
        return Ok(vec![Q::from_integer(1.into())]);
    }
    p.iter().map(|c| parse_q(c)).collect()
}

fn cmd_noether(s: &Session, name: Option<&str>, xi: Xi, prof: &[String]) -> Result<Outcome> {
    let (label, m) = sigma_model(s, name)?;
    let f = profile(prof)?;
    let (ch, alpha) = match xi {
        Xi::Time => m.time_translation(),
        Xi::Minus => m.xi_minus(&f),
        Xi::Plus => m.xi_plus(&f),
    };
    let el = euler_lagrange(&m.lagrangian)?;
    let sym = verify_symmetry(&ch, &m.lagrangian, &alpha);
    let current = noether(&ch, &alpha, &el.gamma);
    let shell = OnShell::new(&m.lagrangian, &el)?;
    let conserved = match shell.check_conserved(&current) {
        Ok(()) => true,
        Err(Error::Reduction(_)) => false,
        Err(e) => return Err(e),
    };
    let ok = sym && conserved;
    let text = lines(vec![
        format!("noether {label} xi = {xi:?}"),
        format!("symmetry (Lie_xi L = d alpha): {}", yes(sym)),
        format!("current dsigma: {}", current.coefficient(&[FormVar::DSigma])),
        format!("current dtau: {}", current.coefficient(&[FormVar::DTau])),
        format!("conserved on shell: {}", yes(conserved)),
        verdict(ok).to_string(),
    ]);
    Ok(Outcome::with(text, ok))
}

fn cmd_legendre(s: &Session, name: Option<&str>) -> Result<Outcome> {
    let (label, m) = sigma_model(s, name)?;
    let lg = legendre(&m.lagrangian)?;
    let el = euler_lagrange(&m.lagrangian)?;
    let one = [Q::from_integer(1.into())];
    let (ch, alpha) = m.xi_minus(&one);
    let fm = lg.push(&noether(&ch, &alpha, &el.gamma))?;
    let (ch, alpha) = m.xi_plus(&one);
    let fp = lg.push(&noether(&ch, &alpha, &el.gamma))?;
    let tp = &lg.target;
    let mut out = vec![format!("legendre {label}"), format!("F(xi-) = {fm}"), format!("F(xi+) = {fp}")];
    let mut ok = true;
    let flat = lg.metric.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, c)| *c == Q::from_integer(i64::from(i == j).into())));
    if flat {
        let v = sigma_virasoro(m.dim())?;
        let tsig = tp.signature();
        let same = fm == v.plus.transport(tsig)? && fp == v.minus.transport(tsig)?;
        ok &= same;
        out.push(format!("images equal L+ and L-: {}", yes(same)));
    }
    let commute = tp.lambda_bracket(&fm, &fp)?.is_zero() && tp.lambda_bracket(&fp, &fm)?.is_zero();
    ok &= commute;
    out.push(format!("{{L+_lam L-}} = 0: {}", yes(commute)));
    for (n, l) in [("L+", &fm), ("L-", &fp)] {
        match virasoro_shape(tp, l)? {
            Some((nu, c)) => {
                out.push(format!("{{{n}_lam {n}}} = {}*(T + 2*lam)*{n} + {}*lam^3", to_short(&nu), to_short(&c)))
            }
            None => {
                ok = false;
                out.push(format!("{n}: not of Virasoro shape"));
            }
        }
    }
    out.push(verdict(ok).to_string());
    Ok(Outcome::with(lines(out), ok))
}

fn cmd_n2_verify(n: usize, samples: usize, seed: u64) -> Result<Outcome> {
    let m = N2Model::flat(n)?;
    let g = m.generators();
    let mut out = vec![format!("n2-verify n2-flat:{n}")];
    let mut nil = true;
    for (_, e) in g.all() {
        nil &= m.pva.lambda_bracket(e, e)?.is_zero();
    }
    let mut r = rng(seed);
    let shape = Shape::new(2, 3, 3).with_constants();
    for _ in 0..samples {
        let v = random_element(m.signature(), &mut r, &shape);
        nil &= m.zeroth(&g.mm, &m.zeroth(&g.mm, &v)?)?.is_zero();
    }
    out.push(format!("nilpotency ({samples} random vectors): {}", verdict(nil)));
    let mut cross = true;
    for (_, a) in g.plus_family() {
        for (_, b) in g.minus_family() {
            for k in 0..=3 {
                cross &= m.pva.nth_product(a, b, k)?.is_zero() && m.pva.nth_product(b, a, k)?.is_zero();
            }
        }
    }
    out.push(format!("cross-family products n = 0..3: {}", verdict(cross)));
    let c = n2_closure(&m)?;
    for f in &c.failures {
        out.push(format!("closure failure: {f}"));
    }
    out.push(format!("closure ({} structure constants): {}", c.constants.len(), verdict(c.passed())));
    let ok = nil && cross && c.passed();
    out.push(verdict(ok).to_string());
    Ok(Outcome::with(lines(out), ok))
}

fn cmd_schouten(a: Option<&str>, b: Option<&str>, n: usize, samples: usize, seed: u64) -> Result<Outcome> {
    let m = N2Model::flat(n)?;
    match (a, b) {
        (Some(a), Some(b)) => {
            let vars = preset_bindings(&Preset::N2(m.clone()));
            let (a, b) = (n2_element(&m, &vars, a)?, n2_element(&m, &vars, b)?);
            let v = schouten(&m, &a, &b)?;
            let ok = v == schouten_oracle(&m, &a, &b)?;
            Ok(Outcome::with(format!("[{a}, {b}] = {v}\noracle agrees: {}", yes(ok)), ok))
        }
        (None, None) => {
            let mut r = rng(seed);
            let mut bad = 0;
            for _ in 0..samples {
                let a = random_polyvector(&m, &mut r);
                let b = random_polyvector(&m, &mut r);
                if schouten(&m, &a, &b)? != schouten_oracle(&m, &a, &b)? {
                    bad += 1;
                }
            }
            let ok = bad == 0;
            Ok(Outcome::with(
                format!("schouten vs oracle on {samples} random pairs (n = {n}): {} disagreements\n{}", bad, verdict(ok)),
                ok,
            ))
        }
        _ => Err(Error::InvalidArgument("schouten takes two polyvectors or none".into())),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc_check(
    s: &Session,
    element: &str,
    name: Option<&str>,
    params: &[String],
    deformed: usize,
    gauge: usize,
    report_only: bool,
    seed: u64,
) -> Result<Outcome> {
    let (label, mut m) = n2_model(s, name, "n2-flat:1")?;
    for p in params {
        if m.signature().parameter_index(p).is_none() {
            m = m.with_parameter(p, 2)?;
        }
    }
    let vars = preset_bindings(&Preset::N2(m.clone()));
    let gamma = n2_element(&m, &vars, element)?;
    let res = mc_residual(&m, &gamma)?;
    let mc = m.pva.is_trivial_class(&res.rep)?;
    let mut out = vec![
        format!("mc-check on {label}: gamma = {gamma}"),
        format!("residual = {}", res.rep),
        format!("Maurer-Cartan equation holds mod T: {}", yes(mc)),
    ];
    let mut ok = mc || report_only;
    let mut r = rng(seed);
    if deformed > 0 {
        let shape = Shape::new(2, 3, 3).with_constants();
        let mut good = 0;
        for _ in 0..deformed {
            let v = random_element(m.signature(), &mut r, &shape);
            good += usize::from(deformed_square_identity(&m, &gamma, &v)?);
        }
        ok &= good == deformed;
        out.push(format!("deformed differential identity: {good}/{deformed}"));
    }
    if gauge > 0 {
        let me = m.with_parameter("eps", 2)?;
        let sig = me.signature().clone();
        let g = gamma.transport(&sig)?;
        let eps = Element::param(&sig, "eps")?;
        let base = mc_residual(&me, &g)?;
        let shape = Shape::new(1, 2, 2).with_parity(Parity::Even);
        let (mut good, mut tried, mut attempts) = (0, 0, 0);
        while tried < gauge && attempts < 1000 * gauge {
            attempts += 1;
            let beta = random_element(&sig, &mut r, &shape);
            if beta.weight() != Some(1) {
                continue;
            }
            tried += 1;
            let moved = &g + &(&eps * &gauge_action(&me, &beta, &g)?);
            good += usize::from(me.pva.class_eq(&mc_residual(&me, &moved)?, &base)?);
        }
        ok &= good == gauge;
        out.push(format!("first-order gauge invariance: {good}/{gauge}"));
    }
    out.push(verdict(ok).to_string());
    Ok(Outcome::with(lines(out), ok))
}

fn n2_element(m: &N2Model, vars: &HashMap<String, Value>, text: &str) -> Result<Element> {
    Scope { sig: m.signature(), pva: Some(&m.pva), vars: Some(vars) }.element(&parse_expr(text)?)
}

fn cmd_qcoh(s: &Session, w: u32, d: u32, name: Option<&str>, model: QModel) -> Result<Outcome> {
    let (label, m) = n2_model(s, name, "n2-flat:1")?;
    let which = match model {
        QModel::Half => Differential::HalfTwisted,
        QModel::A => Differential::AModel,
    };
    let t = q_cohomology(&m, w, d, which)?;
    let ok = t.matches_reference();
    let text = format!("qcoh {label} W = {w} D = {d} ({model:?})\n{t}\n{}", verdict(ok));
    Ok(Outcome::with(text, ok))
}

fn lam_json(l: &LambdaPolynomial) -> Json {
    Json::Array(l.terms().map(|((n, m), e)| json!([n, m, element_to_json(e)])).collect())
}

fn cmd_dump(s: &mut Session, value: &str, as_json: bool) -> Result<Outcome> {
    if let Ok(p) = load_preset(value) {
        let pva = p.pva()?;
        let sig = pva.signature();
        if as_json {
            let gens: Vec<Json> = sig
                .generators
                .iter()
                .map(|g| json!({"name": g.name, "parity": g.parity.as_str(), "weight": g.weight, "invertible": g.invertible}))
                .collect();
            let doc = json!({"preset": value, "generators": gens, "table": pva.table().to_json()});
            return Ok(Outcome::pass(serde_json::to_string_pretty(&doc).map_err(|e| Error::Serialization(e.to_string()))?));
        }
        let mut out = Vec::new();
        for ((a, b), l) in pva.table().entries() {
            out.push(format!("{{{}, {}}} = {l}", sig.generators[*a].name, sig.generators[*b].name));
        }
        return Ok(Outcome::pass(lines(out)));
    }
    let v = s.eval(&parse_expr(value)?)?;
    if !as_json {
        return Ok(Outcome::pass(v.to_string()));
    }
    let j = match &v {
        Value::Elem(e) => element_to_json(e),
        Value::Lam(l) => lam_json(l),
        Value::Form(f) => f.to_json(),
    };
    Ok(Outcome::pass(j.to_string()))
}

fn cmd_fixtures(s: &Session, write: bool) -> Result<Outcome> {
    let path = fixture_file(s).ok_or_else(|| Error::InvalidArgument("--fixtures <dir> is required".into()))?;
    let now = derived_fixtures()?;
    if write {
        let text = serde_json::to_string_pretty(&now).map_err(|e| Error::Serialization(e.to_string()))? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        return Ok(Outcome::pass(format!("wrote {}", path.display())));
    }
    let pinned = read_fixtures(&path)?;
    let ok = pinned == now;
    Ok(Outcome::with(format!("fixtures {}: {}", path.display(), if ok { "match" } else { "MISMATCH" }), ok))
}

/// Runs one command against the session.
pub fn dispatch(s: &mut Session, cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Run { .. } => Err(Error::InvalidArgument("`run` cannot be nested".into())),
        Command::Eval { expr, preset } => {
            if let Some(p) = preset {
                cmd_preset(s, p)?;
            }
            let v = s.eval(&parse_expr(expr)?)?;
            Ok(Outcome::pass(v.to_string()))
        }
        Command::Validate { pva, nmax } => cmd_validate(s, pva.as_deref(), *nmax),
        Command::Preset { name } => cmd_preset(s, name),
        Command::Presets => Ok(Outcome::pass(PRESET_NAMES.join("\n"))),
        Command::Htwist { pva, form, nmax } => cmd_htwist(s, pva, form, *nmax),
        Command::Shear { pva, form } => cmd_shear(s, pva, form),
        Command::WzwVerify { n, k } => cmd_wzw(s, *n, k.as_deref()),
        Command::Sugawara { n, k } => cmd_sugawara(s, *n, k.as_deref()),
        Command::EulerLagrange { preset } => cmd_euler_lagrange(s, preset.as_deref()),
        Command::Noether { preset, xi, profile } => cmd_noether(s, preset.as_deref(), *xi, profile),
        Command::Legendre { preset } => cmd_legendre(s, preset.as_deref()),
        Command::N2Verify { n, samples, seed } => cmd_n2_verify(*n, *samples, *seed),
        Command::Schouten { a, b, n, samples, seed } => cmd_schouten(a.as_deref(), b.as_deref(), *n, *samples, *seed),
        Command::McCheck { element, preset, params, deformed, gauge, report_only, seed } => {
            cmd_mc_check(s, element, preset.as_deref(), params, *deformed, *gauge, *report_only, *seed)
        }
        Command::Qcoh { w, d, preset, model } => cmd_qcoh(s, *w, *d, preset.as_deref(), *model),
        Command::Dump { value, json } => cmd_dump(s, value, *json),
        Command::Fixtures { write } => cmd_fixtures(s, *write),
    }
}

/// Parses a script command line with the same grammar as the executable.
pub fn script_command(s: &mut Session, args: &[String]) -> Result<Outcome> {
    let argv = std::iter::once("pvcalc".to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::InvalidArgument(e.render().to_string().trim().to_string()))?;
    if let Some(f) = cli.fixtures {
        s.fixtures = Some(f);
    }
    dispatch(s, &cli.command)
}
