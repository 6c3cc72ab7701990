use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diffpoly::{Element, Jet, Monomial, Parity, Signature, Var};
use crate::linalg::{inverse, rank, solve};
use crate::random::{random_element, Shape};
use crate::pva::{BracketTable, LambdaPolynomial, LieClass, Pva};
use crate::rational::{q, Q};
use crate::{Error, Result};

/// Flat N=2 model in complex dimension n: `xⁱ, x^ī` (`x`, `xb`), their
/// momenta `x_i, x_ī` (`p`, `pb`), fermions `φⁱ, φ^ī` (`phi`, `phib`) and
/// `φ_i, φ_ī` (`psi`, `psib`).
#[derive(Clone, Debug)]
pub struct N2Model {
    pub n: usize,
    /// Constant Hermitian metric `g_{ij̄}` (real symmetric here).
    pub metric: Vec<Vec<Q>>,
    pub inverse_metric: Vec<Vec<Q>>,
    pub pva: Pva,
    pub x: Vec<usize>,
    pub xb: Vec<usize>,
    pub p: Vec<usize>,
    pub pb: Vec<usize>,
    pub phi: Vec<usize>,
    pub phib: Vec<usize>,
    pub psi: Vec<usize>,
    pub psib: Vec<usize>,
}

/// `Q^{−−}, Q^{−+}, Q^{++}, Q^{+−}`.
#[derive(Clone, Debug)]
pub struct N2Generators {
    pub mm: Element,
    pub mp: Element,
    pub pp: Element,
    pub pm: Element,
}

impl N2Generators {
    pub fn minus_family(&self) -> [(&'static str, &Element); 2] {
        [("Q--", &self.mm), ("Q-+", &self.mp)]
    }

    pub fn plus_family(&self) -> [(&'static str, &Element); 2] {
        [("Q++", &self.pp), ("Q+-", &self.pm)]
    }

    pub fn all(&self) -> [(&'static str, &Element); 4] {
        [("Q--", &self.mm), ("Q-+", &self.mp), ("Q++", &self.pp), ("Q+-", &self.pm)]
    }
}

fn names(n: usize, prefix: &str) -> Vec<String> {
    if n == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

const PREFIXES: [&str; 8] = ["x", "xb", "phi", "phib", "p", "pb", "psi", "psib"];

impl N2Model {
    pub fn flat(n: usize) -> Result<N2Model> {
        let id = (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { Q::zero() }).collect()).collect();
        N2Model::with_metric(id)
    }

    pub fn with_metric(metric: Vec<Vec<Q>>) -> Result<N2Model> {
        let n = metric.len();
        if n == 0 || metric.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("metric must be a nonempty square matrix".into()));
        }
        if (0..n).any(|i| (0..n).any(|j| metric[i][j] != metric[j][i])) {
            return Err(Error::InvalidArgument("metric must be symmetric".into()));
        }
        let inverse_metric = inverse(&metric).ok_or(Error::NonInvertibleFiberMetric)?;
        let mut b = Signature::builder();
        for (k, prefix) in PREFIXES.iter().enumerate() {
            for name in names(n, prefix) {
                b = match k {
                    0 | 1 => b.even(&name, 0),
                    2 | 3 => b.odd(&name, 0),
                    4 | 5 => b.even(&name, 1),
                    _ => b.odd(&name, 1),
                };
            }
        }
        let sig = b.build()?;
        N2Model::over(sig, n, metric, inverse_metric)
    }

    fn over(sig: Arc<Signature>, n: usize, metric: Vec<Vec<Q>>, inverse_metric: Vec<Vec<Q>>) -> Result<N2Model> {
        let idx = |prefix: &str| -> Vec<usize> {
            names(n, prefix).iter().map(|s| sig.generator_index(s).expect("declared")).collect()
        };
        let (x, xb, phi, phib) = (idx("x"), idx("xb"), idx("phi"), idx("phib"));
        let (p, pb, psi, psib) = (idx("p"), idx("pb"), idx("psi"), idx("psib"));
        let mut t = BracketTable::new(&sig);
        let one = LambdaPolynomial::constant(Element::one(&sig));
        for i in 0..n {
            t.set(p[i], x[i], one.clone())?;
            t.set(pb[i], xb[i], one.clone())?;
            t.set(psi[i], phi[i], one.clone())?;
            t.set(psib[i], phib[i], one.clone())?;
        }
        let pva = Pva::new(t)?;
        Ok(N2Model { n, metric, inverse_metric, pva, x, xb, p, pb, phi, phib, psi, psib })
    }

    /// The same model with an extra even nilpotent parameter (`name^N = 0`).
    pub fn with_parameter(&self, name: &str, nilpotency: u32) -> Result<N2Model> {
        let sig = Arc::new(self.signature().with_parameter(name, Parity::Even, nilpotency)?);
        N2Model::over(sig, self.n, self.metric.clone(), self.inverse_metric.clone())
    }

    pub fn signature(&self) -> &Arc<Signature> {
        self.pva.signature()
    }

    pub fn gen(&self, g: usize) -> Element {
        Element::jet(self.signature(), g, 0)
    }

    /// Fermion number: `φ`'s count +1 and `φ_•`'s count −1.
    pub fn fermion_of(&self, g: usize) -> i64 {
        if self.phi.contains(&g) || self.phib.contains(&g) {
            1
        } else if self.psi.contains(&g) || self.psib.contains(&g) {
            -1
        } else {
            0
        }
    }

    pub fn monomial_fermion(&self, m: &Monomial) -> i64 {
        m.factors()
            .iter()
            .map(|(v, e)| match v {
                Var::Jet(j) => self.fermion_of(j.gen as usize) * *e as i64,
                _ => 0,
            })
            .sum()
    }

    /// Fermion number of a homogeneous element.
    pub fn fermion(&self, e: &Element) -> Option<i64> {
        let set: BTreeSet<i64> = e.terms().map(|(m, _)| self.monomial_fermion(m)).collect();
        match set.len() {
            0 => Some(0),
            1 => set.into_iter().next(),
            _ => None,
        }
    }

    pub fn generators(&self) -> N2Generators {
        let sig = self.signature().clone();
        let g = |i: usize| Element::jet(&sig, i, 0);
        let mut mm = Element::zero(&sig);
        let mut pp = Element::zero(&sig);
        let mut mp = Element::zero(&sig);
        let mut pm = Element::zero(&sig);
        for j in 0..self.n {
            mm = &mm + &(&g(self.phib[j]) * &g(self.pb[j]));
            pp = &pp + &(&g(self.phi[j]) * &g(self.p[j]));
            mp = &mp + &(&g(self.xb[j]).t() * &g(self.psib[j])).scale(&q(4));
            pm = &pm - &(&g(self.x[j]).t() * &g(self.psi[j])).scale(&q(4));
            for i in 0..self.n {
                let c = &self.inverse_metric[j][i];
                if c.is_zero() {
                    continue;
                }
                mp = &mp - &(&g(self.p[i]) * &g(self.psib[j])).scale(&(q(2) * c));
                pm = &pm - &(&g(self.pb[j]) * &g(self.psi[i])).scale(&(q(2) * c));
            }
        }
        N2Generators { mm, mp, pp, pm }
    }

    /// `a_(0)b`.
    pub fn zeroth(&self, a: &Element, b: &Element) -> Result<Element> {
        self.pva.nth_product(a, b, 0)
    }
}

// ---------------------------------------------------------------- closure

/// Closure of `{Q^{−−}, Q^{−+}}` under the λ-bracket.
#[derive(Clone, Debug)]
pub struct ClosureReport {
    /// `(name, element)`; `J` and `L` are read off `{Q^{−−}_λ Q^{−+}}`.
    pub generators: Vec<(String, Element)>,
    /// `(a, b, n, [(coefficient, generator, T-order)])` for `a_(n)b`; the
    /// generator `"1"` stands for the unit.
    pub constants: Vec<(String, String, u32, Vec<(Q, String, u32)>)>,
    pub failures: Vec<String>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Writes `target` as a rational combination of `basis`, if possible.
pub fn span_coordinates(basis: &[Element], target: &Element) -> Option<Vec<Q>> {
    let mut monos: BTreeMap<Monomial, usize> = BTreeMap::new();
    for e in basis.iter().chain(std::iter::once(target)) {
        for (m, _) in e.terms() {
            let k = monos.len();
            monos.entry(m.clone()).or_insert(k);
        }
    }
    let rows = monos.len();
    let mut a = vec![vec![Q::zero(); basis.len()]; rows];
    let mut b = vec![Q::zero(); rows];
    for (c, e) in basis.iter().enumerate() {
        for (m, v) in e.terms() {
            a[monos[m]][c] = v.clone();
        }
    }
    for (m, v) in target.terms() {
        b[monos[m]] = v.clone();
    }
    if rows == 0 {
        return Some(vec![Q::zero(); basis.len()]);
    }
    solve(&a, &b)
}

pub fn n2_closure(model: &N2Model) -> Result<ClosureReport> {
    let p = &model.pva;
    let g = model.generators();
    let b = p.lambda_bracket(&g.mm, &g.mp)?;
    let j = b.coeff(1);
    let l = &b.coeff(0) - &j.t().scale(&(q(1) / q(2)));
    let gens: Vec<(String, Element)> =
        vec![("Q--".into(), g.mm.clone()), ("Q-+".into(), g.mp.clone()), ("J".into(), j), ("L".into(), l)];
    let sig = model.signature();
    let max_t = 3;
    let mut basis = vec![Element::one(sig)];
    let mut labels = vec![("1".to_string(), 0)];
    for (name, e) in &gens {
        let mut d = e.clone();
        for k in 0..=max_t {
            basis.push(d.clone());
            labels.push((name.clone(), k));
            d = d.t();
        }
    }
    let mut constants = Vec::new();
    let mut failures = Vec::new();
    for (na, a) in &gens {
        for (nb, bb) in &gens {
            for (n, c) in p.products(a, bb)?.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                match span_coordinates(&basis, &c) {
                    Some(coords) => {
                        let terms = coords
                            .into_iter()
                            .zip(&labels)
                            .filter(|(v, _)| !v.is_zero())
                            .map(|(v, (name, k))| (v, name.clone(), *k))
                            .collect();
                        constants.push((na.clone(), nb.clone(), n as u32, terms));
                    }
                    None => failures.push(format!("{na}_({n}){nb} = {c}")),
                }
            }
        }
    }
    Ok(ClosureReport { generators: gens, constants, failures })
}

// ---------------------------------------------------------------- Schouten

/// Checks that `e` is `Σ f(x)·φ_{i₁}⋯φ_{i_k}` with holomorphic polynomial
/// coefficients.
pub fn check_polyvector(model: &N2Model, e: &Element) -> Result<()> {
    if !e.is_polynomial() {
        return Err(Error::NotPolyvector(e.to_string()));
    }
    for j in e.jets() {
        let g = j.gen as usize;
        if j.order != 0 || j.tau != 0 || !(model.x.contains(&g) || model.psi.contains(&g)) {
            return Err(Error::NotPolyvector(e.to_string()));
        }
    }
    if e.terms().any(|(m, _)| m.factors().iter().any(|(v, _)| !matches!(v, Var::Jet(_)))) {
        return Err(Error::NotPolyvector(e.to_string()));
    }
    Ok(())
}

/// `a_(0)(Q^{++}_(0) b)`.
pub fn schouten(model: &N2Model, a: &Element, b: &Element) -> Result<Element> {
    check_polyvector(model, a)?;
    check_polyvector(model, b)?;
    let qpp = model.generators().pp;
    model.zeroth(a, &model.zeroth(&qpp, b)?)
}

/// Schouten–Nijenhuis bracket on polyvectors written with odd symbols
/// `φ_i = ∂_i`: `Σ_i P ∂⃖/∂φ_i · ∂Q/∂xⁱ − P ∂⃖/∂xⁱ · ∂Q/∂φ_i`.
pub fn schouten_oracle(model: &N2Model, a: &Element, b: &Element) -> Result<Element> {
    check_polyvector(model, a)?;
    check_polyvector(model, b)?;
    let mut out = Element::zero(model.signature());
    for i in 0..model.n {
        let (x, psi) = (Var::jet(model.x[i], 0), Var::jet(model.psi[i], 0));
        out = &out + &(&a.right_partial(&psi) * &b.partial(&x));
        out = &out - &(&a.right_partial(&x) * &b.partial(&psi));
    }
    Ok(out)
}

/// A random polyvector `Σ f(x)·φ_{i₁}⋯φ_{i_k}` with `k ≤ 2` and coefficients
/// of degree ≤ 2.
pub fn random_polyvector(model: &N2Model, r: &mut ChaCha8Rng) -> Element {
    let sig = model.signature().clone();
    let shape = Shape::new(0, 2, 2).with_generators(model.x.clone()).with_constants();
    let psis: Vec<Element> = model.psi.iter().map(|&g| model.gen(g)).collect();
    let mut out = Element::zero(&sig);
    for _ in 0..r.gen_range(1..3) {
        let mut v = random_element(&sig, r, &shape);
        for _ in 0..r.gen_range(0..3) {
            v = &v * &psis[r.gen_range(0..psis.len())];
        }
        out = &out + &v;
    }
    out
}

// ---------------------------------------------------------- Maurer–Cartan

fn check_mc_input(e: &Element, what: &str) -> Result<()> {
    if e.is_zero() {
        return Ok(());
    }
    if e.parity() != Some(Parity::Odd) || e.weight() != Some(1) {
        return Err(Error::ParityWeightMismatch(format!("{what} must be odd of weight 1: {e}")));
    }
    Ok(())
}

/// Class of `Q^{−−}_(0)γ + ½ γ_(0)γ` modulo `T`.
pub fn mc_residual(model: &N2Model, gamma: &Element) -> Result<LieClass> {
    check_mc_input(gamma, "γ")?;
    let qmm = model.generators().mm;
    let r = &model.zeroth(&qmm, gamma)? + &model.zeroth(gamma, gamma)?.scale(&(q(1) / q(2)));
    Ok(LieClass::new(r))
}

/// `((Q^{−−}+γ)_(0))² v = ((Q^{−−}_(0)γ)_(0) + ½(γ_(0)γ)_(0)) v`.
pub fn deformed_square_identity(model: &N2Model, gamma: &Element, v: &Element) -> Result<bool> {
    check_mc_input(gamma, "γ")?;
    let qmm = model.generators().mm;
    let d = &qmm + gamma;
    let lhs = model.zeroth(&d, &model.zeroth(&d, v)?)?;
    let c = &model.zeroth(&qmm, gamma)? + &model.zeroth(gamma, gamma)?.scale(&(q(1) / q(2)));
    Ok(lhs == model.zeroth(&c, v)?)
}

/// Infinitesimal gauge displacement `Q^{−−}_(0)β + γ_(0)β`.
pub fn gauge_action(model: &N2Model, beta: &Element, gamma: &Element) -> Result<Element> {
    if !beta.is_zero() && (beta.parity() != Some(Parity::Even) || beta.weight() != Some(1)) {
        return Err(Error::ParityWeightMismatch(format!("β must be even of weight 1: {beta}")));
    }
    check_mc_input(gamma, "γ")?;
    let qmm = model.generators().mm;
    Ok(&model.zeroth(&qmm, beta)? + &model.zeroth(gamma, beta)?)
}

// -------------------------------------------------------- cohomology

/// Which differential `q_cohomology` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Differential {
    /// `Q^{−−}_(0)`, the half-twisted model.
    HalfTwisted,
    /// `(Q^{−−} + Q^{++})_(0)`.
    AModel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyEntry {
    pub space: usize,
    pub rank_out: usize,
    pub cohomology: usize,
    /// Expected dimension: the holomorphic monomial count for the
    /// half-twisted differential, de Rham of affine space at weight 0 for
    /// the A-model.
    pub reference: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct CohomologyTable {
    pub entries: BTreeMap<(i64, i64), CohomologyEntry>,
}

impl CohomologyTable {
    pub fn total(&self) -> usize {
        self.entries.values().map(|e| e.cohomology).sum()
    }

    pub fn matches_reference(&self) -> bool {
        self.entries.values().all(|e| e.reference.is_none_or(|r| r == e.cohomology))
    }
}

impl fmt::Display for CohomologyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "weight fermion dim rank H expected")?;
        for ((w, fe), e) in &self.entries {
            let r = e.reference.map_or("-".to_string(), |r| r.to_string());
            writeln!(f, "{w} {fe} {} {} {} {r}", e.space, e.rank_out, e.cohomology)?;
        }
        write!(f, "total {}", self.total())
    }
}

/// Monomials of weight ≤ `max_weight` over `gens` whose degree in the
/// order-0 variables of `counted` is at most `max_degree`.
fn enumerate(model: &N2Model, gens: &[usize], counted: &[usize], max_weight: u32, max_degree: u32) -> Vec<Monomial> {
    let sig = model.signature();
    let mut vars: Vec<(Jet, u32, bool, bool)> = Vec::new();
    for &g in gens {
        let spec = &sig.generators[g];
        for m in 0..=max_weight.saturating_sub(spec.weight) {
            let w = spec.weight + m;
            let is_counted = m == 0 && counted.contains(&g);
            vars.push((Jet::new(g, m), w, spec.parity.is_odd(), is_counted));
        }
    }
    vars.sort();
    let mut out = Vec::new();
    let mut cur: Vec<(Var, i32)> = Vec::new();
    fn rec(
        vars: &[(Jet, u32, bool, bool)],
        i: usize,
        weight: u32,
        degree: u32,
        max_weight: u32,
        max_degree: u32,
        cur: &mut Vec<(Var, i32)>,
        out: &mut Vec<Monomial>,
    ) {
        if i == vars.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        let (j, w, odd, counted) = vars[i];
        let mut e = 0u32;
        loop {
            let nw = weight + w * e;
            let nd = degree + if counted { e } else { 0 };
            if nw > max_weight || nd > max_degree || (odd && e > 1) {
                break;
            }
            if w == 0 && !counted && !odd && e > max_degree {
                break;
            }
            if e > 0 {
                cur.push((Var::Jet(j), e as i32));
            }
            rec(vars, i + 1, nw, nd, max_weight, max_degree, cur, out);
            if e > 0 {
                cur.pop();
            }
            e += 1;
        }
    }
    rec(&vars, 0, 0, 0, max_weight, max_degree, &mut cur, &mut out);
    out
}

/// Ranks of the chosen differential on the truncation (weight ≤ `w`,
/// degree ≤ `d`) per (weight, fermion) bigrade, compared with the count of
/// holomorphic monomials under the same truncation.
pub fn q_cohomology(model: &N2Model, w: u32, d: u32, which: Differential) -> Result<CohomologyTable> {
    let sig = model.signature().clone();
    let g = model.generators();
    let (diff, counted) = match which {
        Differential::HalfTwisted => (g.mm.clone(), [&model.x[..], &model.xb[..], &model.phib[..]].concat()),
        Differential::AModel => {
            (&g.mm + &g.pp, [&model.x[..], &model.xb[..], &model.phi[..], &model.phib[..]].concat())
        }
    };
    let holo_counted = model.x.clone();
    let all: Vec<usize> = (0..sig.num_generators()).collect();
    let holo: Vec<usize> = [&model.x[..], &model.p[..], &model.phi[..], &model.psi[..]].concat();
    let weight_of = |m: &Monomial| m.weight(&sig);
    let mut spaces: BTreeMap<(i64, i64), Vec<Monomial>> = BTreeMap::new();
    for m in enumerate(model, &all, &counted, w, d) {
        spaces.entry((weight_of(&m), model.monomial_fermion(&m))).or_default().push(m);
    }
    let mut holo_count: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    if which == Differential::HalfTwisted {
        for m in enumerate(model, &holo, &holo_counted, w, d) {
            *holo_count.entry((weight_of(&m), model.monomial_fermion(&m))).or_default() += 1;
        }
    }
    let index: BTreeMap<(i64, i64), BTreeMap<Monomial, usize>> = spaces
        .iter()
        .map(|(k, v)| (*k, v.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()))
        .collect();
    let mut ranks: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for ((wt, f), basis) in &spaces {
        let target = index.get(&(*wt, f + 1));
        let mut rows = Vec::new();
        for m in basis {
            let img = model.zeroth(&diff, &Element::monomial(&sig, m.clone(), q(1)))?;
            let mut row = vec![Q::zero(); target.map_or(0, |t| t.len())];
            for (mm, c) in img.terms() {
                let pos = target
                    .and_then(|t| t.get(mm))
                    .ok_or(Error::TruncationUnstable { weight: *wt, fermion: *f })?;
                row[*pos] = c.clone();
            }
            rows.push(row);
        }
        ranks.insert((*wt, *f), if rows.iter().all(|r| r.is_empty()) { 0 } else { rank(&rows) });
    }
    let mut entries = BTreeMap::new();
    for ((wt, f), basis) in &spaces {
        let r_out = ranks[&(*wt, *f)];
        let r_in = ranks.get(&(*wt, f - 1)).copied().unwrap_or(0);
        entries.insert(
            (*wt, *f),
            CohomologyEntry {
                space: basis.len(),
                rank_out: r_out,
                cohomology: basis.len() - r_out - r_in,
                reference: match which {
                    Differential::HalfTwisted => Some(holo_count.get(&(*wt, *f)).copied().unwrap_or(0)),
                    Differential::AModel if *wt == 0 => Some(usize::from(*f == 0)),
                    Differential::AModel => None,
                },
            },
        );
    }
    Ok(CohomologyTable { entries })
}
