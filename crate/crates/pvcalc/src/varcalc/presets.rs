use std::sync::Arc;

use num_traits::Zero;

use super::forms::{Characteristic, JetForm};
use super::lagrangian::{Lagrangian, Orientation};
use crate::diffpoly::{Element, Signature};
use crate::geometry::canonical_signature;
use crate::rational::{q, Q};
use crate::{Error, Result};

/// Fields with the canonical coordinate names and base variables `tau`, `sigma`.
pub fn field_signature(n: usize) -> Result<Arc<Signature>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let c = canonical_signature(n);
    let mut b = Signature::builder();
    for g in c.generators.iter().filter(|g| g.weight == 0) {
        b = b.even(&g.name, 0);
    }
    b.base("tau").base("sigma").build()
}

fn identity(n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { Q::zero() }).collect()).collect()
}

fn check_metric(g: &[Vec<Q>], n: usize) -> Result<()> {
    let ok = g.len() == n && g.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..n).all(|j| g[i][j] == g[j][i]));
    if !ok {
        return Err(Error::InvalidArgument("metric must be a symmetric n×n matrix".into()));
    }
    Ok(())
}

/// `⟨a, b⟩_G` for vectors of elements.
fn pair(g: &[Vec<Q>], a: &[Element], b: &[Element]) -> Element {
    let mut out = Element::zero(a[0].signature());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if !g[i][j].is_zero() {
                out = &out + &(ai * bj).scale(&g[i][j]);
            }
        }
    }
    out
}

/// The flat σ-model `½ Σ G_ij (∂_σxⁱ∂_σxʲ − ∂_τxⁱ∂_τxʲ) dσ∧dτ`.
#[derive(Clone, Debug)]
pub struct SigmaModel {
    pub metric: Vec<Vec<Q>>,
    pub lagrangian: Lagrangian,
}

impl SigmaModel {
    pub fn flat(n: usize) -> Result<SigmaModel> {
        SigmaModel::with_metric(identity(n))
    }

    pub fn with_metric(metric: Vec<Vec<Q>>) -> Result<SigmaModel> {
        let n = metric.len();
        check_metric(&metric, n)?;
        let sig = field_signature(n)?;
        let s = SigmaModel::velocities(&sig, n, 0, 1);
        let t = SigmaModel::velocities(&sig, n, 1, 0);
        let density = (&pair(&metric, &s, &s) - &pair(&metric, &t, &t)).scale(&(q(1) / q(2)));
        let lagrangian = Lagrangian::new(density, Orientation::SigmaTau)?;
        Ok(SigmaModel { metric, lagrangian })
    }

    fn velocities(sig: &Arc<Signature>, n: usize, tau: u32, order: u32) -> Vec<Element> {
        (0..n).map(|j| Element::jet2(sig, j, tau, order)).collect()
    }

    pub fn signature(&self) -> &Arc<Signature> {
        self.lagrangian.signature()
    }

    pub fn dim(&self) -> usize {
        self.metric.len()
    }

    fn s(&self) -> Vec<Element> {
        SigmaModel::velocities(self.signature(), self.dim(), 0, 1)
    }

    fn t(&self) -> Vec<Element> {
        SigmaModel::velocities(self.signature(), self.dim(), 1, 0)
    }

    /// `f(σ + sign·τ)` for a polynomial given by its coefficients.
    pub fn profile(&self, f: &[Q], sign: i64) -> Element {
        let sig = self.signature();
        let u = &Element::base(sig, "sigma").unwrap() + &Element::base(sig, "tau").unwrap().scale_int(sign);
        let mut out = Element::zero(sig);
        for c in f.iter().rev() {
            out = &(&out * &u) + &Element::constant(sig, c.clone());
        }
        out
    }

    /// `ρ(∂_τ)` with `α = L̃_{τσ} dσ`.
    pub fn time_translation(&self) -> (Characteristic, JetForm) {
        let ch = Characteristic::new(self.t().into_iter().enumerate().collect());
        let alpha = JetForm::dsigma(self.signature()).mul_function(&self.lagrangian.tau_sigma_density());
        (ch, alpha)
    }

    /// `ξ⁻ = ½f(σ−τ)ρ(∂_σ−∂_τ)` with
    /// `α = ¼f(σ−τ)⟨∂_σx−∂_τx, ∂_σx+∂_τx⟩(dσ+dτ)`.
    pub fn xi_minus(&self, f: &[Q]) -> (Characteristic, JetForm) {
        self.chiral(f, -1)
    }

    /// `ξ⁺ = ½f(σ+τ)ρ(∂_σ+∂_τ)` with
    /// `α = −¼f(σ+τ)⟨∂_σx−∂_τx, ∂_σx+∂_τx⟩(dσ−dτ)`.
    pub fn xi_plus(&self, f: &[Q]) -> (Characteristic, JetForm) {
        self.chiral(f, 1)
    }

    fn chiral(&self, f: &[Q], sign: i64) -> (Characteristic, JetForm) {
        let sig = self.signature().clone();
        let prof = self.profile(f, sign);
        let (s, t) = (self.s(), self.t());
        let minus: Vec<Element> = s.iter().zip(&t).map(|(a, b)| a - b).collect();
        let plus: Vec<Element> = s.iter().zip(&t).map(|(a, b)| a + b).collect();
        let dir = if sign < 0 { &minus } else { &plus };
        let half = q(1) / q(2);
        let ch = Characteristic::new(dir.iter().map(|d| (&prof * d).scale(&half)).enumerate().collect());
        let c = (&prof * &pair(&self.metric, &minus, &plus)).scale(&(q(-sign) / q(4)));
        let frame = JetForm::dsigma(&sig).add(&JetForm::dtau(&sig).scale(&q(-sign)));
        (ch, frame.mul_function(&c))
    }
}

/// `½(∂_τx)² dτ∧dσ` in one field.
pub fn free_particle() -> Result<Lagrangian> {
    let sig = field_signature(1)?;
    let t = Element::jet2(&sig, 0, 1, 0);
    Lagrangian::new((&t * &t).scale(&(q(1) / q(2))), Orientation::TauSigma)
}
