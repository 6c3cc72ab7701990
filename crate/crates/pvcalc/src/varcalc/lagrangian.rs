use std::sync::Arc;

use num_traits::Zero;

use super::forms::{d_sigma, d_tau, Characteristic, FormVar, JetForm};
use crate::diffpoly::{Element, Jet, Signature, Var};
use crate::linalg::inverse;
use crate::rational::Q;
use crate::{Error, Result};

/// Orientation of the volume form a density multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `L̃ dτ∧dσ`
    TauSigma,
    /// `L̃ dσ∧dτ`
    SigmaTau,
}

#[derive(Clone, Debug)]
pub struct Lagrangian {
    pub density: Element,
    pub orientation: Orientation,
    /// Generator indices of the fields.
    pub fields: Vec<usize>,
}

impl Lagrangian {
    /// A Lagrangian over every generator of the density's signature.
    pub fn new(density: Element, orientation: Orientation) -> Result<Lagrangian> {
        let fields = (0..density.signature().num_generators()).collect();
        let l = Lagrangian { density, orientation, fields };
        l.check_order()?;
        Ok(l)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        self.density.signature()
    }

    fn check_order(&self) -> Result<()> {
        for j in self.density.dependency_jets() {
            if j.tau + j.order > 1 {
                return Err(Error::HigherOrderLagrangian);
            }
        }
        Ok(())
    }

    pub fn volume(&self) -> JetForm {
        let sig = self.signature();
        match self.orientation {
            Orientation::TauSigma => JetForm::dtau(sig).wedge(&JetForm::dsigma(sig)),
            Orientation::SigmaTau => JetForm::dsigma(sig).wedge(&JetForm::dtau(sig)),
        }
    }

    pub fn form(&self) -> JetForm {
        self.volume().mul_function(&self.density)
    }

    /// The density against `dτ∧dσ`.
    pub fn tau_sigma_density(&self) -> Element {
        match self.orientation {
            Orientation::TauSigma => self.density.clone(),
            Orientation::SigmaTau => -&self.density,
        }
    }
}

/// `δL = −d_ρ γ + Σ E_j δxʲ ∧ vol`.
#[derive(Clone, Debug)]
pub struct EulerLagrange {
    pub gamma: JetForm,
    pub equations: Vec<(usize, Element)>,
}

pub fn euler_lagrange(l: &Lagrangian) -> Result<EulerLagrange> {
    l.check_order()?;
    let sig = l.signature().clone();
    let dl = &l.density;
    let mut gamma = JetForm::zero(&sig);
    let mut equations = Vec::new();
    // (first, second) one-forms of the volume form
    let (first, second) = match l.orientation {
        Orientation::TauSigma => (FormVar::DTau, FormVar::DSigma),
        Orientation::SigmaTau => (FormVar::DSigma, FormVar::DTau),
    };
    let slot = |v: FormVar, j: usize| match v {
        FormVar::DTau => Jet::new2(j, 1, 0),
        _ => Jet::new2(j, 0, 1),
    };
    for &j in &l.fields {
        let pa = dl.partial(&Var::Jet(slot(first, j)));
        let pb = dl.partial(&Var::Jet(slot(second, j)));
        let dx = JetForm::delta_jet(&sig, Jet::new(j, 0));
        gamma = gamma.add(&dx.wedge(&JetForm::factor(&sig, second)).mul_function(&pa));
        gamma = gamma.sub(&dx.wedge(&JetForm::factor(&sig, first)).mul_function(&pb));
        let e = &(&dl.partial(&Var::jet(j, 0)) - &d_tau(&dl.partial(&Var::Jet(Jet::new2(j, 1, 0)))))
            - &d_sigma(&dl.partial(&Var::Jet(Jet::new2(j, 0, 1))));
        equations.push((j, e));
    }
    Ok(EulerLagrange { gamma, equations })
}

/// `δL + d_ρ γ − Σ E_j δxʲ ∧ vol`, zero when the decomposition is right.
pub fn euler_lagrange_residual(l: &Lagrangian, el: &EulerLagrange) -> JetForm {
    let sig = l.signature();
    let mut r = l.form().delta().add(&el.gamma.d_rho());
    for (j, e) in &el.equations {
        let term = JetForm::delta_jet(sig, Jet::new(*j, 0)).wedge(&l.volume()).mul_function(e);
        r = r.sub(&term);
    }
    r
}

/// `Lie_ξ L = d_ρ α` exactly.
pub fn verify_symmetry(xi: &Characteristic, l: &Lagrangian, alpha: &JetForm) -> bool {
    l.form().lie(xi).sub(&alpha.d_rho()).is_zero()
}

/// The conserved current `α − ι_ξ γ`.
pub fn noether(xi: &Characteristic, alpha: &JetForm, gamma: &JetForm) -> JetForm {
    alpha.sub(&gamma.iota(xi))
}

/// Rewriting `x_(2+a, b) ↦ D_τ^a D_σ^b S` with `S` solving `E = 0` for the
/// second τ-derivatives.
#[derive(Clone, Debug)]
pub struct OnShell {
    sig: Arc<Signature>,
    solutions: Vec<(usize, Element)>,
}

impl OnShell {
    /// Requires `E_j = Σ_k M_jk ∂_τ²xᵏ + R_j` with `M` constant and invertible
    /// and `R` free of second τ-derivatives.
    pub fn new(l: &Lagrangian, el: &EulerLagrange) -> Result<OnShell> {
        let sig = l.signature().clone();
        let n = el.equations.len();
        let mut m = vec![vec![Q::zero(); n]; n];
        let mut rest = Vec::new();
        for (r, (_, e)) in el.equations.iter().enumerate() {
            let mut rem = e.clone();
            for (c, (k, _)) in el.equations.iter().enumerate() {
                let v = Var::Jet(Jet::new2(*k, 2, 0));
                let coeff = e.partial(&v);
                let cq = coeff.as_constant().ok_or_else(|| {
                    Error::Reduction(format!("non-constant coefficient of a second τ-derivative: {coeff}"))
                })?;
                rem = &rem - &(&Element::var(&sig, v) * &coeff);
                m[r][c] = cq;
            }
            if rem.jets().iter().any(|j| j.tau >= 2) {
                return Err(Error::Reduction(format!("equation is not of second order in τ: {e}")));
            }
            rest.push(rem);
        }
        let inv = inverse(&m).ok_or_else(|| Error::Reduction("singular principal symbol".into()))?;
        let mut solutions = Vec::new();
        for (r, (j, _)) in el.equations.iter().enumerate() {
            let mut s = Element::zero(&sig);
            for (c, rem) in rest.iter().enumerate() {
                s = &s - &rem.scale(&inv[r][c]);
            }
            solutions.push((*j, s));
        }
        Ok(OnShell { sig, solutions })
    }

    fn image(&self, j: Jet) -> Option<Element> {
        if j.tau < 2 {
            return None;
        }
        let (_, s) = self.solutions.iter().find(|(g, _)| *g == j.gen as usize)?;
        let mut e = s.clone();
        for _ in 0..j.tau - 2 {
            e = self.reduce(&d_tau(&e));
        }
        for _ in 0..j.order {
            e = d_sigma(&e);
        }
        Some(self.reduce(&e))
    }

    /// Eliminates all τ-orders ≥ 2.
    pub fn reduce(&self, e: &Element) -> Element {
        let sig = self.sig.clone();
        let mut cur = e.clone();
        for _ in 0..64 {
            if !cur.jets().iter().any(|j| j.tau >= 2) {
                return cur;
            }
            cur = cur
                .substitute(&sig, &|v| {
                    Ok(match v {
                        Var::Jet(j) if j.tau >= 2 => self.image(*j).unwrap_or_else(|| Element::var(&sig, *v)),
                        _ => Element::var(&sig, *v),
                    })
                })
                .expect("polynomial substitution");
        }
        cur
    }

    /// Checks that `d_ρ F` vanishes on shell.
    pub fn check_conserved(&self, f: &JetForm) -> Result<()> {
        let d = f.d_rho();
        for (_, c) in d.terms() {
            let r = self.reduce(c);
            if !r.is_zero() {
                return Err(Error::Reduction(r.to_string()));
            }
        }
        Ok(())
    }
}
