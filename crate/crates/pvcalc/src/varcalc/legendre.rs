use std::sync::Arc;

use num_traits::Zero;

use super::forms::{FormVar, JetForm};
use super::lagrangian::Lagrangian;
use crate::diffpoly::{Element, Jet, Signature, Var};
use crate::geometry::{canonical_svdo, Coords};
use crate::linalg::inverse;
use crate::pva::Pva;
use crate::rational::Q;
use crate::{Error, Result};

/// The fiber derivative `x_j = ∂L̃/∂(∂_τxʲ) = Σ G_jk ∂_τxᵏ + B_j` of an order-1
/// Lagrangian quadratic in velocities, with its inverse.
#[derive(Clone, Debug)]
pub struct Legendre {
    source: Arc<Signature>,
    /// The canonical SVDO with `sigma` adjoined.
    pub target: Pva,
    pub metric: Vec<Vec<Q>>,
    pub inverse_metric: Vec<Vec<Q>>,
    /// Velocity-independent part of the momenta, over the source.
    pub offset: Vec<Element>,
    fields: Vec<usize>,
    coords: Coords,
}

pub fn legendre(l: &Lagrangian) -> Result<Legendre> {
    let sig = l.signature().clone();
    let n = l.fields.len();
    let dens = l.tau_sigma_density();
    let vel = |j: usize| Var::Jet(Jet::new2(l.fields[j], 1, 0));
    let mut metric = vec![vec![Q::zero(); n]; n];
    let mut offset = Vec::new();
    for a in 0..n {
        let m = dens.partial(&vel(a));
        let mut b = m.clone();
        for c in 0..n {
            let g = m.partial(&vel(c));
            metric[a][c] = g.as_constant().ok_or(Error::NonInvertibleFiberMetric)?;
            b = &b - &(&Element::var(&sig, vel(c)) * &g);
        }
        if b.jets().iter().any(|j| j.tau > 0) {
            return Err(Error::NonInvertibleFiberMetric);
        }
        offset.push(b);
    }
    let inverse_metric = inverse(&metric).ok_or(Error::NonInvertibleFiberMetric)?;
    let target = canonical_svdo(n)?.adjoin_functions()?;
    let coords = Coords::detect(target.signature())?;
    for (i, &f) in l.fields.iter().enumerate() {
        if sig.generators[f].name != target.signature().generators[coords.x[i]].name {
            return Err(Error::InvalidArgument(format!(
                "field `{}` does not match the canonical coordinate `{}`",
                sig.generators[f].name,
                target.signature().generators[coords.x[i]].name
            )));
        }
    }
    Ok(Legendre { source: sig, target, metric, inverse_metric, offset, fields: l.fields.clone(), coords })
}

impl Legendre {
    /// `∂L̃/∂(∂_τxʲ)` over the source.
    pub fn momentum(&self, j: usize) -> Element {
        let mut m = self.offset[j].clone();
        for k in 0..self.fields.len() {
            let v = Element::jet2(&self.source, self.fields[k], 1, 0);
            m = &m + &v.scale(&self.metric[j][k]);
        }
        m
    }

    /// The velocity `∂_τxʲ` expressed in target variables.
    pub fn velocity(&self, j: usize) -> Result<Element> {
        let tsig = self.target.signature();
        let mut v = Element::zero(tsig);
        for k in 0..self.fields.len() {
            let pk = Element::jet(tsig, self.coords.p[k], 0);
            let bk = self.push_static(&self.offset[k])?;
            v = &v + &(&pk - &bk).scale(&self.inverse_metric[j][k]);
        }
        Ok(v)
    }

    /// Pushes a velocity-free element (σ-jets of fields, σ, parameters).
    fn push_static(&self, e: &Element) -> Result<Element> {
        self.substitute(e, &|_, _| Err(Error::InvalidArgument("unexpected velocity".into())))
    }

    fn substitute(&self, e: &Element, vel: &dyn Fn(usize, u16) -> Result<Element>) -> Result<Element> {
        let tsig = self.target.signature().clone();
        let src = self.source.clone();
        e.substitute(&tsig, &|v| match v {
            Var::Jet(j) => {
                let i = self
                    .fields
                    .iter()
                    .position(|f| *f == j.gen as usize)
                    .ok_or_else(|| Error::InvalidArgument("not a field".into()))?;
                match j.tau {
                    0 => Ok(Element::jet(&tsig, self.coords.x[i], j.order as u32)),
                    1 => vel(i, j.order),
                    _ => Err(Error::InvalidArgument("second τ-derivatives must be reduced first".into())),
                }
            }
            Var::Base(b) => {
                let name = &src.base_variables[*b as usize];
                if name == "tau" {
                    Ok(Element::zero(&tsig))
                } else {
                    Element::base(&tsig, name)
                }
            }
            Var::Param(p) => Element::param(&tsig, &src.parameters[*p as usize].name),
            Var::Unit(_) => Err(Error::LaurentUnsupported),
        })
    }

    /// Restricts to `τ = 0` and replaces velocities by momenta.
    pub fn push_element(&self, e: &Element) -> Result<Element> {
        let vels: Vec<Element> = (0..self.fields.len()).map(|j| self.velocity(j)).collect::<Result<_>>()?;
        self.substitute(e, &|i, order| {
            let mut v = vels[i].clone();
            for _ in 0..order {
                v = self.target.derivation(&v);
            }
            Ok(v)
        })
    }

    /// The `dσ` coefficient of a (1,0)-form pushed into the target (`dτ ↦ 0`).
    pub fn push(&self, f: &JetForm) -> Result<Element> {
        if f.bidegree().is_some_and(|d| d != (1, 0)) {
            return Err(Error::InvalidArgument("expected a (1,0)-form".into()));
        }
        self.push_element(&f.coefficient(&[FormVar::DSigma]))
    }
}
