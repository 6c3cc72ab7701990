//! The canonical SVDO, Courant operations on its weight-one part, H-twists,
//! B-field shears and polynomial de Rham calculus on the target.

mod forms;

use std::sync::Arc;

pub use forms::{sort_indices, TargetForm};

use crate::diffpoly::{Element, Signature, Var};
use crate::pva::{BracketTable, LambdaPolynomial, Pva};
use crate::{Error, Result};

/// Generator indices of target coordinates `xⁱ` and their momenta `p_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coords {
    pub x: Vec<usize>,
    pub p: Vec<usize>,
}

impl Coords {
    /// Pairs every even weight-0 generator `x<s>` with an even weight-1
    /// generator `p<s>`.
    pub fn detect(sig: &Signature) -> Result<Coords> {
        let mut x = Vec::new();
        let mut p = Vec::new();
        for (i, g) in sig.generators.iter().enumerate() {
            if g.parity.is_odd() || g.weight != 0 {
                continue;
            }
            let Some(suffix) = g.name.strip_prefix('x') else { continue };
            if let Some(j) = sig.generator_index(&format!("p{suffix}")) {
                let pg = &sig.generators[j];
                if !pg.parity.is_odd() && pg.weight == 1 {
                    x.push(i);
                    p.push(j);
                }
            }
        }
        if x.is_empty() {
            return Err(Error::InvalidArgument("no coordinate/momentum pairs found".into()));
        }
        Ok(Coords { x, p })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

fn coordinate_names(n: usize) -> Vec<(String, String)> {
    if n == 1 {
        vec![("x".into(), "p".into())]
    } else {
        (1..=n).map(|i| (format!("x{i}"), format!("p{i}"))).collect()
    }
}

/// Signature of the canonical SVDO on affine n-space.
pub fn canonical_signature(n: usize) -> Arc<Signature> {
    let names = coordinate_names(n);
    let mut b = Signature::builder();
    for (x, _) in &names {
        b = b.even(x, 0);
    }
    for (_, p) in &names {
        b = b.even(p, 1);
    }
    b.build().expect("valid names")
}

/// The canonical table `{p_i λ xʲ} = δᵢʲ` (all other pairs zero).
pub fn canonical_table(sig: &Arc<Signature>, coords: &Coords) -> BracketTable {
    let mut t = BracketTable::new(sig);
    for (&xi, &pi) in coords.x.iter().zip(coords.p.iter()) {
        t.set(pi, xi, LambdaPolynomial::constant(Element::one(sig))).expect("valid indices");
    }
    t
}

pub fn canonical_svdo(n: usize) -> Result<Pva> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let sig = canonical_signature(n);
    let coords = Coords::detect(&sig)?;
    Pva::new(canonical_table(&sig, &coords))
}

/// A weight-one element `Σ aⁱ p_i + Σ b_i T(xⁱ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CourantSection {
    pub vector: Vec<Element>,
    pub form: Vec<Element>,
}

fn is_function(e: &Element, coords: &Coords) -> bool {
    e.jets().iter().all(|j| j.order == 0 && j.tau == 0 && coords.x.contains(&(j.gen as usize)))
}

impl CourantSection {
    /// Splits a weight-one element along `V₁ = T ⊕ Ω`.
    pub fn decompose(p: &Pva, e: &Element) -> Result<CourantSection> {
        let coords = Coords::detect(p.signature())?;
        let sig = p.signature();
        if !e.is_zero() && e.weight() != Some(1) {
            return Err(Error::NotWeightOne(e.to_string()));
        }
        let mut vector = Vec::new();
        let mut form = Vec::new();
        let mut rebuilt = Element::zero(sig);
        for (&xi, &pi) in coords.x.iter().zip(coords.p.iter()) {
            let a = e.partial(&Var::jet(pi, 0));
            let b = e.partial(&Var::jet(xi, 1));
            if !is_function(&a, &coords) || !is_function(&b, &coords) {
                return Err(Error::NotWeightOne(e.to_string()));
            }
            rebuilt = &rebuilt + &(&(&a * &Element::jet(sig, pi, 0)) + &(&b * &Element::jet(sig, xi, 1)));
            vector.push(a);
            form.push(b);
        }
        if rebuilt != *e {
            return Err(Error::NotWeightOne(e.to_string()));
        }
        Ok(CourantSection { vector, form })
    }

    pub fn to_element(&self, p: &Pva) -> Result<Element> {
        let coords = Coords::detect(p.signature())?;
        let sig = p.signature();
        let mut out = Element::zero(sig);
        for (i, (&xi, &pi)) in coords.x.iter().zip(coords.p.iter()).enumerate() {
            out = &out + &(&self.vector[i] * &Element::jet(sig, pi, 0));
            out = &out + &(&self.form[i] * &Element::jet(sig, xi, 1));
        }
        Ok(out)
    }
}

/// The Dorfman bracket `A_(0)B` re-decomposed.
pub fn dorfman(p: &Pva, a: &Element, b: &Element) -> Result<CourantSection> {
    CourantSection::decompose(p, a)?;
    CourantSection::decompose(p, b)?;
    CourantSection::decompose(p, &p.nth_product(a, b, 0)?)
}

/// The symmetric pairing `A_(1)B`.
pub fn pairing(p: &Pva, a: &Element, b: &Element) -> Result<Element> {
    CourantSection::decompose(p, a)?;
    CourantSection::decompose(p, b)?;
    p.nth_product(a, b, 1)
}

/// A form on the detected coordinates of `p`.
pub fn form(p: &Pva, degree: usize) -> Result<TargetForm> {
    let coords = Coords::detect(p.signature())?;
    Ok(TargetForm::zero(p.signature(), &coords.x, degree))
}

/// `{p_i λ p_j} += Σ_k H̃_ijk T(xᵏ)`.
pub fn h_twist(p: &Pva, h: &TargetForm) -> Result<Pva> {
    let coords = Coords::detect(p.signature())?;
    if h.degree != 3 || h.coords != coords.x {
        return Err(Error::InvalidArgument("H must be a 3-form on the target coordinates".into()));
    }
    let sig = p.signature();
    let mut table = p.table().clone();
    let n = coords.dim();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut e = Element::zero(sig);
            for k in 0..n {
                let c = h.component(&[i, j, k]);
                if !c.is_zero() {
                    e = &e + &(&c * &Element::jet(sig, coords.x[k], 1));
                }
            }
            if !e.is_zero() {
                table.add_to(coords.p[i], coords.p[j], &LambdaPolynomial::constant(e))?;
            }
        }
    }
    p.with_table(table)
}

/// The substitution `p_i ↦ p_i + Σ_j α_ij T(xʲ)` applied to an element.
pub fn apply_shear(p: &Pva, alpha: &TargetForm, e: &Element) -> Result<Element> {
    let coords = Coords::detect(p.signature())?;
    if alpha.degree != 2 || alpha.coords != coords.x {
        return Err(Error::InvalidArgument("α must be a 2-form on the target coordinates".into()));
    }
    let sig = p.signature().clone();
    let n = coords.dim();
    let mut images: Vec<Option<Element>> = vec![None; sig.num_generators()];
    for i in 0..n {
        let mut img = Element::jet(&sig, coords.p[i], 0);
        for j in 0..n {
            let c = alpha.component(&[i, j]);
            if !c.is_zero() {
                img = &img + &(&c * &Element::jet(&sig, coords.x[j], 1));
            }
        }
        images[coords.p[i]] = Some(img);
    }
    e.substitute(&sig, &|v| match v {
        Var::Jet(j) => match &images[j.gen as usize] {
            Some(img) if j.tau == 0 => Ok(img.t_pow(j.order as u32)),
            _ => Ok(Element::var(&sig, *v)),
        },
        _ => Ok(Element::var(&sig, *v)),
    })
}

/// Checks `{φa_λ φb}_to = φ{a_λ b}_from` on all generator pairs; returns the
/// first failing pair.
pub fn check_homomorphism(
    from: &Pva,
    to: &Pva,
    phi: &dyn Fn(&Element) -> Result<Element>,
) -> Result<Option<(String, String)>> {
    let sig = from.signature();
    let n = sig.num_generators();
    let gens: Vec<Element> = (0..n).map(|i| Element::jet(sig, i, 0)).collect();
    let imgs: Vec<Element> = gens.iter().map(phi).collect::<Result<_>>()?;
    for a in 0..n {
        for b in 0..n {
            let lhs = to.lambda_bracket(&imgs[a], &imgs[b])?;
            let src = from.lambda_bracket(&gens[a], &gens[b])?;
            let mut rhs = LambdaPolynomial::zero(to.signature());
            for (k, c) in src.terms() {
                rhs.add_term(*k, &phi(c)?);
            }
            if lhs != rhs {
                return Ok(Some((sig.generators[a].name.clone(), sig.generators[b].name.clone())));
            }
        }
    }
    Ok(None)
}

/// Outcome of shearing by a 2-form.
#[derive(Clone, Debug)]
pub struct ShearReport {
    /// Every generator λ-bracket is preserved.
    pub automorphism: bool,
    /// The 3-form `D` with `{φp_i λ φp_j} − φ{p_i λ p_j} = Σ D̃_ijk T(xᵏ)`.
    pub discrepancy: TargetForm,
    /// The whole bracket discrepancy is accounted for by `discrepancy`.
    pub consistent: bool,
}

pub fn b_field_shear(p: &Pva, alpha: &TargetForm) -> Result<ShearReport> {
    let coords = Coords::detect(p.signature())?;
    let sig = p.signature().clone();
    let phi = |e: &Element| apply_shear(p, alpha, e);
    let automorphism = check_homomorphism(p, p, &phi)?.is_none();
    let n = coords.dim();
    let mut disc = TargetForm::zero(&sig, &coords.x, 3);
    let bracket_gap = |i: usize, j: usize| -> Result<LambdaPolynomial> {
        let a = Element::jet(&sig, coords.p[i], 0);
        let b = Element::jet(&sig, coords.p[j], 0);
        let lhs = p.lambda_bracket(&phi(&a)?, &phi(&b)?)?;
        let src = p.lambda_bracket(&a, &b)?;
        let mut rhs = LambdaPolynomial::zero(&sig);
        for (k, c) in src.terms() {
            rhs.add_term(*k, &phi(c)?);
        }
        Ok(lhs.sub(&rhs))
    };
    for i in 0..n {
        for j in i + 1..n {
            let g = bracket_gap(i, j)?.coeff(0);
            for k in j + 1..n {
                let c = g.partial(&Var::jet(coords.x[k], 1));
                disc.add_term(&[i, j, k], &c)?;
            }
        }
    }
    // the discrepancy must reproduce every p–p gap, and all other pairs
    // must be preserved
    let twisted = h_twist(p, &disc)?;
    let consistent = check_homomorphism(&twisted, p, &phi)?.is_none();
    Ok(ShearReport { automorphism, discrepancy: disc, consistent })
}
