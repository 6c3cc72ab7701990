//! Seeded random elements for property checks.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::diffpoly::{Element, Jet, Parity, Signature, Var};
use crate::rational::{q, qf};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct Shape {
    pub max_weight: u32,
    pub max_degree: u32,
    pub max_terms: usize,
    /// Generators allowed to appear (all when `None`).
    pub generators: Option<Vec<usize>>,
    pub parity: Option<Parity>,
    /// Allow a jet-free constant term.
    pub constants: bool,
    /// Allow fractional coefficients.
    pub fractions: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_weight: 3,
            max_degree: 3,
            max_terms: 4,
            generators: None,
            parity: None,
            constants: false,
            fractions: true,
        }
    }
}

impl Shape {
    pub fn new(max_weight: u32, max_degree: u32, max_terms: usize) -> Self {
        Shape { max_weight, max_degree, max_terms, ..Shape::default() }
    }

    pub fn with_parity(mut self, p: Parity) -> Self {
        self.parity = Some(p);
        self
    }

    pub fn with_generators(mut self, g: Vec<usize>) -> Self {
        self.generators = Some(g);
        self
    }

    pub fn with_constants(mut self) -> Self {
        self.constants = true;
        self
    }
}

fn random_coeff(r: &mut ChaCha8Rng, fractions: bool) -> crate::Q {
    let mut n: i64 = r.gen_range(1..=4);
    if r.gen_bool(0.5) {
        n = -n;
    }
    if fractions && r.gen_bool(0.25) {
        qf(n, r.gen_range(2..=3))
    } else {
        q(n)
    }
}

/// A random monomial element (coefficient one) respecting the shape; may be
/// zero when an odd variable repeats.
pub fn random_monomial(sig: &Arc<Signature>, r: &mut ChaCha8Rng, shape: &Shape) -> Element {
    let gens: Vec<usize> = match &shape.generators {
        Some(g) => g.clone(),
        None => (0..sig.num_generators()).collect(),
    };
    let lo = if shape.constants { 0 } else { 1 };
    let degree = r.gen_range(lo..=shape.max_degree.max(lo));
    let mut budget = shape.max_weight as i64;
    let mut e = Element::one(sig);
    for _ in 0..degree {
        let candidates: Vec<usize> = gens
            .iter()
            .copied()
            .filter(|g| (sig.generators[*g].weight as i64) <= budget)
            .collect();
        if candidates.is_empty() {
            break;
        }
        let g = candidates[r.gen_range(0..candidates.len())];
        let room = budget - sig.generators[g].weight as i64;
        let order = if room > 0 { r.gen_range(0..=room.min(3)) } else { 0 };
        budget -= sig.generators[g].weight as i64 + order;
        e = &e * &Element::var(sig, Var::Jet(Jet::new(g, order as u32)));
    }
    e
}

pub fn random_element(sig: &Arc<Signature>, r: &mut ChaCha8Rng, shape: &Shape) -> Element {
    let mut acc = Element::zero(sig);
    let n = r.gen_range(1..=shape.max_terms.max(1));
    let mut tries = 0;
    let mut added = 0;
    while added < n && tries < 50 * n {
        tries += 1;
        let m = random_monomial(sig, r, shape);
        if m.is_zero() {
            continue;
        }
        if let Some(p) = shape.parity {
            if m.parity() != Some(p) {
                continue;
            }
        }
        acc = &acc + &m.scale(&random_coeff(r, shape.fractions));
        added += 1;
    }
    acc
}

/// A random nonzero element, retrying a bounded number of times.
pub fn random_nonzero(sig: &Arc<Signature>, r: &mut ChaCha8Rng, shape: &Shape) -> Element {
    for _ in 0..100 {
        let e = random_element(sig, r, shape);
        if !e.is_zero() {
            return e;
        }
    }
    Element::one(sig)
}
