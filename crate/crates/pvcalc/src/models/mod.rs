//! Model presets and the checks run on them: WZW currents and Sugawara
//! elements, σ-model Virasoro generators, the N=2 model with its
//! Q-generators, Schouten and Maurer–Cartan calculus, truncated cohomology.

mod fixtures;
mod n2;
mod sigma;
mod wzw;

pub use fixtures::{derived_fixtures, mc_witness};
pub use n2::{
    check_polyvector, deformed_square_identity, gauge_action, mc_residual, n2_closure, q_cohomology, random_polyvector, schouten,
    schouten_oracle, span_coordinates, ClosureReport, CohomologyEntry, CohomologyTable, Differential, N2Generators,
    N2Model,
};
pub use sigma::{sigma_virasoro, virasoro_shape, SigmaVirasoro};
pub use wzw::{gl1_legendre_identification, ratio, AffineReport, SugawaraReport, WzwModel};

use crate::geometry::canonical_svdo;
use crate::pva::Pva;
use crate::rational::parse_q;
use crate::varcalc::SigmaModel;
use crate::{Error, Result};

/// A named preset.
#[derive(Clone, Debug)]
pub enum Preset {
    Canonical(Pva),
    Wzw(WzwModel),
    Sigma(SigmaModel),
    N2(N2Model),
}

impl Preset {
    /// The PVA a preset lives in; the σ-model maps to the canonical SVDO
    /// its currents are pushed into.
    pub fn pva(&self) -> Result<Pva> {
        match self {
            Preset::Canonical(p) => Ok(p.clone()),
            Preset::Wzw(m) => Ok(m.pva.clone()),
            Preset::Sigma(m) => canonical_svdo(m.dim()),
            Preset::N2(m) => Ok(m.pva.clone()),
        }
    }
}

fn dimension(s: &str) -> Result<usize> {
    s.parse::<usize>()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| Error::InvalidArgument(format!("bad dimension `{s}`")))
}

/// Looks up `canonical:n`, `canonical-sigma:n` (functions of σ adjoined), `wzw:gl1:k`, `wzw:gl2:k`, `sigma-flat:n`,
/// `n2-flat:n`.
pub fn preset(name: &str) -> Result<Preset> {
    let parts: Vec<&str> = name.split(':').collect();
    match parts.as_slice() {
        ["canonical", n] => Ok(Preset::Canonical(canonical_svdo(dimension(n)?)?)),
        ["canonical-sigma", n] => Ok(Preset::Canonical(canonical_svdo(dimension(n)?)?.adjoin_functions()?)),
        ["wzw", g, k] => {
            let n = match *g {
                "gl1" => 1,
                "gl2" => 2,
                _ => return Err(Error::UnknownIdentifier(name.into())),
            };
            Ok(Preset::Wzw(WzwModel::new(n, parse_q(k)?)?))
        }
        ["sigma-flat", n] => Ok(Preset::Sigma(SigmaModel::flat(dimension(n)?)?)),
        ["n2-flat", n] => Ok(Preset::N2(N2Model::flat(dimension(n)?)?)),
        _ => Err(Error::UnknownIdentifier(name.into())),
    }
}

pub const PRESET_NAMES: [&str; 6] =
    ["canonical:n", "canonical-sigma:n", "wzw:gl1:k", "wzw:gl2:k", "sigma-flat:n", "n2-flat:n"];
