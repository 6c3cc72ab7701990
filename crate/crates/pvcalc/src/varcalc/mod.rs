//! Variational calculus on the 2D jet space with coordinates `τ`, `σ`:
//! the bicomplex, Euler–Lagrange, Noether currents and the Legendre map
//! into the canonical SVDO.

mod forms;
mod lagrangian;
mod legendre;
mod presets;

pub use forms::{d_sigma, d_tau, Characteristic, FormVar, JetForm};
pub use lagrangian::{
    euler_lagrange, euler_lagrange_residual, noether, verify_symmetry, EulerLagrange, Lagrangian, OnShell,
    Orientation,
};
pub use legendre::{legendre, Legendre};
pub use presets::{field_signature, free_particle, SigmaModel};

/// The evolutionary derivation with the given characteristic.
pub fn prolong(ch: &Characteristic) -> impl Fn(&crate::diffpoly::Element) -> crate::diffpoly::Element + '_ {
    move |e| ch.apply(e)
}
