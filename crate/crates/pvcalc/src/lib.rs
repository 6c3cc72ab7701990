//! Exact symbolic computation with Poisson vertex algebras over differential
//! polynomial superalgebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`diffpoly`]: graded generators, jet monomials, exact rational elements,
//!   total/partial/variational derivatives.
//! * [`pva`]: bracket tables, λ-brackets and n-products, axiom validation,
//!   the Lie quotient and horizontal twists.
//! * [`geometry`]: the canonical SVDO, Courant operations, H-twists and
//!   B-field shears, polynomial de Rham calculus.
//! * [`varcalc`]: the variational bicomplex on a 2D jet space,
//!   Euler–Lagrange, Noether and Legendre.
//! * [`models`]: WZW currents, Sugawara elements, σ-model Virasoro
//!   generators, the N=2 model, Schouten brackets, Maurer–Cartan checks and
//!   truncated cohomology.
//! * [`cli`]: a small expression language and command runner.

pub mod cli;
pub mod diffpoly;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod pva;
pub mod random;
pub mod rational;
pub mod varcalc;

pub use error::{Error, Result};
pub use rational::Q;
