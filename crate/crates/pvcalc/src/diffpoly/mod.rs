//! Differential polynomial superalgebras: graded generators, jets, exact
//! elements and the derivations acting on them.

mod element;
mod monomial;
mod serial;
mod signature;

pub use element::{same_sig, Element};
pub use monomial::{mul_monomials, Jet, Monomial, Var};
pub use serial::{element_from_json, element_to_json, var_name};
pub use signature::{
    is_identifier, koszul, GeneratorSpec, ParameterSpec, Parity, Signature, SignatureBuilder, UnitSpec,
};

#[cfg(test)]
mod tests;
