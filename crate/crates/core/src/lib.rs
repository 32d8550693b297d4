//! Exact computations with congruences of semirings.
//!
//! * [`semiring`]: finite semirings as tables, the catalog, constructions.
//! * [`congruence`]: closure, congruence lattices, Boolean quotients,
//!   bounded closure on windows of 𝔹[X] and ℕ.
//! * [`algebraic`]: exact arithmetic and signs in a real number field.
//! * [`order`]: positive parts of real orders ℤ[θ] and their congruences.
//! * [`flat`]: nice collections of lattice vectors and the covering
//!   procedure for positive linear forms.

pub mod acceptance;
pub mod algebraic;
pub mod cli;
pub mod congruence;
pub mod error;
pub mod flat;
mod json;
pub mod lattice;
pub mod order;
pub mod poly;
pub mod semiring;

pub use error::{Error, Result};
