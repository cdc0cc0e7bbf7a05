//! Exact lattice computations for the Beauville-Bogomolov lattice
//! U^3 + (-2)^2 of OG6-type hyperkahler manifolds: discriminant forms,
//! Eichler transvections, orbit classification, monodromy factorization
//! and wall-and-chamber queries, all in exact integer/rational arithmetic.

pub mod cones;
pub mod error;
pub mod isometry;
pub mod json;
pub mod lattice;
pub mod matrix;
pub mod mukai;
pub mod orbits;

pub use error::{Error, Result};
