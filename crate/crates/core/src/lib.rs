pub mod catalog;
pub mod certificate;
pub mod error;
pub mod lattice;
pub mod lp;
pub mod mixedvol;
pub mod polynomial;
pub mod polytope;
pub mod solver;
pub mod tropism;

pub use error::{Error, Result};
