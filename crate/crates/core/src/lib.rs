//! Finite-dimensional models of C*-pseudo-multiplicative unitaries built
//! from finite groupoids, with numerical verification of their axioms.

pub mod cli;
pub mod cstar;
pub mod error;
pub mod fixedpoints;
pub mod frame;
pub mod groupoid;
pub mod legs;
pub mod linalg;
pub mod opspace;
pub mod pmu;
pub mod report;
pub mod reps;
pub mod specfile;

pub use error::{Error, Result};
