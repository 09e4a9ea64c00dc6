use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("measure is not quasi-invariant: {0}")]
    NotQuasiInvariant(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("base axiom failed: {0}")]
    BaseAxiomFailed(String),
    #[error("module axiom failed: {0}")]
    ModuleAxiomFailed(String),
    #[error("operator not in algebra: {0}")]
    NotInAlgebra(String),
    #[error("operator not in commutant: {0}")]
    NotInCommutant(String),
    #[error("inconsistent linear system in {what} (relative residual {residual:.3e})")]
    InconsistentSystem { what: String, residual: f64 },
    #[error("no normalized fixed element")]
    NotNormalizedFixed,
    #[error("no normalized cofixed element")]
    NotNormalizedCofixed,
    #[error("cocycle violation: {0}")]
    CocycleViolation(String),
    #[error("not a groupoid unitary")]
    NotGroupoidPmu,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
