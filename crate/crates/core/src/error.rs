use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("overlap {0} is outside [0, 1]")]
    InvalidOverlap(f64),

    #[error("margin {0} is outside [0, 1]")]
    InvalidMargin(f64),

    #[error("port counts must be positive (got n = {n}, n' = {nprime})")]
    InvalidPortConfig { n: u32, nprime: u32 },

    #[error("n + n' = {total} exceeds the supported maximum of {max}")]
    Overflow { total: u32, max: u32 },

    #[error("strong-margin POVM angle is ambiguous for identical states (c = 1)")]
    AmbiguousParametrization,

    #[error("bisection failed to converge while {0}")]
    NoConvergence(&'static str),

    #[error("global margin {margin} is infeasible (must lie in [0, {critical}])")]
    Infeasible { margin: f64, critical: f64 },

    #[error("{qubits} qubits exceed the dense construction cap of {max} qubits")]
    SizeLimit { qubits: u32, max: u32 },

    #[error("no feasible POVM angle found on the scan grid")]
    EmptyFeasibleSet,

    #[error("cannot bin Gram singular values: {0}")]
    BinningAmbiguity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
