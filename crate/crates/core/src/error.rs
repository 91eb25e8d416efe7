use thiserror::Error;

/// Errors raised by the chain toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero-length chain")]
    ZeroLength,

    #[error("invalid step symbol {0:?}; expected one of u, f, d")]
    InvalidStep(char),

    #[error("invalid sector (u={u}, d={d}) for chain length {length}")]
    InvalidSector { length: usize, u: usize, d: usize },

    #[error("chain length {length} below minimum {min} for {what}")]
    LengthTooSmall {
        length: usize,
        min: usize,
        what: &'static str,
    },

    #[error("link index {link} out of range 1..={length}")]
    LinkOutOfRange { link: usize, length: usize },

    #[error("negative flat coupling {0}")]
    NegativeEpsilon(String),

    #[error("PTL needs >= 3 links")]
    PtlTooShort,

    #[error("spectral parameter pole: {0}")]
    SpectralPole(String),

    #[error("phase singularity at momenta ({k1}, {k2})")]
    PhaseSingularity { k1: String, k2: String },

    #[error("non-physical root set: energy has imaginary part {0:e}")]
    NonPhysicalRoots(f64),

    #[error("root finding did not converge for quantum numbers ({m1}, {m2})")]
    NoConvergence { m1: usize, m2: usize },

    #[error("flavor word length {got} does not match particle count {expected}")]
    FlavorLength { expected: usize, got: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("zero vector")]
    ZeroVector,

    #[error("empty momentum list")]
    EmptyMomenta,

    #[error("chain length {0} above dense cap; use --sector")]
    AboveDenseCap(usize),

    #[error("sectors not conserved at nonzero epsilon")]
    SectorsNotConserved,

    #[error("GSD inconsistency: construction gives {constructed}, ED kernel gives {ed}")]
    GsdInconsistency { constructed: usize, ed: usize },

    #[error("malformed rational {0:?}")]
    MalformedRational(String),
}

pub type Result<T> = std::result::Result<T, Error>;
