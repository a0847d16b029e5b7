use thiserror::Error;

/// Failures in field, polynomial, matrix and Witt arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field degree must be positive")]
    ZeroDegree,
    #[error("field of order {p}^{r} is too large for packed elements")]
    FieldTooLarge { p: u32, r: u32 },
    #[error("modulus must be monic of degree {expected}")]
    BadModulus { expected: u32 },
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composite of twist {twist} is not linear over F_(p^{r})")]
    TwistNotLinearizable { twist: i64, r: u32 },
    #[error("Witt vectors of length {0} are not supported (maximum 3)")]
    UnsupportedLength(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    Singular,
    #[error("malformed serialized matrix: {0}")]
    Malformed(String),
}

/// Failures while reading or normalising a tower and building its curve model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid tower specification: {0}")]
    InvalidSpec(String),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("level {level} exceeds tower depth {depth}")]
    LevelExceedsDepth { level: usize, depth: usize },
    #[error("cannot reduce pole at {place}: {reason}")]
    NotNormalizable { place: String, reason: String },
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("genus {genus} exceeds the cap {cap}")]
    GenusCapExceeded { genus: u64, cap: u64 },
}

/// Failures in differential, de Rham and Galois-module computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("image leaves the span of the basis: {0}")]
    BasisNotClosed(String),
    #[error("Galois image leaves the span of the basis: {0}")]
    ActionNotClosed(String),
    #[error("ideal has no words")]
    EmptyIdeal,
    #[error("operator is not unipotent of the given order")]
    NotUnipotent,
    #[error("cover is not etale: {0}")]
    CoverNotEtale(String),
    #[error("de Rham lift failed: {0}")]
    Lift(String),
}

/// Failures in point counting and L-polynomial reconstruction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("field of size {size} exceeds the enumeration cap {cap}")]
    EnumerationTooLarge { size: u64, cap: u64 },
    #[error("point counts are inconsistent: {0}")]
    InconsistentCounts(String),
}

/// Failures in growth-law fitting.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("levels must be strictly increasing")]
    Unordered,
    #[error("delta must be at least 1")]
    BadDelta,
}

/// Umbrella error for callers that drive several modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

impl Error {
    /// True when the failure comes from a configured computation cap rather
    /// than from bad input or a mathematical inconsistency.
    pub fn is_cap(&self) -> bool {
        let model = match self {
            Error::Model(m) => Some(m),
            Error::Cohomology(CohomologyError::Model(m)) => Some(m),
            Error::Zeta(ZetaError::Model(m)) => Some(m),
            Error::Zeta(ZetaError::Cohomology(CohomologyError::Model(m))) => Some(m),
            Error::Zeta(ZetaError::EnumerationTooLarge { .. }) => return true,
            _ => None,
        };
        matches!(
            model,
            Some(ModelError::GenusCapExceeded { .. }) | Some(ModelError::LevelExceedsDepth { .. })
        )
    }

    /// True when the failure is a malformed specification.
    pub fn is_config(&self) -> bool {
        let model = match self {
            Error::Model(m) => Some(m),
            Error::Cohomology(CohomologyError::Model(m)) => Some(m),
            Error::Zeta(ZetaError::Model(m)) => Some(m),
            Error::Algebra(_) => return true,
            _ => None,
        };
        matches!(
            model,
            Some(ModelError::InvalidSpec(_))
                | Some(ModelError::Parse { .. })
                | Some(ModelError::Algebra(_))
        )
    }
}
