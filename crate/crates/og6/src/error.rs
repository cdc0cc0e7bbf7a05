use thiserror::Error;

/// Errors shared by the whole crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix has an odd diagonal entry (lattice not even)")]
    NotEven,
    #[error("gram matrix is degenerate")]
    Degenerate,
    #[error("vectors belong to different lattices")]
    LatticeMismatch,
    #[error("zero vector not allowed here")]
    ZeroVector,
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("element is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("vectors {0} and {1} are not orthogonal")]
    NotOrthogonal(String, String),
    #[error("reflection vector has zero norm")]
    ZeroNorm,
    #[error("reflection is not integral on this lattice")]
    NotIntegral,
    #[error("matrix does not preserve the gram matrix")]
    NotAnIsometry,
    #[error("lattice is negative definite")]
    NegativeDefinite,
    #[error("isometry does not act trivially on the discriminant group")]
    NotInOtilde,
    #[error("extension of the isometry is not integral (inconsistent embedding data)")]
    NonIntegralResult,
    #[error("distinguished vector does not have square two")]
    NormNotTwo,
    #[error("map is not an isometry of the orthogonal complement")]
    NotIsometryOfComplement,
    #[error("lattice has no tagged U^2 decomposition")]
    NoU2Decomposition,
    #[error("orbit invariants of the two vectors differ")]
    OrbitMismatch,
    #[error("bounded internal search exhausted")]
    SearchExhausted,
    #[error("isometry is not in SO+")]
    NotInSOPlus,
    #[error("isometry is not in O+")]
    NotInOPlus,
    #[error("expected the OG6 lattice U^3 + (-2)^2")]
    WrongLattice,
    #[error("orbit classification for this input is not covered: {0}")]
    Unsupported(String),
    #[error("mukai vector is not in the domain of the isometry")]
    NotInDomain,
    #[error("PD parameter is not an isometry of the U^3 model")]
    PDNotIsometry,
    #[error("mukai vector does not have square two")]
    SquareNotTwo,
    #[error("internal case dispatch failure in monodromy decomposition: {0}")]
    InternalCaseFailure(String),
    #[error("picard data is not hyperbolic (signature (1, rho-1) required)")]
    NotHyperbolic,
    #[error("cone query classes must have positive square and positive pairing")]
    NotPositive,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
