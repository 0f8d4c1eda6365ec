use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid label distribution: {0}")]
    InvalidDistribution(String),

    #[error("the two sources share no label with positive probability (mu = 0)")]
    ZeroOverlap,

    #[error("cannot parse probability {0:?}")]
    Parse(String),

    #[error("common denominator of the pair does not fit in 64 bits")]
    DenominatorTooLarge,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("label {label} outside support of size {support}")]
    LabelOutOfRange { label: usize, support: usize },

    #[error("trace has {len} epochs, {needed} required")]
    TraceTooShort { len: usize, needed: usize },

    #[error("reachable state count exceeded cap of {cap}")]
    StateExplosion { cap: usize },

    #[error("tie rule depends on the path; exact computations need a memoryless tie rule")]
    PathDependentTie,

    #[error("horizon {horizon} exceeds the maximum of {max}")]
    HorizonTooLarge { horizon: usize, max: usize },

    #[error("difference chain is not ergodic: {0}")]
    NotErgodic(String),

    #[error("series tail bound {tail:e} exceeds requested precision {precision:e}")]
    TruncationInsufficient { tail: f64, precision: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}
