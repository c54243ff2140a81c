use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix has determinant {0}, expected 1")]
    NotUnimodular(String),
    #[error("element is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(String),
    #[error("axes share an endpoint")]
    DegenerateAxes,
    #[error("point is not in the upper half-plane")]
    InvalidPoint,
    #[error("arc is too short to be a strand at this level ((2/h) sinh(l/2) < 1)")]
    NotAStrand,
    #[error("invalid horocycle levels: {0}")]
    InvalidLevels(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("at least two strands are required")]
    TooFewStrands,
    #[error("winding numbers must be sorted ascending")]
    Unsorted,
    #[error("epsilon must satisfy 0 < eps <= 1/2")]
    EpsilonOutOfRange,
    #[error("no solution below the search cap {cap}")]
    NoSolutionBelowCap { cap: String },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("({g}, {n}) is not the type of a cusped hyperbolic surface")]
    NotHyperbolicType { g: u32, n: u32 },
    #[error("word reduces to the identity")]
    TrivialWord,
    #[error("cannot parse word: {0}")]
    InvalidWord(String),
    #[error("word is a proper power")]
    NotPrimitive,
    #[error("element lies in the cyclic subgroup generated by the word")]
    InCyclicSubgroup,
    #[error("numeric tolerance breached at {bits} bits")]
    ToleranceBreach { bits: u32 },
    #[error("pants has no cusp in the distinguished position")]
    NoCusp,
    #[error("horocycle level {h} exceeds the embedded range {max}")]
    LevelTooLarge { h: String, max: String },
    #[error("could not certify comparison below {cap} bits of precision")]
    PrecisionExhausted { cap: u32 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
