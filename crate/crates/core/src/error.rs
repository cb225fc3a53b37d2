use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by the subsystem that raises them; `exit_code`
/// classifies them for the command-line wrapper.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,
    #[error("non-finite value at position {index}: {value}")]
    NonFiniteValue { index: usize, value: f64 },
    #[error("alphabet atoms must be strictly increasing (violation at index {index})")]
    UnsortedAlphabet { index: usize },
    #[error("alphabet needs at least two atoms, got {count}")]
    AlphabetTooSmall { count: usize },
    #[error("masses sum to {sum}, expected 1 within {tol}")]
    MassNotNormalized { sum: f64, tol: f64 },
    #[error("mass at atom index {index} is outside [0,1]: {value}")]
    MassOutOfRange { index: usize, value: f64 },
    #[error("point-swap endpoints are equal")]
    EqualPoints,
    #[error("atom-swap indices coincide")]
    SameAtom,
    #[error("matrix is singular or ill-conditioned (condition estimate {cond:.3e} exceeds {bound:.3e})")]
    SingularMatrix { cond: f64, bound: f64 },
    #[error("dimension mismatch: transform expects length {expected}, sample has length {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("value {value} is not an atom of the alphabet")]
    AtomNotInAlphabet { value: f64 },
    #[error("level must lie in (0,1), got {level}")]
    LevelOutOfRange { level: f64 },
    #[error("operation requires an explicit group")]
    NotExplicitGroup,
    #[error("group realization exceeds the cap of {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("requested group size {size} exceeds the cap of {cap}")]
    SizeCap { size: u128, cap: usize },
    #[error("generator order exceeds the cap of {cap}")]
    OrderExceedsCap { cap: usize },
    #[error("transforms cannot be composed: {reason}")]
    NotComposable { reason: String },
    #[error("count difference is identically zero")]
    ZeroDiff,
    #[error("no counterexample distribution found after recipe and optimizer fallback")]
    NoCounterexampleFound,
    #[error("search budget of {budget} candidate vectors exhausted")]
    BudgetExceeded { budget: usize },
    #[error("invalid null family: {reason}")]
    InvalidNullFamily { reason: String },
    #[error("invalid interval set: {reason}")]
    InvalidIntervals { reason: String },
    #[error("base interval width {width} violates the bound {bound}")]
    WidthBoundViolated { width: f64, bound: f64 },
    #[error("target {value} lies outside the attainable range ({lo}, {hi})")]
    TargetOutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("no gap interval available near {threshold}")]
    NoGapInterval { threshold: f64 },
    #[error("quantile {q} is not interior to the support")]
    QuantileNotInterior { q: f64 },
    #[error("bisection failed to meet the target")]
    BisectionFailed,
    #[error("unknown data-generating process `{name}`")]
    UnknownDgp { name: String },
    #[error("unknown test statistic `{name}`")]
    UnknownStatistic { name: String },
    #[error("statistic produced NaN; values cannot be ranked")]
    NonFiniteStatistic,
    #[error("sampled groups must place the identity first")]
    IdentityRequired,
    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },
}

impl Error {
    /// CLI exit-code classification: 3 for budget/cap exhaustion, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GroupTooLarge { .. }
            | Error::SizeCap { .. }
            | Error::OrderExceedsCap { .. }
            | Error::BudgetExceeded { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
