use thiserror::Error;

/// Every failure the library reports. Variants carry enough context to
/// locate the offending input; none of them is used for control flow.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not positive definite")]
    NonPositiveDefinite,
    #[error("degree {0} is not supported here")]
    UnsupportedDegree(usize),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("entry bound {given} is below the completeness bound {required}")]
    BoundTooSmall { given: i64, required: i64 },
    #[error("scale {0} does not keep the decomposition half-integral")]
    InvalidScale(String),
    #[error("Gauss sum needs {cost} terms, budget is {budget}")]
    BudgetExceeded { cost: u128, budget: u128 },
    #[error("conductor {conductor} does not divide {modulus}")]
    ConductorNotDividing { conductor: u64, modulus: u64 },
    #[error("character is not primitive")]
    NotPrimitive,
    #[error("character parity does not match mu")]
    ParityMismatch,
    #[error("truncation too small: have trace bound {have}, need {need}")]
    InsufficientTruncation { have: i64, need: i64 },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("exponent {0} leaves the cyclotomic field")]
    IrrationalExponent(String),
    #[error("numeric check is only available in degree one")]
    NumericOnlyForDegreeOne,
    #[error("factorisation identity failed: {0}")]
    FactorisationFailed(String),
    #[error("matrix is not p-local: {0}")]
    NotPLocal(String),
    #[error("p = {0} divides the level")]
    PDividesLevel(u64),
    #[error("a Satake parameter is zero")]
    ZeroSatakeParam,
    #[error("m = {0} is not a special value")]
    NotSpecialValue(String),
    #[error("m = {0} is an excluded special value")]
    ExcludedSpecialValue(String),
    #[error("no projection plug-in registered for degree {0}")]
    MissingPlugin(usize),
    #[error("projection plug-in violates P(s, 0; b) = |s|^b: {0}")]
    PluginViolation(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{0} is not a unit mod {1}")]
    NotAUnit(String, u64),
    #[error("order {order} has a wild part at p = {p}")]
    WildPartUnsupported { order: u64, p: u64 },
    #[error("order {order} does not embed into Z_{p}")]
    NotEmbeddable { order: u64, p: u64 },
    #[error("valuation of zero")]
    ZeroElement,
    #[error("incompatible system at level {i} over level {j}, residue {y}")]
    IncompatibleSystem { i: u32, j: u32, y: u64 },
    #[error("precision {have} is below the requested {need}")]
    PrecisionTooLow { have: i64, need: i64 },
    #[error("local polynomial at q = {0} has a constant term")]
    ConstantTermPresent(u64),
    #[error("local polynomial for g_q at q = {0} must have constant term 1")]
    BadConstantTerm(u64),
    #[error("local polynomial prime q = {0} equals p")]
    BadPrime(u64),
    #[error("conductor {0} is not coprime to p = {1}")]
    ConductorNotCoprime(u64, u64),
    #[error("distribution carries no boundedness certificate")]
    NotBounded,
    #[error("coefficient at trace {trace} lies beyond the completeness bound {bound}")]
    TruncationGap { trace: i64, bound: i64 },
    #[error("lambda_0 is not a p-adic unit")]
    NotOrdinary,
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
