use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EcmError {
    #[error("singular curve: 4a^3 + 27b^2 = 0")]
    Singular,
    #[error("4a^3 + 27b^2 = {0} is not squarefree")]
    NotSquarefree(i128),
    #[error("Jacobi symbol undefined for this input")]
    UndefinedSymbol,
    #[error("n must be positive")]
    ZeroIndex,
    #[error("invalid family spec: {0}")]
    InvalidSpec(String),
    #[error("generating series diverges for |t| >= 1")]
    DivergentRegion,
    #[error("quadrature did not reach tolerance {tol:e} (last estimate {estimate})")]
    ToleranceNotMet { tol: f64, estimate: f64 },
    #[error("bad discriminant {0}")]
    BadDiscriminant(i64),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("{0} is outside the precomputed range")]
    OutOfRange(u64),
    #[error("integer overflow in exact kernel")]
    Overflow,
    #[error("k = {0} lies at or beyond the pole at -1/2")]
    PoleRegion(f64),
    #[error("shift {0} outside the region of convergence")]
    OutsideRegion(f64),
    #[error("could not factor {0}")]
    FactorizationTimeout(u128),
    #[error("conductor ambiguous: best candidates {0} and {1} have defects within tolerance")]
    AmbiguousConductor(u64, u64),
    #[error("functional-equation defect {defect:e} above target {target:e}")]
    NeedsMoreTerms { defect: f64, target: f64 },
    #[error("root number undetermined (defects {plus:e} vs {minus:e})")]
    IndeterminateSign { plus: f64, minus: f64 },
    #[error("model is not minimal at {0}")]
    NonMinimal(u64),
    #[error("k = {0} not supported by the full polynomial path")]
    UnsupportedK(f64),
    #[error("class ({0}, {1}) violates gcd(4r^3 + 27t^2, 6q) = 1")]
    BadClass(i64, i64),
}

pub type Result<T> = std::result::Result<T, EcmError>;
