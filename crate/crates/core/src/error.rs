use thiserror::Error;

/// Every failure the library can report.
///
/// The variants are grouped by the exit-code classes used by the command
/// line front end, see [`Error::class`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("magnitude exceeds 1e300 in {context}")]
    Overflow { context: String },

    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("evaluation point {t} outside [{a}, {b}]")]
    Domain { t: f64, a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("coefficient length {len} exceeds cap {cap}")]
    DegreeOverflow { len: usize, cap: usize },

    #[error("pair is not flagged invertible")]
    NotInvertible,

    #[error("series ratio certificate {ratio} is not below 1")]
    NotConvergent { ratio: f64 },

    #[error("tolerance {tol} not reached within {terms} terms")]
    ToleranceUnreachable { tol: f64, terms: usize },

    #[error("|lambda| = {modulus} outside the certified region ({detail})")]
    AnnulusViolation { modulus: f64, detail: String },

    #[error("vector is not in the span of the kernel basis (residual {residual})")]
    NotInKernel { residual: f64 },

    #[error("vector is not an eigenvector (residual {residual})")]
    NotEigen { residual: f64 },

    #[error("zero vector where a nonzero one is required")]
    ZeroVector,

    #[error("no admissible exponent for target {k} within budget {budget}")]
    BudgetExceeded { k: usize, budget: usize },

    #[error("unsupported pair: {0}")]
    UnsupportedPair(String),

    #[error("pair provides no adjoint action")]
    NoAdjoint,
}

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Series or iteration could not be carried out numerically.
    Numerical,
    /// Inputs violate an operation's precondition.
    Precondition,
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::Overflow { .. } => "OverflowError",
            Error::SpaceMismatch { .. } => "SpaceMismatch",
            Error::Domain { .. } => "DomainError",
            Error::Param(_) => "ParamError",
            Error::DegreeOverflow { .. } => "DegreeOverflow",
            Error::NotInvertible => "NotInvertible",
            Error::NotConvergent { .. } => "NotConvergent",
            Error::ToleranceUnreachable { .. } => "ToleranceUnreachable",
            Error::AnnulusViolation { .. } => "AnnulusViolation",
            Error::NotInKernel { .. } => "NotInKernel",
            Error::NotEigen { .. } => "NotEigen",
            Error::ZeroVector => "ZeroVector",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::UnsupportedPair(_) => "UnsupportedPair",
            Error::NoAdjoint => "NoAdjoint",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Overflow { .. }
            | Error::DegreeOverflow { .. }
            | Error::NotConvergent { .. }
            | Error::ToleranceUnreachable { .. }
            | Error::AnnulusViolation { .. }
            | Error::BudgetExceeded { .. } => ErrorClass::Numerical,
            Error::SpaceMismatch { .. }
            | Error::Domain { .. }
            | Error::Param(_)
            | Error::NotInvertible
            | Error::NotInKernel { .. }
            | Error::NotEigen { .. }
            | Error::ZeroVector
            | Error::UnsupportedPair(_)
            | Error::NoAdjoint => ErrorClass::Precondition,
        }
    }

    pub(crate) fn overflow(context: impl Into<String>) -> Self {
        Error::Overflow {
            context: context.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
