use std::fmt;

/// Errors shared by the polynomial, matrix, and measure layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands disagree on the number of variables or dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// A variable or matrix index is out of range.
    IndexOutOfRange { index: usize, limit: usize },
    /// The dense-table memory guard (n_vars cap) was exceeded.
    TooManyVariables { n_vars: usize, max: usize },
    /// A coefficient or matrix entry is NaN or infinite.
    NonFiniteValue,
    /// A per-variable degree exceeds the declared cap.
    DegreeExceedsCap { var: usize, degree: u32, cap: u32 },
    /// A polynomial is not symmetric within its variable blocks.
    BlockAsymmetry { residual: f64 },
    /// The zero polynomial was passed where a nonzero one is required.
    ZeroPolynomial,
    /// Roots failed the real-rootedness residual check.
    NotRealRooted { max_imag: f64 },
    /// A point fails the above-the-roots requirement.
    NotAboveRoots,
    /// A polynomial whose coefficients must be real has imaginary residue.
    ImaginaryResidue { residual: f64 },
    /// A scalar argument is outside its admissible domain.
    Domain(&'static str),
    /// An enumeration or table would exceed the configured size guard.
    SizeGuard { size: u128, limit: u128 },
    /// A univariate polynomial is not monic of the required degree.
    NotMonic { degree: usize },
    /// A matrix is not Hermitian within tolerance.
    NotHermitian { residual: f64 },
    /// A matrix violates a positive-semidefiniteness requirement.
    NotPsd { min_eigenvalue: f64 },
    /// A matrix violates a contraction (norm at most one) requirement.
    NotContraction { norm: f64 },
    /// Bracket expansion for bisection failed to enclose a sign change.
    BracketFailure,
    /// Measure coefficients are negative or fail normalization.
    InvalidMeasure { detail: &'static str },
    /// Equal-index shift budgets are excluded.
    EqualIndices { index: usize },
    /// A quantity certified to stay under a bound exceeded it.
    BoundViolation { bound: f64, found: f64 },
    /// Input text failed to parse; position is 1-based line and column.
    Parse { line: usize, column: usize, detail: String },
    /// Input parsed but violates the schema.
    Malformed { detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IndexOutOfRange { index, limit } => {
                write!(f, "index {index} out of range (limit {limit})")
            }
            Error::TooManyVariables { n_vars, max } => {
                write!(f, "{n_vars} variables exceed the dense-table cap of {max}")
            }
            Error::NonFiniteValue => write!(f, "non-finite value"),
            Error::DegreeExceedsCap { var, degree, cap } => {
                write!(f, "degree {degree} of variable {var} exceeds cap {cap}")
            }
            Error::BlockAsymmetry { residual } => {
                write!(f, "block asymmetry residual {residual:e} exceeds tolerance")
            }
            Error::ZeroPolynomial => write!(f, "zero polynomial"),
            Error::NotRealRooted { max_imag } => {
                write!(f, "roots have imaginary part up to {max_imag:e}")
            }
            Error::NotAboveRoots => write!(f, "point is not above the roots"),
            Error::ImaginaryResidue { residual } => {
                write!(f, "imaginary residue {residual:e} exceeds tolerance")
            }
            Error::Domain(what) => write!(f, "domain violation: {what}"),
            Error::SizeGuard { size, limit } => {
                write!(f, "size {size} exceeds enumeration guard {limit}")
            }
            Error::NotMonic { degree } => {
                write!(f, "polynomial is not monic of degree {degree}")
            }
            Error::NotHermitian { residual } => {
                write!(f, "matrix is not Hermitian (residual {residual:e})")
            }
            Error::NotPsd { min_eigenvalue } => {
                write!(f, "matrix is not PSD (min eigenvalue {min_eigenvalue:e})")
            }
            Error::NotContraction { norm } => {
                write!(f, "matrix norm {norm} exceeds 1")
            }
            Error::BracketFailure => write!(f, "bisection bracket expansion failed"),
            Error::InvalidMeasure { detail } => write!(f, "invalid measure: {detail}"),
            Error::EqualIndices { index } => {
                write!(f, "indices must differ, both are {index}")
            }
            Error::BoundViolation { bound, found } => {
                write!(f, "value {found} exceeds certified bound {bound}")
            }
            Error::Parse { line, column, detail } => {
                write!(f, "parse error at line {line}, column {column}: {detail}")
            }
            Error::Malformed { detail } => write!(f, "malformed input: {detail}"),
        }
    }
}

impl std::error::Error for Error {}
