use thiserror::Error;

/// Errors raised across the crate.
///
/// The leading token of each message (`kraft-violation`, `non-monotonic-time`, ...)
/// is stable and meant for scripts that grep diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid-probability: {value} is outside [0, 1]")]
    InvalidProbability { value: f64 },

    #[error("invalid-bit-length: {value} (must be >= 0 and not NaN)")]
    InvalidBitLength { value: f64 },

    #[error("kraft-violation: Kraft sum {sum} exceeds 1")]
    KraftViolation { sum: f64 },

    #[error("improper-distribution: masses sum to {sum}, not 1")]
    ImproperDistribution { sum: f64 },

    #[error("invalid-distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid-position: {0} (stack positions are 1-based)")]
    InvalidPosition(usize),

    #[error("non-monotonic-time: t={got} does not follow t={last}")]
    NonMonotonicTime { last: u64, got: u64 },

    #[error("insufficient-history: need {needed} values, have {have}")]
    InsufficientHistory { needed: usize, have: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown-node: {0}")]
    UnknownNode(String),

    #[error("unreachable: no causal chain generates {0}")]
    Unreachable(String),

    #[error("support-mismatch: {0}")]
    SupportMismatch(String),

    #[error("identity-mismatch: {quantity} weighted form {weighted} vs closed form {closed_form}")]
    IdentityMismatch {
        quantity: &'static str,
        weighted: f64,
        closed_form: f64,
    },

    #[error("version-mismatch: snapshot format {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("invalid-spec: {0}")]
    InvalidSpec(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            e @ (Error::AtLine { .. } | Error::Parse { .. }) => e,
            e => Error::AtLine {
                line,
                source: Box::new(e),
            },
        }
    }

    /// True for precondition failures on caller-supplied parameters.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
