use thiserror::Error;

/// Errors raised by simulation, scaling and estimator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Poisson mean was negative or non-finite.
    #[error("invalid Poisson mean {0}")]
    InvalidMean(f64),

    /// Exponential rate was zero, negative or non-finite.
    #[error("invalid exponential rate {0}")]
    InvalidRate(f64),

    /// The derived time-scale exponent is positive; the methods here
    /// require gamma <= 0.
    #[error("unsupported scaling: gamma = {gamma} > 0")]
    UnsupportedScaling { gamma: f64 },

    /// An exact-method simulation exceeded its jump budget.
    #[error("event budget exceeded ({budget} jumps before t_end)")]
    EventBudgetExceeded { budget: u64 },

    /// `t_end / h` is not an integer number of steps.
    #[error("invalid grid: t_end = {t_end} is not an integer multiple of h = {h}")]
    InvalidGrid { t_end: f64, h: f64 },

    /// A level schedule would need more levels than supported.
    #[error("schedule overflow: {levels} levels requested (max 60)")]
    ScheduleOverflow { levels: u32 },

    /// A pilot run produced a non-finite variance estimate.
    #[error("degenerate pilot: non-finite level variance")]
    DegeneratePilot,

    /// The sweep grid is collinear in log space; the requested exponent
    /// cannot be identified.
    #[error("singular design: sweep grid is collinear in log space")]
    SingularDesign,

    /// Integer state update overflowed 64-bit counts.
    #[error("state overflow: species count left the i64 range")]
    StateOverflow,

    /// Observable refers to an unknown species or has the wrong arity.
    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    /// A precondition on caller-supplied configuration failed.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Kinds of model-file parse failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownSpecies(String),
    DuplicateSpecies(String),
    NonPositiveRate,
    NoSpecies,
    NoReactions,
}

/// Parse failure with the 1-based position of the offending token.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at line {line}, column {column}: {}", self.message())]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn message(&self) -> String {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => msg.clone(),
            ParseErrorKind::UnknownSpecies(name) => format!("unknown species `{name}`"),
            ParseErrorKind::DuplicateSpecies(name) => format!("duplicate species `{name}`"),
            ParseErrorKind::NonPositiveRate => "rate constant must be positive".to_string(),
            ParseErrorKind::NoSpecies => "no species declared".to_string(),
            ParseErrorKind::NoReactions => "no reactions".to_string(),
        }
    }
}
