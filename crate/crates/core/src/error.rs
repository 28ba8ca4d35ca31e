use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnknownIdentifier(String),
    UnknownFunction(String),
    ArityMismatch { name: String, expected: usize, found: usize },
    UnclosedParen,
    VariableOutOfRange { index: usize, dimension: usize },
    ParameterOutOfRange { index: usize, count: usize },
    InvalidNumber(String),
    EmptyInput,
}

/// A parse failure annotated with the character offset it refers to.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {position}: {}", describe_parse(.kind))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

fn describe_parse(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::UnexpectedChar(c) => format!("unexpected character '{c}'"),
        ParseErrorKind::UnexpectedToken(t) => format!("unexpected token '{t}'"),
        ParseErrorKind::UnexpectedEnd => "unexpected end of input".into(),
        ParseErrorKind::UnknownIdentifier(s) => format!("unknown identifier '{s}'"),
        ParseErrorKind::UnknownFunction(s) => format!("unknown function '{s}'"),
        ParseErrorKind::ArityMismatch { name, expected, found } => {
            format!("{name} expects {expected} argument(s), found {found}")
        }
        ParseErrorKind::UnclosedParen => "unclosed parenthesis".into(),
        ParseErrorKind::VariableOutOfRange { index, dimension } => {
            format!("variable x{index} exceeds dimension {dimension}")
        }
        ParseErrorKind::ParameterOutOfRange { index, count } => {
            format!("parameter p{index} exceeds parameter count {count}")
        }
        ParseErrorKind::InvalidNumber(s) => format!("invalid number literal '{s}'"),
        ParseErrorKind::EmptyInput => "empty expression".into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    LogNonPositive,
    SqrtNegative,
    DivisionByZero,
    PowNonPositiveBase,
    NonFinite,
    /// A kink of `abs`, `min`, `max` or `sqrt` was hit exactly.
    Nondifferentiable,
    DimensionMismatch,
}

/// Evaluation failure; `position` is the source offset of the offending node
/// (0 for built-in fields).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("evaluation error at offset {position}: {kind:?}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub position: usize,
}

impl EvalError {
    pub fn new(kind: EvalErrorKind, position: usize) -> Self {
        Self { kind, position }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("no valid samples: {0}")]
    NoValidSamples(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// True when the failure is a per-sample evaluation problem that callers
    /// should count as a skipped sample rather than abort on.
    pub fn is_eval(&self) -> bool {
        matches!(self, Error::Eval(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
