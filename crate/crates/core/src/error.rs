use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative weight {0}")]
    NegativeWeight(String),
    #[error("generator {index} is not a subset of the ground set")]
    GeneratorOutsideGround { index: usize },
    #[error("field closure exceeds the cap of {cap} sets")]
    FieldTooLarge { cap: usize },
    #[error("set {0} is not an element of the field")]
    NotInField(String),
    #[error("set {set} is not Peano-Jordan measurable (gap {gap})")]
    NotInCompletion { set: String, gap: String },
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("set {0} is not a subset of the ground set")]
    ForeignSet(String),
    #[error("operation requires {0}")]
    WrongBackend(&'static str),
    #[error("triangle inequality fails: d({a},{c}) > d({a},{b}) + d({b},{c})")]
    Triangle { a: String, b: String, c: String },
    #[error("distance matrix is not symmetric at ({a}, {b})")]
    Asymmetric { a: String, b: String },
    #[error("invalid codomain: {0}")]
    InvalidCodomain(String),
    #[error("point {0} does not belong to the codomain")]
    ForeignPoint(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("infinity minus infinity is undefined")]
    InfMinusInf,
    #[error("no admissible delta among {tried} candidates")]
    NoRegularDelta { tried: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
