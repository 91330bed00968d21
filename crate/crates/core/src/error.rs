use alloc::string::String;

/// Everything that can go wrong in the engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("derivation index {index} out of range (D = {dims})")]
    DerivationOutOfRange { index: usize, dims: usize },
    #[error("generator index {index} out of range (N = {count})")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("division by a non-monomial scalar")]
    NonMonomialDivision,
    #[error("unknown formal parameter `{0}`")]
    UnknownParameter(String),
    #[error("unsupported Lie algebra type `{0}`")]
    UnsupportedType(String),
    #[error("element is not in the Lie algebra: {0}")]
    NotInAlgebra(String),
    #[error("no sl2-triple: {0}")]
    NoTriple(String),
    #[error("degenerate pairing between centralizers")]
    DegeneratePairing,
    #[error("s is not in g_d: {0}")]
    BadS(String),
    #[error("index table has depth {have}, but depth {need} is required")]
    TableTooShallow { have: String, need: String },
    #[error("malformed index table: {0}")]
    MalformedTable(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
