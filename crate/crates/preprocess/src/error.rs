use thiserror::Error;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("token {0} has document frequency 0")]
    UndefinedToken(u32),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("unknown stemmer {name:?} (known: {known})")]
    UnknownStemmer { name: String, known: String },
    #[error(transparent)]
    Core(#[from] dtn_core::Error),
}

pub type Result<T> = std::result::Result<T, PreprocessError>;
