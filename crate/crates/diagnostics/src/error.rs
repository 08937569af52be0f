#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("label sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("day {day} outside 1..={horizon}")]
    DayOutOfRange { day: u32, horizon: u32 },
    #[error(transparent)]
    Inference(#[from] dtn_inference::InferenceError),
}

pub type Result<T> = std::result::Result<T, DiagnosticsError>;
