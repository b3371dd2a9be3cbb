use thiserror::Error;

/// Errors produced anywhere in the compilation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid fixed-point format: {0}")]
    InvalidFormat(String),

    #[error("code {code} out of range for {bits}-bit format")]
    CodeOutOfRange { code: u32, bits: u32 },

    #[error("unknown activation function `{0}`")]
    UnknownFunction(String),

    #[error("invalid activation parameter: {0}")]
    InvalidParameter(String),

    #[error("table overflow at input code {code}: value {value} exceeds output format maximum {max}")]
    RangeOverflow { code: u32, value: f64, max: f64 },

    #[error("cannot tabulate `{0}`: {1}")]
    Untabulatable(String, String),

    #[error("input width {0} exceeds the supported maximum of 16 bits")]
    WidthLimit(u32),

    #[error("onset and don't-care set overlap at minterm {0}")]
    OverlappingSets(u32),

    #[error("minterm {0} cannot be covered by the supplied prime implicants")]
    Uncoverable(u32),

    #[error("PLA parse error at line {line}: {message}")]
    PlaParse { line: usize, message: String },

    #[error("Verilog evaluation error: {0}")]
    Verilog(String),

    #[error("method `{0}` is not applicable to {1}")]
    NotApplicable(String, String),

    #[error("activation kind mismatch: model uses {model}, table implements {table}")]
    KindMismatch { model: String, table: String },

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
