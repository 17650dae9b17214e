use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate simplex {0:?}")]
    Degenerate(Vec<usize>),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("simplex {0:?} is not a simplex of the complex")]
    NotSubcomplex(Vec<usize>),

    #[error("complex is not pure")]
    NotPure,

    #[error("level {given} is below the required minimum L = {required}")]
    LevelTooLow { given: u32, required: u32 },

    #[error("insufficient Lebesgue margin: no nice cover up to level {0}")]
    InsufficientMargin(u32),

    #[error("level search exceeded l_max = {0}")]
    LevelLimit(u32),

    #[error("fiber perturbation sweep exhausted (relation {relation}, eps = {eps:e})")]
    SweepExhausted { relation: String, eps: f64 },

    #[error("value is zero: jet lies outside the complement of the zero section")]
    ZeroValue,

    #[error("retries exhausted on color {color}: {detail}")]
    RetriesExhausted { color: usize, detail: String },

    #[error("level {0} too small: a simplex meeting the subcomplex lies in no region")]
    CoverTooCoarse(u32),

    #[error("regions do not cover the subcomplex at vertex {0:?}")]
    NotCovered(Vec<f64>),

    #[error("incomparable complexes: {0}")]
    Incomparable(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
