use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("accuracy target {target:e} unreachable at t = {t}: best achievable {best:e}")]
    AccuracyUnreachable { t: f64, target: f64, best: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge on [{a}, {b}] within depth cap {depth}")]
    NonConvergence { a: f64, b: f64, depth: u32 },

    #[error("no bracket for the inverse of value {target} in [{lo}, {hi}]")]
    BracketFailure { target: f64, lo: f64, hi: f64 },

    #[error("no crossing of level {target} on [{lo}, {hi}] at scan resolution")]
    NotFound { target: f64, lo: f64, hi: f64 },

    #[error("degenerate denominator: {0}")]
    Degenerate(String),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("invalid function: {0}")]
    Validation(String),

    #[error("no factorization data bound for formula {0}")]
    MissingBinding(usize),

    #[error("checkpoint cache: {0}")]
    Cache(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
