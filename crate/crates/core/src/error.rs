use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("invalid resolution: {0}")]
    Resolution(String),
    #[error("invalid physical parameters: {0}")]
    Params(String),
    #[error("invalid stepper configuration: {0}")]
    Stepper(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("unsupported fractional exponent {num}/{den} (supported: 1/2, 1, 3/2, 2, 3)")]
    UnsupportedExponent { num: u32, den: u32 },
    #[error("matrix not positive definite at pivot {pivot} ({context})")]
    NotPositiveDefinite { pivot: usize, context: String },
    #[error("non-finite value at t={t} in {term}")]
    NonFinite { t: f64, term: String },
    #[error("time step {dt} exceeds stability limit {dt_max} at t={t}")]
    StepTooLarge { dt: f64, dt_max: f64, t: f64 },
    #[error("empty ledger")]
    EmptyLedger,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("ledger: {0}")]
    Ledger(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
