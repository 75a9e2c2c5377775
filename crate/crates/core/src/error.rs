use crate::classify::DomainLabel;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid body spec: {0}")]
    InvalidSpec(String),

    #[error("invalid hyperplane: all coefficients of the linear part are zero")]
    DegenerateHyperplane,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hyperplane is within tolerance of the discriminant (tangency); refusing to integrate")]
    NearDiscriminant,

    #[error(
        "quadrature budget exceeded: achieved error estimate {achieved:e} > requested {requested:e}"
    )]
    ToleranceNotReached { achieved: f64, requested: f64 },

    #[error("fit needs at least {needed} samples for a basis of size {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("sample {index} at (a={a}, c={c}) classifies as {found} but {expected} is required")]
    WrongDomain {
        index: usize,
        a: f64,
        c: f64,
        found: DomainLabel,
        expected: DomainLabel,
    },

    #[error("rank-deficient design matrix: basis term a^{exp_a} c^{exp_c} is linearly dependent on earlier terms")]
    RankDeficient { exp_a: u32, exp_c: u32 },

    #[error("leaf algebra is undefined on {0} hyperplanes")]
    LeafUndefined(DomainLabel),

    #[error("domain label {label} does not match the offsets/c geometry (got a {got}-label leaf)")]
    LeafDomainMismatch { label: DomainLabel, got: usize },

    #[error("csv line {line}, field `{field}`: {message}")]
    Csv {
        line: usize,
        field: &'static str,
        message: String,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
