use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the exact-computation layer.
///
/// `Usage` covers malformed arguments, `Budget`/`MaskBudget` cover refused
/// enumerations. Internal contract violations (mixing elements from different
/// contexts, non-exact division) panic instead: they are bugs, not inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),

    #[error("enumeration budget exceeded: C({n},{m}) = {binom} > {budget}")]
    Budget { n: u64, m: u64, binom: String, budget: u64 },

    #[error("mask budget exceeded: N = {n} > {budget} (2^N masks); use the Monte Carlo sampler instead")]
    MaskBudget { n: u64, budget: u64 },

    #[error("unknown identity name: {0}")]
    UnknownIdentity(String),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
