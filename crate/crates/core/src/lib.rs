//! Exact computation with the complex-valued random variables obtained by
//! summing `m` elements drawn without replacement from the multiset
//! `{w, w^2, ..., w^N}`, `w = exp(-2*pi*j*l/N)`, together with their
//! Bernoulli-mask companions.
//!
//! Everything on the exact path works in the ring of integers of the
//! cyclotomic field generated by `w`, so probability atoms, moments and
//! symmetric functions are canonical values that can be hashed, ordered and
//! compared without floating-point tolerance. Floating point appears only in
//! numeric views, trigonometric-sum checks, Monte Carlo estimation and
//! measurement-matrix coherence.

pub mod bernoulli;
pub mod coherence;
pub mod combinatorics;
pub mod cyclotomic;
pub mod distribution;
mod error;
pub mod identities;
pub mod moments;
pub mod report;
pub mod sampling;
pub mod verify;

pub use crate::cyclotomic::{Classification, CycElem, CycRat, CyclotomicContext};
pub use crate::distribution::{ComponentKind, ComponentLaws, ComponentPmf, ExactPmf, UniformityReport};
pub use crate::error::{Error, Result};
pub use crate::moments::MomentReport;
pub use crate::verify::{CaseReport, CheckRow, CheckStatus, SweepReport, SweepSpec};

/// Default cap on `C(N, m)` for exhaustive subset enumeration.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

/// Default cap on `N` for exhaustive Bernoulli-mask enumeration (`2^N` masks).
pub const DEFAULT_MASK_BUDGET: u64 = 22;
