//! Time-dependent preferential-attachment urn schemes.
//!
//! Exact simulation of the truncated count chain, law-of-large-numbers
//! trajectories (closed form and ODE), power-law envelopes, relative-entropy
//! path rates and small-instance exact oracles.

pub mod error;
pub mod ext_real;
pub mod lln;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod rate;
pub mod simulator;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    sigma, validate_path, AdmissibilityReport, InitialProfile, Path, Schedule, TruncatedState,
};
