//! Domain types shared by every other module.

mod config;
pub mod conventions;
mod path;
mod profile;
mod schedule;
mod state;

pub use config::{build_schedule, ModelConfig, PolySpec, ProfileSpec, SegmentSpec};
pub use path::{increment, increments, validate_path, AdmissibilityReport, Path, Violation};
pub use profile::InitialProfile;
pub use schedule::{Poly, Schedule, Segment};
pub use state::{realize_initial, TruncatedState};

/// Total selection weight of the limiting configuration at time `t`:
/// `(1 + beta(t)) t + c_weighted + c_total beta(t)`.
pub fn sigma(schedule: &Schedule, profile: &InitialProfile, t: f64) -> f64 {
    let b = schedule.beta(t);
    (1.0 + b) * t + profile.c_weighted() + profile.c_total() * b
}

/// Same as [`sigma`] with `beta` supplied by the caller.
#[inline]
pub(crate) fn sigma_with(beta: f64, profile: &InitialProfile, t: f64) -> f64 {
    (1.0 + beta) * t + profile.c_weighted() + profile.c_total() * beta
}
