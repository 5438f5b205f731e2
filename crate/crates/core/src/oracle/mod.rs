//! Exact small-instance computations used to validate the rest of the crate.

mod empirical;
mod enumerate;
mod laplace;
pub mod mass;

pub use empirical::{empirical_rate, EmpiricalRate, Event, InitialSpec, RateMode, RatePoint, Trend};
pub use enumerate::{
    enumerate_exact, enumerate_exact_filtered, tube_filter, tube_probability_exact, Arithmetic,
    Atom, Budget, ExactDistribution, ExactOptions, PathFilter, Probability, StateKey,
    TerminalView,
};
pub use laplace::laplace_functional;
pub use mass::Mass;
