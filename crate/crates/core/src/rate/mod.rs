//! Relative-entropy rates of deviation paths.

mod classical;
mod entropy;
mod functional;
mod presets;

pub use classical::linear_path_rate_classical;
pub use entropy::{local_cost, minimizer_nu0, natural_kernel, relative_entropy, LocalCost};
pub use functional::{path_rate_id, path_rate_iinf, IinfOptions};
pub use presets::{dense_lln_grid, preset_path, Preset};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateStatus {
    Finite,
    Infinite,
    /// The path is outside the admissible set, so the rate is `+inf` by definition.
    Inadmissible,
    /// Truncation limit reached before the stopping rule fired; `value` is a
    /// lower bound.
    Unconverged,
}

/// Value of a path rate with its breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    #[serde(with = "crate::ext_real")]
    pub value: f64,
    pub status: RateStatus,
    /// Truncation level of the reported breakdown.
    pub d: usize,
    /// `int mu_i log(mu_i / rho_i)` for the blocks `i = 0..=d`.
    #[serde(with = "crate::ext_real::vec")]
    pub per_term: Vec<f64>,
    /// Contribution of the final block (mass escaping to large urns).
    #[serde(with = "crate::ext_real")]
    pub condensation_term: f64,
    /// Truncated rates by level, nondecreasing.
    #[serde(with = "crate::ext_real::vec")]
    pub truncation_trace: Vec<f64>,
    #[serde(with = "crate::ext_real")]
    pub quadrature_error_estimate: f64,
    /// Time-integrated mass of the increment leaving the last resolved size.
    #[serde(with = "crate::ext_real::option")]
    pub escape_mass: Option<f64>,
    pub violations: Vec<String>,
}

impl RateReport {
    pub(crate) fn infinite(d: usize, status: RateStatus) -> Self {
        RateReport {
            value: f64::INFINITY,
            status,
            d,
            per_term: Vec::new(),
            condensation_term: f64::NAN,
            truncation_trace: Vec::new(),
            quadrature_error_estimate: 0.0,
            escape_mass: None,
            violations: Vec::new(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}
