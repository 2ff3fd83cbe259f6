//! Work extraction from diagonal states by level transformations and thermalisations.

mod correlation;
mod process;
mod protocol;
mod work;

pub use correlation::{locally_thermal_hamiltonians, work_from_correlation, CorrelationWork, LocalHamiltonians};
pub use process::{ProcessStep, WorkProcess};
pub use protocol::{
    d0_protocol, extractable_work, subset_protocol, D0Protocol, ExtractableWork, Precision, Schedule, WorkBudget,
};
pub use work::{eps_delta_work, tightest_window, work_distribution, WorkDistribution, WorkMode, WorkOptions, WorkStrategy};

/// Default energy gap used to empty levels, in k_BT.
pub const DEFAULT_E_CUT: f64 = 50.0;
/// Default number of return steps.
pub const DEFAULT_K_STEPS: usize = 400;
