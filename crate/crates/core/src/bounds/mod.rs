//! Witness-based checks of the capacity/work sandwich inequalities, their error terms,
//! and the dynamical Landauer scenario.

mod landauer;
mod sandwich;
mod terms;

pub use landauer::{landauer_scenario, LandauerReport, ScenarioOptions};
pub use sandwich::{capacity_sandwich, equilibrium_sandwich, work_sandwich, BoundReport, SearchBudget, Verdict};
pub use terms::{error_terms, CAPACITY_TERM, CONVERSE_TERM, WORK_CAPACITY_TERM, WORK_EXTRACTION_TERM};

/// Slack allowed before a proven inequality is reported as violated.
pub const VIOLATION_TOL: f64 = 1e-6;
