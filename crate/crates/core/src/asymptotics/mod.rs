//! Finite-size experiments on asymptotic statements: Stein exponents, Shannon capacity,
//! the Gibbs-constrained mutual information, and per-copy one-shot capacities.

mod capacity;
mod series;

pub use capacity::{
    constrained_holevo, mutual_information, regularized_capacity_series, shannon_capacity, HolevoBudget, HolevoEstimate,
    RegularizedSeries, SeriesOptions, ShannonCapacity,
};
pub use series::{log_grid, stein_series, ConvergenceSeries, SeriesPoint};
