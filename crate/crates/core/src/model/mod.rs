//! Probability vectors, joint laws, stochastic channels and Hamiltonians.

mod channel;
mod distribution;
mod hamiltonian;
mod joint;
pub(crate) mod params;
pub mod sample;

pub use channel::StochasticChannel;
pub use distribution::{trace_distance, Distribution};
pub use hamiltonian::Hamiltonian;
pub use joint::JointDistribution;
pub use params::{ErrorParams, THERMO_EPS_MAX};

/// Tolerance on normalisation when constructing probability objects.
pub const CONSTRUCTION_TOL: f64 = 1e-9;
/// Tolerance used for comparisons and feasibility tests.
pub const COMPARE_TOL: f64 = 1e-12;
/// Largest dimension a tensor power may produce.
pub const DIM_CAP: usize = 1 << 20;

use crate::error::{Error, Result};

pub(crate) fn check_entries(xs: &[f64], what: &str) -> Result<f64> {
    let mut sum = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidProbability(format!("{what}: entry {i} is {x}")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > CONSTRUCTION_TOL {
        return Err(Error::InvalidProbability(format!("{what}: entries sum to {sum}")));
    }
    Ok(sum)
}

pub(crate) fn checked_pow(base: usize, n: usize) -> Result<usize> {
    let dim = (base as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > DIM_CAP as u128 {
        return Err(Error::DimensionCapExceeded { dim, cap: DIM_CAP });
    }
    Ok(dim as usize)
}
