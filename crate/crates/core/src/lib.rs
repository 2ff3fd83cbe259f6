//! One-shot classical capacities, smoothed relative entropies and single-shot work
//! extraction for finite classical systems.

pub mod asymptotics;
pub mod bounds;
pub mod coding;
pub mod entropy;
pub mod error;
pub mod model;
pub mod par;
pub mod real;
pub mod thermo;
pub mod units;

pub use error::{Error, Result};
pub use model::{Distribution, ErrorParams, Hamiltonian, JointDistribution, StochasticChannel};
pub use par::Exec;
