//! Seeded random instances.

use rand::Rng;

use super::{Distribution, Hamiltonian, JointDistribution, StochasticChannel};

/// Uniform on the simplex, optionally with some entries zeroed.
pub fn distribution<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Distribution {
    let w: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    Distribution::from_weights(w).expect("positive weights")
}

/// Like [`distribution`] but each entry is zero with probability `zero_prob` (at least one stays positive).
pub fn sparse_distribution<R: Rng + ?Sized>(rng: &mut R, dim: usize, zero_prob: f64) -> Distribution {
    let keep = rng.random_range(0..dim);
    let w: Vec<f64> = (0..dim)
        .map(|i| if i != keep && rng.random::<f64>() < zero_prob { 0.0 } else { -(1.0 - rng.random::<f64>()).ln() })
        .collect();
    Distribution::from_weights(w).expect("one positive weight")
}

pub fn channel<R: Rng + ?Sized>(rng: &mut R, dim_in: usize, dim_out: usize) -> StochasticChannel {
    let cols: Vec<Distribution> = (0..dim_in).map(|_| distribution(rng, dim_out)).collect();
    StochasticChannel::from_fn(dim_in, dim_out, |y, x| cols[x].probs()[y]).expect("columns are distributions")
}

pub fn joint<R: Rng + ?Sized>(rng: &mut R, dim_a: usize, dim_b: usize) -> JointDistribution {
    let d = distribution(rng, dim_a * dim_b);
    JointDistribution::from_flat(d.probs().to_vec(), dim_a, dim_b).expect("normalised")
}

pub fn hamiltonian<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_energy: f64) -> Hamiltonian {
    Hamiltonian::new((0..dim).map(|_| rng.random::<f64>() * max_energy).collect()).expect("finite")
}
