//! Oracles shared by the integration tests. Each is a direct, unoptimised evaluation of
//! the defining optimisation problem.
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermocap::StochasticChannel;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact optimum of `min Σ t r` s.t. `Σ t q >= 1 - eps`, `0 <= t <= 1`, over every LP
/// vertex: a set of full coordinates plus at most one fractional coordinate. Bits.
pub fn dh_vertex_oracle(q: &[f64], r: &[f64], eps: f64) -> f64 {
    let n = q.len();
    let need = 1.0 - eps;
    let mut best = f64::INFINITY;
    for mask in 0u32..1 << n {
        let (mut qs, mut rs) = (0.0, 0.0);
        for j in 0..n {
            if mask >> j & 1 == 1 {
                qs += q[j];
                rs += r[j];
            }
        }
        if qs >= need {
            best = best.min(rs);
            continue;
        }
        for j in 0..n {
            if mask >> j & 1 == 0 && q[j] > 0.0 {
                let t = (need - qs) / q[j];
                if t <= 1.0 {
                    best = best.min(rs + t * r[j]);
                }
            }
        }
    }
    -best.log2()
}

/// Best success probability over every input tuple and every decoder for `m` messages.
pub fn brute_success(ch: &StochasticChannel, m: usize) -> f64 {
    let (nx, ny) = (ch.dim_in(), ch.dim_out());
    let mut best = 0.0f64;
    for t in 0..nx.pow(m as u32) {
        let inputs: Vec<usize> = (0..m).map(|i| t / nx.pow(i as u32) % nx).collect();
        for d in 0..m.pow(ny as u32) {
            let s: f64 = (0..ny).map(|y| ch.get(y, inputs[d / m.pow(y as u32) % m])).sum::<f64>() / m as f64;
            best = best.max(s);
        }
    }
    best
}

/// Largest `log2 m` with brute-force success at least `1 - eps`. Success never exceeds
/// `dim_out / m`, which bounds the message counts worth trying.
pub fn brute_capacity(ch: &StochasticChannel, eps: f64) -> f64 {
    (1..=ch.dim_in() * ch.dim_out())
        .filter(|&m| ch.dim_out() as f64 / m as f64 >= 1.0 - eps - 1e-12)
        .filter(|&m| brute_success(ch, m) >= 1.0 - eps - 1e-12)
        .map(|m| (m as f64).log2())
        .fold(0.0, f64::max)
}
