use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sandwich::Verdict;
use crate::coding::{gibbs_deviation, one_shot_capacity, Codebook, SearchOptions};
use crate::error::{Error, Result};
use crate::model::{JointDistribution, StochasticChannel};
use crate::par;
use crate::thermo::{work_from_correlation, ExtractableWork, Precision, WorkBudget};
use crate::units::bits_to_kt;

#[derive(Debug, Clone, Copy)]
pub struct ScenarioOptions {
    pub capacity: SearchOptions,
    pub work: WorkBudget,
    /// Trials per independently seeded shard.
    pub shard: usize,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self { capacity: SearchOptions::default(), work: WorkBudget::default(), shard: 8192 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandauerReport {
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
    pub bits: f64,
    pub messages: usize,
    pub codebook: Codebook,
    pub exact_success: f64,
    pub gibbs_deviation: f64,
    /// `max_m ‖Π(δ_m) - δ_m‖₁` for the codebook's classical version.
    pub max_message_infidelity: f64,
    pub decode_trials: usize,
    pub empirical_success: f64,
    /// Binomial standard deviation of the empirical rate around `exact_success`.
    pub success_sigma: f64,
    pub success_within_three_sigma: bool,
    pub work_trials: usize,
    /// Counts normalised over (decoded message, referee's copy).
    pub empirical_joint: JointDistribution,
    pub work: ExtractableWork,
    /// `bits · ln2`, k_BT.
    pub target_kt: f64,
    pub work_gap_kt: f64,
    /// Correlation work of the noiseless maximally correlated state, k_BT.
    pub reference_work_kt: f64,
    pub verdict: Verdict,
}

/// Cumulative column of `ch` at input `x`.
fn cdf(ch: &StochasticChannel, x: usize) -> Vec<f64> {
    ch.column(x)
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

/// Counts `[decoded][sent]` over `trials` uniformly drawn messages; shard `s` uses its own stream.
fn simulate(code: &Codebook, cdfs: &[Vec<f64>], trials: usize, seed: u64, stream_base: u64, shard: usize, exec: par::Exec) -> Vec<u64> {
    let m = code.messages();
    let parts = par::map_chunks(exec, trials as u64, shard as u64, |start, end| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_base + start / shard as u64);
        let mut counts = vec![0u64; m * m];
        for _ in start..end {
            let sent = rng.random_range(0..m);
            let y = draw(&cdfs[sent], rng.random::<f64>());
            counts[code.decoder()[y] * m + sent] += 1;
        }
        counts
    });
    parts.into_iter().fold(vec![0u64; m * m], |mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    })
}

/// Referee, sender and receiver share the maximally correlated state on the capacity
/// codebook's messages; the sender's half crosses `ch`. Half of the trials estimate the
/// decoding success, the other half build the empirical joint whose correlation work is
/// extracted.
pub fn landauer_scenario(ch: &StochasticChannel, eps: f64, trials: usize, seed: u64, opts: &ScenarioOptions) -> Result<LandauerReport> {
    if trials < 2 {
        return Err(Error::ParameterDomain("need at least two trials".into()));
    }
    let cap = one_shot_capacity(ch, eps, &opts.capacity)?;
    let m = cap.messages;
    if m < 2 {
        return Err(Error::NoFeasibleCodebook);
    }
    let code = cap.codebook;
    let cv = code.classical_version(ch)?;
    let pi = cv.square()?;
    let exact = cap.success_probability;
    let max_message_infidelity = (0..m).map(|i| 2.0 * (1.0 - pi.get(i, i))).fold(0.0, f64::max);
    let cdfs: Vec<Vec<f64>> = code.inputs().iter().map(|&x| cdf(ch, x)).collect();
    let exec = opts.capacity.exec;

    let decode_trials = trials / 2;
    let work_trials = trials - decode_trials;
    let decode = simulate(&code, &cdfs, decode_trials, seed, 0, opts.shard, exec);
    let hits: u64 = (0..m).map(|i| decode[i * m + i]).sum();
    let empirical_success = hits as f64 / decode_trials as f64;
    let success_sigma = (exact * (1.0 - exact) / decode_trials as f64).sqrt();
    let within = (empirical_success - exact).abs() <= 3.0 * success_sigma + 1e-12;

    let counts = simulate(&code, &cdfs, work_trials, seed, 1 << 32, opts.shard, exec);
    let empirical_joint =
        JointDistribution::from_flat(counts.iter().map(|&c| c as f64 / work_trials as f64).collect(), m, m)?;
    let work = work_from_correlation(&empirical_joint, eps, Precision::Tightest, &opts.work)?.work;
    let reference = work_from_correlation(&JointDistribution::maximally_correlated(m), eps, Precision::Tightest, &opts.work)?.work;

    let deviation = gibbs_deviation(&cv)?;
    let target_kt = bits_to_kt(cap.bits);
    let verdict = if deviation <= 2.0 * eps + super::VIOLATION_TOL {
        Verdict::Consistent
    } else {
        Verdict::Violation(format!("codebook Gibbs deviation {deviation} exceeds 2 eps"))
    };
    Ok(LandauerReport {
        eps,
        trials,
        seed,
        bits: cap.bits,
        messages: m,
        codebook: code,
        exact_success: exact,
        gibbs_deviation: deviation,
        max_message_infidelity,
        decode_trials,
        empirical_success,
        success_sigma,
        success_within_three_sigma: within,
        work_trials,
        empirical_joint,
        work_gap_kt: work.value - target_kt,
        work,
        target_kt,
        reference_work_kt: reference.value,
        verdict,
    })
}
