use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::series::{ConvergenceSeries, SeriesPoint};
use crate::coding::{binomial, ml_decoder, one_shot_capacity, unrank_combination, SearchOptions};
use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::model::{sample, trace_distance, Distribution, JointDistribution, StochasticChannel, COMPARE_TOL};
use crate::par::{self, Exec};

/// Iteration cap of the alternating maximisation.
pub const MAX_ITERATIONS: usize = 100_000;

/// Mutual information of a joint law, bits.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let (a, b) = (j.marginal_a(), j.marginal_b());
    let mut s = 0.0;
    for x in 0..j.dim_a() {
        for y in 0..j.dim_b() {
            let p = j.get(x, y);
            if p > 0.0 {
                s += p * (p / (a.probs()[x] * b.probs()[y])).log2();
            }
        }
    }
    s.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShannonCapacity {
    /// Mutual information of `input`; within `upper - lower < tol` of the capacity.
    pub bits: f64,
    pub input: Distribution,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

/// Blahut-Arimoto iteration, stopped when the dual bracket `max_x D(ch(.|x) ‖ q)` is
/// within `tol` of the achieved mutual information.
pub fn shannon_capacity(ch: &StochasticChannel, tol: f64) -> Result<ShannonCapacity> {
    if !(tol > 0.0) {
        return Err(Error::ParameterDomain(format!("tol must be positive, got {tol}")));
    }
    let (nx, ny) = (ch.dim_in(), ch.dim_out());
    let mut r = vec![1.0 / nx as f64; nx];
    let mut div = vec![0.0; nx];
    let (mut lower, mut upper) = (0.0, f64::INFINITY);
    for it in 0..MAX_ITERATIONS {
        let q: Vec<f64> = (0..ny).map(|y| (0..nx).map(|x| ch.get(y, x) * r[x]).sum()).collect();
        for (x, d) in div.iter_mut().enumerate() {
            *d = (0..ny)
                .filter(|&y| ch.get(y, x) > 0.0)
                .map(|y| ch.get(y, x) * (ch.get(y, x) / q[y]).log2())
                .sum::<f64>()
                .max(0.0);
        }
        lower = r.iter().zip(&div).map(|(a, b)| a * b).sum::<f64>();
        upper = div.iter().copied().fold(0.0, f64::max);
        if upper - lower < tol {
            return Ok(ShannonCapacity { bits: lower, input: Distribution::new(r)?, lower, upper, iterations: it });
        }
        let w: Vec<f64> = r.iter().zip(&div).map(|(a, d)| a * d.exp2()).collect();
        let z: f64 = w.iter().sum();
        r = w.into_iter().map(|v| v / z).collect();
    }
    Err(Error::NonConvergence { lower, upper })
}

#[derive(Debug, Clone, Copy)]
pub struct HolevoBudget {
    pub max_messages: usize,
    /// Deterministic encoders per message count.
    pub encoders_per_size: usize,
    /// All deterministic decoders are tried when there are at most this many.
    pub max_decoders: usize,
    /// Seeded random stochastic encoder/decoder pairs.
    pub random_pairs: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for HolevoBudget {
    fn default() -> Self {
        Self { max_messages: 4, encoders_per_size: 64, max_decoders: 256, random_pairs: 256, seed: 0, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolevoEstimate {
    /// Best mutual information found among feasible candidates, a lower estimate.
    pub bits: f64,
    pub messages: usize,
    pub encoder: StochasticChannel,
    pub decoder: StochasticChannel,
    pub gibbs_deviation: f64,
    pub candidates: usize,
    pub feasible: usize,
}

struct Pair {
    encoder: StochasticChannel,
    decoder: StochasticChannel,
}

/// Candidate list depends only on the channel and budget, so estimates are monotone in theta.
fn holevo_candidates(ch: &StochasticChannel, budget: &HolevoBudget) -> Result<Vec<Pair>> {
    let (nx, ny) = (ch.dim_in(), ch.dim_out());
    let mut out = Vec::new();
    for m in 1..=budget.max_messages.min(nx) {
        let encoders = binomial(nx, m).min(budget.encoders_per_size as u128) as u64;
        let decoders = (m as u128).checked_pow(ny as u32).unwrap_or(u128::MAX);
        for rank in 0..encoders {
            let inputs = unrank_combination(nx, m, rank);
            let encoder = StochasticChannel::deterministic(&inputs, nx)?;
            if decoders <= budget.max_decoders as u128 {
                for code in 0..decoders as usize {
                    let map: Vec<usize> = (0..ny).map(|y| code / m.pow(y as u32) % m).collect();
                    out.push(Pair { encoder: encoder.clone(), decoder: StochasticChannel::deterministic(&map, m)? });
                }
            } else {
                let map = ml_decoder(ch, &inputs)?;
                out.push(Pair { encoder, decoder: StochasticChannel::deterministic(&map, m)? });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let top = budget.max_messages.max(1);
    for _ in 0..budget.random_pairs {
        let m = rng.random_range(1..=top);
        out.push(Pair { encoder: sample::channel(&mut rng, m, nx), decoder: sample::channel(&mut rng, ny, m) });
    }
    Ok(out)
}

/// Best `I(M;M')` of `(L∘ch∘K ⊗ id)(Φ_M)` over searched `K`, `L` whose composition moves
/// the uniform law by at most `2 theta`.
pub fn constrained_holevo(ch: &StochasticChannel, theta: f64, budget: &HolevoBudget) -> Result<HolevoEstimate> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::ParameterDomain(format!("theta must lie in (0, 1/2), got {theta}")));
    }
    let pairs = holevo_candidates(ch, budget)?;
    let scored = par::map_range(budget.exec, pairs.len(), |i| -> Result<Option<(f64, f64)>> {
        let pi = pairs[i].encoder.then(ch)?.then(&pairs[i].decoder)?;
        let u = Distribution::uniform(pi.dim_in());
        let dev = trace_distance(&pi.apply(&u)?, &u)?;
        if dev > 2.0 * theta + COMPARE_TOL {
            return Ok(None);
        }
        let j = pi.apply_local(&JointDistribution::maximally_correlated(pi.dim_in()))?;
        Ok(Some((mutual_information(&j), dev)))
    });
    let mut best: Option<(usize, f64, f64)> = None;
    let mut feasible = 0;
    for (i, s) in scored.into_iter().enumerate() {
        if let Some((v, dev)) = s? {
            feasible += 1;
            if best.is_none_or(|b| v > b.1) {
                best = Some((i, v, dev));
            }
        }
    }
    let (i, bits, gibbs_deviation) = best.expect("the single-message candidate is always feasible");
    let candidates = pairs.len();
    let Pair { encoder, decoder } = pairs.into_iter().nth(i).expect("index in range");
    Ok(HolevoEstimate { bits, messages: encoder.dim_in(), encoder, decoder, gibbs_deviation, candidates, feasible })
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesOptions {
    pub capacity: SearchOptions,
    pub shannon_tol: f64,
    /// Also produce the constrained mutual-information series at this theta.
    pub theta: Option<f64>,
    pub holevo: HolevoBudget,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { capacity: SearchOptions { randomized: true, ..SearchOptions::default() }, shannon_tol: 1e-9, theta: None, holevo: HolevoBudget::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedSeries {
    /// `(k, C^eps(ch^k)/k)`, targeting the Shannon capacity.
    pub capacity: ConvergenceSeries,
    /// Whether each point came from exhaustive search (else a sampled lower bracket).
    pub exact: Vec<bool>,
    /// Converse envelope `(C + H_b(eps)/k)/(1 - eps)` at each point.
    pub envelope: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_bar: Option<ConvergenceSeries>,
}

/// Largest `k_max` accepted by [`regularized_capacity_series`].
pub const SERIES_MAX_K: usize = 3;

pub fn regularized_capacity_series(ch: &StochasticChannel, eps: f64, k_max: usize, opts: &SeriesOptions) -> Result<RegularizedSeries> {
    if !(1..=SERIES_MAX_K).contains(&k_max) {
        return Err(Error::ParameterDomain(format!("k_max must lie in 1..={SERIES_MAX_K}, got {k_max}")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::ParameterDomain(format!("eps must lie in [0,1), got {eps}")));
    }
    let shannon = shannon_capacity(ch, opts.shannon_tol)?;
    let powers: Vec<StochasticChannel> = (1..=k_max).map(|k| ch.tensor_power(k)).collect::<Result<_>>()?;
    let caps = par::map_range(opts.capacity.exec, k_max, |i| one_shot_capacity(&powers[i], eps, &opts.capacity));
    let mut points = Vec::with_capacity(k_max);
    let mut exact = Vec::with_capacity(k_max);
    for (i, c) in caps.into_iter().enumerate() {
        let c = c?;
        points.push(SeriesPoint { n: i + 1, value: c.bits / (i + 1) as f64 });
        exact.push(c.exact);
    }
    let hb = binary_entropy(eps)?;
    let envelope = (1..=k_max).map(|k| (shannon.bits + hb / k as f64) / (1.0 - eps)).collect();
    let chi_bar = match opts.theta {
        None => None,
        Some(theta) => {
            let pts = powers
                .iter()
                .enumerate()
                .map(|(i, p)| Ok(SeriesPoint { n: i + 1, value: constrained_holevo(p, theta, &opts.holevo)?.bits / (i + 1) as f64 }))
                .collect::<Result<_>>()?;
            Some(ConvergenceSeries::new(pts, shannon.bits, "shannon capacity")?)
        }
    };
    Ok(RegularizedSeries { capacity: ConvergenceSeries::new(points, shannon.bits, "shannon capacity")?, exact, envelope, chi_bar })
}
