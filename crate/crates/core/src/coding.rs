//! Codebooks with maximum-likelihood decoding and exhaustive one-shot capacity search.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{trace_distance, Distribution, StochasticChannel, COMPARE_TOL};
use crate::par::{self, Exec};

/// Messages `0..M` encoded as input symbols, decoded by a total map on output symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Codebook {
    messages: usize,
    inputs: Vec<usize>,
    decoder: Vec<usize>,
}

impl Codebook {
    pub fn new(ch: &StochasticChannel, inputs: Vec<usize>, decoder: Vec<usize>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::ParameterDomain("codebook needs at least one message".into()));
        }
        if inputs.iter().any(|&x| x >= ch.dim_in()) {
            return Err(Error::DimensionMismatch("codebook input out of range".into()));
        }
        if decoder.len() != ch.dim_out() || decoder.iter().any(|&m| m >= inputs.len()) {
            return Err(Error::DimensionMismatch("decoder must map every output to a message".into()));
        }
        Ok(Self { messages: inputs.len(), inputs, decoder })
    }

    pub fn with_ml_decoder(ch: &StochasticChannel, inputs: Vec<usize>) -> Result<Self> {
        let decoder = ml_decoder(ch, &inputs)?;
        Self::new(ch, inputs, decoder)
    }

    pub fn messages(&self) -> usize {
        self.messages
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn decoder(&self) -> &[usize] {
        &self.decoder
    }

    /// `(1/M) Σ_y ch[y][inputs[decoder[y]]]`.
    pub fn success_probability(&self, ch: &StochasticChannel) -> f64 {
        let s: f64 = (0..ch.dim_out()).map(|y| ch.get(y, self.inputs[self.decoder[y]])).sum();
        s / self.messages as f64
    }

    pub fn classical_version(&self, ch: &StochasticChannel) -> Result<ClassicalVersion> {
        let pre = StochasticChannel::deterministic(&self.inputs, ch.dim_in())?;
        let post = StochasticChannel::deterministic(&self.decoder, self.messages)?;
        ClassicalVersion::new(pre, ch.clone(), post)
    }
}

/// `post ∘ base ∘ pre`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalVersion {
    pub pre: StochasticChannel,
    pub base: StochasticChannel,
    pub post: StochasticChannel,
}

impl ClassicalVersion {
    pub fn new(pre: StochasticChannel, base: StochasticChannel, post: StochasticChannel) -> Result<Self> {
        if pre.dim_out() != base.dim_in() || base.dim_out() != post.dim_in() {
            return Err(Error::DimensionMismatch("pre/base/post dimensions do not chain".into()));
        }
        Ok(Self { pre, base, post })
    }

    pub fn composed(&self) -> Result<StochasticChannel> {
        self.pre.then(&self.base)?.then(&self.post)
    }

    /// Composition, required to map `M` messages back onto `M` messages.
    pub fn square(&self) -> Result<StochasticChannel> {
        let c = self.composed()?;
        if c.dim_in() != c.dim_out() {
            return Err(Error::NonSquare(c.dim_in(), c.dim_out()));
        }
        Ok(c)
    }
}

/// Average probability that message `m` is decoded as `m`.
pub fn success_probability(cv: &ClassicalVersion) -> Result<f64> {
    let c = cv.square()?;
    let m = c.dim_in();
    Ok((0..m).map(|i| c.get(i, i)).sum::<f64>() / m as f64)
}

/// Trace distance between the image of the uniform law and the uniform law.
pub fn gibbs_deviation(cv: &ClassicalVersion) -> Result<f64> {
    let c = cv.square()?;
    let u = Distribution::uniform(c.dim_in());
    trace_distance(&c.apply(&u)?, &u)
}

/// `decoder[y] = argmax_i ch[y][inputs[i]]`, ties to the lowest message.
pub fn ml_decoder(ch: &StochasticChannel, inputs: &[usize]) -> Result<Vec<usize>> {
    if inputs.is_empty() {
        return Err(Error::ParameterDomain("codebook needs at least one message".into()));
    }
    if inputs.iter().any(|&x| x >= ch.dim_in()) {
        return Err(Error::DimensionMismatch("codebook input out of range".into()));
    }
    Ok((0..ch.dim_out())
        .map(|y| {
            let mut best = 0;
            for i in 1..inputs.len() {
                if ch.get(y, inputs[i]) > ch.get(y, inputs[best]) {
                    best = i;
                }
            }
            best
        })
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Largest message count tried; defaults to `dim_in * dim_out`.
    pub max_messages: Option<usize>,
    /// Largest number of codebooks enumerated for one message count.
    pub budget: u64,
    /// Sample codebooks when the budget is exceeded instead of failing.
    pub randomized: bool,
    pub samples: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { max_messages: None, budget: 10_000_000, randomized: false, samples: 100_000, seed: 0, exec: Exec::default() }
    }
}

/// A codebook under consideration, with ML decoding.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub inputs: &'a [usize],
    pub success: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    pub bits: f64,
    pub messages: usize,
    pub codebook: Codebook,
    pub success_probability: f64,
    pub gibbs_deviation: f64,
    /// `false` when sampling replaced enumeration; `bits` is then a lower bracket.
    pub exact: bool,
}

/// Largest `log2 M` with an ML codebook of success at least `1 - eps`.
pub fn one_shot_capacity(ch: &StochasticChannel, eps: f64, opts: &SearchOptions) -> Result<CapacityResult> {
    search_capacity(ch, eps, opts, |_| true)
}

/// As [`one_shot_capacity`], restricted to codebooks whose classical version moves the
/// uniform law by at most `2 theta`.
pub fn theta_equilibrium_capacity(ch: &StochasticChannel, eps: f64, theta: f64, opts: &SearchOptions) -> Result<CapacityResult> {
    if !(0.0..0.5).contains(&theta) {
        return Err(Error::ParameterDomain(format!("theta must lie in [0, 1/2), got {theta}")));
    }
    search_capacity(ch, eps, opts, |c| c.deviation <= 2.0 * theta + COMPARE_TOL)
}

struct Scorer<'a> {
    ch: &'a StochasticChannel,
}

impl Scorer<'_> {
    /// Success probability and Gibbs deviation of the ML codebook on `inputs`.
    fn score(&self, inputs: &[usize], out: &mut [f64]) -> (f64, f64) {
        let ch = self.ch;
        let m = inputs.len();
        out[..m].fill(0.0);
        let mut hits = 0.0;
        for y in 0..ch.dim_out() {
            let mut best = 0;
            let mut row_mass = 0.0;
            for (i, &x) in inputs.iter().enumerate() {
                let v = ch.get(y, x);
                row_mass += v;
                if v > ch.get(y, inputs[best]) {
                    best = i;
                }
            }
            hits += ch.get(y, inputs[best]);
            out[best] += row_mass;
        }
        let mf = m as f64;
        let dev = out[..m].iter().map(|o| (o / mf - 1.0 / mf).abs()).sum();
        (hits / mf, dev)
    }
}

/// Generic capacity search: for `M` from the cap downwards, the lexicographically first
/// feasible codebook accepted by `accept` wins.
pub fn search_capacity<F>(ch: &StochasticChannel, eps: f64, opts: &SearchOptions, accept: F) -> Result<CapacityResult>
where
    F: Fn(&Candidate) -> bool + Sync,
{
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::ParameterDomain(format!("eps must lie in [0,1], got {eps}")));
    }
    let n = ch.dim_in();
    let cap = opts.max_messages.unwrap_or(n * ch.dim_out()).min(n * ch.dim_out()).max(1);
    let target = 1.0 - eps - COMPARE_TOL;
    let scorer = Scorer { ch };
    let check = |inputs: &[usize], buf: &mut [f64]| -> Option<(f64, f64)> {
        let (success, deviation) = scorer.score(inputs, buf);
        (success >= target && accept(&Candidate { inputs, success, deviation })).then_some((success, deviation))
    };
    let finish = |inputs: Vec<usize>, success: f64, deviation: f64, exact: bool| -> Result<CapacityResult> {
        let m = inputs.len();
        Ok(CapacityResult {
            bits: (m as f64).log2(),
            messages: m,
            codebook: Codebook::with_ml_decoder(ch, inputs)?,
            success_probability: success,
            gibbs_deviation: deviation,
            exact,
        })
    };

    for m in (1..=cap).rev() {
        let mut buf = vec![0.0; m];
        if m > n {
            // Distinct inputs are exhausted; repeated messages are never decoded.
            let inputs: Vec<usize> = (0..m).map(|i| i % n).collect();
            if let Some((s, d)) = check(&inputs, &mut buf) {
                return finish(inputs, s, d, true);
            }
            continue;
        }
        let count = binomial(n, m);
        if count <= opts.budget as u128 {
            let count = count as u64;
            const CHUNK: u64 = 4096;
            let hit = par::find_map_first(opts.exec, count.div_ceil(CHUNK) as usize, |c| {
                let start = c as u64 * CHUNK;
                let end = (start + CHUNK).min(count);
                let mut combo = unrank_combination(n, m, start);
                let mut buf = vec![0.0; m];
                for _ in start..end {
                    if let Some((s, d)) = check(&combo, &mut buf) {
                        return Some((combo, s, d));
                    }
                    next_combination(&mut combo, n);
                }
                None
            });
            if let Some((inputs, s, d)) = hit {
                return finish(inputs, s, d, true);
            }
        } else if opts.randomized {
            const SHARD: usize = 1024;
            let shards = opts.samples.div_ceil(SHARD);
            let hit = par::find_map_first(opts.exec, shards, |shard| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(shard as u64 ^ (m as u64) << 32);
                let mut buf = vec![0.0; m];
                let len = SHARD.min(opts.samples - shard * SHARD);
                (0..len).find_map(|_| {
                    let mut combo = index::sample(&mut rng, n, m).into_vec();
                    combo.sort_unstable();
                    check(&combo, &mut buf).map(|(s, d)| (combo, s, d))
                })
            });
            if let Some((inputs, s, d)) = hit {
                return finish(inputs, s, d, false);
            }
        } else {
            return Err(Error::SearchSpaceTooLarge { size: count, budget: opts.budget });
        }
    }
    Err(Error::NoFeasibleCodebook)
}

/// `C(n, k)`, saturating.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub(crate) fn unrank_combination(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    for slot in 0..k {
        loop {
            let rest = binomial(n - x - 1, k - slot - 1) as u64;
            if rank < rest {
                break;
            }
            rank -= rest;
            x += 1;
        }
        out.push(x);
        x += 1;
    }
    out
}

/// Advances to the next `k`-subset in lexicographic order; returns `false` after the last.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
