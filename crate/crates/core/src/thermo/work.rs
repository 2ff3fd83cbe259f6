use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::process::WorkProcess;
use crate::error::{Error, Result};
use crate::model::{Distribution, COMPARE_TOL};
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkStrategy {
    /// Exact atoms when they fit the budget, then binning, then sampling.
    #[default]
    Auto,
    ExactOnly,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy)]
pub struct WorkOptions {
    pub strategy: WorkStrategy,
    pub atom_budget: usize,
    /// Bin width in k_BT for the binned mode.
    pub resolution: f64,
    pub max_bins: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for WorkOptions {
    fn default() -> Self {
        Self {
            strategy: WorkStrategy::Auto,
            atom_budget: 1_000_000,
            resolution: 1e-3,
            max_bins: 10_000_000,
            mc_samples: 100_000,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorkMode {
    Exact,
    /// Values snapped to a grid with a mean-preserving linear split; bins below
    /// `1e-18` are dropped and their mass reported.
    Binned { resolution: f64, truncated_mass: f64 },
    /// Empirical law of seeded trajectories; `hoeffding` is the 95% half-width for any
    /// interval probability.
    MonteCarlo { samples: usize, seed: u64, hoeffding: f64 },
}

/// Law of the total work cost, atoms sorted by value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkDistribution {
    atoms: Vec<(f64, f64)>,
    mode: WorkMode,
    mean: f64,
    variance: f64,
}

impl WorkDistribution {
    /// Validates `(value, prob)` pairs, sorting and merging equal values.
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|(v, p)| !v.is_finite() || !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidProbability("work atoms must be finite with nonnegative mass".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > crate::model::CONSTRUCTION_TOL {
            return Err(Error::InvalidProbability(format!("work atoms sum to {total}")));
        }
        Ok(Self::build(sort_merge(atoms, 0.0), WorkMode::Exact))
    }

    fn build(atoms: Vec<(f64, f64)>, mode: WorkMode) -> Self {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mean = atoms.iter().map(|(v, p)| v * p).sum::<f64>() / total;
        let variance = atoms.iter().map(|(v, p)| p * (v - mean).powi(2)).sum::<f64>() / total;
        Self { atoms, mode, mean, variance }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mode(&self) -> &WorkMode {
        &self.mode
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("value,prob\n");
        for (v, p) in &self.atoms {
            s.push_str(&format!("{v},{p}\n"));
        }
        s
    }
}

fn sort_merge(mut atoms: Vec<(f64, f64)>, rel_tol: f64) -> Vec<(f64, f64)> {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (v, p) in atoms {
        if p == 0.0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if v - last.0 <= rel_tol * last.0.abs().max(1.0) => last.1 += p,
            _ => out.push((v, p)),
        }
    }
    out
}

/// Law of the total work cost of `proc` started in `eta`.
pub fn work_distribution(proc: &WorkProcess, eta: &Distribution, opts: &WorkOptions) -> Result<WorkDistribution> {
    if eta.dim() != proc.dim() {
        return Err(Error::DimensionMismatch(format!("state dim {} vs process dim {}", eta.dim(), proc.dim())));
    }
    let segs: Vec<Vec<(f64, f64)>> = proc.segments().iter().map(|s| s.atoms(eta)).collect();
    if segs.is_empty() {
        return Ok(WorkDistribution::build(vec![(0.0, 1.0)], WorkMode::Exact));
    }
    let product = segs.iter().fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    let span: f64 = segs.iter().map(|s| s[s.len() - 1].0 - s[0].0).sum();
    let bins = span / opts.resolution + 2.0 * segs.len() as f64 + 2.0;
    match opts.strategy {
        WorkStrategy::ExactOnly if product > opts.atom_budget as u128 => {
            Err(Error::AtomBudgetExceeded { atoms: product, budget: opts.atom_budget })
        }
        WorkStrategy::Auto | WorkStrategy::ExactOnly if product <= opts.atom_budget as u128 => Ok(exact(&segs)),
        WorkStrategy::Auto if bins <= opts.max_bins as f64 => Ok(binned(&segs, opts.resolution)),
        _ => Ok(monte_carlo(&segs, opts)),
    }
}

fn exact(segs: &[Vec<(f64, f64)>]) -> WorkDistribution {
    let mut acc = segs[0].clone();
    for s in &segs[1..] {
        let next = acc.iter().flat_map(|&(a, pa)| s.iter().map(move |&(b, pb)| (a + b, pa * pb))).collect();
        acc = sort_merge(next, COMPARE_TOL);
    }
    WorkDistribution::build(acc, WorkMode::Exact)
}

/// Dense run of bins starting at grid index `lo`.
struct Run {
    lo: i64,
    mass: Vec<f64>,
}

const BIN_FLOOR: f64 = 1e-18;
/// Zero stretches longer than this split a run in two.
const GAP: usize = 256;

fn split(v: f64, res: f64) -> (i64, f64) {
    let x = v / res;
    let i = x.floor();
    (i as i64, x - i)
}

/// Drops bins below the floor (adding them to `truncated`) and cuts runs at long gaps.
fn prune(run: Run, truncated: &mut f64, out: &mut Vec<Run>) {
    let Run { lo, mut mass } = run;
    for m in mass.iter_mut() {
        if *m < BIN_FLOOR && *m > 0.0 {
            *truncated += *m;
            *m = 0.0;
        }
    }
    let mut start: Option<usize> = None;
    let mut zeros = 0;
    for (j, &m) in mass.iter().enumerate() {
        if m > 0.0 {
            if start.is_none() {
                start = Some(j);
            }
            zeros = 0;
        } else if let Some(s) = start {
            zeros += 1;
            if zeros > GAP {
                out.push(Run { lo: lo + s as i64, mass: mass[s..j + 1 - zeros].to_vec() });
                start = None;
                zeros = 0;
            }
        }
    }
    if let Some(s) = start {
        out.push(Run { lo: lo + s as i64, mass: mass[s..mass.len() - zeros].to_vec() });
    }
}

/// Merges runs sorted by start, adding overlapping bins.
fn coalesce(mut runs: Vec<Run>) -> Vec<Run> {
    runs.sort_by_key(|r| r.lo);
    let mut out: Vec<Run> = Vec::with_capacity(runs.len());
    for r in runs {
        match out.last_mut() {
            Some(last) if r.lo <= last.lo + last.mass.len() as i64 => {
                let off = (r.lo - last.lo) as usize;
                let end = off + r.mass.len();
                if end > last.mass.len() {
                    last.mass.resize(end, 0.0);
                }
                last.mass[off..end].iter_mut().zip(&r.mass).for_each(|(a, b)| *a += b);
            }
            _ => out.push(r),
        }
    }
    out
}

/// Convolution on a grid of width `res`; each value is split linearly between its two
/// neighbouring bins so that every step preserves the mean.
fn binned(segs: &[Vec<(f64, f64)>], res: f64) -> WorkDistribution {
    let shifts = |s: &[(f64, f64)]| -> Vec<(i64, f64, f64)> {
        s.iter()
            .map(|&(v, p)| {
                let (i, f) = split(v, res);
                (i, f, p)
            })
            .collect()
    };
    let first = coalesce(shifts(&segs[0]).into_iter().map(|(i, f, p)| Run { lo: i, mass: vec![p * (1.0 - f), p * f] }).collect());
    let mut truncated = 0.0;
    let mut runs = Vec::new();
    first.into_iter().for_each(|r| prune(r, &mut truncated, &mut runs));
    for s in &segs[1..] {
        let sh = shifts(s);
        let kmin = sh.iter().map(|a| a.0).min().expect("nonempty");
        let kmax = sh.iter().map(|a| a.0).max().expect("nonempty");
        let spread = (kmax - kmin) as usize + 2;
        let mut next = Vec::with_capacity(runs.len());
        for run in &runs {
            let mut out = vec![0.0; run.mass.len() + spread];
            for &(k, f, p) in &sh {
                let base = (k - kmin) as usize;
                let (lo_w, hi_w) = (p * (1.0 - f), p * f);
                let dst = &mut out[base..base + run.mass.len() + 1];
                for (j, &m) in run.mass.iter().enumerate() {
                    dst[j] += m * lo_w;
                    dst[j + 1] += m * hi_w;
                }
            }
            next.push(Run { lo: run.lo + kmin, mass: out });
        }
        runs = Vec::with_capacity(next.len());
        for r in coalesce(next) {
            prune(r, &mut truncated, &mut runs);
        }
    }
    let atoms = runs
        .iter()
        .flat_map(|r| r.mass.iter().enumerate().filter(|(_, m)| **m > 0.0).map(move |(j, &m)| ((r.lo + j as i64) as f64 * res, m)))
        .collect();
    WorkDistribution::build(atoms, WorkMode::Binned { resolution: res, truncated_mass: truncated })
}

fn monte_carlo(segs: &[Vec<(f64, f64)>], opts: &WorkOptions) -> WorkDistribution {
    const SHARD: usize = 4096;
    let n = opts.mc_samples.max(1);
    let cumulative: Vec<Vec<f64>> = segs
        .iter()
        .map(|s| {
            s.iter()
                .scan(0.0, |acc, a| {
                    *acc += a.1;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    let samples: Vec<f64> = par::map_range(opts.exec, n.div_ceil(SHARD), |shard| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(shard as u64);
        let len = SHARD.min(n - shard * SHARD);
        (0..len)
            .map(|_| {
                segs.iter()
                    .zip(&cumulative)
                    .map(|(s, c)| {
                        let u: f64 = rng.random::<f64>() * c[c.len() - 1];
                        s[c.partition_point(|&x| x <= u).min(s.len() - 1)].0
                    })
                    .sum::<f64>()
            })
            .collect::<Vec<f64>>()
    })
    .concat();
    let w = 1.0 / n as f64;
    let atoms = sort_merge(samples.into_iter().map(|v| (v, w)).collect(), 0.0);
    let hoeffding = ((2.0f64 / 0.05).ln() / (2.0 * n as f64)).sqrt();
    WorkDistribution::build(atoms, WorkMode::MonteCarlo { samples: n, seed: opts.seed, hoeffding })
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::ParameterDomain(format!("eps must lie in (0,1), got {eps}")));
    }
    Ok(())
}

fn prefix_mass(atoms: &[(f64, f64)]) -> Vec<f64> {
    let mut prefix = Vec::with_capacity(atoms.len() + 1);
    prefix.push(0.0);
    for a in atoms {
        prefix.push(prefix[prefix.len() - 1] + a.1);
    }
    prefix
}

/// Largest `w'` such that the work gain `-W` lies within `delta` of `w'` with
/// probability above `1 - eps`.
pub fn eps_delta_work(wd: &WorkDistribution, eps: f64, delta: f64) -> Result<f64> {
    check_eps(eps)?;
    if !(delta >= 0.0) {
        return Err(Error::ParameterDomain(format!("delta must be nonnegative, got {delta}")));
    }
    let atoms = &wd.atoms;
    let prefix = prefix_mass(atoms);
    let need = 1.0 - eps + COMPARE_TOL;
    let mut i = 0;
    for j in 0..atoms.len() {
        let left = atoms[j].0 - 2.0 * delta;
        while atoms[i].0 < left - COMPARE_TOL * left.abs().max(1.0) {
            i += 1;
        }
        if prefix[j + 1] - prefix[i] > need {
            return Ok(delta - atoms[j].0);
        }
    }
    Err(Error::NoDeterministicValue)
}

/// Smallest `delta` for which [`eps_delta_work`] has a value, together with that value.
pub fn tightest_window(wd: &WorkDistribution, eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let atoms = &wd.atoms;
    let prefix = prefix_mass(atoms);
    let need = 1.0 - eps + COMPARE_TOL;
    let mut best: Option<(f64, usize, usize)> = None;
    let mut j = 0;
    for i in 0..atoms.len() {
        j = j.max(i);
        while j < atoms.len() && prefix[j + 1] - prefix[i] <= need {
            j += 1;
        }
        if j == atoms.len() {
            break;
        }
        let width = atoms[j].0 - atoms[i].0;
        if best.is_none_or(|(w, _, _)| width < w) {
            best = Some((width, i, j));
        }
    }
    let (width, i, j) = best.ok_or(Error::NoDeterministicValue)?;
    Ok((width / 2.0, -(atoms[i].0 + atoms[j].0) / 2.0))
}
