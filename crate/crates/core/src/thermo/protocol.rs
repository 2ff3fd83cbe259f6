use serde::{Deserialize, Serialize};

use super::process::{ProcessStep, WorkProcess};
use super::work::{eps_delta_work, tightest_window, work_distribution, WorkDistribution, WorkOptions};
use super::{DEFAULT_E_CUT, DEFAULT_K_STEPS};
use crate::entropy::{d0_smoothed_with, D0Options, D0Value};
use crate::error::{Error, Result};
use crate::model::params::check_thermo_eps;
use crate::model::{Distribution, Hamiltonian, COMPARE_TOL};
use crate::par;
use crate::units::bits_to_kt;

/// Spacing of the return steps along the straight path in energy space (equivalently
/// the geometric path in Boltzmann weights).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Equal steps of thermodynamic length (Fisher-Rao arc length of the Gibbs path).
    #[default]
    ThermodynamicLength,
    /// Equal steps of the interpolation parameter.
    UniformEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "delta", rename_all = "snake_case")]
pub enum Precision {
    /// Fixed window half-width `delta` (k_BT).
    Fixed(f64),
    /// The smallest `delta` at which a deterministic value exists.
    Tightest,
}

#[derive(Debug, Clone, Copy)]
pub struct WorkBudget {
    pub e_cut: f64,
    pub k_steps: usize,
    pub schedule: Schedule,
    /// Largest number of candidate subsets turned into protocols.
    pub max_candidates: usize,
    pub work: WorkOptions,
}

impl Default for WorkBudget {
    fn default() -> Self {
        Self {
            e_cut: DEFAULT_E_CUT,
            k_steps: DEFAULT_K_STEPS,
            schedule: Schedule::default(),
            max_candidates: 16,
            work: WorkOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct D0Protocol {
    pub process: WorkProcess,
    pub d0: D0Value,
}

/// Empties the levels outside the optimal smoothed Rényi-0 subset, thermalises, and
/// lowers them back in `k_steps` quasi-static steps.
pub fn d0_protocol(eta: &Distribution, h: &Hamiltonian, eps: f64, e_cut: f64, k_steps: usize, schedule: Schedule) -> Result<D0Protocol> {
    check_thermo_eps(eps)?;
    eta.require_dim(&h.gibbs())?;
    let d0 = d0_smoothed_with(eta, &h.gibbs(), eps, &D0Options { allow_heuristic: true, ..Default::default() })?;
    let process = subset_protocol(h, &d0.witness.indices, e_cut, k_steps, schedule)?;
    Ok(D0Protocol { process, d0 })
}

/// The protocol of [`d0_protocol`] for an arbitrary nonempty subset of levels.
pub fn subset_protocol(h: &Hamiltonian, subset: &[usize], e_cut: f64, k_steps: usize, schedule: Schedule) -> Result<WorkProcess> {
    if !(e_cut > 0.0 && e_cut.is_finite()) || k_steps == 0 {
        return Err(Error::ParameterDomain("need e_cut > 0 and k_steps >= 1".into()));
    }
    if subset.is_empty() || subset.iter().any(|&i| i >= h.dim()) {
        return Err(Error::ParameterDomain("subset must be a nonempty set of levels".into()));
    }
    let e = h.levels();
    let floor = subset.iter().map(|&i| e[i]).fold(f64::INFINITY, f64::min) + e_cut;
    let mut inside = vec![false; e.len()];
    for &i in subset {
        inside[i] = true;
    }
    let lifted: Vec<f64> = e.iter().zip(&inside).map(|(&x, &keep)| if keep { x } else { x.max(floor) }).collect();
    let lambdas = schedule_points(&lifted, e, k_steps, schedule);
    let mut steps = vec![lt(lifted.clone())?, ProcessStep::Thermalisation];
    for (k, &l) in lambdas.iter().enumerate() {
        if k + 1 == lambdas.len() {
            steps.push(lt(e.to_vec())?);
        } else {
            steps.push(lt(lerp(&lifted, e, l))?);
            steps.push(ProcessStep::Thermalisation);
        }
    }
    WorkProcess::new(h.clone(), steps)
}

fn lt(levels: Vec<f64>) -> Result<ProcessStep> {
    Ok(ProcessStep::LevelTransformation { levels: Hamiltonian::new(levels)? })
}

fn lerp(a: &[f64], b: &[f64], l: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + l * (y - x)).collect()
}

/// Interpolation parameters `λ_1 < ... < λ_K = 1`.
fn schedule_points(from: &[f64], to: &[f64], k: usize, schedule: Schedule) -> Vec<f64> {
    let uniform: Vec<f64> = (1..=k).map(|i| i as f64 / k as f64).collect();
    if schedule == Schedule::UniformEnergy {
        return uniform;
    }
    // Arc length element sqrt(Var_γ(λ)[to - from]) dλ, integrated on a fine grid.
    const GRID: usize = 8192;
    let speed = |l: f64| {
        let g = Hamiltonian::new(lerp(from, to, l)).expect("finite").gibbs();
        let d: Vec<f64> = to.iter().zip(from).map(|(t, f)| t - f).collect();
        let mean: f64 = g.probs().iter().zip(&d).map(|(p, x)| p * x).sum();
        g.probs().iter().zip(&d).map(|(p, x)| p * (x - mean).powi(2)).sum::<f64>().sqrt()
    };
    let speeds: Vec<f64> = (0..=GRID).map(|i| speed(i as f64 / GRID as f64)).collect();
    let mut arc = vec![0.0; GRID + 1];
    for i in 1..=GRID {
        arc[i] = arc[i - 1] + 0.5 * (speeds[i - 1] + speeds[i]) / GRID as f64;
    }
    let total = arc[GRID];
    if !(total > 0.0) {
        return uniform;
    }
    (1..=k)
        .map(|i| {
            if i == k {
                return 1.0;
            }
            let target = total * i as f64 / k as f64;
            let j = arc.partition_point(|&s| s < target).clamp(1, GRID);
            let (s0, s1) = (arc[j - 1], arc[j]);
            let frac = if s1 > s0 { (target - s0) / (s1 - s0) } else { 0.0 };
            (j as f64 - 1.0 + frac) / GRID as f64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractableWork {
    /// Best deterministic work gain over the protocol family, k_BT.
    pub value: f64,
    /// Window half-width at which `value` is deterministic, k_BT.
    pub delta: f64,
    pub d0: D0Value,
    /// `[ln2·D0, ln2·D0 + ln 1/(1-eps)]`, k_BT.
    #[serde(serialize_with = "crate::real::serialize_pair")]
    pub bracket: (f64, f64),
    /// Subset whose protocol attains `value`.
    pub subset: Vec<usize>,
    pub candidates: usize,
    pub mean_work_gain: f64,
    pub e_cut: f64,
    pub k_steps: usize,
    pub schedule: Schedule,
}

/// Pareto-efficient subsets of the support (high `q`, low `r`), or `None` when the
/// support is too large to list.
fn efficient_subsets(q: &[f64], r: &[f64], support: &[usize]) -> Option<Vec<(Vec<usize>, f64, f64)>> {
    const LIMIT: usize = 16;
    if support.len() > LIMIT {
        return None;
    }
    let mut all: Vec<(u32, f64, f64)> = (1u32..1 << support.len())
        .map(|mask| {
            let (mut qs, mut rs) = (0.0, 0.0);
            for (b, &i) in support.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    qs += q[i];
                    rs += r[i];
                }
            }
            (mask, qs, rs)
        })
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.2.total_cmp(&b.2)).then(a.0.count_ones().cmp(&b.0.count_ones())).then(a.0.cmp(&b.0)));
    let mut frontier = Vec::new();
    let mut best_r = f64::INFINITY;
    for (mask, qs, rs) in all {
        if rs < best_r {
            best_r = rs;
            let set = support.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect();
            frontier.push((set, qs, rs));
        }
    }
    Some(frontier)
}

/// Best `(eps, delta)`-deterministic work over protocols that empty one efficient subset's
/// complement, with the analytic bracket attached.
pub fn extractable_work(eta: &Distribution, h: &Hamiltonian, eps: f64, precision: Precision, budget: &WorkBudget) -> Result<ExtractableWork> {
    check_thermo_eps(eps)?;
    if let Precision::Fixed(d) = precision {
        if !(d >= 0.0) {
            return Err(Error::ParameterDomain(format!("delta must be nonnegative, got {d}")));
        }
    }
    let gamma = h.gibbs();
    eta.require_dim(&gamma)?;
    let d0 = d0_smoothed_with(eta, &gamma, eps, &D0Options { allow_heuristic: true, exec: budget.work.exec })?;
    let threshold = 1.0 - eps + COMPARE_TOL;
    let mut candidates: Vec<Vec<usize>> = match efficient_subsets(eta.probs(), gamma.probs(), &eta.support()) {
        Some(frontier) if frontier.len() <= budget.max_candidates => frontier.into_iter().map(|c| c.0).collect(),
        Some(frontier) => frontier.into_iter().filter(|c| c.1 > threshold).map(|c| c.0).collect(),
        None => Vec::new(),
    };
    candidates.retain(|c| *c != d0.witness.indices);
    candidates.insert(0, d0.witness.indices.clone());
    candidates.truncate(budget.max_candidates.max(1));

    let mut work = budget.work;
    if let Precision::Fixed(d) = precision {
        if d > 0.0 {
            work.resolution = work.resolution.min(d / 10.0);
        }
    }
    let evaluated: Vec<Result<(f64, f64, f64)>> = par::map_range(budget.work.exec, candidates.len(), |c| {
        let proc = subset_protocol(h, &candidates[c], budget.e_cut, budget.k_steps, budget.schedule)?;
        let wd: WorkDistribution = work_distribution(&proc, eta, &work)?;
        let (delta, value) = match precision {
            Precision::Fixed(d) => (d, eps_delta_work(&wd, eps, d)?),
            Precision::Tightest => tightest_window(&wd, eps)?,
        };
        Ok((value, delta, -wd.mean()))
    });
    let mut best: Option<(usize, (f64, f64, f64))> = None;
    for (c, r) in evaluated.into_iter().enumerate() {
        match r {
            Ok(v) if best.is_none_or(|(_, b)| v.0 > b.0) => best = Some((c, v)),
            Ok(_) | Err(Error::NoDeterministicValue) => {}
            Err(e) => return Err(e),
        }
    }
    let (c, (value, delta, mean_gain)) = best.ok_or(Error::NoDeterministicValue)?;
    let lower = bits_to_kt(d0.bits);
    Ok(ExtractableWork {
        value,
        delta,
        bracket: (lower, lower - (1.0 - eps).ln()),
        subset: candidates[c].clone(),
        candidates: candidates.len(),
        mean_work_gain: mean_gain,
        d0,
        e_cut: budget.e_cut,
        k_steps: budget.k_steps,
        schedule: budget.schedule,
    })
}
