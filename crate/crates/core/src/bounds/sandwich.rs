use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::terms::{error_terms, CAPACITY_TERM, CONVERSE_TERM, WORK_CAPACITY_TERM, WORK_EXTRACTION_TERM};
use super::VIOLATION_TOL;
use crate::coding::{binomial, gibbs_deviation, one_shot_capacity, theta_equilibrium_capacity, unrank_combination, CapacityResult, Codebook, SearchOptions};
use crate::entropy::{d0_smoothed_with, dh_smoothed, D0Options, D0Value};
use crate::error::{Error, Result};
use crate::model::{sample, Distribution, ErrorParams, JointDistribution, StochasticChannel, THERMO_EPS_MAX};
use crate::par::{self, Exec};
use crate::real::{self, Real};
use crate::units::{bits_to_kt, LN2};

#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub capacity: SearchOptions,
    /// Largest message count in the lower-estimate family.
    pub max_messages: usize,
    /// Codebooks (lexicographic order) per message count in the lower-estimate family.
    pub codebooks_per_size: usize,
    /// Seeded random members added to the lower-estimate family.
    pub random_inputs: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { capacity: SearchOptions::default(), max_messages: 4, codebooks_per_size: 64, random_inputs: 64, seed: 0 }
    }
}

impl SearchBudget {
    fn exec(&self) -> Exec {
        self.capacity.exec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violation(String),
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        *self == Verdict::Consistent
    }

    fn from_checks(checks: &[(bool, String)]) -> Self {
        let failed: Vec<&str> = checks.iter().filter(|(ok, _)| !ok).map(|(_, m)| m.as_str()).collect();
        if failed.is_empty() {
            Verdict::Consistent
        } else {
            Verdict::Violation(failed.join("; "))
        }
    }
}

/// Best member of the lower-estimate family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerWitness {
    /// `"codebook"` or `"random"`.
    pub source: &'static str,
    pub messages: usize,
    /// Codebook inputs, when the member is codebook-induced.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<usize>>,
    /// Input joint law before the channel.
    pub input: JointDistribution,
    /// Entropic value of the member, before subtracting the error term.
    pub value: f64,
    pub family_size: usize,
}

/// The proof's feasible point: the capacity codebook's classical version applied to the
/// maximally correlated state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperWitness {
    pub codebook: Codebook,
    pub gibbs_deviation: f64,
    pub smoothing: f64,
    pub d0: D0Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witnesses {
    pub capacity: CapacityResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<LowerWitness>,
    pub upper: UpperWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub check: &'static str,
    pub units: &'static str,
    pub params: ErrorParams,
    /// Search-based, hence a one-sided estimate of the supremum it stands for.
    pub lower_estimate: f64,
    pub lower_estimate_kind: &'static str,
    pub capacity: f64,
    pub upper_witness_value: f64,
    /// Range the corresponding work quantity is known to lie in, k_BT.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_pair")]
    pub upper_bracket: Option<(f64, f64)>,
    pub error_terms: BTreeMap<String, Real>,
    pub quantities: BTreeMap<String, Real>,
    pub witnesses: Witnesses,
    pub verdict: Verdict,
}

fn opt_pair<S: serde::Serializer>(x: &Option<(f64, f64)>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(p) => real::serialize_pair(p, s),
        None => s.serialize_none(),
    }
}

fn le(a: f64, b: f64, what: &str) -> (bool, String) {
    (a <= b + VIOLATION_TOL, format!("{what}: {a} > {b}"))
}

fn upper_witness(ch: &StochasticChannel, cap: &CapacityResult, smoothing: f64, exec: Exec) -> Result<UpperWitness> {
    let cv = cap.codebook.classical_version(ch)?;
    let pi = cv.square()?;
    let m = pi.dim_in();
    let u = Distribution::uniform(m);
    let joint = pi.apply_local(&JointDistribution::maximally_correlated(m))?;
    let reference = JointDistribution::product(&pi.apply(&u)?, &u).flatten();
    let d0 = d0_smoothed_with(&joint.flatten(), &reference, smoothing, &D0Options { exec, allow_heuristic: true })?;
    Ok(UpperWitness { codebook: cap.codebook.clone(), gibbs_deviation: gibbs_deviation(&cv)?, smoothing, d0 })
}

struct Member {
    source: &'static str,
    inputs: Option<Vec<usize>>,
    /// Input joint `(x, m)` for the capacity family, `(m, m')` for the work family.
    input: JointDistribution,
    /// Codebook inputs for the work family's classical version.
    codebook: Option<Vec<usize>>,
}

/// Codebook members (first few combinations for each size) followed by seeded random ones.
fn family(dim_in: usize, budget: &SearchBudget, random: impl Fn(&mut ChaCha8Rng) -> Member) -> Vec<Member> {
    let mut out = Vec::new();
    for m in 1..=budget.max_messages.min(dim_in) {
        let count = binomial(dim_in, m).min(budget.codebooks_per_size as u128) as u64;
        for rank in 0..count {
            let inputs = unrank_combination(dim_in, m, rank);
            let mut rows = vec![vec![0.0; m]; dim_in];
            for (msg, &x) in inputs.iter().enumerate() {
                rows[x][msg] = 1.0 / m as f64;
            }
            let input = JointDistribution::new(rows).expect("normalised");
            out.push(Member { source: "codebook", inputs: Some(inputs.clone()), input, codebook: Some(inputs) });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    out.extend((0..budget.random_inputs).map(|_| random(&mut rng)));
    out
}

fn best(values: Vec<Result<f64>>) -> Result<(usize, f64)> {
    let mut top = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        if v > top.1 {
            top = (i, v);
        }
    }
    Ok(top)
}

fn lower_witness(members: Vec<Member>, idx: usize, value: f64) -> LowerWitness {
    let family_size = members.len();
    let m = members.into_iter().nth(idx).expect("nonempty family");
    let messages = m.input.dim_b();
    LowerWitness { source: m.source, messages, inputs: m.inputs, input: m.input, value, family_size }
}

/// Capacity sandwich in bits: the hypothesis-testing lower estimate minus
/// `log2 4ε/(ε-ω)²`, the exact one-shot capacity, and the smoothed Rényi-0 value of
/// the capacity codebook's own classical version.
pub fn capacity_sandwich(ch: &StochasticChannel, params: &ErrorParams, budget: &SearchBudget) -> Result<BoundReport> {
    let (eps, omega, delta) = params.for_capacity_sandwich()?;
    let exec = budget.exec();
    let terms = error_terms(params)?;
    let cap = one_shot_capacity(ch, eps, &budget.capacity)?;

    let dim_in = ch.dim_in();
    let max_m = budget.max_messages.max(1);
    let members = family(dim_in, budget, |rng| {
        let m = rng.random_range(1..=max_m);
        let p = sample::distribution(rng, m);
        let cols: Vec<Distribution> = (0..m).map(|_| sample::distribution(rng, dim_in)).collect();
        let probs = (0..dim_in).flat_map(|x| (0..m).map(|k| p.probs()[k] * cols[k].probs()[x]).collect::<Vec<_>>()).collect();
        let input = JointDistribution::from_flat(probs, dim_in, m).expect("normalised");
        Member { source: "random", inputs: None, input, codebook: None }
    });
    let values = par::map_range(exec, members.len(), |i| {
        let out = ch.apply_local(&members[i].input)?;
        Ok(dh_smoothed(&out.flatten(), &out.marginal_product(), omega)?.bits)
    });
    let (idx, raw) = best(values)?;
    let term = terms[CAPACITY_TERM].0;
    let lower = raw - term;

    let upper = upper_witness(ch, &cap, eps + delta, exec)?;
    let upper_value = upper.d0.bits;
    let checks = [
        le(lower, cap.bits, "lower estimate exceeds capacity"),
        le(cap.bits, upper_value, "capacity exceeds upper witness"),
        le(upper.gibbs_deviation, 2.0 * (eps + delta), "witness Gibbs deviation exceeds 2(eps+delta)"),
    ];
    let mut quantities = BTreeMap::new();
    quantities.insert("lower_hypothesis_bits".into(), Real(raw));
    quantities.insert("upper_d0_bits".into(), Real(upper_value));
    quantities.insert("witness_success_probability".into(), Real(cap.success_probability));
    Ok(BoundReport {
        check: "capacity",
        units: "bits",
        params: *params,
        lower_estimate: lower,
        lower_estimate_kind: "search",
        capacity: cap.bits,
        upper_witness_value: upper_value,
        upper_bracket: None,
        error_terms: terms,
        quantities,
        witnesses: Witnesses { capacity: cap, lower: Some(lower_witness(members, idx, raw)), upper },
        verdict: Verdict::from_checks(&checks),
    })
}

/// Work sandwich in k_BT: the best correlation-work surrogate `ln2·D0^ω` found over
/// codebooks and correlated inputs, minus `ln 4ε/((ε-ω)²(1-ω))`, against `ln2` times
/// the capacity and the surrogate of the capacity codebook at smoothing `ε+δ`.
pub fn work_sandwich(ch: &StochasticChannel, params: &ErrorParams, budget: &SearchBudget) -> Result<BoundReport> {
    let (eps, omega, delta) = params.for_work_sandwich()?;
    let exec = budget.exec();
    let terms = error_terms(params)?;
    let cap = one_shot_capacity(ch, eps, &budget.capacity)?;

    let dim_in = ch.dim_in();
    let max_m = budget.max_messages.clamp(1, dim_in);
    let members: Vec<Member> = family(dim_in, budget, |rng| {
        let m = rng.random_range(1..=max_m);
        let inputs = index::sample(rng, dim_in, m).into_vec();
        let input = sample::joint(rng, m, m);
        Member { source: "random", inputs: Some(inputs.clone()), input, codebook: Some(inputs) }
    })
    .into_iter()
    .map(|mut mem| {
        if mem.source == "codebook" {
            mem.input = JointDistribution::maximally_correlated(mem.input.dim_b());
        }
        mem
    })
    .collect();
    let opts = D0Options { exec: Exec::Sequential, allow_heuristic: true };
    let values = par::map_range(exec, members.len(), |i| {
        let mem = &members[i];
        let code = Codebook::with_ml_decoder(ch, mem.codebook.clone().expect("work family members carry a codebook"))?;
        let pi = code.classical_version(ch)?.square()?;
        let out = pi.apply_local(&mem.input)?;
        Ok(bits_to_kt(d0_smoothed_with(&out.flatten(), &out.marginal_product(), omega, &opts)?.bits))
    });
    let (idx, raw) = best(values)?;
    let lower = raw - terms[WORK_CAPACITY_TERM].0;

    let smoothing = eps + delta;
    let upper = upper_witness(ch, &cap, smoothing, exec)?;
    let upper_low = bits_to_kt(upper.d0.bits);
    let upper_high = upper_low - (1.0 - smoothing).ln();
    let capacity = bits_to_kt(cap.bits);
    let checks = [
        le(lower, capacity, "lower estimate exceeds ln2 * capacity"),
        le(capacity, upper_low, "ln2 * capacity exceeds upper witness"),
        (upper.gibbs_deviation < 2.0 * smoothing, format!("witness Gibbs deviation {} not below 2(eps+delta)", upper.gibbs_deviation)),
    ];
    let mut quantities = BTreeMap::new();
    quantities.insert("lower_surrogate_kt".into(), Real(raw));
    quantities.insert("lower_surrogate_high_kt".into(), Real(raw - (1.0 - omega).ln()));
    quantities.insert("capacity_bits".into(), Real(cap.bits));
    quantities.insert("upper_d0_bits".into(), Real(upper.d0.bits));
    Ok(BoundReport {
        check: "work",
        units: "kT",
        params: *params,
        lower_estimate: lower,
        lower_estimate_kind: "search",
        capacity,
        upper_witness_value: upper_low,
        upper_bracket: Some((upper_low, upper_high)),
        error_terms: terms,
        quantities,
        witnesses: Witnesses { capacity: cap, lower: Some(lower_witness(members, idx, raw)), upper },
        verdict: Verdict::from_checks(&checks),
    })
}

/// Equilibrium chain in bits: unconstrained capacity ≤ θ-equilibrium capacity ≤ the
/// correlation surrogate (smoothing `2ε`) of the θ-capacity codebook.
pub fn equilibrium_sandwich(ch: &StochasticChannel, eps: f64, theta: f64, budget: &SearchBudget) -> Result<BoundReport> {
    if !(eps > 0.0 && eps < THERMO_EPS_MAX / 2.0) {
        return Err(Error::ParameterDomain(format!("eps must lie in (0, {}), got {eps}", THERMO_EPS_MAX / 2.0)));
    }
    if !(eps <= theta && theta < 0.5) {
        return Err(Error::ParameterDomain(format!("need eps <= theta < 1/2, got theta={theta}")));
    }
    let params = ErrorParams::new(eps).with_theta(theta);
    let exec = budget.exec();
    let plain = one_shot_capacity(ch, eps, &budget.capacity)?;
    let equi = theta_equilibrium_capacity(ch, eps, theta, &budget.capacity)?;
    let upper = upper_witness(ch, &equi, 2.0 * eps, exec)?;
    let upper_bits = upper.d0.bits;
    let surrogate = bits_to_kt(upper_bits);
    let bracket = (surrogate, surrogate - (1.0 - 2.0 * eps).ln());
    let checks = [
        le(plain.bits, equi.bits, "capacity exceeds equilibrium capacity"),
        le(equi.bits, upper_bits, "equilibrium capacity exceeds correlation surrogate"),
        le(equi.gibbs_deviation, 2.0 * theta, "equilibrium codebook deviation exceeds 2 theta"),
    ];
    let mut terms = error_terms(&ErrorParams::new(2.0 * eps))?;
    terms.retain(|k, _| k == WORK_EXTRACTION_TERM || k == CONVERSE_TERM);
    let mut quantities = BTreeMap::new();
    quantities.insert("capacity_bits".into(), Real(plain.bits));
    quantities.insert("equilibrium_capacity_bits".into(), Real(equi.bits));
    quantities.insert("surrogate_kt".into(), Real(surrogate));
    quantities.insert("surrogate_bits".into(), Real(surrogate / LN2));
    Ok(BoundReport {
        check: "equilibrium",
        units: "bits",
        params,
        lower_estimate: plain.bits,
        lower_estimate_kind: "exact",
        capacity: equi.bits,
        upper_witness_value: upper_bits,
        upper_bracket: Some(bracket),
        error_terms: terms,
        quantities,
        witnesses: Witnesses { capacity: equi, lower: None, upper },
        verdict: Verdict::from_checks(&checks),
    })
}
