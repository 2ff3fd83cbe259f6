use serde::Serialize;

use super::neg_log2;
use crate::error::{Error, Result};
use crate::model::Distribution;

/// Diagonal test `0 <= t_j <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalTest {
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DhValue {
    #[serde(serialize_with = "crate::real::serialize")]
    pub bits: f64,
    /// Optimal `Σ t_j r_j`.
    pub cost: f64,
    pub test: FractionalTest,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::ParameterDomain(format!("eps must lie in (0,1), got {eps}")));
    }
    Ok(())
}

/// Hypothesis-testing relative entropy of diagonal states: `-log2 min Σ t r` subject to
/// `Σ t q >= 1 - eps`, solved as a fractional knapsack.
pub fn dh_smoothed(state: &Distribution, reference: &Distribution, eps: f64) -> Result<DhValue> {
    state.require_dim(reference)?;
    check_eps(eps)?;
    let (q, r) = (state.probs(), reference.probs());
    let mut weights = vec![0.0; q.len()];
    let mut order: Vec<usize> = Vec::with_capacity(q.len());
    for j in 0..q.len() {
        if q[j] > 0.0 {
            order.push(j);
        } else if r[j] == 0.0 {
            weights[j] = 1.0;
        }
    }
    order.sort_by(|&a, &b| (r[a] / q[a]).total_cmp(&(r[b] / q[b])).then(a.cmp(&b)));
    let mut need = 1.0 - eps;
    for &j in &order {
        if need <= 0.0 {
            break;
        }
        if q[j] <= need {
            weights[j] = 1.0;
            need -= q[j];
        } else {
            weights[j] = need / q[j];
            need = 0.0;
        }
    }
    let cost: f64 = weights.iter().zip(r).map(|(t, r)| t * r).sum();
    Ok(DhValue { bits: neg_log2(cost), cost, test: FractionalTest { weights } })
}

fn ln_mass(count: f64, p: f64) -> f64 {
    if count == 0.0 {
        0.0
    } else if p == 0.0 {
        f64::NEG_INFINITY
    } else {
        count * p.ln()
    }
}

/// `dh_smoothed` of the `n`-fold tensor powers of two binary laws, computed on the
/// `n + 1` type classes instead of the `2^n` outcomes.
pub fn dh_tensor_binary(state: &Distribution, reference: &Distribution, eps: f64, n: usize) -> Result<f64> {
    if state.dim() != 2 || reference.dim() != 2 {
        return Err(Error::DimensionMismatch("binary laws required".into()));
    }
    if n == 0 {
        return Err(Error::ParameterDomain("n must be positive".into()));
    }
    check_eps(eps)?;
    let (p, q) = (state.probs(), reference.probs());
    struct Class {
        k: usize,
        ln_p: f64,
        ln_q: f64,
    }
    let mut classes = Vec::with_capacity(n + 1);
    let mut ln_binom = 0.0;
    for k in 0..=n {
        if k > 0 {
            ln_binom += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let (ones, zeros) = (k as f64, (n - k) as f64);
        let ln_p = ln_binom + ln_mass(ones, p[1]) + ln_mass(zeros, p[0]);
        let ln_q = ln_binom + ln_mass(ones, q[1]) + ln_mass(zeros, q[0]);
        if ln_p > f64::NEG_INFINITY {
            classes.push(Class { k, ln_p, ln_q });
        }
    }
    classes.sort_by(|a, b| (a.ln_q - a.ln_p).total_cmp(&(b.ln_q - b.ln_p)).then(a.k.cmp(&b.k)));
    let mut need = 1.0 - eps;
    let mut terms = Vec::new();
    for c in &classes {
        if need <= 0.0 {
            break;
        }
        let mass = c.ln_p.exp();
        let t = if mass <= need { 1.0 } else { need / mass };
        need -= t * mass;
        if c.ln_q > f64::NEG_INFINITY {
            terms.push(t.ln() + c.ln_q);
        }
    }
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    let ln_cost = top + terms.iter().map(|x| (x - top).exp()).sum::<f64>().ln();
    Ok(-ln_cost / std::f64::consts::LN_2)
}
