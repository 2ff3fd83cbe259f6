//! Relative entropies of commuting (diagonal) states, in bits.

mod hypothesis;
mod smoothed;

pub use hypothesis::{dh_smoothed, dh_tensor_binary, DhValue, FractionalTest};
pub use smoothed::{
    d0_branch_and_bound, d0_enumerate, d0_smoothed, d0_smoothed_with, D0Method, D0Options, D0Value, SubsetWitness,
};

use crate::error::{Error, Result};
use crate::model::Distribution;

/// Kullback-Leibler divergence `Σ p log2(p/q)`.
pub fn relative_entropy(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.require_dim(q)?;
    let mut s = 0.0;
    for (&a, &b) in p.probs().iter().zip(q.probs()) {
        if a > 0.0 {
            if b == 0.0 {
                return Err(Error::SupportViolation);
            }
            s += a * (a / b).log2();
        }
    }
    Ok(s.max(0.0))
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::ParameterDomain(format!("binary entropy argument {x}")));
    }
    let term = |t: f64| if t > 0.0 { -t * t.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// `log2 1/q(supp p)`.
pub fn d_min(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.require_dim(q)?;
    let mass: f64 = p.probs().iter().zip(q.probs()).filter(|(a, _)| **a > 0.0).map(|(_, b)| b).sum();
    if mass <= 0.0 {
        return Err(Error::InfiniteValue);
    }
    Ok(-mass.log2())
}

pub fn min_positive_eigenvalue(p: &Distribution) -> f64 {
    p.min_positive()
}

/// `-log2 x`, infinite at zero.
pub(crate) fn neg_log2(x: f64) -> f64 {
    if x <= 0.0 {
        f64::INFINITY
    } else {
        -x.log2()
    }
}
