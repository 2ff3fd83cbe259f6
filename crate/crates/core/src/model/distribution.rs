use serde::{Deserialize, Serialize};

use super::{check_entries, checked_pow};
use crate::error::{Error, Result};

/// A finite probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Raw")]
pub struct Distribution {
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct Raw {
    probs: Vec<f64>,
}

impl TryFrom<Raw> for Distribution {
    type Error = Error;
    fn try_from(raw: Raw) -> Result<Self> {
        Distribution::new(raw.probs)
    }
}

impl Distribution {
    /// Validates and renormalises.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidProbability("empty distribution".into()));
        }
        let sum = check_entries(&probs, "distribution")?;
        Ok(Self { probs: probs.into_iter().map(|p| p / sum).collect() })
    }

    /// Normalises arbitrary nonnegative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidProbability("weights must be nonnegative with positive sum".into()));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self { probs: vec![1.0 / dim as f64; dim] }
    }

    pub fn point_mass(dim: usize, index: usize) -> Self {
        assert!(index < dim, "index out of range");
        let mut probs = vec![0.0; dim];
        probs[index] = 1.0;
        Self { probs }
    }

    pub(crate) fn from_raw_unchecked(probs: Vec<f64>) -> Self {
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.probs[i] > 0.0).collect()
    }

    /// Smallest strictly positive entry.
    pub fn min_positive(&self) -> f64 {
        self.probs.iter().copied().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min)
    }

    /// Product law, first factor most significant.
    pub fn tensor(&self, other: &Distribution) -> Result<Distribution> {
        checked_pow(self.dim() * other.dim(), 1)?;
        let probs = self
            .probs
            .iter()
            .flat_map(|&a| other.probs.iter().map(move |&b| a * b))
            .collect();
        Ok(Self { probs })
    }

    pub fn tensor_power(&self, n: usize) -> Result<Distribution> {
        if n == 0 {
            return Err(Error::ParameterDomain("tensor power needs n >= 1".into()));
        }
        checked_pow(self.dim(), n)?;
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    pub fn require_dim(&self, other: &Distribution) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

/// Trace norm of the diagonal difference, in `[0, 2]`.
pub fn trace_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.require_dim(q)?;
    Ok(p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum())
}
