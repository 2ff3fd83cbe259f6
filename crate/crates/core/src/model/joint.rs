use serde::{Deserialize, Serialize, Serializer};

use super::{check_entries, Distribution};
use crate::error::{Error, Result};

/// Joint law over `(a, b)`, stored a-major.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "Raw")]
pub struct JointDistribution {
    probs: Vec<f64>,
    dim_a: usize,
    dim_b: usize,
}

#[derive(Deserialize, Serialize)]
struct Raw {
    probs: Vec<Vec<f64>>,
}

impl TryFrom<Raw> for JointDistribution {
    type Error = Error;
    fn try_from(raw: Raw) -> Result<Self> {
        JointDistribution::new(raw.probs)
    }
}

impl Serialize for JointDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Raw { probs: self.rows() }.serialize(s)
    }
}

impl JointDistribution {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim_a = rows.len();
        let dim_b = rows.first().map_or(0, Vec::len);
        if dim_a == 0 || dim_b == 0 || rows.iter().any(|r| r.len() != dim_b) {
            return Err(Error::InvalidProbability("joint matrix must be a nonempty rectangle".into()));
        }
        Self::from_flat(rows.concat(), dim_a, dim_b)
    }

    pub fn from_flat(probs: Vec<f64>, dim_a: usize, dim_b: usize) -> Result<Self> {
        if probs.len() != dim_a * dim_b || probs.is_empty() {
            return Err(Error::DimensionMismatch("joint size".into()));
        }
        let sum = check_entries(&probs, "joint distribution")?;
        Ok(Self { probs: probs.into_iter().map(|p| p / sum).collect(), dim_a, dim_b })
    }

    pub fn product(a: &Distribution, b: &Distribution) -> Self {
        let probs = a.probs().iter().flat_map(|&x| b.probs().iter().map(move |&y| x * y)).collect();
        Self { probs, dim_a: a.dim(), dim_b: b.dim() }
    }

    /// Uniform perfectly correlated law on `m` symbols.
    pub fn maximally_correlated(m: usize) -> Self {
        assert!(m >= 1, "m must be positive");
        let mut probs = vec![0.0; m * m];
        for i in 0..m {
            probs[i * m + i] = 1.0 / m as f64;
        }
        Self { probs, dim_a: m, dim_b: m }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.dim_b + b]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.probs.chunks(self.dim_b).map(<[f64]>::to_vec).collect()
    }

    pub fn marginal_a(&self) -> Distribution {
        let p = self.probs.chunks(self.dim_b).map(|r| r.iter().sum()).collect();
        Distribution::from_raw_unchecked(p)
    }

    pub fn marginal_b(&self) -> Distribution {
        let mut p = vec![0.0; self.dim_b];
        for row in self.probs.chunks(self.dim_b) {
            for (acc, v) in p.iter_mut().zip(row) {
                *acc += v;
            }
        }
        Distribution::from_raw_unchecked(p)
    }

    /// Flattened law over the product index set, `a * dim_b + b`.
    pub fn flatten(&self) -> Distribution {
        Distribution::from_raw_unchecked(self.probs.clone())
    }

    /// Product of the two marginals, flattened in the same order.
    pub fn marginal_product(&self) -> Distribution {
        JointDistribution::product(&self.marginal_a(), &self.marginal_b()).flatten()
    }

    /// Restriction to the given row and column index sets; mass outside must be zero.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<JointDistribution> {
        let probs = rows.iter().flat_map(|&a| cols.iter().map(move |&b| self.get(a, b))).collect();
        Self::from_flat(probs, rows.len(), cols.len())
    }
}
