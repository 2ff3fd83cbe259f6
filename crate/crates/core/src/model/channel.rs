use serde::{Deserialize, Serialize, Serializer};

use super::{checked_pow, Distribution, JointDistribution, CONSTRUCTION_TOL};
use crate::error::{Error, Result};

/// Column-stochastic matrix `t[y][x] = P(y | x)`, stored row-major.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "Raw")]
pub struct StochasticChannel {
    t: Vec<f64>,
    dim_in: usize,
    dim_out: usize,
}

#[derive(Deserialize, Serialize)]
struct Raw {
    matrix: Vec<Vec<f64>>,
    #[serde(default)]
    dim_in: Option<usize>,
    #[serde(default)]
    dim_out: Option<usize>,
}

impl TryFrom<Raw> for StochasticChannel {
    type Error = Error;
    fn try_from(raw: Raw) -> Result<Self> {
        let ch = StochasticChannel::new(raw.matrix)?;
        if raw.dim_in.is_some_and(|d| d != ch.dim_in) || raw.dim_out.is_some_and(|d| d != ch.dim_out) {
            return Err(Error::DimensionMismatch("declared dim_in/dim_out disagree with matrix".into()));
        }
        Ok(ch)
    }
}

impl Serialize for StochasticChannel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Raw { matrix: self.rows(), dim_in: Some(self.dim_in), dim_out: Some(self.dim_out) }.serialize(s)
    }
}

impl StochasticChannel {
    /// `rows[y][x]`; every column must sum to one.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim_out = rows.len();
        let dim_in = rows.first().map_or(0, Vec::len);
        if dim_out == 0 || dim_in == 0 || rows.iter().any(|r| r.len() != dim_in) {
            return Err(Error::InvalidProbability("channel matrix must be a nonempty rectangle".into()));
        }
        Self::from_flat(rows.concat(), dim_in, dim_out)
    }

    pub fn from_flat(mut t: Vec<f64>, dim_in: usize, dim_out: usize) -> Result<Self> {
        if t.len() != dim_in * dim_out || dim_in == 0 {
            return Err(Error::DimensionMismatch("matrix size".into()));
        }
        for x in 0..dim_in {
            let mut sum = 0.0;
            for y in 0..dim_out {
                let v = t[y * dim_in + x];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidProbability(format!("channel entry ({y},{x}) is {v}")));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > CONSTRUCTION_TOL {
                return Err(Error::InvalidProbability(format!("column {x} sums to {sum}")));
            }
            for y in 0..dim_out {
                t[y * dim_in + x] /= sum;
            }
        }
        Ok(Self { t, dim_in, dim_out })
    }

    pub fn from_fn(dim_in: usize, dim_out: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let t = (0..dim_out).flat_map(|y| (0..dim_in).map(move |x| (y, x))).map(|(y, x)| f(y, x)).collect();
        Self::from_flat(t, dim_in, dim_out)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |y, x| if x == y { 1.0 } else { 0.0 }).expect("identity is stochastic")
    }

    /// Every input goes to output `target`.
    pub fn constant(dim_in: usize, dim_out: usize, target: usize) -> Self {
        assert!(target < dim_out);
        Self::from_fn(dim_in, dim_out, |y, _| if y == target { 1.0 } else { 0.0 }).expect("constant is stochastic")
    }

    pub fn binary_symmetric(flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip) {
            return Err(Error::ParameterDomain(format!("flip probability {flip}")));
        }
        Self::new(vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]])
    }

    /// Keeps the symbol with probability `fidelity`, otherwise moves uniformly to another.
    pub fn symmetric(dim: usize, fidelity: f64) -> Result<Self> {
        if dim < 2 || !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::ParameterDomain("symmetric channel needs dim >= 2 and fidelity in [0,1]".into()));
        }
        let off = (1.0 - fidelity) / (dim - 1) as f64;
        Self::from_fn(dim, dim, |y, x| if x == y { fidelity } else { off })
    }

    /// Deterministic map `x -> f[x]`.
    pub fn deterministic(map: &[usize], dim_out: usize) -> Result<Self> {
        if map.iter().any(|&y| y >= dim_out) {
            return Err(Error::DimensionMismatch("deterministic map target out of range".into()));
        }
        Self::from_fn(map.len(), dim_out, |y, x| if map[x] == y { 1.0 } else { 0.0 })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.t[y * self.dim_in + x]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.t.chunks(self.dim_in).map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, x: usize) -> Vec<f64> {
        (0..self.dim_out).map(|y| self.get(y, x)).collect()
    }

    pub fn apply(&self, p: &Distribution) -> Result<Distribution> {
        if p.dim() != self.dim_in {
            return Err(Error::DimensionMismatch(format!("channel input {} vs distribution {}", self.dim_in, p.dim())));
        }
        let out = (0..self.dim_out)
            .map(|y| (0..self.dim_in).map(|x| self.get(y, x) * p.probs()[x]).sum())
            .collect();
        Distribution::new(out)
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &StochasticChannel) -> Result<StochasticChannel> {
        if outer.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch(format!("compose {} -> {} with {} -> {}", self.dim_in, self.dim_out, outer.dim_in, outer.dim_out)));
        }
        Self::from_fn(self.dim_in, outer.dim_out, |z, x| (0..self.dim_out).map(|y| outer.get(z, y) * self.get(y, x)).sum())
    }

    /// Pushes the first subsystem of `j` through the channel.
    pub fn apply_local(&self, j: &JointDistribution) -> Result<JointDistribution> {
        if j.dim_a() != self.dim_in {
            return Err(Error::DimensionMismatch(format!("channel input {} vs joint dimA {}", self.dim_in, j.dim_a())));
        }
        let db = j.dim_b();
        let mut out = vec![0.0; self.dim_out * db];
        for y in 0..self.dim_out {
            for x in 0..self.dim_in {
                let t = self.get(y, x);
                if t == 0.0 {
                    continue;
                }
                for b in 0..db {
                    out[y * db + b] += t * j.get(x, b);
                }
            }
        }
        JointDistribution::from_flat(out, self.dim_out, db)
    }

    pub fn tensor(&self, other: &StochasticChannel) -> Result<StochasticChannel> {
        checked_pow(self.dim_in * other.dim_in, 1)?;
        checked_pow(self.dim_out * other.dim_out, 1)?;
        let (ai, bi) = (self.dim_in, other.dim_in);
        let (bo,) = (other.dim_out,);
        Self::from_fn(ai * bi, self.dim_out * bo, |y, x| self.get(y / bo, x / bi) * other.get(y % bo, x % bi))
    }

    pub fn tensor_power(&self, n: usize) -> Result<StochasticChannel> {
        if n == 0 {
            return Err(Error::ParameterDomain("tensor power needs n >= 1".into()));
        }
        checked_pow(self.dim_in, n)?;
        checked_pow(self.dim_out, n)?;
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }
}
