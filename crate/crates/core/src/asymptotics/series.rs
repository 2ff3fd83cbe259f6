use std::fmt::Write;

use serde::Serialize;

use crate::entropy::{dh_tensor_binary, relative_entropy};
use crate::error::{Error, Result};
use crate::model::Distribution;
use crate::par::{self, Exec};
use crate::real;

/// Largest block length accepted by [`stein_series`].
pub const STEIN_MAX_N: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub n: usize,
    #[serde(serialize_with = "real::serialize")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSeries {
    pub points: Vec<SeriesPoint>,
    pub target: f64,
    pub target_label: String,
}

impl ConvergenceSeries {
    pub fn new(points: Vec<SeriesPoint>, target: f64, target_label: impl Into<String>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].n >= w[1].n) {
            return Err(Error::ParameterDomain("series points must have increasing n".into()));
        }
        Ok(Self { points, target, target_label: target_label.into() })
    }

    pub fn last(&self) -> Option<&SeriesPoint> {
        self.points.last()
    }

    pub fn value_at(&self, n: usize) -> Option<f64> {
        self.points.iter().find(|p| p.n == n).map(|p| p.value)
    }

    /// Rows `n,value,target` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,target\n");
        for p in &self.points {
            writeln!(out, "{},{},{}", p.n, p.value, self.target).expect("writing to a String");
        }
        out
    }
}

/// `1, 2, 5, 10, 20, 50, ...` up to `n_max`, with `n_max` itself appended.
pub fn log_grid(n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 1usize;
    'outer: loop {
        for f in [1, 2, 5] {
            let n = decade * f;
            if n >= n_max {
                break 'outer;
            }
            out.push(n);
        }
        decade *= 10;
    }
    out.push(n_max.max(1));
    out
}

/// `(1/n) D_h^eps(p^n ‖ q^n)` on [`log_grid`], targeting `D(p‖q)`.
pub fn stein_series(p: &Distribution, q: &Distribution, eps: f64, n_max: usize, exec: Exec) -> Result<ConvergenceSeries> {
    if n_max == 0 || n_max > STEIN_MAX_N {
        return Err(Error::ParameterDomain(format!("n_max must lie in 1..={STEIN_MAX_N}, got {n_max}")));
    }
    let target = relative_entropy(p, q)?;
    let grid = log_grid(n_max);
    let values = par::map_range(exec, grid.len(), |i| dh_tensor_binary(p, q, eps, grid[i]).map(|v| v / grid[i] as f64));
    let points = grid.iter().zip(values).map(|(&n, v)| Ok(SeriesPoint { n, value: v? })).collect::<Result<_>>()?;
    ConvergenceSeries::new(points, target, "relative entropy")
}
