use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the error range for the work-extraction statements, `1 - 1/sqrt(2)`.
pub const THERMO_EPS_MAX: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorParams {
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

fn domain(msg: String) -> Error {
    Error::ParameterDomain(msg)
}

impl ErrorParams {
    pub fn new(eps: f64) -> Self {
        Self { eps, omega: None, delta: None, theta: None }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    fn omega_delta(&self) -> Result<(f64, f64)> {
        let omega = self.omega.ok_or_else(|| domain("omega is required".into()))?;
        let delta = self.delta.ok_or_else(|| domain("delta is required".into()))?;
        Ok((omega, delta))
    }

    /// `0 < delta <= omega < eps <= 1/2`; returns `(eps, omega, delta)`.
    pub fn for_capacity_sandwich(&self) -> Result<(f64, f64, f64)> {
        let (omega, delta) = self.omega_delta()?;
        if !(0.0 < delta && delta <= omega && omega < self.eps && self.eps <= 0.5) {
            return Err(domain(format!("need 0 < delta <= omega < eps <= 1/2, got eps={} omega={omega} delta={delta}", self.eps)));
        }
        Ok((self.eps, omega, delta))
    }

    /// `0 < eps <= 1 - 1/sqrt(2)`.
    pub fn for_work_extraction(&self) -> Result<f64> {
        check_thermo_eps(self.eps)?;
        Ok(self.eps)
    }

    /// `0 < delta <= omega < eps <= 1 - 1/sqrt(2)`.
    pub fn for_work_sandwich(&self) -> Result<(f64, f64, f64)> {
        let (omega, delta) = self.omega_delta()?;
        check_thermo_eps(self.eps)?;
        if !(0.0 < delta && delta <= omega && omega < self.eps) {
            return Err(domain(format!("need 0 < delta <= omega < eps, got eps={} omega={omega} delta={delta}", self.eps)));
        }
        Ok((self.eps, omega, delta))
    }
}

pub(crate) fn check_thermo_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= THERMO_EPS_MAX + 1e-15) {
        return Err(domain(format!("need 0 < eps <= 1 - 1/sqrt(2), got {eps}")));
    }
    Ok(())
}
