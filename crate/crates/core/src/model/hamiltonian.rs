use serde::{Deserialize, Serialize, Serializer};

use super::Distribution;
use crate::error::{Error, Result};

/// Energy levels in units of k_BT.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "Raw")]
pub struct Hamiltonian {
    levels: Vec<f64>,
}

#[derive(Deserialize, Serialize)]
struct Raw {
    levels: Vec<f64>,
    #[serde(default)]
    units: Option<String>,
}

impl TryFrom<Raw> for Hamiltonian {
    type Error = Error;
    fn try_from(raw: Raw) -> Result<Self> {
        if let Some(u) = raw.units.as_deref() {
            if u != "kT" {
                return Err(Error::ParameterDomain(format!("unsupported energy units {u:?}")));
            }
        }
        Hamiltonian::new(raw.levels)
    }
}

impl Serialize for Hamiltonian {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Raw { levels: self.levels.clone(), units: Some("kT".into()) }.serialize(s)
    }
}

impl Hamiltonian {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::ParameterDomain("Hamiltonian needs at least one level".into()));
        }
        if let Some(e) = levels.iter().find(|e| !e.is_finite()) {
            return Err(Error::ParameterDomain(format!("energy level {e} is not finite")));
        }
        Ok(Self { levels })
    }

    pub fn degenerate(dim: usize) -> Self {
        Self::new(vec![0.0; dim]).expect("finite levels")
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Thermal state `e^{-E_j} / Z`.
    pub fn gibbs(&self) -> Distribution {
        let min = self.levels.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = self.levels.iter().map(|e| (min - e).exp()).collect();
        let z: f64 = w.iter().sum();
        Distribution::from_raw_unchecked(w.into_iter().map(|x| x / z).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gibbs_examples() {
        assert_eq!(Hamiltonian::degenerate(4).gibbs(), Distribution::uniform(4));
        let g = Hamiltonian::new(vec![0.0, 2f64.ln()]).unwrap().gibbs();
        assert_abs_diff_eq!(g.probs()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.probs()[1], 1.0 / 3.0, epsilon = 1e-15);
        let p = [0.5, 0.3, 0.2];
        let g = Hamiltonian::new(p.iter().map(|x: &f64| -x.ln()).collect()).unwrap().gibbs();
        for (a, b) in g.probs().iter().zip(p) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Hamiltonian::new(vec![0.0, f64::INFINITY]).is_err());
        assert!(Hamiltonian::new(vec![]).is_err());
        assert!(serde_json::from_str::<Hamiltonian>(r#"{"levels":[0,1],"units":"eV"}"#).is_err());
        let h: Hamiltonian = serde_json::from_str(r#"{"levels":[0,1],"units":"kT"}"#).unwrap();
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"{"levels":[0.0,1.0],"units":"kT"}"#);
    }
}
