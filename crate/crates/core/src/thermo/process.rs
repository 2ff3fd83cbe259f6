use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Distribution, Hamiltonian, COMPARE_TOL};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessStep {
    /// Instantaneous change of the energy levels at fixed occupation.
    LevelTransformation { levels: Hamiltonian },
    /// Replace the state by the Gibbs state of the current levels, at no work cost.
    Thermalisation,
}

/// A sequence of steps that starts and ends at the same Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkProcess {
    initial: Hamiltonian,
    steps: Vec<ProcessStep>,
}

/// Work increments between two thermalisations: `end[n] - start[n]` with `n` drawn from
/// the initial state (first segment) or the Gibbs state of `start`.
#[derive(Debug, Clone)]
pub(crate) struct Segment {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub thermal: bool,
}

impl Segment {
    /// Distinct increments and their probabilities, sorted by value.
    pub fn atoms(&self, initial: &Distribution) -> Vec<(f64, f64)> {
        let occupation = if self.thermal {
            Hamiltonian::new(self.start.clone()).expect("finite levels").gibbs()
        } else {
            initial.clone()
        };
        let mut atoms: Vec<(f64, f64)> = occupation
            .probs()
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(n, &p)| (self.end[n] - self.start[n], p))
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        merged
    }
}

impl WorkProcess {
    pub fn new(initial: Hamiltonian, steps: Vec<ProcessStep>) -> Result<Self> {
        let d = initial.dim();
        let mut last = initial.levels();
        for s in &steps {
            if let ProcessStep::LevelTransformation { levels } = s {
                if levels.dim() != d {
                    return Err(Error::DimensionMismatch(format!("level transformation to dim {} on dim {d}", levels.dim())));
                }
                last = levels.levels();
            }
        }
        let closes = last
            .iter()
            .zip(initial.levels())
            .all(|(a, b)| (a - b).abs() <= COMPARE_TOL * b.abs().max(1.0));
        if !closes {
            return Err(Error::ParameterDomain("process must end at its initial Hamiltonian".into()));
        }
        Ok(Self { initial, steps })
    }

    pub fn initial(&self) -> &Hamiltonian {
        &self.initial
    }

    pub fn steps(&self) -> &[ProcessStep] {
        &self.steps
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    /// Independent segments with a nonzero increment somewhere.
    pub(crate) fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        let mut start = self.initial.levels().to_vec();
        let mut current = start.clone();
        let mut thermal = false;
        for s in &self.steps {
            match s {
                ProcessStep::LevelTransformation { levels } => current = levels.levels().to_vec(),
                ProcessStep::Thermalisation => {
                    if current != start {
                        out.push(Segment { start: start.clone(), end: current.clone(), thermal });
                    }
                    start = current.clone();
                    thermal = true;
                }
            }
        }
        if current != start {
            out.push(Segment { start, end: current, thermal });
        }
        out
    }
}
