use serde::Serialize;

use super::protocol::{extractable_work, ExtractableWork, Precision, WorkBudget};
use crate::error::{Error, Result};
use crate::model::{Hamiltonian, JointDistribution};

/// Local Hamiltonians whose Gibbs states are the marginals, on the marginals' supports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalHamiltonians {
    pub h_a: Hamiltonian,
    pub h_b: Hamiltonian,
    pub support_a: Vec<usize>,
    pub support_b: Vec<usize>,
    /// Whether zero-probability symbols were removed.
    pub restricted: bool,
}

/// `E_a = -ln p_A(a)`, `E_b = -ln p_B(b)`. Zero marginal entries are dropped when
/// `restrict` is set and rejected otherwise.
pub fn locally_thermal_hamiltonians(j: &JointDistribution, restrict: bool) -> Result<LocalHamiltonians> {
    let (ma, mb) = (j.marginal_a(), j.marginal_b());
    let zeros: Vec<usize> = ma
        .probs()
        .iter()
        .chain(mb.probs())
        .enumerate()
        .filter(|(_, p)| **p <= 0.0)
        .map(|(i, _)| i)
        .collect();
    if !zeros.is_empty() && !restrict {
        return Err(Error::ZeroMarginal(zeros));
    }
    let (support_a, support_b) = (ma.support(), mb.support());
    let levels = |p: &[f64], s: &[usize]| Hamiltonian::new(s.iter().map(|&i| -p[i].ln()).collect());
    Ok(LocalHamiltonians {
        h_a: levels(ma.probs(), &support_a)?,
        h_b: levels(mb.probs(), &support_b)?,
        restricted: !zeros.is_empty(),
        support_a,
        support_b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationWork {
    pub local: LocalHamiltonians,
    pub work: ExtractableWork,
}

/// Work extractable from the correlations of `j` under Hamiltonians that make both
/// marginals thermal.
pub fn work_from_correlation(j: &JointDistribution, eps: f64, precision: Precision, budget: &WorkBudget) -> Result<CorrelationWork> {
    let local = locally_thermal_hamiltonians(j, true)?;
    let restricted = j.restrict(&local.support_a, &local.support_b)?;
    let eta = restricted.flatten();
    let levels: Vec<f64> = local
        .h_a
        .levels()
        .iter()
        .flat_map(|a| local.h_b.levels().iter().map(move |b| a + b))
        .collect();
    let work = extractable_work(&eta, &Hamiltonian::new(levels)?, eps, precision, budget)?;
    Ok(CorrelationWork { local, work })
}
