use std::collections::BTreeMap;

use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::model::ErrorParams;
use crate::real::Real;

/// `log2 4ε/(ε-ω)²`, bits.
pub const CAPACITY_TERM: &str = "capacity_bits";
/// `ln 4ε/((ε-ω)²(1-ω))`, k_BT.
pub const WORK_CAPACITY_TERM: &str = "work_capacity_kt";
/// `ln 1/(1-ε)`, k_BT.
pub const WORK_EXTRACTION_TERM: &str = "work_extraction_kt";
/// `H_b(ε)/(1-ε)`, bits.
pub const CONVERSE_TERM: &str = "converse_bits";

/// All error terms computable from `params`; terms needing `omega` appear only when it is set.
pub fn error_terms(params: &ErrorParams) -> Result<BTreeMap<String, Real>> {
    let eps = params.eps;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::ParameterDomain(format!("eps must lie in (0,1), got {eps}")));
    }
    let mut out = BTreeMap::new();
    out.insert(WORK_EXTRACTION_TERM.to_string(), Real(-(1.0 - eps).ln()));
    out.insert(CONVERSE_TERM.to_string(), Real(binary_entropy(eps)? / (1.0 - eps)));
    if let Some(omega) = params.omega {
        if !(0.0..=eps).contains(&omega) {
            return Err(Error::ParameterDomain(format!("need 0 <= omega <= eps, got omega={omega}")));
        }
        let gap = (eps - omega).powi(2);
        let (bits, kt) = if gap == 0.0 {
            (f64::INFINITY, f64::INFINITY)
        } else {
            ((4.0 * eps / gap).log2(), (4.0 * eps / (gap * (1.0 - omega))).ln())
        };
        out.insert(CAPACITY_TERM.to_string(), Real(bits));
        out.insert(WORK_CAPACITY_TERM.to_string(), Real(kt));
    }
    Ok(out)
}
