use std::cmp::Ordering;

use serde::Serialize;

use super::neg_log2;
use crate::error::{Error, Result};
use crate::model::{Distribution, COMPARE_TOL};
use crate::par::{self, Exec};

/// Supports up to this size are solved by listing every subset.
pub const ENUMERATION_MAX_DIM: usize = 20;
/// Supports up to this size are solved exactly by branch and bound.
pub const EXACT_MAX_DIM: usize = 30;

/// Index set `Λ` with its masses under the state (`q`) and the reference (`r`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetWitness {
    pub indices: Vec<usize>,
    pub q_mass: f64,
    pub r_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum D0Method {
    Enumeration,
    BranchAndBound,
    /// Greedy feasible set (the reported value) with a relaxation-based upper end.
    Bracket {
        #[serde(serialize_with = "crate::real::serialize")]
        upper_bits: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct D0Value {
    #[serde(serialize_with = "crate::real::serialize")]
    pub bits: f64,
    pub witness: SubsetWitness,
    pub method: D0Method,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct D0Options {
    pub exec: Exec,
    /// Above the exact limit, return a labelled bracket instead of failing.
    pub allow_heuristic: bool,
}

/// Smoothed Rényi-0 relative entropy of diagonal states: the largest `-log2 r(Λ)` over
/// index sets with `q(Λ) > 1 - eps`.
pub fn d0_smoothed(state: &Distribution, reference: &Distribution, eps: f64) -> Result<D0Value> {
    d0_smoothed_with(state, reference, eps, &D0Options::default())
}

pub fn d0_smoothed_with(state: &Distribution, reference: &Distribution, eps: f64, opts: &D0Options) -> Result<D0Value> {
    let prob = Problem::new(state, reference, eps)?;
    let n = prob.q.len();
    if n <= ENUMERATION_MAX_DIM {
        prob.enumerate(opts.exec)
    } else if n <= EXACT_MAX_DIM {
        prob.branch_and_bound(opts.exec)
    } else if opts.allow_heuristic {
        prob.bracket()
    } else {
        Err(Error::DimensionTooLarge { dim: n, limit: EXACT_MAX_DIM })
    }
}

/// Exact value by listing all subsets of the support of `state`.
pub fn d0_enumerate(state: &Distribution, reference: &Distribution, eps: f64, exec: Exec) -> Result<D0Value> {
    let prob = Problem::new(state, reference, eps)?;
    if prob.q.len() > ENUMERATION_MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: prob.q.len(), limit: ENUMERATION_MAX_DIM });
    }
    prob.enumerate(exec)
}

/// Exact value by branch and bound with the fractional relaxation as bound.
pub fn d0_branch_and_bound(state: &Distribution, reference: &Distribution, eps: f64, exec: Exec) -> Result<D0Value> {
    let prob = Problem::new(state, reference, eps)?;
    if prob.q.len() > EXACT_MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: prob.q.len(), limit: EXACT_MAX_DIM });
    }
    prob.branch_and_bound(exec)
}

/// Outcomes outside the support of the state never add `q`-mass, so only the support is searched.
struct Problem {
    idx: Vec<usize>,
    q: Vec<f64>,
    r: Vec<f64>,
    threshold: f64,
}

#[derive(Debug, Clone, Copy)]
struct Cand {
    r: f64,
    q: f64,
    mask: u64,
}

impl Cand {
    const NONE: Cand = Cand { r: f64::INFINITY, q: 0.0, mask: u64::MAX };

    /// Total order: smaller reference mass, then fewer elements, then smaller mask.
    fn cmp(&self, other: &Cand) -> Ordering {
        self.r
            .total_cmp(&other.r)
            .then(self.mask.count_ones().cmp(&other.mask.count_ones()))
            .then(self.mask.cmp(&other.mask))
    }

    fn min(self, other: Cand) -> Cand {
        if other.cmp(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

impl Problem {
    fn new(state: &Distribution, reference: &Distribution, eps: f64) -> Result<Self> {
        state.require_dim(reference)?;
        if eps.is_nan() || eps >= 1.0 {
            return Err(Error::ParameterDomain(format!("eps must lie in (0,1), got {eps}")));
        }
        if eps < 0.0 {
            return Err(Error::NoFeasibleSubset);
        }
        let idx = state.support();
        let q = idx.iter().map(|&i| state.probs()[i]).collect();
        let r = idx.iter().map(|&i| reference.probs()[i]).collect();
        Ok(Self { idx, q, r, threshold: 1.0 - eps + COMPARE_TOL })
    }

    /// Masses summed in index order, so every solver sees identical floating-point values.
    fn sums(&self, mask: u64) -> (f64, f64) {
        let (mut q, mut r) = (0.0, 0.0);
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            q += self.q[i];
            r += self.r[i];
            m &= m - 1;
        }
        (q, r)
    }

    fn candidate(&self, mask: u64) -> Option<Cand> {
        let (q, r) = self.sums(mask);
        (q > self.threshold).then_some(Cand { r, q, mask })
    }

    fn finish(&self, best: Cand, method: D0Method) -> Result<D0Value> {
        if best.mask == u64::MAX {
            return Err(Error::NoFeasibleSubset);
        }
        let indices = (0..self.idx.len()).filter(|i| best.mask >> i & 1 == 1).map(|i| self.idx[i]).collect();
        Ok(D0Value {
            bits: neg_log2(best.r),
            witness: SubsetWitness { indices, q_mass: best.q, r_mass: best.r },
            method,
        })
    }

    fn enumerate(&self, exec: Exec) -> Result<D0Value> {
        let total = 1u64 << self.q.len();
        let best = par::map_chunks(exec, total, 1 << 14, |start, end| {
            (start..end).filter_map(|m| self.candidate(m)).fold(Cand::NONE, Cand::min)
        })
        .into_iter()
        .fold(Cand::NONE, Cand::min);
        self.finish(best, D0Method::Enumeration)
    }

    /// Positions sorted by `r/q` ascending, ties by index.
    fn ratio_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.q.len()).collect();
        order.sort_by(|&a, &b| (self.r[a] / self.q[a]).total_cmp(&(self.r[b] / self.q[b])).then(a.cmp(&b)));
        order
    }

    fn greedy_mask(&self, order: &[usize]) -> u64 {
        let mut mask = 0u64;
        for &i in order {
            mask |= 1 << i;
            if self.sums(mask).0 > self.threshold {
                break;
            }
        }
        mask
    }

    fn branch_and_bound(&self, exec: Exec) -> Result<D0Value> {
        let order = self.ratio_order();
        let n = order.len();
        let mut suffix_q = vec![0.0; n + 1];
        for k in (0..n).rev() {
            suffix_q[k] = suffix_q[k + 1] + self.q[order[k]];
        }
        let seed = self.candidate(self.greedy_mask(&order)).unwrap_or(Cand::NONE);
        let depth = n.min(4);
        let search = Search { prob: self, order: &order, suffix_q: &suffix_q };
        let best = par::map_range(exec, 1 << depth, |prefix| {
            let mut best = seed;
            search.dfs(0, 0, 0.0, 0.0, &mut best, prefix as u64, depth);
            best
        })
        .into_iter()
        .fold(seed, Cand::min);
        self.finish(best, D0Method::BranchAndBound)
    }

    fn bracket(&self) -> Result<D0Value> {
        let order = self.ratio_order();
        let best = self.candidate(self.greedy_mask(&order)).ok_or(Error::NoFeasibleSubset)?;
        let search = Search { prob: self, order: &order, suffix_q: &[] };
        let relaxed = search.relaxation(0, self.threshold);
        let mut v = self.finish(best, D0Method::Enumeration)?;
        v.method = D0Method::Bracket { upper_bits: neg_log2(relaxed) };
        Ok(v)
    }
}

struct Search<'a> {
    prob: &'a Problem,
    order: &'a [usize],
    suffix_q: &'a [f64],
}

impl Search<'_> {
    /// Fractional cover of `need` using items from position `pos` on.
    fn relaxation(&self, pos: usize, need: f64) -> f64 {
        let mut need = need;
        let mut cost = 0.0;
        for &i in &self.order[pos..] {
            if need <= 0.0 {
                return cost;
            }
            let (q, r) = (self.prob.q[i], self.prob.r[i]);
            if q <= need {
                cost += r;
                need -= q;
            } else {
                return cost + r * need / q;
            }
        }
        if need > 0.0 {
            f64::INFINITY
        } else {
            cost
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(&self, pos: usize, mask: u64, q_acc: f64, r_acc: f64, best: &mut Cand, prefix: u64, depth: usize) {
        let p = self.prob;
        if q_acc > p.threshold - 1e-9 {
            if let Some(c) = p.candidate(mask) {
                *best = best.min(c);
                return;
            }
        }
        if pos == self.order.len() || q_acc + self.suffix_q[pos] < p.threshold - 1e-9 {
            return;
        }
        if r_acc + self.relaxation(pos, p.threshold - q_acc) > best.r + COMPARE_TOL {
            return;
        }
        let i = self.order[pos];
        let forced = (pos < depth).then(|| prefix >> pos & 1 == 1);
        if forced != Some(false) {
            self.dfs(pos + 1, mask | 1 << i, q_acc + p.q[i], r_acc + p.r[i], best, prefix, depth);
        }
        if forced != Some(true) {
            self.dfs(pos + 1, mask, q_acc, r_acc, best, prefix, depth);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::model::sample;

    fn d(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn paper_examples() {
        for dim in [2, 4, 8] {
            let v = d0_smoothed(&Distribution::point_mass(dim, 0), &Distribution::uniform(dim), 0.1).unwrap();
            assert_abs_diff_eq!(v.bits, (dim as f64).log2(), epsilon = 1e-12);
            assert_eq!(v.witness.indices, vec![0]);
        }
        let v = d0_smoothed(&d(&[0.5, 0.3, 0.2]), &d(&[0.1, 0.2, 0.7]), 0.25).unwrap();
        assert_abs_diff_eq!(v.bits, (1.0f64 / 0.3).log2(), epsilon = 1e-12);
        assert_eq!(v.witness.indices, vec![0, 1]);
        assert_eq!(v.method, D0Method::Enumeration);
        let p = d(&[0.4, 0.35, 0.25]);
        assert_abs_diff_eq!(d0_smoothed(&p, &p, 0.2).unwrap().bits, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn boundary_mass_is_infeasible() {
        // q({0,1}) = 0.6 sits exactly on 1 - eps, which the strict inequality excludes.
        let v = d0_smoothed(&d(&[0.3, 0.3, 0.4]), &d(&[0.1, 0.1, 0.8]), 0.4).unwrap();
        assert_eq!(v.witness.indices, vec![0, 2]);
        assert_abs_diff_eq!(v.bits, -(0.9f64).log2(), epsilon = 1e-12);
    }

    #[test]
    fn zero_reference_mass_is_infinite() {
        let v = d0_smoothed(&d(&[0.95, 0.05]), &d(&[0.0, 1.0]), 0.1).unwrap();
        assert_eq!(v.bits, f64::INFINITY);
    }

    #[test]
    fn eps_domain() {
        let p = d(&[0.5, 0.5]);
        assert_eq!(d0_smoothed(&p, &p, -0.1), Err(Error::NoFeasibleSubset));
        assert!(matches!(d0_smoothed(&p, &p, 1.0), Err(Error::ParameterDomain(_))));
    }

    #[test]
    fn branch_and_bound_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let dim = rng.random_range(1..=12);
            let p = sample::sparse_distribution(&mut rng, dim, 0.2);
            let q = sample::sparse_distribution(&mut rng, dim, 0.2);
            let eps = rng.random_range(0.001..0.6);
            let a = d0_enumerate(&p, &q, eps, Exec::Parallel).unwrap();
            let b = d0_branch_and_bound(&p, &q, eps, Exec::Sequential).unwrap();
            assert_eq!(a.bits, b.bits);
            assert_eq!(a.witness, b.witness);
        }
    }

    #[test]
    fn large_supports() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = sample::distribution(&mut rng, 24);
        let q = sample::distribution(&mut rng, 24);
        let v = d0_smoothed(&p, &q, 0.3).unwrap();
        assert_eq!(v.method, D0Method::BranchAndBound);
        assert!(v.witness.q_mass > 0.7 - 1e-12);
        let big_p = sample::distribution(&mut rng, 40);
        let big_q = sample::distribution(&mut rng, 40);
        assert!(matches!(d0_smoothed(&big_p, &big_q, 0.2), Err(Error::DimensionTooLarge { .. })));
        let opts = D0Options { allow_heuristic: true, ..Default::default() };
        let v = d0_smoothed_with(&big_p, &big_q, 0.2, &opts).unwrap();
        match v.method {
            D0Method::Bracket { upper_bits } => assert!(upper_bits >= v.bits - 1e-12),
            other => panic!("expected bracket, got {other:?}"),
        }
    }

    #[test]
    fn exec_modes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = sample::distribution(&mut rng, 16);
        let q = sample::distribution(&mut rng, 16);
        let a = d0_enumerate(&p, &q, 0.2, Exec::Parallel).unwrap();
        let b = d0_enumerate(&p, &q, 0.2, Exec::Sequential).unwrap();
        assert_eq!(a, b);
    }
}
