//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and exits nonzero
//! when any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermocap::asymptotics::{constrained_holevo, regularized_capacity_series, shannon_capacity, HolevoBudget, SeriesOptions};
use thermocap::bounds::{capacity_sandwich, landauer_scenario, work_sandwich, ScenarioOptions, SearchBudget};
use thermocap::coding::{one_shot_capacity, search_capacity, SearchOptions};
use thermocap::entropy::{binary_entropy, d0_branch_and_bound, d0_enumerate, d0_smoothed, d_min, dh_smoothed, dh_tensor_binary, relative_entropy};
use thermocap::model::{sample, trace_distance, THERMO_EPS_MAX};
use thermocap::thermo::{extractable_work, work_from_correlation, Precision, WorkBudget};
use thermocap::{Distribution, ErrorParams, Exec, JointDistribution, StochasticChannel};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn same_bits(a: f64, b: f64, tol: f64) -> bool {
    (a.is_infinite() && b.is_infinite() && a.signum() == b.signum()) || (a - b).abs() <= tol
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut d0_bad, mut dh_bad) = (0, 0);
    for _ in 0..500 {
        let dim = rng.random_range(2..=8);
        let p = sample::sparse_distribution(&mut rng, dim, 0.3);
        let q = sample::sparse_distribution(&mut rng, dim, 0.2);
        let eps = 0.45 * (1.0 - rng.random::<f64>());
        let eps = if eps >= 0.45 { 0.449 } else { eps };
        let bb = d0_branch_and_bound(&p, &q, eps, Exec::Parallel);
        let en = d0_enumerate(&p, &q, eps, Exec::Sequential);
        let agree = match (&bb, &en) {
            (Ok(a), Ok(b)) => a.bits == b.bits && a.witness == b.witness,
            (Err(a), Err(b)) => a.to_string() == b.to_string(),
            _ => false,
        };
        d0_bad += usize::from(!agree);
        let dh = dh_smoothed(&p, &q, eps).expect("valid inputs").bits;
        dh_bad += usize::from(!same_bits(dh, common::dh_vertex_oracle(p.probs(), q.probs(), eps), 1e-9));
    }
    let took = start.elapsed();
    let pass = d0_bad == 0 && dh_bad == 0 && took < Duration::from_secs(30);
    outcome(pass, format!("500 pairs; D0 mismatches {d0_bad}, D_h mismatches {dh_bad}; {}", secs(took)))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = 1e-9;
    let mut violations = [0usize; 5];
    for _ in 0..200 {
        let dim = rng.random_range(2..=6);
        let p = sample::sparse_distribution(&mut rng, dim, 0.3);
        let q = sample::distribution(&mut rng, dim);
        // The error parameter must stay below 1, which matters only for point masses.
        let mu = p.min_positive().min(1.0 - 1e-9);

        // D_min relation, including the endpoint.
        let eps = mu * (1.0 - rng.random::<f64>());
        let dmin = d_min(&p, &q).unwrap();
        for e in [eps, mu] {
            if (d0_smoothed(&p, &q, e).unwrap().bits - dmin).abs() > tol {
                violations[0] += 1;
            }
        }

        // Perturbation of the error parameter.
        let (e1, e2) = (mu * (1.0 - rng.random::<f64>()), mu * (1.0 - rng.random::<f64>()));
        if (d0_smoothed(&p, &q, e1).unwrap().bits - d0_smoothed(&p, &q, e2).unwrap().bits).abs() > tol {
            violations[1] += 1;
        }

        // Data processing.
        let out = rng.random_range(2..=6);
        let l = sample::channel(&mut rng, dim, out);
        let (lp, lq) = (l.apply(&p).unwrap(), l.apply(&q).unwrap());
        let e = mu.min(lp.min_positive()) * (1.0 - rng.random::<f64>());
        if d0_smoothed(&lp, &lq, e).unwrap().bits > d0_smoothed(&p, &q, e).unwrap().bits + tol {
            violations[2] += 1;
        }

        // Smoothness under a trace-norm perturbation, and the equality regime.
        let eps = 0.5 * (1.0 - rng.random::<f64>()).min(0.999);
        let w = sample::distribution(&mut rng, dim);
        let t = 0.5 * eps * rng.random::<f64>();
        let mix = |a: &Distribution, t: f64| {
            Distribution::new(a.probs().iter().zip(w.probs()).map(|(x, y)| (1.0 - t) * x + t * y).collect()).unwrap()
        };
        let chi = mix(&p, t);
        let delta = trace_distance(&p, &chi).unwrap();
        if delta < eps && eps - delta > 0.0 {
            let lo = d0_smoothed(&p, &q, eps - delta).unwrap().bits;
            let mid = d0_smoothed(&chi, &q, eps).unwrap().bits;
            let hi = d0_smoothed(&p, &q, eps + delta).unwrap().bits;
            if lo > mid + tol || mid > hi + tol {
                violations[3] += 1;
            }
        }
        let small = (mu / 2.0).min(0.5) * (1.0 - rng.random::<f64>()) * 0.999;
        let chi = mix(&p, 0.5 * small * rng.random::<f64>());
        let delta = trace_distance(&p, &chi).unwrap();
        let base = d0_smoothed(&p, &q, small).unwrap().bits;
        let vals = [
            d0_smoothed(&p, &q, small - delta).unwrap().bits,
            d0_smoothed(&p, &q, small + delta).unwrap().bits,
            d0_smoothed(&chi, &q, small).unwrap().bits,
        ];
        if vals.iter().any(|v| (v - base).abs() > tol) {
            violations[3] += 1;
        }

        // Lipschitz continuity in the second argument.
        let q2 = sample::distribution(&mut rng, dim);
        let e = 1.0 - rng.random::<f64>();
        let e = if e >= 1.0 { 0.999 } else { e };
        let a = d0_smoothed(&p, &q, e).unwrap().bits;
        let b = d0_smoothed(&p, &q2, e).unwrap().bits;
        if ((-a).exp2() - (-b).exp2()).abs() > trace_distance(&q, &q2).unwrap() + tol {
            violations[4] += 1;
        }
    }
    let total: usize = violations.iter().sum();
    outcome(total == 0, format!("200 instances per fact; violations [dmin, perturbation, data-processing, smoothness, lipschitz] = {violations:?}"))
}

fn criterion_3() -> Outcome {
    let opts = SearchOptions::default();
    let mut notes = Vec::new();
    let mut pass = true;
    for d in 1..=8 {
        let bits = one_shot_capacity(&StochasticChannel::identity(d), 0.0, &opts).unwrap().bits;
        if bits != (d as f64).log2() {
            pass = false;
            notes.push(format!("identity({d}) gave {bits}"));
        }
    }
    let bsc = StochasticChannel::binary_symmetric(0.1).unwrap();
    for (eps, want) in [(0.05, 0.0), (0.15, 1.0)] {
        let got = one_shot_capacity(&bsc, eps, &opts).unwrap().bits;
        let oracle = common::brute_capacity(&bsc, eps);
        if got != want || oracle != want {
            pass = false;
            notes.push(format!("BSC(0.1) eps={eps}: search {got}, oracle {oracle}, expected {want}"));
        }
    }
    let worst = std::sync::Mutex::new((0usize, f64::NEG_INFINITY));
    let channels = [
        StochasticChannel::identity(4),
        bsc.clone(),
        StochasticChannel::binary_symmetric(0.25).unwrap(),
        StochasticChannel::symmetric(4, 0.9).unwrap(),
        sample::channel(&mut ChaCha8Rng::seed_from_u64(3), 3, 4),
    ];
    for ch in &channels {
        for eps in [0.0, 0.05, 0.15, 0.3, 0.45] {
            let _ = search_capacity(ch, eps, &opts, |c| {
                let mut w = worst.lock().unwrap();
                w.0 += 1;
                w.1 = w.1.max(c.deviation - 2.0 * eps);
                false
            });
        }
    }
    let (seen, excess) = *worst.lock().unwrap();
    if excess > 1e-9 {
        pass = false;
    }
    notes.push(format!("{seen} feasible codebooks checked, max(deviation - 2 eps) = {excess:.3e}"));
    outcome(pass, notes.join("; "))
}

fn fixtures() -> Vec<(&'static str, StochasticChannel)> {
    vec![
        ("identity2", StochasticChannel::identity(2)),
        ("identity4", StochasticChannel::identity(4)),
        ("bsc0.1", StochasticChannel::binary_symmetric(0.1).unwrap()),
        ("bsc0.25", StochasticChannel::binary_symmetric(0.25).unwrap()),
        ("constant4", StochasticChannel::constant(4, 4, 0)),
        ("random3x3", sample::channel(&mut ChaCha8Rng::seed_from_u64(4), 3, 3)),
    ]
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let budget = SearchBudget::default();
    let mut worst = f64::INFINITY;
    let mut bad = Vec::new();
    for (name, ch) in fixtures() {
        for (eps, omega, delta) in [(0.15, 0.075, 0.05), (0.3, 0.15, 0.1)] {
            let r = capacity_sandwich(&ch, &ErrorParams::new(eps).with_omega(omega).with_delta(delta), &budget).unwrap();
            let margin = (r.capacity - r.lower_estimate).min(r.upper_witness_value - r.capacity);
            worst = worst.min(margin);
            if margin < -1e-6 || !r.verdict.is_consistent() {
                bad.push(format!("{name}@{eps}"));
            }
        }
    }
    let took = start.elapsed();
    let pass = bad.is_empty() && took < Duration::from_secs(120);
    outcome(pass, format!("12 reports, smallest margin {worst:.4}, failures {bad:?}; {}", secs(took)))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let budget = |k| WorkBudget { k_steps: k, e_cut: 50.0, ..WorkBudget::default() };
    let (b400, b800) = (budget(400), budget(800));
    let (mut over, mut loose, mut grew) = (Vec::new(), Vec::new(), Vec::new());
    let mut max_slack: f64 = 0.0;
    let mut max_over: f64 = f64::NEG_INFINITY;
    let mut max_growth: f64 = 0.0;
    for i in 0..50 {
        let dim = rng.random_range(2..=5);
        let eta = sample::distribution(&mut rng, dim);
        let h = sample::hamiltonian(&mut rng, dim, 3.0);
        let eps = THERMO_EPS_MAX * (1.0 - rng.random::<f64>());
        let w = extractable_work(&eta, &h, eps, Precision::Tightest, &b400).unwrap();
        let w2 = extractable_work(&eta, &h, eps, Precision::Tightest, &b800).unwrap();
        let centre = LN_2 * d0_smoothed(&eta, &h.gibbs(), eps).unwrap().bits;
        let upper = centre - (1.0 - eps).ln();
        let slack = (centre - w.value).max(0.0);
        let slack2 = (centre - w2.value).max(0.0);
        max_slack = max_slack.max(slack);
        max_over = max_over.max(w.value - upper);
        max_growth = max_growth.max(slack2 - slack);
        if w.value > upper + 1e-6 {
            over.push(i);
        }
        if slack > 0.05 {
            loose.push(i);
        }
        if slack2 > slack + 1e-12 {
            grew.push(i);
        }
    }
    let pass = over.is_empty() && loose.is_empty() && grew.is_empty();
    outcome(
        pass,
        format!(
            "50 instances; max slack {max_slack:.4} kT; max excess over upper end {max_over:.4} kT; above upper end {over:?}; slack > 0.05 {loose:?}; slack grew at 2x steps {grew:?} (max growth {max_growth:.4} kT)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let budget = WorkBudget::default();
    let eps = 0.05;
    let phi = work_from_correlation(&JointDistribution::maximally_correlated(4), eps, Precision::Tightest, &budget).unwrap().work;
    let (lo, hi) = (2.0 * LN_2 - 0.1, 2.0 * LN_2 - (1.0f64 - eps).ln() + 1e-6);
    let mut pass = phi.value >= lo && phi.value <= hi;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cap = -(1.0f64 - eps).ln() + 1e-6;
    let (mut worst, mut worst_delta) = (f64::NEG_INFINITY, 0.0);
    for _ in 0..10 {
        let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let j = JointDistribution::product(&sample::distribution(&mut rng, da), &sample::distribution(&mut rng, db));
        let w = work_from_correlation(&j, eps, Precision::Tightest, &budget).unwrap().work;
        let v = w.value;
        if v > worst {
            (worst, worst_delta) = (v, w.delta);
        }
        pass &= v <= cap;
    }
    outcome(pass, format!("maximally correlated (M=4): {:.4} kT in [{lo:.4}, {hi:.4}]; 10 product states max {worst:.4} (window half-width {worst_delta:.4}) <= {cap:.4}", phi.value))
}

fn criterion_7() -> Outcome {
    let budget = SearchBudget::default();
    let params = ErrorParams::new(0.2).with_omega(0.1).with_delta(0.05);
    let mut bad = Vec::new();
    let mut identity_bracket = (f64::NAN, f64::NAN);
    for (name, ch) in fixtures() {
        let r = work_sandwich(&ch, &params, &budget).unwrap();
        if !r.verdict.is_consistent() {
            bad.push(name);
        }
        if name == "identity2" {
            identity_bracket = (r.lower_estimate, r.upper_witness_value);
            if !(r.lower_estimate <= LN_2 && LN_2 <= r.upper_witness_value) {
                bad.push("identity2 bracket");
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("6 fixtures, failures {bad:?}; identity2: {:.4} <= ln2 <= {:.4}", identity_bracket.0, identity_bracket.1),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let p = Distribution::new(vec![0.7, 0.3]).unwrap();
    let q = Distribution::uniform(2);
    let target = relative_entropy(&p, &q).unwrap();
    let dev = |n: usize| (dh_tensor_binary(&p, &q, 0.01, n).unwrap() / n as f64 - target).abs();
    let (d20, d200) = (dev(20), dev(200));
    let took = start.elapsed();
    let pass = d200 <= 0.05 && d200 < d20 && took < Duration::from_secs(5);
    outcome(pass, format!("relative entropy {target:.4}; deviation n=20 {d20:.4}, n=200 {d200:.4} (limit 0.05); {}", secs(took)))
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for p in [0.05, 0.1, 0.25] {
        let c = shannon_capacity(&StochasticChannel::binary_symmetric(p).unwrap(), 1e-9).unwrap().bits;
        let err = (c - (1.0 - binary_entropy(p).unwrap())).abs();
        pass &= err <= 1e-6;
        notes.push(format!("BSC({p}) error {err:.1e}"));
    }
    let bsc = StochasticChannel::binary_symmetric(0.1).unwrap();
    let s = regularized_capacity_series(&bsc, 0.1, 3, &SeriesOptions::default()).unwrap();
    let within = s.capacity.points.iter().zip(&s.envelope).all(|(p, e)| p.value <= e + 1e-12);
    pass &= within;
    let values: Vec<String> = s.capacity.points.iter().map(|p| format!("{:.3}", p.value)).collect();
    notes.push(format!("series {values:?} within envelope: {within}"));
    let chi = constrained_holevo(&bsc, 0.25, &HolevoBudget::default()).unwrap().bits;
    let floor = 1.0 - binary_entropy(0.1).unwrap() - 1e-6;
    pass &= chi >= floor;
    notes.push(format!("constrained estimate {chi:.6} >= {floor:.6}"));
    outcome(pass, notes.join("; "))
}

fn criterion_10() -> Outcome {
    let ch = StochasticChannel::identity(4);
    let opts = ScenarioOptions::default();
    let a = landauer_scenario(&ch, 0.01, 100_000, 0, &opts).unwrap();
    let b = landauer_scenario(&ch, 0.01, 100_000, 0, &opts).unwrap();
    let (ja, jb) = (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let target = 2.0 * LN_2;
    let within_sigma = (a.empirical_success - a.exact_success).abs() <= 3.0 * a.success_sigma;
    let work_ok = (a.work.value - target).abs() <= 0.1;
    outcome(
        within_sigma && work_ok && ja == jb,
        format!(
            "P_s {:.5} vs exact {:.5} (3 sigma {:.2e}); work {:.4} kT vs {target:.4}; identical JSON: {}",
            a.empirical_success,
            a.exact_success,
            3.0 * a.success_sigma,
            a.work.value,
            ja == jb
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("entropic oracle equivalence", criterion_1),
        ("smoothed-entropy property suite", criterion_2),
        ("one-shot capacity oracle", criterion_3),
        ("capacity sandwich", criterion_4),
        ("work extraction bracket", criterion_5),
        ("work from correlation", criterion_6),
        ("work/capacity chain", criterion_7),
        ("Stein convergence", criterion_8),
        ("Shannon capacity and envelopes", criterion_9),
        ("Landauer scenario", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        failed += usize::from(!o.pass);
        println!("[{}] criterion {} ({name}): {} [{}]", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail, secs(start.elapsed()));
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
