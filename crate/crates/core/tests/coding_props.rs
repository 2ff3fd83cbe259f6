mod common;

use proptest::prelude::*;
use rand::Rng;
use thermocap::coding::{gibbs_deviation, ml_decoder, one_shot_capacity, Codebook, SearchOptions};
use thermocap::model::sample;
use thermocap::StochasticChannel;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: proptest::test_runner::RngSeed::Fixed(37), ..ProptestConfig::default() }
}

/// Points of the probability simplex in `dim` coordinates with spacing `1/steps`.
fn simplex_grid(dim: usize, steps: usize) -> Vec<Vec<f64>> {
    if dim == 1 {
        return vec![vec![1.0]];
    }
    let mut out = Vec::new();
    for k in 0..=steps {
        for mut rest in simplex_grid(dim - 1, steps - k) {
            let scale = (steps - k) as f64 / steps as f64;
            rest.iter_mut().for_each(|r| *r *= scale);
            rest.insert(0, k as f64 / steps as f64);
            out.push(rest);
        }
    }
    out
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn codebook_disturbs_uniform_law_at_most_twice_its_error(seed in any::<u64>(), nx in 1usize..5, ny in 1usize..5, m in 1usize..5) {
        let mut rng = common::rng(seed);
        let ch = sample::channel(&mut rng, nx, ny);
        let inputs: Vec<usize> = (0..m).map(|_| rng.random_range(0..nx)).collect();
        let decoder: Vec<usize> = (0..ny).map(|_| rng.random_range(0..m)).collect();
        for code in [Codebook::new(&ch, inputs.clone(), decoder).unwrap(), Codebook::with_ml_decoder(&ch, inputs).unwrap()] {
            let err = 1.0 - code.success_probability(&ch);
            let dev = gibbs_deviation(&code.classical_version(&ch).unwrap()).unwrap();
            prop_assert!(dev <= 2.0 * err + 1e-12, "deviation {} error {}", dev, err);
        }
    }

    #[test]
    fn ml_decoder_is_optimal(seed in any::<u64>(), nx in 1usize..4, ny in 1usize..5, m in 1usize..4) {
        let mut rng = common::rng(seed);
        let ch = sample::channel(&mut rng, nx, ny);
        let inputs: Vec<usize> = (0..m).map(|_| rng.random_range(0..nx)).collect();
        let ml = Codebook::new(&ch, inputs.clone(), ml_decoder(&ch, &inputs).unwrap()).unwrap().success_probability(&ch);
        for d in 0..m.pow(ny as u32) {
            let decoder: Vec<usize> = (0..ny).map(|y| d / m.pow(y as u32) % m).collect();
            prop_assert!(Codebook::new(&ch, inputs.clone(), decoder).unwrap().success_probability(&ch) <= ml + 1e-12);
        }
    }

    #[test]
    fn capacity_grows_with_eps(seed in any::<u64>(), nx in 1usize..4, ny in 1usize..4, a in 0.0f64..0.99, b in 0.0f64..0.99) {
        let mut rng = common::rng(seed);
        let ch = sample::channel(&mut rng, nx, ny);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let opts = SearchOptions::default();
        let c_lo = one_shot_capacity(&ch, lo, &opts).unwrap().bits;
        let c_hi = one_shot_capacity(&ch, hi, &opts).unwrap().bits;
        prop_assert!(c_lo <= c_hi);
    }

    #[test]
    fn capacity_matches_exhaustive_search(seed in any::<u64>(), nx in 1usize..4, ny in 1usize..4, eps in 0.0f64..0.7) {
        let mut rng = common::rng(seed);
        let ch = sample::channel(&mut rng, nx, ny);
        let c = one_shot_capacity(&ch, eps, &SearchOptions::default()).unwrap();
        prop_assert!(c.exact);
        prop_assert_eq!(c.bits, common::brute_capacity(&ch, eps));
        prop_assert!(c.success_probability >= 1.0 - eps - 1e-12);
    }
}

proptest! {
    #![proptest_config(config(64))]

    /// Wrapping a channel between an `M`-input encoder and an `M`-output decoder leaves
    /// at most `M` distinguishable outputs, so `M'` messages succeed with probability at
    /// most `M/M'`.
    #[test]
    fn composition_caps_capacity(seed in any::<u64>(), m in 1usize..4, nx in 1usize..4, ny in 1usize..4, eps in 0.0f64..0.9) {
        let mut rng = common::rng(seed);
        let ch = sample::channel(&mut rng, nx, ny);
        let composed = sample::channel(&mut rng, m, nx).then(&ch).unwrap().then(&sample::channel(&mut rng, ny, m)).unwrap();
        let bits = one_shot_capacity(&composed, eps, &SearchOptions::default()).unwrap().bits;
        prop_assert!(bits <= (m as f64 / (1.0 - eps)).log2() + 1e-12);
        if eps < 1.0 / (m as f64 + 1.0) {
            prop_assert!(bits <= (m as f64).log2() + 1e-12);
        }
    }

    #[test]
    fn deterministic_encoders_suffice(seed in any::<u64>(), nx in 2usize..4, ny in 2usize..4) {
        let mut rng = common::rng(seed);
        let ch = sample::channel(&mut rng, nx, ny);
        let deterministic = common::brute_success(&ch, 2);
        let grid = simplex_grid(nx, 10);
        let image = |e: &[f64]| -> Vec<f64> { (0..ny).map(|y| (0..nx).map(|x| e[x] * ch.get(y, x)).sum()).collect() };
        let images: Vec<Vec<f64>> = grid.iter().map(|e| image(e)).collect();
        let mut best = 0.0f64;
        for a in &images {
            for b in &images {
                best = best.max(a.iter().zip(b).map(|(u, v)| u.max(*v)).sum::<f64>() / 2.0);
            }
        }
        prop_assert!(best <= deterministic + 1e-6, "stochastic {} deterministic {}", best, deterministic);
    }
}

#[test]
fn identity_channel_of_one_letter_sends_nothing() {
    let c = one_shot_capacity(&StochasticChannel::identity(1), 0.0, &SearchOptions::default()).unwrap();
    assert_eq!(c.bits, 0.0);
    assert_eq!(c.messages, 1);
}
