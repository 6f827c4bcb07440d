use rand::{Rng, SeedableRng};
use rand_distr::{Binomial, Distribution};
use rand_xoshiro::SplitMix64;

pub type TrialRng = SplitMix64;

/// Independent stream for one trial: the SplitMix64 output of (seed, index),
/// so results do not depend on how trials are scheduled.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    let mut mixer = SplitMix64::seed_from_u64(seed);
    let base: u64 = mixer.random();
    SplitMix64::seed_from_u64(base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Multinomial counts by sequential binomials. Probabilities are clipped at
/// zero and renormalised.
pub fn sample_counts<R: Rng>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let clipped: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    let mut rest: f64 = clipped.iter().sum();
    let mut left = shots;
    let mut out = vec![0; probs.len()];
    for (k, &p) in clipped.iter().enumerate() {
        if left == 0 || rest <= 0.0 {
            break;
        }
        let q = (p / rest).clamp(0.0, 1.0);
        let n = if k + 1 == clipped.len() { left } else { Binomial::new(left, q).expect("q in [0, 1]").sample(rng) };
        out[k] = n;
        left -= n;
        rest -= p;
    }
    out
}
