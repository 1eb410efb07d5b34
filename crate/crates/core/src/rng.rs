//! Seeded, splittable random streams.
//!
//! Every sampling routine takes an explicit `seed`; independent sub-experiments
//! draw from distinct ChaCha streams of the same seed so results never depend
//! on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

/// Seed used when neither a flag nor `QTSVM_SEED` provides one.
pub const DEFAULT_SEED: u64 = 0x5eed_2020;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed; used to hand independent seeds to nested routines.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x632b_e59b_d9b4_e019);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Number of independent trials up to and including the first success.
pub fn attempts_until_success(success_probability: f64, seed: u64) -> u64 {
    if success_probability >= 1.0 {
        return 1;
    }
    let mut rng = stream(seed, 0);
    let failures = Geometric::new(success_probability)
        .expect("success probability in (0, 1)")
        .sample(&mut rng);
    failures.saturating_add(1)
}
