//! Seed derivation.
//!
//! Every random stream in the crate is seeded from a 64-bit value derived here.
//! `derive(master, code)` is a bijection in `code` for a fixed master (two
//! rounds of the SplitMix64 finalizer, each a permutation of `u64`), so
//! distinct codes can never yield the same seed. Codes are laid out as
//!
//! ```text
//! bits 62..63  domain   (0 = landscape, 1 = search run)
//! bits 32..61  landscape attempt (landscape domain) or landscape index (run domain)
//! bits  0..31  landscape index   (landscape domain) or run index       (run domain)
//! ```
//!
//! Landscapes are drawn with `ChaCha20Rng` and search runs with
//! `Xoshiro256PlusPlus`, both seeded through `SeedableRng::seed_from_u64`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_xoshiro::Xoshiro256PlusPlus;

const DOMAIN_LANDSCAPE: u64 = 0;
const DOMAIN_RUN: u64 = 1 << 62;
const MAX_INDEX: u64 = (1 << 30) - 1;

/// Substream selectors inside a single run.
const STREAM_INIT: u64 = 0;
const STREAM_DYNAMICS: u64 = 1;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, code: u64) -> u64 {
    mix64(mix64(master) ^ code)
}

/// Seed of landscape `index` in an ensemble; `attempt` advances when a draw is
/// rejected as degenerate.
pub fn landscape_seed(master: u64, index: u32, attempt: u32) -> u64 {
    assert!(u64::from(attempt) <= MAX_INDEX, "attempt index too large");
    derive(
        master,
        DOMAIN_LANDSCAPE | (u64::from(attempt) << 32) | u64::from(index),
    )
}

/// Seed of run `run` on landscape `landscape` in an ensemble.
pub fn run_seed(master: u64, landscape: u32, run: u32) -> u64 {
    assert!(
        u64::from(landscape) <= MAX_INDEX,
        "landscape index too large"
    );
    derive(
        master,
        DOMAIN_RUN | (u64::from(landscape) << 32) | u64::from(run),
    )
}

pub fn landscape_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent (initialization, dynamics) generators for one run.
pub fn run_rngs(run_seed: u64) -> (Xoshiro256PlusPlus, Xoshiro256PlusPlus) {
    (
        Xoshiro256PlusPlus::seed_from_u64(derive(run_seed, STREAM_INIT)),
        Xoshiro256PlusPlus::seed_from_u64(derive(run_seed, STREAM_DYNAMICS)),
    )
}

/// Uniform draw in `[0, 1)` with 53 bits of precision, `(u >> 11) * 2^-53`.
#[inline]
pub fn unit_f64<R: rand::RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Integer threshold `t` with `unit_f64 < p` exactly when the underlying
/// 53-bit draw is below `t`.
#[inline]
pub fn coin_threshold(p: f64) -> u64 {
    (p * (1u64 << 53) as f64).ceil() as u64
}

/// Bernoulli draw consuming one `u64`, equal to `unit_f64(rng) < p` for
/// `threshold = coin_threshold(p)`.
#[inline]
pub fn coin<R: rand::RngCore + ?Sized>(rng: &mut R, threshold: u64) -> bool {
    (rng.next_u64() >> 11) < threshold
}

/// Uniform integer in `[0, range)` from `u32` draws (Lemire's multiply with
/// rejection). `range` must be nonzero.
#[inline]
pub fn below<R: rand::RngCore + ?Sized>(rng: &mut R, range: u32) -> u32 {
    debug_assert!(range > 0);
    let mut m = u64::from(rng.next_u32()) * u64::from(range);
    if (m as u32) < range {
        let floor = range.wrapping_neg() % range;
        while (m as u32) < floor {
            m = u64::from(rng.next_u32()) * u64::from(range);
        }
    }
    (m >> 32) as u32
}
