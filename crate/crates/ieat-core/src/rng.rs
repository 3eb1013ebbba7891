//! Counter-based randomness.
//!
//! Every random draw is keyed by `(seed, counter)`: the ChaCha key comes from
//! the seed and the stream id is the counter, so a draw never depends on how
//! many draws were made before it or on which worker made it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct CounterRng {
    keyed: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            keyed: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent generator for draw number `counter`.
    pub fn stream(&self, counter: u64) -> ChaCha8Rng {
        let mut rng = self.keyed.clone();
        rng.set_stream(counter);
        rng.set_word_pos(0);
        rng
    }
}

/// SplitMix64 finalizer over `seed ^ salt`; used to derive sub-seeds.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Moves a uniformly random `k`-subset of `items` to its front (partial
/// Fisher-Yates). Index draws use `u32` so results do not depend on the
/// platform word size.
pub fn partial_shuffle<T, R: Rng>(rng: &mut R, items: &mut [T], k: usize) {
    let len = items.len();
    assert!(len <= u32::MAX as usize);
    for i in 0..k.min(len) {
        let j = rng.random_range(i as u32..len as u32) as usize;
        items.swap(i, j);
    }
}

/// Full Fisher-Yates shuffle.
pub fn shuffle<T, R: Rng>(rng: &mut R, items: &mut [T]) {
    let len = items.len();
    partial_shuffle(rng, items, len.saturating_sub(1));
}
