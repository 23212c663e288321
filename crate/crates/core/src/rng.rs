//! Seeded randomness.
//!
//! Every random choice in the crate draws from [`SplitMix64`] (the 64-bit
//! generator of Steele, Lea and Flood as published with xoshiro). Its output
//! sequence is fixed by the seed alone, so covers and generated instances
//! reproduce bit-for-bit across platforms. Independent streams are derived
//! from a base seed with [`derive`], never by sharing one generator across
//! parallel work.

use rand::SeedableRng;
pub use rand_xoshiro::SplitMix64;

pub type Rng = SplitMix64;

pub fn from_seed(seed: u64) -> Rng {
    SplitMix64::seed_from_u64(seed)
}

/// Finalizer of SplitMix64, used to scramble derived seeds.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the stream named `label` under `seed`.
pub fn derive(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix(seed ^ mix(h))
}

/// Seed for item `index` of a stream, e.g. one individual of a generation.
pub fn derive_indexed(seed: u64, label: &str, index: u64) -> u64 {
    mix(derive(seed, label).wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// Uniform pick among streamed candidates with the maximal key, in one pass.
#[derive(Debug)]
pub struct ArgmaxReservoir<T> {
    best: Option<(u64, T)>,
    ties: u64,
}

impl<T> Default for ArgmaxReservoir<T> {
    fn default() -> Self {
        Self { best: None, ties: 0 }
    }
}

impl<T> ArgmaxReservoir<T> {
    pub fn offer(&mut self, key: u64, item: T, rng: &mut Rng) {
        use rand::Rng as _;
        match &self.best {
            Some((k, _)) if key < *k => {}
            Some((k, _)) if key == *k => {
                self.ties += 1;
                if rng.random_range(0..self.ties) == 0 {
                    self.best = Some((key, item));
                }
            }
            _ => {
                self.best = Some((key, item));
                self.ties = 1;
            }
        }
    }

    pub fn into_inner(self) -> Option<(u64, T)> {
        self.best
    }
}
