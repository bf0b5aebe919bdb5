//! Counter-based random stream derivation.
//!
//! A [`StreamKey`] is a 64-bit root seed plus a hashed label path. Any tuple
//! of labels (grid point, realization, row, step, ...) maps to its own
//! generator, so streams never depend on the order in which work is
//! scheduled.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// The generator behind every stream.
pub type Stream = Xoshiro256PlusPlus;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    seed: u64,
    state: u64,
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            state: mix64(seed ^ GOLDEN),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Extend the label path by one label.
    #[inline]
    pub fn child(&self, label: u64) -> Self {
        let tagged = mix64(label.wrapping_add(GOLDEN).wrapping_mul(0xD6E8_FEB8_6659_FD93));
        Self {
            seed: self.seed,
            state: mix64(self.state.rotate_left(23) ^ tagged).wrapping_add(GOLDEN),
        }
    }

    pub fn with(&self, labels: &[u64]) -> Self {
        labels.iter().fold(*self, |k, &l| k.child(l))
    }

    /// Labels as text, hashed (FNV-1a) to a single label.
    pub fn child_str(&self, label: &str) -> Self {
        let h = label
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
                (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
            });
        self.child(h)
    }

    pub fn stream(&self) -> Stream {
        let mut bytes = [0u8; 32];
        let mut s = self.state;
        for chunk in bytes.chunks_exact_mut(8) {
            s = s.wrapping_add(GOLDEN);
            chunk.copy_from_slice(&mix64(s).to_le_bytes());
        }
        Stream::from_seed(bytes)
    }

    /// A raw 64-bit value derived from the key (for seeding nested runs).
    pub fn value(&self) -> u64 {
        mix64(self.state ^ 0x5851_F42D_4C95_7F2D)
    }
}

/// Stream for `(seed, labels...)`; identical inputs give identical streams.
pub fn derive_stream(seed: u64, labels: &[u64]) -> Stream {
    StreamKey::new(seed).with(labels).stream()
}
