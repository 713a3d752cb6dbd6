//! Counter-based random streams.
//!
//! Every random quantity in the crate is addressed by `(seed, stream, slot)`.
//! A slot is a fixed block of [`WORDS_PER_SLOT`] 32-bit ChaCha output words, so
//! seeking to a slot and reading sequentially from it gives the same values
//! regardless of which thread or in which order the slots are visited.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// ChaCha words reserved for each slot (two `u64` draws).
pub const WORDS_PER_SLOT: u128 = 4;

/// Tag for streams that are not matrix draws, keeping them disjoint from
/// `draw_index` streams.
const AUX_STREAM_TAG: u64 = 1 << 63;

/// Keyed ChaCha8 generator that hands out positioned sub-streams.
#[derive(Clone, Debug)]
pub struct CounterRng {
    base: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Generator positioned at `slot` of matrix-draw stream `draw_index`.
    pub fn at(&self, draw_index: u64, slot: u64) -> ChaCha8Rng {
        debug_assert!(draw_index < AUX_STREAM_TAG);
        self.position(draw_index, slot)
    }

    /// Generator positioned at `slot` of an auxiliary experiment stream.
    pub fn aux(&self, stream: u64, slot: u64) -> ChaCha8Rng {
        self.position(AUX_STREAM_TAG | stream, slot)
    }

    fn position(&self, stream: u64, slot: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(stream);
        rng.set_word_pos(u128::from(slot) * WORDS_PER_SLOT);
        rng
    }
}

/// Uniform in `[0, 1)` with 53 random bits.
#[inline]
pub(crate) fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
