//! Reproducible random streams.
//!
//! A stream is addressed by `(seed, stream_id)` and backed by ChaCha8, whose
//! 64-bit stream selector gives each id its own keystream. A stream can be
//! split further into lanes, which start at widely separated word positions
//! of the same keystream, so one path can draw its subordinator and its
//! driver from independent sequences.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Generator handed out by [`RngStream`].
pub type StreamRng = ChaCha8Rng;

/// Lanes used by the path simulators.
pub const LANE_SUBORDINATOR: u8 = 0;
pub const LANE_DRIVER: u8 = 1;
pub const LANE_AUX: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Generator positioned at the start of lane 0.
    pub fn generator(&self) -> StreamRng {
        self.lane(0)
    }

    /// Generator positioned at the start of `lane`. Lanes are 2^60 words apart.
    pub fn lane(&self, lane: u8) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng.set_word_pos(u128::from(lane) << 60);
        rng
    }

    /// Stream for path `index` of an experiment with this seed.
    pub fn for_path(seed: u64, index: usize) -> Self {
        Self::new(seed, index as u64)
    }
}
