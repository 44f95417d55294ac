//! Seeded generator whose full position can be saved and restored.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrainRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TrainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Everything needed to resume a [`TrainRng`] bit-exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState {
    pub seed: [u8; 32],
    pub stream: u64,
    pub word_pos: u128,
}

impl RngState {
    pub fn capture(rng: &TrainRng) -> Self {
        Self {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos(),
        }
    }

    pub fn restore(&self) -> TrainRng {
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos);
        rng
    }
}
