//! Seeded random streams.
//!
//! Every episode derives its randomness from a single 64-bit seed. ChaCha is a
//! counter-based generator, so each named purpose gets its own stream id under
//! the same key: the unit sequence for a seed does not depend on how many
//! draws the policy consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type used throughout the simulator.
pub type StreamRng = ChaCha8Rng;

/// Named sub-streams of an episode seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Population draws (compliance types and potential rewards).
    Units,
    /// Policy randomization (exploration coins, uniform pulls).
    Policy,
    /// Uniform fallback when the 2SLS estimator is unavailable.
    Fallback,
    /// Anything outside an episode: Monte-Carlo oracles, validation trials.
    Auxiliary,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Units => 1,
            Stream::Policy => 2,
            Stream::Fallback => 3,
            Stream::Auxiliary => 4,
        }
    }
}

/// Generator for `stream` under `seed`.
pub fn stream(seed: u64, which: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which.id());
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn draws(which: Stream) -> Vec<u64> {
        let mut rng = stream(9, which);
        (0..8).map(|_| rng.random()).collect()
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        assert_eq!(draws(Stream::Units), draws(Stream::Units));
        assert_ne!(draws(Stream::Units), draws(Stream::Policy));
        assert_ne!(draws(Stream::Policy), draws(Stream::Fallback));
    }
}
