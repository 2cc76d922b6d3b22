use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Seeded generator for a run-level seed.
pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator keyed by a run seed and a stable string (building id, stream name).
/// Independent of iteration order, so per-building draws do not shift when other
/// buildings are added or removed.
pub(crate) fn keyed_rng(seed: u64, key: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(key.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Round-half-up of `rate * n`, clamped to `n`.
pub(crate) fn round_half_up(rate: f64, n: usize) -> usize {
    ((rate * n as f64 + 0.5).floor() as usize).min(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(round_half_up(0.3, 10), 3);
        assert_eq!(round_half_up(0.25, 10), 3);
        assert_eq!(round_half_up(0.5, 5), 3);
        assert_eq!(round_half_up(0.0, 7), 0);
        assert_eq!(round_half_up(1.0, 7), 7);
    }
}
