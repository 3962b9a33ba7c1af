//! Seeded randomness.
//!
//! All draws go through ChaCha8 seeded from a 64-bit value, and integer
//! draws are taken over `u64` so results do not depend on pointer width.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// The generator driving one augmentation run.
pub fn master(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for the `ordinal`-th per-example transform.
pub fn stream(seed: u64, ordinal: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ordinal);
    rng
}

/// Uniform draw from `0..n`. `n` must be positive.
pub fn below<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    rng.gen_range(0..n as u64) as usize
}

/// Uniform draw from `0..n` excluding `skip`. `n` must be at least 2 when
/// `skip` is in range.
pub fn below_except<R: Rng + ?Sized>(rng: &mut R, n: usize, skip: Option<usize>) -> usize {
    match skip {
        Some(s) if s < n => {
            let r = below(rng, n - 1);
            if r >= s {
                r + 1
            } else {
                r
            }
        }
        _ => below(rng, n),
    }
}

/// Uniform random permutation of `0..n`; `perm[new] = old`.
pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = below(rng, i + 1);
        perm.swap(i, j);
    }
    perm
}
