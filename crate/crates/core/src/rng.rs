//! Counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream keyed by
//! `(seed, namespace)` and selected by an index, so item `k` of any sequence
//! can be regenerated on its own and parallel generation never depends on
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Namespace for embedding parameters.
pub const NS_PARAMS: u64 = 1;
/// Namespace for Monte-Carlo slicing directions.
pub const NS_SLICES: u64 = 2;
/// Namespace for synthetic test data drawn by the validation harness.
pub const NS_DATA: u64 = 3;

/// Independent stream number `index` under `(seed, namespace)`.
pub fn stream(seed: u64, namespace: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&namespace.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// FNV-1a of a label, used to derive per-check namespaces.
pub fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Uniform direction on the unit sphere in `dim` dimensions (normalized Gaussian).
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return g.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Inverse CDF of the frequency law with density `(1+ξ)^-2` on `[0, ∞)`.
///
/// The CDF is `ξ/(1+ξ)`, so `u ∈ [0,1)` maps to `u/(1-u)`.
pub fn frequency_from_uniform(u: f64) -> f64 {
    u / (1.0 - u)
}

/// Analytic CDF of the frequency law.
pub fn frequency_cdf(xi: f64) -> f64 {
    if xi <= 0.0 {
        0.0
    } else {
        xi / (1.0 + xi)
    }
}

pub fn frequency<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    frequency_from_uniform(rng.random::<f64>())
}

/// Point drawn uniformly from the closed ball of the given radius.
pub fn point_in_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    let dir = unit_direction(rng, dim);
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    dir.into_iter().map(|x| x * r).collect()
}
