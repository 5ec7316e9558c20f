//! Deterministic counter-based randomness.
//!
//! Every sample index gets its own ChaCha substream, so sample `i` is a pure
//! function of `(seed, i)` regardless of evaluation order or parallel
//! schedule.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// RNG for substream `index` of master `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Uniform sample in the axis-aligned box `[lo, hi]` (element-wise).
pub fn uniform_box(rng: &mut ChaCha12Rng, lo: &DVector<f64>, hi: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(lo.len(), |i, _| {
        let (a, b) = (lo[i], hi[i]);
        if b > a {
            rng.random_range(a..b)
        } else {
            a
        }
    })
}

/// Standard normal via Box-Muller.
pub fn standard_normal(rng: &mut ChaCha12Rng) -> f64 {
    loop {
        let u1: f64 = rng.random::<f64>();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.random::<f64>();
        return (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos();
    }
}

/// Uniform direction on the unit sphere in `dim` dimensions.
pub fn unit_direction(rng: &mut ChaCha12Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| standard_normal(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}
