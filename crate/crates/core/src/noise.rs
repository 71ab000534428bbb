//! Additive white Gaussian noise.
//!
//! The generator is ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)`; normal deviates come from the ziggurat sampler
//! `rand_distr::StandardNormal`. One deviate is drawn per element in storage
//! order (snapshot-major: all pixels of snapshot 0, then snapshot 1, ...).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::SnapshotMatrix;

/// Returns `matrix` plus independent `N(0, sigma^2)` draws on every element.
///
/// `sigma = 0` returns the input unchanged, bit for bit.
pub fn add_gaussian_noise(matrix: &SnapshotMatrix, sigma: f64, seed: u64) -> Result<SnapshotMatrix> {
    let mut out = matrix.clone();
    add_gaussian_noise_in_place(&mut out, sigma, seed)?;
    Ok(out)
}

/// In-place form of [`add_gaussian_noise`]; draws the same stream.
pub fn add_gaussian_noise_in_place(matrix: &mut SnapshotMatrix, sigma: f64, seed: u64) -> Result<()> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::argument(
            "sigma",
            alloc::format!("must be finite and non-negative, got {sigma}"),
        ));
    }
    if sigma == 0.0 {
        return Ok(());
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for v in matrix.values_mut() {
        let z: f64 = StandardNormal.sample(&mut rng);
        *v += sigma * z;
    }
    matrix.check_finite()
}
