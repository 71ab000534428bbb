//! Low-rank denoising of high-dimensional time-series fields.
//!
//! A dataset is a [`SnapshotMatrix`]: `d` spatial elements (pixels) by `m`
//! snapshots, one column per instant. Two denoisers are provided:
//!
//! * **Truncated SVD** ([`tsvd_denoise`]): keep the `r` leading singular
//!   triplets of the snapshot matrix.
//! * **Projected multivariate SSA** ([`pmssa_denoise`]): project the data on
//!   the `r` leading spatial modes, run multivariate singular spectrum
//!   analysis on the resulting `r` temporal-coefficient series (block-Hankel
//!   embedding, rank truncation, antidiagonal averaging), then lift the
//!   cleaned coefficients back through the same spatial modes.
//!
//! The crate also carries a closed-form wake surrogate ([`synth`]) used as a
//! clean ground truth, a seeded Gaussian noise model ([`noise`]), and the
//! error metrics used to compare the two methods ([`metrics`]).
//!
//! # `no_std` support
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is
//! disabled. The `std` feature only enables rayon-backed parallelism inside
//! the dense factorizations; results are the same either way.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

mod error;
mod linalg;
mod math;

pub mod matrix;
pub mod metrics;
pub mod mssa;
pub mod noise;
pub mod svd;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::{bin_spatial, GridSpec, SnapshotMatrix};
pub use metrics::{mean_squared_second_difference, phase_export, probe_signal, relative_error, Domain};
pub use mssa::{
    default_window, diagonal_average, embed, half_window, pmssa, pmssa_denoise, pmssa_from_factors,
    truncate_trajectory, PmssaOutput, TrajectoryMatrix,
};
pub use noise::{add_gaussian_noise, add_gaussian_noise_in_place};
pub use svd::{
    compute_svd, compute_svd_randomized, project, reconstruct, tsvd_denoise, SpatialModes, SvdFactors,
    TemporalCoefficients,
};
pub use synth::{default_amplitudes, generate_dataset, generate_wake, WakeConfig, WakeSampler};
