//! Closed-form wake surrogate used as clean ground truth.
//!
//! The field on `x in [0, 10]`, `y in [-5, 5]` is
//!
//! ```text
//! p(x, y, t) = mean_level
//!            + sum_{k=1}^{H+1} a_k g_k(y) [ cos(2 pi k (x/lambda - f0 t))
//!                                          + 0.3 cos(2 pi k x/lambda) cos(2 pi k f0 t) ]
//! ```
//!
//! with `g_k(y) = exp(-y^2 / w^2)`. When `antisymmetric` is set, odd
//! harmonics use `g_k(y) = (2 y / w) exp(-y^2 / w^2)` instead, which mimics the
//! alternating pressure pattern of a vortex street. Each harmonic contributes
//! exactly two singular triplets (a traveling wave plus a standing-wave
//! correction of weight 0.3), so the clean field has rank
//! `1 + 2 (H + 1)` when every amplitude and the mean level are non-zero.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::{GridSpec, SnapshotMatrix};
use crate::metrics::Domain;
use crate::noise::add_gaussian_noise;

/// Weight of the standing-wave term.
pub const STANDING_WEIGHT: f64 = 0.3;

/// Parameters of the wake surrogate. Time is in convective units.
#[derive(Debug, Clone, PartialEq)]
pub struct WakeConfig {
    pub nx: usize,
    pub ny: usize,
    /// Number of snapshots.
    pub m: usize,
    /// Time step between snapshots.
    pub dt: f64,
    /// Fundamental frequency in cycles per time unit.
    pub f0: f64,
    /// Harmonics above the fundamental; `amplitudes` has `n_harmonics + 1` entries.
    pub n_harmonics: usize,
    pub amplitudes: Vec<f64>,
    /// Streamwise wavelength.
    pub wavelength: f64,
    /// Cross-stream Gaussian width.
    pub envelope_width: f64,
    pub mean_level: f64,
    pub antisymmetric: bool,
}

impl Default for WakeConfig {
    /// 101 x 101 grid, 1000 snapshots at `dt = 0.125`, fundamental plus two
    /// harmonics. `f0 = 0.125` puts about 15.6 periods in the record and
    /// lands every harmonic on an exact bin of a 256-sample periodogram.
    fn default() -> Self {
        Self {
            nx: 101,
            ny: 101,
            m: 1000,
            dt: 0.125,
            f0: 0.125,
            n_harmonics: 2,
            amplitudes: default_amplitudes(0.5, 2),
            wavelength: 4.0,
            envelope_width: 1.5,
            mean_level: -0.5,
            antisymmetric: false,
        }
    }
}

/// `a_k = a1 * 4^-(k-1)` for `k = 1 ..= n_harmonics + 1`.
pub fn default_amplitudes(a1: f64, n_harmonics: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(n_harmonics + 1);
    let mut v = a1;
    for _ in 0..=n_harmonics {
        a.push(v);
        v *= 0.25;
    }
    a
}

impl WakeConfig {
    /// Replaces the harmonic count, regenerating default-shaped amplitudes
    /// from the current fundamental amplitude.
    pub fn with_harmonics(mut self, n_harmonics: usize) -> Self {
        let a1 = self.amplitudes.first().copied().unwrap_or(0.5);
        self.n_harmonics = n_harmonics;
        self.amplitudes = default_amplitudes(a1, n_harmonics);
        self
    }

    pub fn domain(&self) -> Domain {
        Domain::WAKE
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.nx, self.ny)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, msg: alloc::string::String| Err(Error::argument(name, msg));
        if self.nx == 0 || self.ny == 0 || self.m == 0 {
            return bad(
                "grid",
                format!("nx, ny and m must be positive ({}x{}x{})", self.nx, self.ny, self.m),
            );
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", format!("must be positive, got {}", self.dt));
        }
        if !(self.f0.is_finite() && self.f0 > 0.0) {
            return bad("f0", format!("must be positive, got {}", self.f0));
        }
        if self.amplitudes.len() != self.n_harmonics + 1 {
            return bad(
                "amplitudes",
                format!(
                    "expected {} amplitudes, got {}",
                    self.n_harmonics + 1,
                    self.amplitudes.len()
                ),
            );
        }
        if self.amplitudes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return bad("amplitudes", "amplitudes must be finite and non-negative".into());
        }
        let top = self.f0 * (self.n_harmonics + 1) as f64;
        let nyquist = 0.5 / self.dt;
        if top >= nyquist {
            return bad(
                "f0",
                format!("highest harmonic {top} must stay below the Nyquist frequency {nyquist}"),
            );
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return bad("wavelength", format!("must be positive, got {}", self.wavelength));
        }
        if !(self.envelope_width.is_finite() && self.envelope_width > 0.0) {
            return bad(
                "envelope_width",
                format!("must be positive, got {}", self.envelope_width),
            );
        }
        if !self.mean_level.is_finite() {
            return bad("mean_level", "must be finite".into());
        }
        Ok(())
    }

    fn envelope(&self, k: usize, y: f64) -> f64 {
        let w = self.envelope_width;
        let g = math::exp(-(y * y) / (w * w));
        if self.antisymmetric && k % 2 == 1 {
            2.0 * y / w * g
        } else {
            g
        }
    }

    /// Direct evaluation of the closed form at one point.
    pub fn evaluate(&self, x: f64, y: f64, t: f64) -> f64 {
        let mut p = self.mean_level;
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let k = (idx + 1) as f64;
            let travel = math::cos(2.0 * PI * k * (x / self.wavelength - self.f0 * t));
            let standing = math::cos(2.0 * PI * k * x / self.wavelength) * math::cos(2.0 * PI * k * self.f0 * t);
            p += a * self.envelope(idx + 1, y) * (travel + STANDING_WEIGHT * standing);
        }
        p
    }

    /// Physical coordinates of pixel `(row, col)`.
    pub fn coordinates(&self, row: usize, col: usize) -> (f64, f64) {
        self.domain().node(self.nx, self.ny, row, col)
    }

    /// Time of snapshot `j` (0-based).
    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    /// Rank of the clean field implied by the configuration.
    pub fn forced_rank(&self) -> usize {
        let mean = usize::from(self.mean_level != 0.0);
        mean + 2 * self.amplitudes.iter().filter(|&&a| a > 0.0).count()
    }

    /// Frequencies `k f0` of every configured harmonic.
    pub fn harmonic_frequencies(&self) -> Vec<f64> {
        (1..=self.n_harmonics + 1).map(|k| k as f64 * self.f0).collect()
    }

    /// Builds a generator that fills snapshots one at a time.
    pub fn sampler(&self) -> Result<WakeSampler> {
        self.validate()?;
        let d = self.nx * self.ny;
        let h = self.amplitudes.len();
        // per harmonic: a_k g_k(y) cos(theta) (scaled by 1 + 0.3) and a_k g_k(y) sin(theta)
        let mut cos_part = vec![0.0; h * d];
        let mut sin_part = vec![0.0; h * d];
        for row in 0..self.ny {
            for col in 0..self.nx {
                let p = row * self.nx + col;
                let (x, y) = self.coordinates(row, col);
                for (idx, a) in self.amplitudes.iter().enumerate() {
                    let k = (idx + 1) as f64;
                    let theta = 2.0 * PI * k * x / self.wavelength;
                    let amp = a * self.envelope(idx + 1, y);
                    cos_part[idx * d + p] = (1.0 + STANDING_WEIGHT) * amp * math::cos(theta);
                    sin_part[idx * d + p] = amp * math::sin(theta);
                }
            }
        }
        Ok(WakeSampler {
            config: self.clone(),
            d,
            cos_part,
            sin_part,
        })
    }
}

/// Precomputed separable form of the surrogate.
#[derive(Debug, Clone)]
pub struct WakeSampler {
    config: WakeConfig,
    d: usize,
    cos_part: Vec<f64>,
    sin_part: Vec<f64>,
}

impl WakeSampler {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Writes snapshot `j` into `out` (length `d`).
    pub fn snapshot_into(&self, j: usize, out: &mut [f64]) {
        let d = self.d;
        let t = self.config.time(j);
        out.fill(self.config.mean_level);
        for idx in 0..self.config.amplitudes.len() {
            let tau = 2.0 * PI * (idx + 1) as f64 * self.config.f0 * t;
            let (c, s) = (math::cos(tau), math::sin(tau));
            let cp = &self.cos_part[idx * d..(idx + 1) * d];
            let sp = &self.sin_part[idx * d..(idx + 1) * d];
            for ((o, a), b) in out.iter_mut().zip(cp).zip(sp) {
                *o += a * c + b * s;
            }
        }
    }
}

/// Samples the surrogate on its grid at `t_j = j dt`, `j = 0 .. m`.
pub fn generate_wake(config: &WakeConfig) -> Result<SnapshotMatrix> {
    let sampler = config.sampler()?;
    let d = sampler.d();
    let mut values = vec![0.0; d * config.m];
    for (j, snap) in values.chunks_exact_mut(d).enumerate() {
        sampler.snapshot_into(j, snap);
    }
    SnapshotMatrix::new(d, config.m, values)?
        .with_grid(config.grid()?)?
        .with_dt(config.dt)
}

/// Clean surrogate and a noisy copy with `N(0, sigma^2)` added per element.
pub fn generate_dataset(config: &WakeConfig, sigma: f64, seed: u64) -> Result<(SnapshotMatrix, SnapshotMatrix)> {
    let clean = generate_wake(config)?;
    let noisy = add_gaussian_noise(&clean, sigma, seed)?;
    Ok((clean, noisy))
}
