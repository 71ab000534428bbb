//! Welch periodogram of a single time series.

use std::f64::consts::PI;
use std::io::{self, Write};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::format::write_table;

pub const WINDOW_NAME: &str = "hann";
pub const DEFAULT_OVERLAP: f64 = 0.5;

/// 256 samples per segment, 1024 once the record reaches 10^4 samples,
/// never more than the record.
pub fn default_segment_length(m: usize) -> usize {
    let n = if m >= 10_000 { 1024 } else { 256 };
    n.min(m)
}

/// One-sided averaged power spectrum.
///
/// `power[k]` is the mean-squared amplitude in bin `k`, so a unit sinusoid
/// centred on a bin reads 0.5 there.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub segment_length: usize,
    pub overlap: f64,
    pub window: &'static str,
    pub segments: usize,
    /// Equivalent noise bandwidth of the window, in bins.
    pub enbw_bins: f64,
}

impl Spectrum {
    /// Bin spacing.
    pub fn resolution(&self) -> f64 {
        self.frequencies.get(1).copied().unwrap_or(0.0)
    }

    /// Bin nearest to `freq`.
    pub fn bin_of(&self, freq: f64) -> usize {
        let df = self.resolution();
        if df == 0.0 {
            return 0;
        }
        ((freq / df).round().max(0.0) as usize).min(self.power.len() - 1)
    }

    /// Largest power within `halfwidth` bins of `freq`.
    pub fn peak_power(&self, freq: f64, halfwidth: usize) -> f64 {
        let k = self.bin_of(freq);
        let lo = k.saturating_sub(halfwidth);
        let hi = (k + halfwidth).min(self.power.len() - 1);
        self.power[lo..=hi].iter().copied().fold(0.0, f64::max)
    }

    /// Median power over bins farther than `halfwidth` bins from DC and
    /// from every frequency in `peaks`.
    pub fn off_peak_median(&self, peaks: &[f64], halfwidth: usize) -> f64 {
        let centres: Vec<usize> = std::iter::once(0)
            .chain(peaks.iter().map(|&f| self.bin_of(f)))
            .collect();
        let mut kept: Vec<f64> = self
            .power
            .iter()
            .enumerate()
            .filter(|(k, _)| centres.iter().all(|c| k.abs_diff(*c) > halfwidth))
            .map(|(_, p)| *p)
            .collect();
        if kept.is_empty() {
            return 0.0;
        }
        kept.sort_by(f64::total_cmp);
        let n = kept.len();
        if !n.is_multiple_of(2) {
            kept[n / 2]
        } else {
            0.5 * (kept[n / 2 - 1] + kept[n / 2])
        }
    }

    /// Mean-square of the signal implied by the spectrum.
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum::<f64>() / self.enbw_bins
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let rows: Vec<[f64; 2]> = self
            .frequencies
            .iter()
            .zip(&self.power)
            .map(|(f, p)| [*f, *p])
            .collect();
        write_table(w, "frequency,power", rows.iter().map(|r| &r[..]))
    }
}

/// Welch estimate with a periodic Hann window and no detrending.
///
/// Frequencies are in cycles per unit of `dt`.
pub fn periodogram(signal: &[f64], dt: f64, segment_length: usize, overlap: f64) -> Result<Spectrum> {
    let m = signal.len();
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::argument("dt", format!("must be positive, got {dt}")));
    }
    if segment_length < 2 || segment_length > m {
        return Err(Error::argument(
            "segment",
            format!("segment length {segment_length} must lie in 2..={m}"),
        ));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::argument("overlap", format!("must lie in [0, 1), got {overlap}")));
    }
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(Error::argument("signal", "contains non-finite values"));
    }

    let n = segment_length;
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect();
    let s1: f64 = window.iter().sum();
    let s2: f64 = window.iter().map(|w| w * w).sum();
    let step = (n - (overlap * n as f64).round() as usize).max(1);
    let segments = (m - n) / step + 1;
    let bins = n / 2 + 1;

    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let mut power = vec![0.0; bins];
    for s in 0..segments {
        let seg = &signal[s * step..s * step + n];
        for ((c, x), w) in buf.iter_mut().zip(seg).zip(&window) {
            *c = Complex::new(x * w, 0.0);
        }
        fft.process(&mut buf);
        for (k, p) in power.iter_mut().enumerate() {
            *p += buf[k].norm_sqr();
        }
    }
    let scale = 1.0 / (s1 * s1 * segments as f64);
    for (k, p) in power.iter_mut().enumerate() {
        let one_sided = if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
            1.0
        } else {
            2.0
        };
        *p *= scale * one_sided;
    }
    let df = 1.0 / (n as f64 * dt);
    Ok(Spectrum {
        frequencies: (0..bins).map(|k| k as f64 * df).collect(),
        power,
        segment_length: n,
        overlap,
        window: WINDOW_NAME,
        segments,
        enbw_bins: n as f64 * s2 / (s1 * s1),
    })
}
