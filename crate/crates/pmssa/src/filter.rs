//! Spectral high-pass filtering along time.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use pmssa_core::SnapshotMatrix;

use crate::error::{Error, Result};

const PIXELS_PER_TASK: usize = 64;

/// Removes every temporal frequency below `cutoff_hz`, DC included, from
/// each pixel by zeroing DFT bins.
///
/// When the matrix carries a time step it must agree with
/// `sample_rate_hz`.
pub fn highpass_filter(matrix: &SnapshotMatrix, cutoff_hz: f64, sample_rate_hz: f64) -> Result<SnapshotMatrix> {
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(Error::argument(
            "sample_rate_hz",
            format!("must be positive, got {sample_rate_hz}"),
        ));
    }
    let nyquist = 0.5 * sample_rate_hz;
    if !(cutoff_hz.is_finite() && cutoff_hz > 0.0 && cutoff_hz < nyquist) {
        return Err(Error::argument(
            "cutoff_hz",
            format!("must lie in (0, {nyquist}), got {cutoff_hz}"),
        ));
    }
    let dt = matrix.dt();
    if dt > 0.0 && (dt * sample_rate_hz - 1.0).abs() > 1e-9 {
        return Err(Error::argument(
            "sample_rate_hz",
            format!("{sample_rate_hz} Hz disagrees with the matrix time step {dt} s"),
        ));
    }

    let (d, m) = (matrix.d(), matrix.m());
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(m);
    // bin k (or m - k) has frequency k fs / m
    let keep = |k: usize| (k.min(m - k) as f64) * sample_rate_hz / m as f64 >= cutoff_hz;
    let src = matrix.values();

    let blocks: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .step_by(PIXELS_PER_TASK)
        .map(|start| {
            let end = (start + PIXELS_PER_TASK).min(d);
            let mut buf = vec![Complex::new(0.0, 0.0); m];
            let mut scratch =
                vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len())];
            let mut out = Vec::with_capacity((end - start) * m);
            for p in start..end {
                for (j, c) in buf.iter_mut().enumerate() {
                    *c = Complex::new(src[j * d + p], 0.0);
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for (k, c) in buf.iter_mut().enumerate() {
                    if !keep(k) {
                        *c = Complex::new(0.0, 0.0);
                    }
                }
                ifft.process_with_scratch(&mut buf, &mut scratch);
                out.extend(buf.iter().map(|c| c.re / m as f64));
            }
            out
        })
        .collect();

    let mut values = vec![0.0; d * m];
    for (b, block) in blocks.iter().enumerate() {
        for (offset, series) in block.chunks_exact(m).enumerate() {
            let p = b * PIXELS_PER_TASK + offset;
            for (j, v) in series.iter().enumerate() {
                values[j * d + p] = *v;
            }
        }
    }
    Ok(SnapshotMatrix::new(d, m, values)?.with_metadata_of(matrix))
}
