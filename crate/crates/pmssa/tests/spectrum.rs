use std::f64::consts::PI;

use pmssa::spectrum::default_segment_length;
use pmssa::{periodogram, Error};
use pmssa_core::{add_gaussian_noise, SnapshotMatrix};

#[test]
fn unit_sinusoid_peaks_at_one_half() {
    let (m, n, dt) = (1000, 256, 0.125);
    let f = 8.0 / (n as f64 * dt);
    let x: Vec<f64> = (0..m).map(|j| (2.0 * PI * f * j as f64 * dt + 0.7).sin()).collect();
    let s = periodogram(&x, dt, n, 0.5).unwrap();
    let k = s.bin_of(f);
    assert_eq!(k, 8);
    assert!((s.power[k] - 0.5).abs() < 0.01, "{}", s.power[k]);
    assert_eq!(s.peak_power(f, 1), s.power[k]);
    assert!(s.frequencies.windows(2).all(|w| w[1] > w[0]) && s.frequencies[0] == 0.0);
    assert_eq!(s.window, "hann");
    assert!((s.enbw_bins - 1.5).abs() < 1e-12);
}

#[test]
fn zero_signal_has_zero_power() {
    let s = periodogram(&[0.0; 512], 1.0, 128, 0.5).unwrap();
    assert!(s.power.iter().all(|&p| p == 0.0));
    assert_eq!(s.segments, 7);
}

#[test]
fn white_noise_parseval() {
    let sigma = 0.8;
    let x = add_gaussian_noise(&SnapshotMatrix::zeros(1, 10_000).unwrap(), sigma, 11).unwrap();
    let s = periodogram(x.values(), 1.0, default_segment_length(10_000), 0.5).unwrap();
    assert_eq!(s.segment_length, 1024);
    let total = s.total_power();
    assert!((total / (sigma * sigma) - 1.0).abs() < 0.05, "{total}");
}

#[test]
fn mean_appears_at_dc() {
    let x = vec![2.0; 1024];
    let s = periodogram(&x, 1.0, 256, 0.5).unwrap();
    assert!((s.total_power() - 4.0).abs() < 1e-9);
}

#[test]
fn off_peak_median_skips_peaks() {
    let (m, n) = (4096, 256);
    let f = 20.0 / n as f64;
    let x = add_gaussian_noise(
        &SnapshotMatrix::from_fn(1, m, |_, j| 5.0 + 3.0 * (2.0 * PI * f * j as f64).cos()).unwrap(),
        0.1,
        4,
    )
    .unwrap();
    let s = periodogram(x.values(), 1.0, n, 0.5).unwrap();
    let floor = s.off_peak_median(&[f], 3);
    // white noise power per bin: 2 sigma^2 ENBW / n
    let expect = 2.0 * 0.01 * 1.5 / n as f64;
    assert!(floor > 0.5 * expect && floor < 2.0 * expect, "{floor} vs {expect}");
}

#[test]
fn argument_checks() {
    let x = vec![1.0; 100];
    assert!(matches!(periodogram(&x, 1.0, 101, 0.5), Err(Error::Argument { .. })));
    assert!(matches!(periodogram(&x, 1.0, 50, 1.0), Err(Error::Argument { .. })));
    assert!(matches!(periodogram(&x, 0.0, 50, 0.5), Err(Error::Argument { .. })));
    assert_eq!(default_segment_length(1000), 256);
    assert_eq!(default_segment_length(100), 100);
}
