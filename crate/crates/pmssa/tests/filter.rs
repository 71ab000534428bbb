use std::f64::consts::PI;

use pmssa::{highpass_filter, Error};
use pmssa_core::SnapshotMatrix;

const FS: f64 = 10_000.0;
// 916 Hz lands on bin 229 of a 2500-sample record at 10 kHz
const M: usize = 2500;

fn tones(parts: &[(f64, f64)]) -> SnapshotMatrix {
    SnapshotMatrix::from_fn(3, M, |p, j| {
        let t = j as f64 / FS;
        parts
            .iter()
            .map(|&(f, a)| a * (p as f64 + 1.0) * (2.0 * PI * f * t + 0.3 * p as f64).cos())
            .sum()
    })
    .unwrap()
    .with_dt(1.0 / FS)
    .unwrap()
}

fn rel(a: &SnapshotMatrix, b: &SnapshotMatrix) -> f64 {
    let num: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    num / b.frobenius_norm()
}

#[test]
fn constant_field_goes_to_zero() {
    let x = SnapshotMatrix::from_fn(4, 100, |p, _| p as f64 + 1.0).unwrap();
    let y = highpass_filter(&x, 300.0, FS).unwrap();
    assert!(y.values().iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn passband_tone_is_unchanged() {
    let x = tones(&[(916.0, 1.0)]);
    let y = highpass_filter(&x, 300.0, FS).unwrap();
    assert!(rel(&y, &x) < 1e-10);
    assert_eq!(y.dt(), x.dt());
}

#[test]
fn stopband_tone_is_removed() {
    let x = tones(&[(100.0, 2.0), (916.0, 1.0)]);
    let want = tones(&[(916.0, 1.0)]);
    let y = highpass_filter(&x, 300.0, FS).unwrap();
    assert!(rel(&y, &want) < 1e-10);
}

#[test]
fn filter_is_idempotent() {
    let x = SnapshotMatrix::from_fn(5, 777, |p, j| ((p * 31 + j * 17) % 23) as f64 - 11.0)
        .unwrap()
        .with_dt(1.0 / FS)
        .unwrap();
    let once = highpass_filter(&x, 300.0, FS).unwrap();
    let twice = highpass_filter(&once, 300.0, FS).unwrap();
    assert!(rel(&twice, &once) < 1e-10);
}

#[test]
fn invalid_cutoffs() {
    let x = tones(&[(916.0, 1.0)]);
    for cutoff in [5000.0, 6000.0, 0.0, -1.0, f64::NAN] {
        assert!(
            matches!(highpass_filter(&x, cutoff, FS), Err(Error::Argument { .. })),
            "{cutoff}"
        );
    }
    assert!(matches!(
        highpass_filter(&x, 300.0, 20_000.0),
        Err(Error::Argument { .. })
    ));
}
