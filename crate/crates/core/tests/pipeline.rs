use pmssa_core::{
    bin_spatial, compute_svd, default_window, generate_dataset, generate_wake, pmssa_denoise, relative_error,
    tsvd_denoise, GridSpec, SnapshotMatrix, WakeConfig,
};

fn small_wake() -> WakeConfig {
    WakeConfig {
        nx: 31,
        ny: 31,
        m: 300,
        ..WakeConfig::default()
    }
}

#[test]
fn noiseless_rank_three_wake_is_recovered() {
    let cfg = small_wake().with_harmonics(0);
    let clean = generate_wake(&cfg).unwrap();
    assert_eq!(cfg.forced_rank(), 3);
    let l = default_window(cfg.m);
    let p = pmssa_denoise(&clean, 3, l, None).unwrap();
    let t = tsvd_denoise(&clean, 3).unwrap();
    assert!(relative_error(&p, &clean).unwrap() < 1e-8);
    assert!(relative_error(&t, &clean).unwrap() < 1e-8);
    assert_eq!(p.grid(), clean.grid());
    assert_eq!(p.dt(), clean.dt());
}

#[test]
fn pmssa_beats_tsvd_at_high_noise() {
    let (clean, noisy) = generate_dataset(&small_wake(), 0.64, 5).unwrap();
    let p = relative_error(&pmssa_denoise(&noisy, 11, 52, None).unwrap(), &clean).unwrap();
    let t = relative_error(&tsvd_denoise(&noisy, 11).unwrap(), &clean).unwrap();
    assert!(p < t, "pmssa {p} tsvd {t}");
}

#[test]
fn pipeline_is_deterministic() {
    let (_, noisy) = generate_dataset(&small_wake(), 0.2, 9).unwrap();
    let a = pmssa_denoise(&noisy, 5, 40, None).unwrap();
    let b = pmssa_denoise(&noisy, 5, 40, None).unwrap();
    assert!(a.bitwise_eq(&b));
    let fa = compute_svd(&noisy, 5).unwrap();
    let fb = compute_svd(&noisy, 5).unwrap();
    assert_eq!(fa, fb);
}

#[test]
fn zero_noise_dataset_is_clean() {
    let (clean, noisy) = generate_dataset(&small_wake(), 0.0, 1).unwrap();
    assert!(clean.bitwise_eq(&noisy));
}

#[test]
fn zero_amplitudes_give_one_singular_value() {
    let mut cfg = small_wake();
    cfg.amplitudes = vec![0.0; 3];
    let x = generate_wake(&cfg).unwrap();
    assert!(x.values().iter().all(|&v| v == cfg.mean_level));
    let f = compute_svd(&x, 3).unwrap();
    assert_eq!(f.numerical_rank(), 1);
}

#[test]
fn binning_preserves_spatial_mean() {
    let (_, noisy) = generate_dataset(
        &WakeConfig {
            nx: 40,
            ny: 20,
            m: 12,
            ..WakeConfig::default()
        },
        0.3,
        2,
    )
    .unwrap();
    let binned = bin_spatial(&noisy, 4).unwrap();
    assert_eq!(binned.grid(), Some(GridSpec::new(10, 5).unwrap()));
    for j in 0..noisy.m() {
        let a: f64 = noisy.snapshot(j).iter().sum::<f64>() / noisy.d() as f64;
        let b: f64 = binned.snapshot(j).iter().sum::<f64>() / binned.d() as f64;
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
    let one = SnapshotMatrix::from_snapshots(&[[1.0, 2.0, 3.0, 4.0]])
        .unwrap()
        .with_grid(GridSpec::new(2, 2).unwrap())
        .unwrap();
    assert_eq!(bin_spatial(&one, 2).unwrap().values(), &[2.5]);
}
