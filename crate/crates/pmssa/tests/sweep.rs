use pmssa::sweep::estimate_sigma;
use pmssa::{rank_sweep, DenoiseReport, Method, ReportRow};
use pmssa_core::{generate_dataset, relative_error, WakeConfig};

fn data() -> (pmssa_core::SnapshotMatrix, pmssa_core::SnapshotMatrix) {
    let cfg = WakeConfig {
        nx: 15,
        ny: 11,
        m: 120,
        ..WakeConfig::default()
    };
    generate_dataset(&cfg, 0.3, 8).unwrap()
}

#[test]
fn full_rank_tsvd_is_the_noisy_input() {
    let (clean, noisy) = data();
    let r = noisy.d().min(noisy.m());
    let report = rank_sweep(&clean, &noisy, &[r], &[], &[Method::Tsvd]).unwrap();
    let want = relative_error(&noisy, &clean).unwrap();
    assert_eq!(report.len(), 1);
    assert!((report.rows()[0].relative_error - want).abs() < 1e-10);
}

#[test]
fn row_count_and_order() {
    let (clean, noisy) = data();
    let report = rank_sweep(&clean, &noisy, &[11, 3, 5], &[40, 10], &[Method::Pmssa, Method::Tsvd]).unwrap();
    assert_eq!(report.len(), 3 + 3 * 2);
    let keys: Vec<_> = report.rows().iter().map(|r| (r.method, r.r, r.window)).collect();
    assert_eq!(keys[0], (Method::Tsvd, 3, None));
    assert_eq!(keys[3], (Method::Pmssa, 3, Some(10)));
    assert_eq!(keys[8], (Method::Pmssa, 11, Some(40)));
    let sigma = estimate_sigma(&clean, &noisy).unwrap();
    assert!((sigma - 0.3).abs() < 0.01);
    assert!(report
        .rows()
        .iter()
        .all(|r| r.sigma == sigma && r.relative_error >= 0.0));
}

#[test]
fn list_order_does_not_matter() {
    let (clean, noisy) = data();
    let a = rank_sweep(&clean, &noisy, &[3, 7], &[10, 30], &[Method::Tsvd, Method::Pmssa]).unwrap();
    let b = rank_sweep(&clean, &noisy, &[7, 3, 7], &[30, 10], &[Method::Pmssa, Method::Tsvd]).unwrap();
    assert!(a.same_errors(&b));
}

#[test]
fn empty_lists_are_rejected() {
    let (clean, noisy) = data();
    assert!(rank_sweep(&clean, &noisy, &[], &[10], &[Method::Tsvd]).is_err());
    assert!(rank_sweep(&clean, &noisy, &[3], &[10], &[]).is_err());
    assert!(rank_sweep(&clean, &noisy, &[3], &[], &[Method::Pmssa]).is_err());
}

#[test]
fn report_csv_and_dedup() {
    let row = |method, r, window, e| ReportRow {
        method,
        sigma: 0.5,
        r,
        window,
        relative_error: e,
        wall_time_s: 0.25,
    };
    let report = DenoiseReport::from_rows([
        row(Method::Pmssa, 5, Some(90), 0.1),
        row(Method::Tsvd, 5, None, 0.2),
        row(Method::Pmssa, 5, Some(90), 0.3),
    ]);
    assert_eq!(report.len(), 2);
    let mut buf = Vec::new();
    report.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,sigma,r,L,relative_error,wall_time_s");
    assert_eq!(
        lines[1],
        "tsvd,5.0000000000000000e-1,5,,2.0000000000000001e-1,2.5000000000000000e-1"
    );
    assert!(lines[2].starts_with("pmssa,5.0000000000000000e-1,5,90,2.9999999999999999e-1"));
    assert_eq!(report.spread(Method::Tsvd, None), Some(1.0));
}
