mod common;

use common::rel_diff;
use pmssa_core::{
    compute_svd, diagonal_average, embed, pmssa, pmssa_from_factors, project, reconstruct, truncate_trajectory,
    tsvd_denoise, SnapshotMatrix, TemporalCoefficients,
};
use proptest::prelude::*;

fn series(r: usize, m: usize) -> impl Strategy<Value = TemporalCoefficients> {
    prop::collection::vec(-100.0f64..100.0, r * m).prop_map(move |v| TemporalCoefficients::new(r, m, v).unwrap())
}

fn coeffs_and_window() -> impl Strategy<Value = (TemporalCoefficients, usize)> {
    (1usize..=8, 3usize..=200).prop_flat_map(|(r, m)| (series(r, m), 2..m))
}

fn matrix(max_d: usize, max_m: usize) -> impl Strategy<Value = SnapshotMatrix> {
    (2..=max_d, 2..=max_m).prop_flat_map(|(d, m)| {
        prop::collection::vec(-10.0f64..10.0, d * m).prop_map(move |v| SnapshotMatrix::new(d, m, v).unwrap())
    })
}

/// Noisy low-rank snapshot data: a few traveling patterns plus a small
/// perturbation, so singular gaps stay well open.
fn structured(d: usize, m: usize, seed: u64) -> SnapshotMatrix {
    let noise = common::gaussian(d * m, seed);
    SnapshotMatrix::from_fn(d, m, |p, j| {
        let (x, t) = (p as f64 / d as f64, j as f64);
        1.0 + 3.0 * (6.0 * x - 0.21 * t).cos() + (11.0 * x - 0.42 * t).sin() + 0.05 * noise[j * d + p]
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hankel_roundtrip((c, l) in coeffs_and_window()) {
        let back = diagonal_average(&embed(&c, l).unwrap());
        prop_assert_eq!(back.values(), c.values());
    }

    #[test]
    fn embedding_is_hankel((c, l) in coeffs_and_window()) {
        let t = embed(&c, l).unwrap();
        prop_assert_eq!(t.hankel_defect(), 0.0);
        prop_assert_eq!(t.cols(), c.m() - l + 1);
    }

    #[test]
    fn tail_energy_identity(x in matrix(12, 12), frac in 0.0f64..1.0) {
        let k = x.d().min(x.m());
        let full = compute_svd(&x, k).unwrap();
        let r = 1 + ((k - 1) as f64 * frac) as usize;
        let rec = tsvd_denoise(&x, r).unwrap();
        let resid: f64 = x.values().iter().zip(rec.values()).map(|(a, b)| (a - b) * (a - b)).sum();
        let tail: f64 = full.singular_values()[r..].iter().map(|s| s * s).sum();
        let total: f64 = full.singular_values().iter().map(|s| s * s).sum();
        prop_assert!((resid - tail).abs() <= 1e-8 * total.max(1e-300));
    }

    #[test]
    fn truncation_error_shrinks_with_rank(x in matrix(10, 14)) {
        let k = x.d().min(x.m());
        let mut prev = f64::INFINITY;
        for r in 1..=k {
            let rec = tsvd_denoise(&x, r).unwrap();
            let e: f64 = x.values().iter().zip(rec.values()).map(|(a, b)| (a - b) * (a - b)).sum();
            prop_assert!(e <= prev * (1.0 + 1e-12) + 1e-20);
            prev = e;
        }
    }

    #[test]
    fn factors_are_orthonormal(x in matrix(15, 15), frac in 0.0f64..1.0) {
        let k = x.d().min(x.m());
        let r = 1 + ((k - 1) as f64 * frac) as usize;
        let f = compute_svd(&x, r).unwrap();
        for i in 0..r {
            for j in 0..r {
                let want = if i == j { 1.0 } else { 0.0 };
                let uu: f64 = f.modes().mode(i).iter().zip(f.modes().mode(j)).map(|(a, b)| a * b).sum();
                let vv: f64 = f.right_vector(i).iter().zip(f.right_vector(j)).map(|(a, b)| a * b).sum();
                prop_assert!((uu - want).abs() < 1e-10 && (vv - want).abs() < 1e-10);
            }
            let u = f.modes().mode(i);
            let (imax, _) = u
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |b, (k, v)| if v.abs() > b.1 { (k, v.abs()) } else { b });
            prop_assert!(u[imax] >= 0.0);
        }
        prop_assert!(f.singular_values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn projection_is_idempotent(x in matrix(12, 12), frac in 0.0f64..1.0) {
        let k = x.d().min(x.m());
        let r = 1 + ((k - 1) as f64 * frac) as usize;
        let f = compute_svd(&x, r).unwrap();
        let once = reconstruct(f.modes(), &project(&f)).unwrap();
        let twice = reconstruct(f.modes(), &f.modes().coefficients_of(&once).unwrap()).unwrap();
        let scale = once.frobenius_norm().max(1e-300);
        let diff: f64 = once.values().iter().zip(twice.values()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-10 * scale);
    }

    #[test]
    fn trajectory_truncation_is_non_expansive((c, l) in coeffs_and_window(), k in 1usize..6) {
        let t = embed(&c, l).unwrap();
        let k = k.min(t.rows().min(t.cols()));
        let th = truncate_trajectory(&t, k).unwrap();
        prop_assert!(th.frobenius_norm() <= t.frobenius_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn single_series_window_symmetry(seed in 0u64..1000, m in 20usize..120, frac in 0.05f64..0.95) {
        let x = structured(1, m, seed).values().to_vec();
        let c = TemporalCoefficients::new(1, m, x).unwrap();
        let l = (2 + ((m - 4) as f64 * frac) as usize).min(m - 1);
        let k = m - l + 1;
        let rank = 3.min(l).min(k);
        let a = diagonal_average(&truncate_trajectory(&embed(&c, l).unwrap(), rank).unwrap());
        let b = diagonal_average(&truncate_trajectory(&embed(&c, k).unwrap(), rank).unwrap());
        prop_assert!(rel_diff(a.values(), b.values()) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pmssa_output_lies_in_mode_span(seed in 0u64..1000, r in 1usize..6, l in 2usize..30) {
        let x = structured(24, 40, seed);
        let out = pmssa(&x, r, l, None).unwrap();
        let rec = out.reconstruct().unwrap();
        let again = reconstruct(out.factors.modes(), &out.factors.modes().coefficients_of(&rec).unwrap()).unwrap();
        prop_assert!(rel_diff(again.values(), rec.values()) < 1e-10);
    }

    #[test]
    fn default_rank_mssa_is_rank(seed in 0u64..1000, r in 1usize..6, l in 2usize..30) {
        let x = structured(16, 40, seed);
        let f = compute_svd(&x, r).unwrap();
        let a = pmssa_from_factors(f.clone(), l, None).unwrap().reconstruct().unwrap();
        let b = pmssa_from_factors(f, l, Some(r)).unwrap().reconstruct().unwrap();
        prop_assert!(a.bitwise_eq(&b));
    }
}
