//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Dense row-major square matrix helper for the oracle.
pub struct Sym {
    pub n: usize,
    pub a: Vec<f64>,
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors
/// as columns of a row-major `n x n` matrix.
pub fn jacobi_eigen(mut s: Sym) -> (Vec<f64>, Vec<f64>) {
    let n = s.n;
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let at = |a: &[f64], i: usize, j: usize| a[i * n + j];
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| at(&s.a, i, j).powi(2))
            .sum();
        let total: f64 = s.a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = at(&s.a, p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (at(&s.a, q, q) - at(&s.a, p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = s.a[k * n + p];
                    let akq = s.a[k * n + q];
                    s.a[k * n + p] = c * akp - sn * akq;
                    s.a[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = s.a[p * n + k];
                    let aqk = s.a[q * n + k];
                    s.a[p * n + k] = c * apk - sn * aqk;
                    s.a[q * n + k] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| at(&s.a, j, j).total_cmp(&at(&s.a, i, i)));
    let vals = order.iter().map(|&i| at(&s.a, i, i)).collect();
    let mut vecs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + new] = v[k * n + old];
        }
    }
    (vals, vecs)
}

/// `A^T A` for a column-major `rows x cols` matrix.
pub fn gram(a: &[f64], rows: usize, cols: usize) -> Sym {
    let mut g = vec![0.0; cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            g[i * cols + j] = (0..rows).map(|k| a[i * rows + k] * a[j * rows + k]).sum();
        }
    }
    Sym { n: cols, a: g }
}

/// Singular values of a column-major matrix, descending.
pub fn singular_values(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    jacobi_eigen(gram(a, rows, cols))
        .0
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect()
}

/// Best rank-`k` approximation `A V_k V_k^T`, column-major.
pub fn best_rank(a: &[f64], rows: usize, cols: usize, k: usize) -> Vec<f64> {
    let (_, v) = jacobi_eigen(gram(a, rows, cols));
    // P = V_k V_k^T (cols x cols), result column j = A P[:, j]
    let mut out = vec![0.0; rows * cols];
    for j in 0..cols {
        for l in 0..cols {
            let p: f64 = (0..k).map(|c| v[l * cols + c] * v[j * cols + c]).sum();
            if p == 0.0 {
                continue;
            }
            for i in 0..rows {
                out[j * rows + i] += a[l * rows + i] * p;
            }
        }
    }
    out
}

pub fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}
