//! Projected multivariate singular spectrum analysis.
//!
//! The pipeline runs on the `r x m` temporal coefficients of the leading
//! spatial modes:
//!
//! 1. each coefficient series is embedded into an `L x K` Hankel trajectory
//!    matrix (`K = m - L + 1`) and the `r` blocks are stacked into an
//!    `(r L) x K` matrix ([`embed`]);
//! 2. the stacked matrix is replaced by its best rank-`r_mssa` approximation
//!    ([`truncate_trajectory`]);
//! 3. every block is mapped back to a series by averaging its antidiagonals
//!    ([`diagonal_average`]);
//! 4. the cleaned coefficients are lifted back through the spatial modes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use crate::matrix::SnapshotMatrix;
use crate::svd::{compute_svd, project, reconstruct, SvdFactors, TemporalCoefficients};

/// Stacked trajectories with at most this many rows are factored directly;
/// taller ones go through the Gram matrix of the smaller dimension.
pub const DIRECT_SVD_MAX_ROWS: usize = 4096;

/// `(r L) x K` stacked trajectory matrix, stored column-major.
///
/// Rows `i L .. i L + L` hold the block of series `i`. Column `b` of block
/// `i` is the window `x_i[b .. b + L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMatrix {
    r: usize,
    window: usize,
    m: usize,
    values: Vec<f64>,
}

impl TrajectoryMatrix {
    /// Wraps column-major values of an `(r L) x (m - L + 1)` matrix.
    pub fn new(r: usize, window: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if r == 0 || window == 0 || window > m {
            return Err(Error::Validation(format!(
                "invalid trajectory shape r = {r}, L = {window}, m = {m}"
            )));
        }
        let k = m - window + 1;
        if values.len() != r * window * k {
            return Err(Error::Validation(format!(
                "trajectory needs {} values, got {}",
                r * window * k,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("trajectory contains non-finite values".into()));
        }
        Ok(Self { r, window, m, values })
    }

    /// Number of stacked series.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Window length `L`.
    pub fn window(&self) -> usize {
        self.window
    }

    /// Window count `K = m - L + 1`.
    pub fn width(&self) -> usize {
        self.m - self.window + 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> usize {
        self.r * self.window
    }

    pub fn cols(&self) -> usize {
        self.width()
    }

    /// Entry `(a, b)` of block `i` (all 0-based).
    pub fn block_entry(&self, i: usize, a: usize, b: usize) -> f64 {
        self.values[b * self.rows() + i * self.window + a]
    }

    /// Entry of the stacked matrix.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[col * self.rows() + row]
    }

    /// Column-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm2(self.values.iter().copied())
    }

    /// Largest deviation from the Hankel property over all blocks.
    pub fn hankel_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.r {
            for b in 0..self.width() - 1 {
                for a in 1..self.window {
                    let diff = self.block_entry(i, a, b) - self.block_entry(i, a - 1, b + 1);
                    worst = worst.max(diff.abs());
                }
            }
        }
        worst
    }

    fn as_mat(&self) -> faer::MatRef<'_, f64> {
        linalg::col_major(&self.values, self.rows(), self.cols())
    }
}

fn check_window(m: usize, window: usize) -> Result<()> {
    if m < 3 || window < 2 || window > m - 1 {
        return Err(Error::argument(
            "window",
            format!("L must satisfy 2 <= L <= m - 1 = {}, got {window}", m.saturating_sub(1)),
        ));
    }
    Ok(())
}

/// `round(3 sqrt(m))`, clamped into `[2, m - 1]`.
pub fn default_window(m: usize) -> usize {
    let l = math::round(3.0 * math::sqrt(m as f64)) as usize;
    l.clamp(2, m.saturating_sub(1).max(2))
}

/// `m / 2`, at least 2.
pub fn half_window(m: usize) -> usize {
    (m / 2).max(2)
}

/// Time-delay embedding of every series, stacked in series order.
pub fn embed(coeffs: &TemporalCoefficients, window: usize) -> Result<TrajectoryMatrix> {
    let m = coeffs.m();
    check_window(m, window)?;
    let r = coeffs.r();
    let k = m - window + 1;
    let mut values = Vec::with_capacity(r * window * k);
    for b in 0..k {
        for i in 0..r {
            values.extend_from_slice(&coeffs.series(i)[b..b + window]);
        }
    }
    Ok(TrajectoryMatrix { r, window, m, values })
}

/// Best rank-`rank` approximation of the stacked trajectory (Frobenius norm).
///
/// The blocks of the result are generally no longer Hankel.
pub fn truncate_trajectory(t: &TrajectoryMatrix, rank: usize) -> Result<TrajectoryMatrix> {
    let (rows, cols) = (t.rows(), t.cols());
    let max = rows.min(cols);
    if rank == 0 || rank > max {
        return Err(Error::argument(
            "rank_mssa",
            format!("must be in 1..={max} for a {rows}x{cols} trajectory, got {rank}"),
        ));
    }
    let a = t.as_mat();
    let mut out = vec![0.0; rows * cols];
    let dst = linalg::col_major_mut(&mut out, rows, cols);
    if rows <= DIRECT_SVD_MAX_ROWS {
        let svd = linalg::thin_svd(a)?;
        // (P_k D_k) Q_k^T
        let mut pd = Mat::zeros(rows, rank);
        for j in 0..rank {
            let s = svd.s[j];
            for (dst, src) in pd.col_mut(j).iter_mut().zip(svd.u.col(j).iter()) {
                *dst = s * src;
            }
        }
        let q = svd.v.as_ref().subcols(0, rank);
        linalg::matmul(dst, pd.as_ref(), q.transpose());
    } else if cols <= rows {
        // T Q_k Q_k^T with Q_k from T^T T
        let gram = linalg::mul(a.transpose(), a);
        let (_, q) = linalg::symmetric_top(gram.as_ref(), rank)?;
        let tq = linalg::mul(a, q.as_ref());
        linalg::matmul(dst, tq.as_ref(), q.as_ref().transpose());
    } else {
        // P_k P_k^T T with P_k from T T^T
        let gram = linalg::mul(a, a.transpose());
        let (_, p) = linalg::symmetric_top(gram.as_ref(), rank)?;
        let pt = linalg::mul(p.as_ref().transpose(), a);
        linalg::matmul(dst, p.as_ref(), pt.as_ref());
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(
            "trajectory truncation produced non-finite values".into(),
        ));
    }
    Ok(TrajectoryMatrix {
        r: t.r,
        window: t.window,
        m: t.m,
        values: out,
    })
}

/// Maps every block back to a series by averaging its antidiagonals.
///
/// Element `j` of series `i` is the mean of block entries `(a, b)` with
/// `a + b = j`; there are `min(j + 1, L, K, m - j)` of them.
///
/// Each mean is taken relative to the first entry of its antidiagonal, so
/// exactly Hankel blocks come back bit for bit.
pub fn diagonal_average(t: &TrajectoryMatrix) -> TemporalCoefficients {
    let (r, window, m, k) = (t.r, t.window, t.m, t.width());
    let rows = t.rows();
    let mut values = vec![0.0; r * m];
    let mut anchor = vec![0.0; m];
    for (i, series) in values.chunks_exact_mut(m).enumerate() {
        for (j, a) in anchor.iter_mut().enumerate() {
            let b = j.saturating_sub(window - 1);
            *a = t.block_entry(i, j - b, b);
        }
        for b in 0..k {
            let col = &t.values[b * rows + i * window..b * rows + (i + 1) * window];
            for ((acc, v), a) in series[b..b + window].iter_mut().zip(col).zip(&anchor[b..b + window]) {
                *acc += v - a;
            }
        }
        let span = window.min(k);
        for (j, v) in series.iter_mut().enumerate() {
            let n = (j + 1).min(span).min(m - j);
            *v = anchor[j] + *v / n as f64;
        }
    }
    TemporalCoefficients::new(r, m, values).expect("averages of finite values are finite")
}

/// Intermediate and final products of a projected MSSA run.
#[derive(Debug, Clone)]
pub struct PmssaOutput {
    /// Leading spatial modes and singular values of the input.
    pub factors: SvdFactors,
    /// Projected coefficients `U_r^T X`.
    pub projected: TemporalCoefficients,
    /// Coefficients after trajectory truncation and diagonal averaging.
    pub denoised: TemporalCoefficients,
    pub window: usize,
    pub rank_mssa: usize,
}

impl PmssaOutput {
    /// `U_r` times the denoised coefficients.
    pub fn reconstruct(&self) -> Result<SnapshotMatrix> {
        reconstruct(self.factors.modes(), &self.denoised)
    }
}

fn check_rank_mssa(r: usize, window: usize, m: usize, rank_mssa: usize) -> Result<()> {
    let max = (r * window).min(m - window + 1);
    if rank_mssa == 0 || rank_mssa > max {
        return Err(Error::argument(
            "rank_mssa",
            format!("must be in 1..={max} for r = {r}, L = {window}, m = {m}; got {rank_mssa}"),
        ));
    }
    Ok(())
}

/// Runs embedding, truncation and diagonal averaging on already computed
/// factors. `rank_mssa` defaults to the factor rank.
pub fn pmssa_from_factors(factors: SvdFactors, window: usize, rank_mssa: Option<usize>) -> Result<PmssaOutput> {
    let (r, m) = (factors.rank(), factors.m());
    check_window(m, window)?;
    let rank_mssa = rank_mssa.unwrap_or(r);
    check_rank_mssa(r, window, m, rank_mssa)?;
    let projected = project(&factors);
    let trajectory = embed(&projected, window)?;
    let truncated = truncate_trajectory(&trajectory, rank_mssa)?;
    let denoised = diagonal_average(&truncated);
    Ok(PmssaOutput {
        factors,
        projected,
        denoised,
        window,
        rank_mssa,
    })
}

/// Projected MSSA keeping every intermediate. Parameters are validated
/// before the SVD is computed.
pub fn pmssa(x: &SnapshotMatrix, r: usize, window: usize, rank_mssa: Option<usize>) -> Result<PmssaOutput> {
    let max_r = x.d().min(x.m());
    if r == 0 || r > max_r {
        return Err(Error::argument("r", format!("must be in 1..={max_r}, got {r}")));
    }
    check_window(x.m(), window)?;
    check_rank_mssa(r, window, x.m(), rank_mssa.unwrap_or(r))?;
    pmssa_from_factors(compute_svd(x, r)?, window, rank_mssa)
}

/// Projected-MSSA denoised snapshots, with the input's grid and `dt`.
pub fn pmssa_denoise(x: &SnapshotMatrix, r: usize, window: usize, rank_mssa: Option<usize>) -> Result<SnapshotMatrix> {
    Ok(pmssa(x, r, window, rank_mssa)?.reconstruct()?.with_metadata_of(x))
}
