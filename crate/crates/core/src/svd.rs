//! Truncated SVD of a snapshot matrix, projection onto the leading spatial
//! modes, and reconstruction from temporal coefficients.
//!
//! No mean is subtracted: the mean field shows up as the first mode.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::SnapshotMatrix;

/// Above this many entries `compute_svd` switches to a randomized range finder.
pub const RANDOMIZED_THRESHOLD: usize = 100_000_000;

const OVERSAMPLING: usize = 10;
const POWER_ITERATIONS: usize = 4;
const SKETCH_SEED: u64 = 0x5eed_5eed;

/// `d x r` matrix of orthonormal spatial modes, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialModes {
    d: usize,
    r: usize,
    values: Vec<f64>,
}

impl SpatialModes {
    /// `values` holds the `r` modes one after another.
    ///
    /// Orthonormality is assumed, not checked.
    pub fn new(d: usize, r: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 || r == 0 || values.len() != d * r {
            return Err(Error::Validation(format!(
                "spatial modes need d*r = {d}*{r} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("spatial modes contain non-finite values".into()));
        }
        Ok(Self { d, r, values })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// Mode `i` (0-based) as a length-`d` slice.
    pub fn mode(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    /// Column-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Keeps the first `r` modes.
    pub fn truncate(&self, r: usize) -> Result<Self> {
        if r == 0 || r > self.r {
            return Err(Error::argument("r", format!("must be in 1..={}, got {r}", self.r)));
        }
        Self::new(self.d, r, self.values[..self.d * r].to_vec())
    }

    /// Coefficients `U^T x` of every snapshot of `x`.
    pub fn coefficients_of(&self, x: &SnapshotMatrix) -> Result<TemporalCoefficients> {
        if x.d() != self.d {
            return Err(Error::argument(
                "x",
                format!("matrix has d = {} but the modes have d = {}", x.d(), self.d),
            ));
        }
        let u = linalg::col_major(&self.values, self.d, self.r);
        let xm = linalg::col_major(x.values(), x.d(), x.m());
        // (r x m) row-major == (m x r) column-major = X^T U
        let mut out = vec![0.0; self.r * x.m()];
        linalg::matmul(linalg::col_major_mut(&mut out, x.m(), self.r), xm.transpose(), u);
        TemporalCoefficients::new(self.r, x.m(), out)
    }

    pub(crate) fn as_mat(&self) -> faer::MatRef<'_, f64> {
        linalg::col_major(&self.values, self.d, self.r)
    }
}

/// `r x m` expansion coefficients, row `i` being the series of mode `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalCoefficients {
    r: usize,
    m: usize,
    values: Vec<f64>,
}

impl TemporalCoefficients {
    /// `values` is row-major: series 0, then series 1, ...
    pub fn new(r: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if r == 0 || m == 0 || values.len() != r * m {
            return Err(Error::Validation(format!(
                "coefficients need r*m = {r}*{m} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("coefficients contain non-finite values".into()));
        }
        Ok(Self { r, m, values })
    }

    pub fn from_series<S: AsRef<[f64]>>(series: &[S]) -> Result<Self> {
        let m = series.first().map_or(0, |s| s.as_ref().len());
        let mut values = Vec::with_capacity(series.len() * m);
        for s in series {
            if s.as_ref().len() != m {
                return Err(Error::Validation("coefficient series differ in length".into()));
            }
            values.extend_from_slice(s.as_ref());
        }
        Self::new(series.len(), m, values)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Series `i` (0-based).
    pub fn series(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Transposed view as a matrix with one "snapshot" per time step, i.e.
    /// `r` values per row; used for CSV export.
    pub fn to_time_major(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.r * self.m];
        for i in 0..self.r {
            for (j, v) in self.series(i).iter().enumerate() {
                out[j * self.r + i] = *v;
            }
        }
        out
    }
}

/// Leading singular triplets `U_r`, `S_r`, `V_r` of a snapshot matrix.
///
/// For each left vector the entry of largest magnitude (lowest index on
/// ties) is non-negative; the matching right vector carries the sign.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    u: SpatialModes,
    s: Vec<f64>,
    m: usize,
    v: Vec<f64>,
    numerical_rank: usize,
    randomized: bool,
}

impl SvdFactors {
    /// Assembles factors from raw parts, applying the sign convention.
    pub fn from_parts(u: SpatialModes, s: Vec<f64>, m: usize, v: Vec<f64>) -> Result<Self> {
        let r = u.rank();
        if s.len() != r || v.len() != m * r {
            return Err(Error::Validation(format!(
                "inconsistent factor shapes: r = {r}, |S| = {}, |V| = {} (m = {m})",
                s.len(),
                v.len()
            )));
        }
        if s.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || s.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Validation(
                "singular values must be finite, non-negative and descending".into(),
            ));
        }
        let numerical_rank = count_above_tolerance(&s, u.d().max(m));
        let mut f = Self {
            u,
            s,
            m,
            v,
            numerical_rank,
            randomized: false,
        };
        f.fix_signs();
        Ok(f)
    }

    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn d(&self) -> usize {
        self.u.d()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modes(&self) -> &SpatialModes {
        &self.u
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.s
    }

    /// Right singular vector `i` (length `m`).
    pub fn right_vector(&self, i: usize) -> &[f64] {
        &self.v[i * self.m..(i + 1) * self.m]
    }

    /// Column-major `m x r` right factor.
    pub fn right_values(&self) -> &[f64] {
        &self.v
    }

    /// Number of singular values above `max(d, m) * eps * sigma_1`.
    ///
    /// Counted over every singular value the factorization produced: the full
    /// spectrum for the direct path, only the sketched ones for the
    /// randomized path (see [`SvdFactors::is_randomized`]).
    pub fn numerical_rank(&self) -> usize {
        self.numerical_rank
    }

    pub fn is_randomized(&self) -> bool {
        self.randomized
    }

    /// Keeps the leading `r` triplets.
    pub fn truncate(&self, r: usize) -> Result<Self> {
        if r == 0 || r > self.rank() {
            return Err(Error::argument("r", format!("must be in 1..={}, got {r}", self.rank())));
        }
        Ok(Self {
            u: self.u.truncate(r)?,
            s: self.s[..r].to_vec(),
            m: self.m,
            v: self.v[..self.m * r].to_vec(),
            numerical_rank: self.numerical_rank,
            randomized: self.randomized,
        })
    }

    fn fix_signs(&mut self) {
        let d = self.u.d;
        let m = self.m;
        for i in 0..self.rank() {
            let col = &mut self.u.values[i * d..(i + 1) * d];
            let mut best = 0;
            for (k, v) in col.iter().enumerate() {
                if v.abs() > col[best].abs() {
                    best = k;
                }
            }
            if col[best] < 0.0 {
                col.iter_mut().for_each(|v| *v = -*v);
                self.v[i * m..(i + 1) * m].iter_mut().for_each(|v| *v = -*v);
            }
        }
    }
}

fn count_above_tolerance(s: &[f64], max_dim: usize) -> usize {
    let Some(&s1) = s.first() else { return 0 };
    let tol = max_dim as f64 * f64::EPSILON * s1;
    s.iter().filter(|&&v| v > tol).count()
}

fn check_rank(x: &SnapshotMatrix, r: usize) -> Result<()> {
    let max = x.d().min(x.m());
    if r == 0 || r > max {
        return Err(Error::argument(
            "r",
            format!("must be in 1..={max} for a {}x{} matrix, got {r}", x.d(), x.m()),
        ));
    }
    Ok(())
}

/// Best rank-`r` factorization of `x`.
///
/// Matrices up to [`RANDOMIZED_THRESHOLD`] entries use a direct thin SVD;
/// larger ones use a seeded randomized range finder with
/// oversampling and power iterations.
pub fn compute_svd(x: &SnapshotMatrix, r: usize) -> Result<SvdFactors> {
    check_rank(x, r)?;
    if x.d() * x.m() > RANDOMIZED_THRESHOLD {
        return compute_svd_randomized(x, r);
    }
    let a = linalg::col_major(x.values(), x.d(), x.m());
    let svd = linalg::thin_svd(a)?;
    let numerical_rank = count_above_tolerance(&svd.s, x.d().max(x.m()));
    let u = SpatialModes::new(x.d(), r, linalg::leading_columns(svd.u.as_ref(), r))?;
    let v = linalg::leading_columns(svd.v.as_ref(), r);
    let mut f = SvdFactors::from_parts(u, svd.s[..r].to_vec(), x.m(), v)?;
    f.numerical_rank = numerical_rank;
    Ok(f)
}

/// Randomized truncated SVD (Gaussian sketch with `r + 10` columns, four
/// power iterations, fixed sketch seed). Used by [`compute_svd`] for very
/// large inputs; exposed for callers that want it at any size.
pub fn compute_svd_randomized(x: &SnapshotMatrix, r: usize) -> Result<SvdFactors> {
    check_rank(x, r)?;
    let (d, m) = (x.d(), x.m());
    let k = (r + OVERSAMPLING).min(d.min(m));
    let a = linalg::col_major(x.values(), d, m);

    let mut rng = ChaCha20Rng::seed_from_u64(SKETCH_SEED);
    let omega = Mat::from_fn(m, k, |_, _| StandardNormal.sample(&mut rng));
    let mut q = linalg::orthonormal_basis(linalg::mul(a, omega.as_ref()).as_ref());
    for _ in 0..POWER_ITERATIONS {
        let z = linalg::orthonormal_basis(linalg::mul(a.transpose(), q.as_ref()).as_ref());
        q = linalg::orthonormal_basis(linalg::mul(a, z.as_ref()).as_ref());
    }
    // B = Q^T A is k x m; its SVD rotates Q into the left singular vectors.
    let b = linalg::mul(q.as_ref().transpose(), a);
    let small = linalg::thin_svd(b.as_ref())?;
    let u_full = linalg::mul(q.as_ref(), small.u.as_ref());

    let u = SpatialModes::new(d, r, linalg::leading_columns(u_full.as_ref(), r))?;
    let v = linalg::leading_columns(small.v.as_ref(), r);
    let mut f = SvdFactors::from_parts(u, small.s[..r].to_vec(), m, v)?;
    f.numerical_rank = count_above_tolerance(&small.s, d.max(m));
    f.randomized = true;
    Ok(f)
}

/// Temporal coefficients `S_r V_r^T` of the factored matrix.
pub fn project(factors: &SvdFactors) -> TemporalCoefficients {
    let m = factors.m();
    let mut values = Vec::with_capacity(factors.rank() * m);
    for (i, &s) in factors.singular_values().iter().enumerate() {
        values.extend(factors.right_vector(i).iter().map(|v| s * v));
    }
    TemporalCoefficients {
        r: factors.rank(),
        m,
        values,
    }
}

/// Snapshots `U_r * coeffs`.
pub fn reconstruct(modes: &SpatialModes, coeffs: &TemporalCoefficients) -> Result<SnapshotMatrix> {
    if coeffs.r() != modes.rank() {
        return Err(Error::argument(
            "coeffs",
            format!("{} coefficient series for {} spatial modes", coeffs.r(), modes.rank()),
        ));
    }
    let (d, m) = (modes.d(), coeffs.m());
    let mut out = vec![0.0; d * m];
    linalg::matmul(
        linalg::col_major_mut(&mut out, d, m),
        modes.as_mat(),
        linalg::row_major(coeffs.values(), coeffs.r(), m),
    );
    SnapshotMatrix::new(d, m, out)
}

/// Rank-`r` truncated-SVD reconstruction `U_r S_r V_r^T`, keeping the
/// input's grid and sample interval.
pub fn tsvd_denoise(x: &SnapshotMatrix, r: usize) -> Result<SnapshotMatrix> {
    let factors = compute_svd(x, r)?;
    Ok(reconstruct(factors.modes(), &project(&factors))?.with_metadata_of(x))
}
