//! The snapshot-matrix data model.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Pixel layout of a 2-D field: `ny` rows of `nx` columns, row-major.
///
/// Pixel index is `row * nx + col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::argument(
                "grid",
                format!("grid dimensions must be positive, got {nx}x{ny}"),
            ));
        }
        nx.checked_mul(ny)
            .ok_or_else(|| Error::argument("grid", "grid size overflows usize"))?;
        Ok(Self { nx, ny })
    }

    /// Number of columns.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Number of rows.
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Pixel index of `(row, col)`; `None` when outside the grid.
    pub fn index(&self, row: usize, col: usize) -> Option<usize> {
        (row < self.ny && col < self.nx).then(|| row * self.nx + col)
    }

    /// Inverse of [`GridSpec::index`].
    pub fn position(&self, index: usize) -> Option<(usize, usize)> {
        (index < self.len()).then(|| (index / self.nx, index % self.nx))
    }
}

/// A `d x m` field dataset, one column (snapshot) per time instant.
///
/// Values are stored snapshot-major: snapshot `j` occupies
/// `values[j * d .. (j + 1) * d]`. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    d: usize,
    m: usize,
    values: Vec<f64>,
    grid: Option<GridSpec>,
    dt: f64,
}

impl SnapshotMatrix {
    /// Builds a matrix from snapshot-major values.
    pub fn new(d: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(Error::Validation(format!(
                "matrix dimensions must be positive, got {d}x{m}"
            )));
        }
        let expected = d
            .checked_mul(m)
            .ok_or_else(|| Error::Validation(format!("matrix size {d}x{m} overflows usize")))?;
        if values.len() != expected {
            return Err(Error::Validation(format!(
                "expected {expected} values for a {d}x{m} matrix, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite value {} at pixel {}, snapshot {}",
                values[pos],
                pos % d,
                pos / d
            )));
        }
        Ok(Self {
            d,
            m,
            values,
            grid: None,
            dt: 0.0,
        })
    }

    pub fn zeros(d: usize, m: usize) -> Result<Self> {
        Self::new(d, m, vec![0.0; d.saturating_mul(m)])
    }

    /// Builds a matrix by evaluating `f(pixel, snapshot)`.
    pub fn from_fn(d: usize, m: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(d.saturating_mul(m));
        for j in 0..m {
            for p in 0..d {
                values.push(f(p, j));
            }
        }
        Self::new(d, m, values)
    }

    /// Builds a matrix from a list of equally sized snapshots.
    pub fn from_snapshots<S: AsRef<[f64]>>(snapshots: &[S]) -> Result<Self> {
        let m = snapshots.len();
        let d = snapshots.first().map_or(0, |s| s.as_ref().len());
        let mut values = Vec::with_capacity(d * m);
        for (j, s) in snapshots.iter().enumerate() {
            let s = s.as_ref();
            if s.len() != d {
                return Err(Error::Validation(format!(
                    "snapshot {j} has {} values, expected {d}",
                    s.len()
                )));
            }
            values.extend_from_slice(s);
        }
        Self::new(d, m, values)
    }

    /// Attaches a grid; `nx * ny` must equal `d`.
    pub fn with_grid(mut self, grid: GridSpec) -> Result<Self> {
        if grid.len() != self.d {
            return Err(Error::Validation(format!(
                "grid {}x{} has {} pixels but the matrix has d = {}",
                grid.nx,
                grid.ny,
                grid.len(),
                self.d
            )));
        }
        self.grid = Some(grid);
        Ok(self)
    }

    /// Sets the sample interval in seconds (0 means unknown).
    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(Error::Validation(format!(
                "dt must be finite and non-negative, got {dt}"
            )));
        }
        self.dt = dt;
        Ok(self)
    }

    /// Copies grid and `dt` from `other` (the grid only if `d` agrees).
    pub fn with_metadata_of(mut self, other: &SnapshotMatrix) -> Self {
        if self.d == other.d {
            self.grid = other.grid;
        }
        self.dt = other.dt;
        self
    }

    pub fn without_grid(mut self) -> Self {
        self.grid = None;
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn grid(&self) -> Option<GridSpec> {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Snapshot-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, pixel: usize, snapshot: usize) -> f64 {
        self.values[snapshot * self.d + pixel]
    }

    pub fn snapshot(&self, j: usize) -> &[f64] {
        &self.values[j * self.d..(j + 1) * self.d]
    }

    pub fn snapshots(&self) -> core::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.d)
    }

    /// Time series of one pixel.
    pub fn pixel_series(&self, pixel: usize) -> Vec<f64> {
        self.values.iter().skip(pixel).step_by(self.d).copied().collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm2(self.values.iter().copied())
    }

    /// Per-pixel mean over time.
    pub fn temporal_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.d];
        for snap in self.snapshots() {
            for (acc, v) in mean.iter_mut().zip(snap) {
                *acc += v;
            }
        }
        let inv = 1.0 / self.m as f64;
        mean.iter_mut().for_each(|v| *v *= inv);
        mean
    }

    /// Adds `scale * field` to every snapshot.
    pub fn add_field(&self, field: &[f64], scale: f64) -> Result<Self> {
        if field.len() != self.d {
            return Err(Error::argument(
                "field",
                format!("length {} does not match d = {}", field.len(), self.d),
            ));
        }
        let mut out = self.clone();
        for snap in out.values.chunks_exact_mut(self.d) {
            for (v, f) in snap.iter_mut().zip(field) {
                *v += scale * f;
            }
        }
        out.check_finite()?;
        Ok(out)
    }

    /// Bitwise equality of values and metadata.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.d == other.d
            && self.m == other.m
            && self.grid == other.grid
            && self.dt.to_bits() == other.dt.to_bits()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numeric("operation produced non-finite values".into()))
        }
    }
}

/// Averages non-overlapping `factor x factor` pixel blocks of every snapshot.
///
/// The output grid is `(nx / factor) x (ny / factor)`; `dt` is unchanged.
pub fn bin_spatial(matrix: &SnapshotMatrix, factor: usize) -> Result<SnapshotMatrix> {
    let grid = matrix
        .grid()
        .ok_or_else(|| Error::Precondition("spatial binning needs a grid".into()))?;
    if factor == 0 || grid.nx % factor != 0 || grid.ny % factor != 0 {
        return Err(Error::argument(
            "factor",
            format!(
                "factor {factor} must be positive and divide the {}x{} grid",
                grid.nx, grid.ny
            ),
        ));
    }
    if factor == 1 {
        return Ok(matrix.clone());
    }
    let out_grid = GridSpec::new(grid.nx / factor, grid.ny / factor)?;
    let d_out = out_grid.len();
    let inv = 1.0 / (factor * factor) as f64;
    let mut values = vec![0.0; d_out * matrix.m()];
    for (src, dst) in matrix.snapshots().zip(values.chunks_exact_mut(d_out)) {
        for row in 0..grid.ny {
            let out_row = row / factor;
            let src_row = &src[row * grid.nx..(row + 1) * grid.nx];
            let dst_row = &mut dst[out_row * out_grid.nx..(out_row + 1) * out_grid.nx];
            for (col, v) in src_row.iter().enumerate() {
                dst_row[col / factor] += v;
            }
        }
        dst.iter_mut().for_each(|v| *v *= inv);
    }
    SnapshotMatrix::new(d_out, matrix.m(), values)?
        .with_grid(out_grid)?
        .with_dt(matrix.dt())
}
