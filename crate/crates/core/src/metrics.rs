//! Reconstruction error, point probes and phase-plot data.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::SnapshotMatrix;
use crate::svd::TemporalCoefficients;

/// `||rec - reference||_F / ||reference||_F`.
pub fn relative_error(rec: &SnapshotMatrix, reference: &SnapshotMatrix) -> Result<f64> {
    if rec.d() != reference.d() || rec.m() != reference.m() {
        return Err(Error::argument(
            "rec",
            format!(
                "shape {}x{} does not match reference {}x{}",
                rec.d(),
                rec.m(),
                reference.d(),
                reference.m()
            ),
        ));
    }
    let denom = reference.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::argument("reference", "reference has zero Frobenius norm"));
    }
    let num = math::norm2(rec.values().iter().zip(reference.values()).map(|(a, b)| a - b));
    Ok(num / denom)
}

/// Axis-aligned rectangle onto which a grid's nodes are mapped: column 0
/// sits at `x_min`, column `nx - 1` at `x_max`, row 0 at `y_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Domain {
    /// `[0, 10] x [-5, 5]`, the wake window of the surrogate.
    pub const WAKE: Domain = Domain {
        x_min: 0.0,
        x_max: 10.0,
        y_min: -5.0,
        y_max: 5.0,
    };

    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let ok = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) && x_min < x_max && y_min < y_max;
        if !ok {
            return Err(Error::argument(
                "domain",
                format!("[{x_min}, {x_max}] x [{y_min}, {y_max}] is not a proper rectangle"),
            ));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    /// Coordinates of grid node `(row, col)`.
    pub fn node(&self, nx: usize, ny: usize, row: usize, col: usize) -> (f64, f64) {
        let along = |lo: f64, hi: f64, n: usize, i: usize| {
            if n > 1 {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            } else {
                lo
            }
        };
        (
            along(self.x_min, self.x_max, nx, col),
            along(self.y_min, self.y_max, ny, row),
        )
    }

    /// Nearest node `(row, col)` to `(x, y)`, rounding halves up.
    pub fn nearest_node(&self, nx: usize, ny: usize, x: f64, y: f64) -> Result<(usize, usize)> {
        if !(x.is_finite() && y.is_finite() && self.contains(x, y)) {
            return Err(Error::argument(
                "probe",
                format!(
                    "({x}, {y}) lies outside [{}, {}] x [{}, {}]",
                    self.x_min, self.x_max, self.y_min, self.y_max
                ),
            ));
        }
        let snap = |v: f64, lo: f64, hi: f64, n: usize| -> usize {
            if n < 2 {
                return 0;
            }
            let pos = (v - lo) / (hi - lo) * (n - 1) as f64;
            (math::floor(pos + 0.5) as usize).min(n - 1)
        };
        Ok((snap(y, self.y_min, self.y_max, ny), snap(x, self.x_min, self.x_max, nx)))
    }
}

/// Time series of the pixel nearest to `(x, y)`.
pub fn probe_signal(matrix: &SnapshotMatrix, x: f64, y: f64, domain: &Domain) -> Result<Vec<f64>> {
    let grid = matrix
        .grid()
        .ok_or_else(|| Error::Precondition("probing needs a grid".into()))?;
    let (row, col) = domain.nearest_node(grid.nx(), grid.ny(), x, y)?;
    let pixel = grid.index(row, col).expect("nearest node lies on the grid");
    Ok(matrix.pixel_series(pixel))
}

/// Pairs `(c_a(t), c_b(t))` in time order for a phase plot of two modes.
///
/// Mode numbers are 1-based, as in `u_1 .. u_r`.
pub fn phase_export(coeffs: &TemporalCoefficients, mode_a: usize, mode_b: usize) -> Result<Vec<(f64, f64)>> {
    for (name, mode) in [("mode_a", mode_a), ("mode_b", mode_b)] {
        if mode == 0 || mode > coeffs.r() {
            return Err(Error::argument(
                name,
                format!("must be in 1..={}, got {mode}", coeffs.r()),
            ));
        }
    }
    let a = coeffs.series(mode_a - 1);
    let b = coeffs.series(mode_b - 1);
    Ok(a.iter().copied().zip(b.iter().copied()).collect())
}

/// Mean of `|p(t+1) - 2 p(t) + p(t-1)|^2` along a planar trajectory.
///
/// Small values mean a smooth trajectory. Returns 0 for fewer than three
/// points.
pub fn mean_squared_second_difference(points: &[(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let sum: f64 = points
        .windows(3)
        .map(|w| {
            let dx = w[2].0 - 2.0 * w[1].0 + w[0].0;
            let dy = w[2].1 - 2.0 * w[1].1 + w[0].1;
            dx * dx + dy * dy
        })
        .sum();
    sum / (points.len() - 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::GridSpec;
    use alloc::vec;

    #[test]
    fn relative_error_cases() {
        let x0 = SnapshotMatrix::new(2, 2, vec![1.0, -2.0, 3.0, 0.5]).unwrap();
        assert_eq!(relative_error(&x0, &x0).unwrap(), 0.0);
        let zero = SnapshotMatrix::zeros(2, 2).unwrap();
        assert!((relative_error(&zero, &x0).unwrap() - 1.0).abs() < 1e-15);
        let twice = SnapshotMatrix::new(2, 2, x0.values().iter().map(|v| 2.0 * v).collect()).unwrap();
        assert!((relative_error(&twice, &x0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn relative_error_errors() {
        let a = SnapshotMatrix::zeros(2, 2).unwrap();
        let b = SnapshotMatrix::zeros(2, 3).unwrap();
        assert!(relative_error(&b, &a).is_err());
        assert!(relative_error(&a, &a).is_err());
    }

    #[test]
    fn probe_index_arithmetic() {
        let (row, col) = Domain::WAKE.nearest_node(101, 101, 3.0, 0.5).unwrap();
        assert_eq!((row, col), (55, 30));
        assert_eq!(Domain::WAKE.nearest_node(101, 101, 10.0, -5.0).unwrap(), (0, 100));
        // halves round up: x = 0.05 sits midway between columns 0 and 1
        assert_eq!(Domain::WAKE.nearest_node(101, 101, 0.05, 0.0).unwrap().1, 1);
        assert!(Domain::WAKE.nearest_node(101, 101, -0.1, 0.0).is_err());
        assert!(Domain::WAKE.nearest_node(101, 101, 1.0, 5.5).is_err());
    }

    #[test]
    fn probe_exact_node_and_constant() {
        let grid = GridSpec::new(3, 3).unwrap();
        let x = SnapshotMatrix::from_fn(9, 4, |p, j| (10 * p + j) as f64)
            .unwrap()
            .with_grid(grid)
            .unwrap();
        let dom = Domain::new(0.0, 2.0, 0.0, 2.0).unwrap();
        assert_eq!(probe_signal(&x, 1.0, 2.0, &dom).unwrap(), x.pixel_series(7));
        let c = SnapshotMatrix::from_fn(9, 4, |_, _| 3.5)
            .unwrap()
            .with_grid(grid)
            .unwrap();
        assert!(probe_signal(&c, 0.3, 1.7, &dom).unwrap().iter().all(|&v| v == 3.5));
        let no_grid = SnapshotMatrix::zeros(9, 4).unwrap();
        assert!(probe_signal(&no_grid, 0.0, 0.0, &dom).is_err());
    }

    #[test]
    fn phase_pairs() {
        let c = TemporalCoefficients::from_series(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(
            phase_export(&c, 2, 1).unwrap(),
            vec![(4.0, 1.0), (5.0, 2.0), (6.0, 3.0)]
        );
        assert!(phase_export(&c, 1, 1).unwrap().iter().all(|(a, b)| a == b));
        assert!(phase_export(&c, 0, 1).is_err());
        assert!(phase_export(&c, 1, 3).is_err());
    }

    #[test]
    fn quadrature_pair_lies_on_circle() {
        let n = 500;
        let w = 2.0 * core::f64::consts::PI / 37.0;
        let a: Vec<f64> = (0..n).map(|t| 2.0 * math::cos(w * t as f64)).collect();
        let b: Vec<f64> = (0..n).map(|t| 2.0 * math::sin(w * t as f64)).collect();
        let c = TemporalCoefficients::from_series(&[a, b]).unwrap();
        for (x, y) in phase_export(&c, 1, 2).unwrap() {
            assert!((math::sqrt(x * x + y * y) - 2.0).abs() < 1e-9 * 2.0);
        }
    }

    #[test]
    fn second_difference_of_line_is_zero() {
        let line: Vec<(f64, f64)> = (0..10).map(|t| (t as f64, 2.0 * t as f64 - 1.0)).collect();
        assert!(mean_squared_second_difference(&line) < 1e-24);
        let zigzag = [(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)];
        assert_eq!(mean_squared_second_difference(&zigzag), 4.0);
    }
}
