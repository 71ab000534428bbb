//! Parameter sweeps over truncation rank and window length.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use pmssa_core::{compute_svd, pmssa_from_factors, project, reconstruct, relative_error, SnapshotMatrix};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Tsvd,
    Pmssa,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Tsvd => "tsvd",
            Method::Pmssa => "pmssa",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tsvd" => Ok(Method::Tsvd),
            "pmssa" => Ok(Method::Pmssa),
            other => Err(Error::argument(
                "method",
                format!("expected tsvd or pmssa, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: Method,
    pub sigma: f64,
    pub r: usize,
    /// Window length; `None` for TSVD.
    pub window: Option<usize>,
    pub relative_error: f64,
    pub wall_time_s: f64,
}

impl ReportRow {
    fn key(&self) -> (Method, u64, usize, Option<usize>) {
        (self.method, self.sigma.to_bits(), self.r, self.window)
    }
}

/// Sweep results, kept sorted by `(method, sigma, r, L)` with one row per key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DenoiseReport {
    rows: Vec<ReportRow>,
}

impl DenoiseReport {
    pub const CSV_HEADER: &'static str = "method,sigma,r,L,relative_error,wall_time_s";

    /// Later rows replace earlier ones with the same key.
    pub fn from_rows(rows: impl IntoIterator<Item = ReportRow>) -> Self {
        let mut report = Self::default();
        for row in rows {
            report.insert(row);
        }
        report
    }

    pub fn insert(&mut self, row: ReportRow) {
        let cmp = |a: &ReportRow| {
            a.method
                .cmp(&row.method)
                .then(a.sigma.total_cmp(&row.sigma))
                .then(a.r.cmp(&row.r))
                .then(a.window.cmp(&row.window))
        };
        match self.rows.binary_search_by(cmp) {
            Ok(i) => self.rows[i] = row,
            Err(i) => self.rows.insert(i, row),
        }
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, method: Method, r: usize, window: Option<usize>) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|row| row.method == method && row.r == r && row.window == window)
    }

    /// `max / min` of the error over all rows of `method` with window `window`.
    pub fn spread(&self, method: Method, window: Option<usize>) -> Option<f64> {
        let errs: Vec<f64> = self
            .rows
            .iter()
            .filter(|row| row.method == method && row.window == window)
            .map(|row| row.relative_error)
            .collect();
        let max = errs.iter().copied().reduce(f64::max)?;
        let min = errs.iter().copied().reduce(f64::min)?;
        Some(max / min)
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for row in &self.rows {
            let window = row.window.map(|l| l.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{:.16e},{},{},{:.16e},{:.16e}",
                row.method, row.sigma, row.r, window, row.relative_error, row.wall_time_s
            )?;
        }
        Ok(())
    }

    /// Equality ignoring wall times.
    pub fn same_errors(&self, other: &Self) -> bool {
        self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.key() == b.key() && a.relative_error.to_bits() == b.relative_error.to_bits())
    }
}

/// Root-mean-square of `noisy - clean`, the noise level recorded in reports.
pub fn estimate_sigma(clean: &SnapshotMatrix, noisy: &SnapshotMatrix) -> Result<f64> {
    check_shapes(clean, noisy)?;
    let n = clean.values().len() as f64;
    let ss: f64 = noisy
        .values()
        .iter()
        .zip(clean.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((ss / n).sqrt())
}

fn check_shapes(clean: &SnapshotMatrix, noisy: &SnapshotMatrix) -> Result<()> {
    if clean.d() != noisy.d() || clean.m() != noisy.m() {
        return Err(Error::argument(
            "clean",
            format!(
                "clean is {}x{} but noisy is {}x{}",
                clean.d(),
                clean.m(),
                noisy.d(),
                noisy.m()
            ),
        ));
    }
    Ok(())
}

/// Denoises `noisy` for every combination of rank, window and method and
/// scores each result against `clean`.
///
/// One SVD at the largest rank is shared by all combinations; each row's
/// wall time includes that factorization. Rows do not depend on the order
/// of the input lists.
pub fn rank_sweep(
    clean: &SnapshotMatrix,
    noisy: &SnapshotMatrix,
    ranks: &[usize],
    windows: &[usize],
    methods: &[Method],
) -> Result<DenoiseReport> {
    check_shapes(clean, noisy)?;
    let mut ranks = ranks.to_vec();
    ranks.sort_unstable();
    ranks.dedup();
    let mut windows = windows.to_vec();
    windows.sort_unstable();
    windows.dedup();
    let mut methods = methods.to_vec();
    methods.sort_unstable();
    methods.dedup();
    if ranks.is_empty() {
        return Err(Error::argument("ranks", "list is empty"));
    }
    if methods.is_empty() {
        return Err(Error::argument("methods", "list is empty"));
    }
    let do_pmssa = methods.contains(&Method::Pmssa);
    if do_pmssa && windows.is_empty() {
        return Err(Error::argument("windows", "list is empty"));
    }

    let sigma = estimate_sigma(clean, noisy)?;
    let max_r = *ranks.last().unwrap();
    let started = Instant::now();
    let full = compute_svd(noisy, max_r)?;
    let svd_time = started.elapsed().as_secs_f64();

    let mut report = DenoiseReport::default();
    for &r in &ranks {
        let factors = full.truncate(r)?;
        if methods.contains(&Method::Tsvd) {
            let t = Instant::now();
            let rec = reconstruct(factors.modes(), &project(&factors))?;
            let err = relative_error(&rec, clean)?;
            report.insert(ReportRow {
                method: Method::Tsvd,
                sigma,
                r,
                window: None,
                relative_error: err,
                wall_time_s: svd_time + t.elapsed().as_secs_f64(),
            });
        }
        if do_pmssa {
            for &window in &windows {
                let t = Instant::now();
                let rec = pmssa_from_factors(factors.clone(), window, None)?.reconstruct()?;
                let err = relative_error(&rec, clean)?;
                report.insert(ReportRow {
                    method: Method::Pmssa,
                    sigma,
                    r,
                    window: Some(window),
                    relative_error: err,
                    wall_time_s: svd_time + t.elapsed().as_secs_f64(),
                });
            }
        }
    }
    Ok(report)
}
