//! Matrix files.
//!
//! Binary layout (`.pmx`), all little-endian:
//!
//! | offset | size | field                                 |
//! |--------|------|---------------------------------------|
//! | 0      | 8    | magic `PMSSAMAT`                      |
//! | 8      | 4    | u32 version, currently 1              |
//! | 12     | 4    | u32 flags, currently 0                |
//! | 16     | 8    | u64 `d`                               |
//! | 24     | 8    | u64 `m`                               |
//! | 32     | 8    | u64 `nx` (0 without a grid)           |
//! | 40     | 8    | u64 `ny` (0 without a grid)           |
//! | 48     | 8    | f64 `dt` (0 when unknown)             |
//! | 56     | 8 dm | f64 values, one snapshot after another|
//!
//! CSV holds one snapshot per line, `d` comma-separated values, no header.
//! Values are written in shortest round-trip form, so CSV is lossless too.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use pmssa_core::{GridSpec, SnapshotMatrix, SpatialModes, SvdFactors, TemporalCoefficients};
use tempfile::NamedTempFile;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PMSSAMAT";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 56;
/// Widest matrix accepted in CSV form.
pub const CSV_MAX_D: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Binary,
    Csv,
}

impl Format {
    /// CSV for a `.csv` extension, binary otherwise.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Binary,
        }
    }
}

/// Output files written to temporaries and moved into place together by
/// [`OutputBatch::commit`]. Dropping an uncommitted batch removes the
/// temporaries.
#[derive(Debug, Default)]
pub struct OutputBatch {
    staged: Vec<(NamedTempFile, PathBuf)>,
}

impl OutputBatch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&mut self, path: &Path, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let tmp = NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
        {
            let mut w = BufWriter::new(tmp.as_file());
            write(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))?;
        }
        self.staged.push((tmp, path.to_path_buf()));
        Ok(())
    }

    pub fn stage_matrix(&mut self, matrix: &SnapshotMatrix, path: &Path, format: Format) -> Result<()> {
        if format == Format::Csv {
            check_csv_width(matrix.d())?;
        }
        self.stage(path, |w| match format {
            Format::Binary => write_binary(matrix, w),
            Format::Csv => write_csv(matrix, w),
        })
    }

    pub fn stage_factors(&mut self, factors: &SvdFactors, stem: &Path) -> Result<()> {
        let [u, s, v] = factor_paths(stem);
        let (d, m, r) = (factors.d(), factors.m(), factors.rank());
        let u_mat = SnapshotMatrix::new(d, r, factors.modes().values().to_vec())?;
        let s_mat = SnapshotMatrix::new(r, 1, factors.singular_values().to_vec())?;
        let v_mat = SnapshotMatrix::new(m, r, factors.right_values().to_vec())?;
        self.stage_matrix(&u_mat, &u, Format::Binary)?;
        self.stage_matrix(&s_mat, &s, Format::Binary)?;
        self.stage_matrix(&v_mat, &v, Format::Binary)
    }

    pub fn commit(self) -> Result<()> {
        for (tmp, path) in self.staged {
            tmp.persist(&path).map_err(|e| Error::io(&path, e.error))?;
        }
        Ok(())
    }
}

pub fn load_matrix(path: &Path, format: Format) -> Result<SnapshotMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        Format::Binary => read_binary(path, file),
        Format::Csv => read_csv(path, file),
    }
}

/// Writes atomically: the destination is either the complete new file or
/// untouched.
pub fn save_matrix(matrix: &SnapshotMatrix, path: &Path, format: Format) -> Result<()> {
    let mut batch = OutputBatch::new();
    batch.stage_matrix(matrix, path, format)?;
    batch.commit()
}

pub fn write_binary(matrix: &SnapshotMatrix, w: &mut dyn Write) -> io::Result<()> {
    let (nx, ny) = matrix.grid().map_or((0, 0), |g| (g.nx(), g.ny()));
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&0u32.to_le_bytes());
    for n in [matrix.d(), matrix.m(), nx, ny] {
        header.extend_from_slice(&(n as u64).to_le_bytes());
    }
    header.extend_from_slice(&matrix.dt().to_le_bytes());
    w.write_all(&header)?;
    for v in matrix.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_binary(path: &Path, file: File) -> Result<SnapshotMatrix> {
    let file_len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let mut r = BufReader::new(file);
    let mut header = [0u8; HEADER_LEN];
    let got = read_up_to(&mut r, &mut header).map_err(|e| Error::io(path, e))?;
    if got < MAGIC.len() || &header[..8] != MAGIC {
        return Err(Error::format(path, "missing PMSSAMAT magic"));
    }
    if got < HEADER_LEN {
        return Err(Error::Truncated {
            path: path.into(),
            message: format!("header is {got} bytes, expected {HEADER_LEN}"),
        });
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let (version, flags) = (u32_at(8), u32_at(12));
    if version != VERSION || flags != 0 {
        return Err(Error::format(
            path,
            format!("unsupported version {version} / flags {flags}"),
        ));
    }
    let (d, m, nx, ny) = (u64_at(16), u64_at(24), u64_at(32), u64_at(40));
    let dt = f64::from_le_bytes(header[48..56].try_into().unwrap());
    let payload = d
        .checked_mul(m)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER_LEN as u64))
        .ok_or_else(|| Error::format(path, format!("dimensions {d}x{m} overflow")))?;
    if payload != file_len {
        return Err(Error::Truncated {
            path: path.into(),
            message: format!("{d}x{m} needs {payload} bytes, file has {file_len}"),
        });
    }
    let (d, m) = (to_usize(path, d)?, to_usize(path, m)?);
    let mut values = vec![0.0f64; d * m];
    let mut buf = vec![0u8; 8 * 8192];
    for chunk in values.chunks_mut(8192) {
        let bytes = &mut buf[..8 * chunk.len()];
        r.read_exact(bytes).map_err(|e| Error::io(path, e))?;
        for (v, b) in chunk.iter_mut().zip(bytes.chunks_exact(8)) {
            *v = f64::from_le_bytes(b.try_into().unwrap());
        }
    }
    let mut matrix = SnapshotMatrix::new(d, m, values)?;
    if nx != 0 || ny != 0 {
        let grid = GridSpec::new(to_usize(path, nx)?, to_usize(path, ny)?)?;
        matrix = matrix.with_grid(grid).map_err(|e| Error::format(path, e.to_string()))?;
    }
    matrix.with_dt(dt).map_err(|e| Error::format(path, e.to_string()))
}

fn read_up_to(r: &mut impl Read, buf: &mut [u8]) -> io::Result<usize> {
    let mut n = 0;
    while n < buf.len() {
        match r.read(&mut buf[n..])? {
            0 => break,
            k => n += k,
        }
    }
    Ok(n)
}

fn to_usize(path: &Path, v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::format(path, format!("dimension {v} does not fit in memory")))
}

fn check_csv_width(d: usize) -> Result<()> {
    if d > CSV_MAX_D {
        return Err(Error::argument(
            "format",
            format!("CSV is limited to d <= {CSV_MAX_D}, matrix has d = {d}; use the binary format"),
        ));
    }
    Ok(())
}

pub fn write_csv(matrix: &SnapshotMatrix, w: &mut dyn Write) -> io::Result<()> {
    for snap in matrix.snapshots() {
        for (i, v) in snap.iter().enumerate() {
            if i > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{v}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn read_csv(path: &Path, file: File) -> Result<SnapshotMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let mut d = 0;
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        if line == 0 {
            d = record.len();
            check_csv_width(d).map_err(|e| Error::format(path, e.to_string()))?;
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::format(path, format!("line {}: `{field}` is not a number", line + 1)))?;
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(Error::format(path, "no data rows"));
    }
    let m = values.len() / d;
    Ok(SnapshotMatrix::new(d, m, values)?)
}

/// `<stem>.U.pmx`, `<stem>.S.pmx`, `<stem>.V.pmx`.
pub fn factor_paths(stem: &Path) -> [PathBuf; 3] {
    ["U", "S", "V"].map(|part| {
        let mut name = stem.as_os_str().to_os_string();
        name.push(format!(".{part}.pmx"));
        PathBuf::from(name)
    })
}

pub fn save_factors(factors: &SvdFactors, stem: &Path) -> Result<()> {
    let mut batch = OutputBatch::new();
    batch.stage_factors(factors, stem)?;
    batch.commit()
}

pub fn load_factors(stem: &Path) -> Result<SvdFactors> {
    let [up, sp, vp] = factor_paths(stem);
    let (u, s, v) = (
        load_matrix(&up, Format::Binary)?,
        load_matrix(&sp, Format::Binary)?,
        load_matrix(&vp, Format::Binary)?,
    );
    let r = u.m();
    if s.d() != r || s.m() != 1 || v.m() != r {
        return Err(Error::format(
            stem,
            format!(
                "factor shapes disagree: U {}x{}, S {}x{}, V {}x{}",
                u.d(),
                r,
                s.d(),
                s.m(),
                v.d(),
                v.m()
            ),
        ));
    }
    let m = v.d();
    let modes = SpatialModes::new(u.d(), r, u.into_values())?;
    Ok(SvdFactors::from_parts(modes, s.into_values(), m, v.into_values())?)
}

/// Coefficients as a matrix file with one time step per snapshot, i.e. an
/// `r x m` matrix; in CSV form that is `m` lines of `r` values.
pub fn coefficients_matrix(coeffs: &TemporalCoefficients) -> Result<SnapshotMatrix> {
    Ok(SnapshotMatrix::new(coeffs.r(), coeffs.m(), coeffs.to_time_major())?)
}

pub fn load_coefficients(path: &Path) -> Result<TemporalCoefficients> {
    let x = load_matrix(path, Format::from_path(path))?;
    let (r, m) = (x.d(), x.m());
    let mut rows = vec![0.0; r * m];
    for (j, snap) in x.snapshots().enumerate() {
        for (i, v) in snap.iter().enumerate() {
            rows[i * m + j] = *v;
        }
    }
    Ok(TemporalCoefficients::new(r, m, rows)?)
}

/// Writes `header` followed by one line per row, each value with 17
/// significant digits.
pub fn write_table<'a>(w: &mut dyn Write, header: &str, rows: impl IntoIterator<Item = &'a [f64]>) -> io::Result<()> {
    writeln!(w, "{header}")?;
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{v:.16e}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads the data lines of a table written by [`write_table`].
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| {
                Error::format(
                    path,
                    format!("non-numeric row {:?}", record.position().map(|p| p.line())),
                )
            })?;
        out.push(row);
    }
    Ok(out)
}
