//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pmssa_core::{
    add_gaussian_noise_in_place, compute_svd, default_window, half_window, phase_export, pmssa_from_factors, project,
    reconstruct, relative_error, Domain, SnapshotMatrix, WakeConfig,
};

use crate::config::load_config;
use crate::error::{Error, Result};
use crate::format::{coefficients_matrix, load_coefficients, load_matrix, write_table, Format, OutputBatch};
use crate::spectrum::{default_segment_length, periodogram, DEFAULT_OVERLAP};
use crate::sweep::{estimate_sigma, rank_sweep, Method};

/// Environment variable capping the worker threads (0 or unset: all cores).
pub const THREADS_ENV: &str = "PMSSA_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "pmssa",
    version,
    about = "Low-rank denoising of snapshot matrices (TSVD and projected MSSA)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the wake surrogate, optionally with Gaussian noise.
    Synth(SynthArgs),
    /// Denoise a snapshot matrix.
    Denoise(DenoiseArgs),
    /// Score both denoisers over ranks and windows against a clean reference.
    Sweep(SweepArgs),
    /// Extract the time series of the pixel nearest to a point.
    Probe(ProbeArgs),
    /// Welch power spectrum of the pixel nearest to a point.
    Spectrum(SpectrumArgs),
    /// Export two coefficient series as phase-plot pairs.
    Phase(PhaseArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub clean_out: Option<PathBuf>,
    /// Key-value file with surrogate parameters; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub f0: Option<f64>,
    #[arg(long)]
    pub harmonics: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "pmssa")]
    pub method: String,
    #[arg(long)]
    pub rank: usize,
    /// Window length, or `half` for max(m/2, 2); defaults to round(3 sqrt(m)).
    #[arg(long)]
    pub window: Option<String>,
    /// Rank kept in the trajectory matrix; defaults to --rank.
    #[arg(long)]
    pub rank_mssa: Option<usize>,
    /// Clean reference; adds the relative error to the summary.
    #[arg(long)]
    pub clean: Option<PathBuf>,
    /// Remove the temporal mean before denoising and add it back after.
    #[arg(long)]
    pub subtract_mean: bool,
    /// Final temporal coefficients; for pmssa the projected ones go to
    /// `<stem>.projected.<ext>` alongside.
    #[arg(long)]
    pub coeffs_out: Option<PathBuf>,
    /// Writes `<stem>.U.pmx`, `<stem>.S.pmx` and `<stem>.V.pmx`.
    #[arg(long)]
    pub factors_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub clean: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub ranks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "30,90,500")]
    pub windows: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "tsvd,pmssa")]
    pub methods: Vec<String>,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    /// Rectangle `x_min,x_max,y_min,y_max` spanned by the grid.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        default_value = "0,10,-5,5"
    )]
    pub domain: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Samples per segment; 256, or 1024 from 10^4 snapshots on.
    #[arg(long)]
    pub segment: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_OVERLAP)]
    pub overlap: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long)]
    pub coeffs: PathBuf,
    /// Two 1-based mode numbers.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub modes: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit status. Summaries go to stdout, errors to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match execute(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::argument("PMSSA_THREADS", format!("expected a thread count, got `{raw}`")))?;
    // a pool that already exists (repeated calls in one process) is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one parsed command and returns its summary line.
pub fn execute(command: Command) -> Result<String> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Denoise(a) => denoise(a),
        Command::Sweep(a) => sweep(a),
        Command::Probe(a) => probe(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Phase(a) => phase(a),
    }
}

fn load(path: &Path) -> Result<SnapshotMatrix> {
    load_matrix(path, Format::from_path(path))
}

fn synth(a: SynthArgs) -> Result<String> {
    if !(a.sigma.is_finite() && a.sigma >= 0.0) {
        return Err(Error::argument(
            "--sigma",
            format!("must be non-negative, got {}", a.sigma),
        ));
    }
    let mut cfg = match &a.config {
        Some(path) => load_config(path)?,
        None => WakeConfig::default(),
    };
    if let Some(h) = a.harmonics {
        cfg = cfg.with_harmonics(h);
    }
    cfg.nx = a.nx.unwrap_or(cfg.nx);
    cfg.ny = a.ny.unwrap_or(cfg.ny);
    cfg.m = a.m.unwrap_or(cfg.m);
    cfg.dt = a.dt.unwrap_or(cfg.dt);
    cfg.f0 = a.f0.unwrap_or(cfg.f0);
    cfg.validate().map_err(|e| rename_flag(e, "--"))?;

    let clean = pmssa_core::generate_wake(&cfg)?;
    let mut batch = OutputBatch::new();
    if let Some(path) = &a.clean_out {
        batch.stage_matrix(&clean, path, Format::from_path(path))?;
    }
    let mut noisy = clean;
    add_gaussian_noise_in_place(&mut noisy, a.sigma, a.seed)?;
    batch.stage_matrix(&noisy, &a.out, Format::from_path(&a.out))?;
    batch.commit()?;
    Ok(format!(
        "synth d={} m={} harmonics={} sigma={} seed={} out={}",
        noisy.d(),
        noisy.m(),
        cfg.n_harmonics,
        a.sigma,
        a.seed,
        a.out.display()
    ))
}

/// Core argument errors name internal parameters; point them at the flag.
fn rename_flag(e: pmssa_core::Error, prefix: &'static str) -> Error {
    match e {
        pmssa_core::Error::Argument { name, message } => Error::Argument {
            name: match (prefix, name) {
                ("--", "grid") => "--nx/--ny/--m",
                ("--", "dt") => "--dt",
                ("--", "f0") => "--f0",
                ("--", "window") => "--window",
                ("--", "rank_mssa") => "--rank-mssa",
                ("--", "r") => "--rank",
                _ => name,
            },
            message,
        },
        other => other.into(),
    }
}

fn parse_window(raw: Option<&str>, m: usize) -> Result<usize> {
    match raw.map(str::trim) {
        None => Ok(default_window(m)),
        Some("half") => Ok(half_window(m)),
        Some(v) => v
            .parse()
            .map_err(|_| Error::argument("--window", format!("expected an integer or `half`, got `{v}`"))),
    }
}

fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

fn denoise(a: DenoiseArgs) -> Result<String> {
    let method: Method = a
        .method
        .parse()
        .map_err(|_| Error::argument("--method", format!("expected tsvd or pmssa, got `{}`", a.method)))?;
    if a.rank == 0 {
        return Err(Error::argument("--rank", "must be at least 1"));
    }
    if a.rank_mssa == Some(0) {
        return Err(Error::argument("--rank-mssa", "must be at least 1"));
    }
    let x = load(&a.input)?;
    let clean = a.clean.as_deref().map(load).transpose()?;
    let (d, m) = (x.d(), x.m());
    if a.rank > d.min(m) {
        return Err(Error::argument(
            "--rank",
            format!("must not exceed min(d, m) = {}", d.min(m)),
        ));
    }
    let window = parse_window(a.window.as_deref(), m)?;
    if method == Method::Pmssa {
        if window < 2 || window >= m {
            return Err(Error::argument(
                "--window",
                format!("must lie in 2..={}, got {window}", m - 1),
            ));
        }
        let rows = a.rank * window;
        let max_rank = rows.min(m - window + 1);
        if let Some(r2) = a.rank_mssa.filter(|&r2| r2 > max_rank) {
            return Err(Error::argument(
                "--rank-mssa",
                format!("must not exceed {max_rank}, got {r2}"),
            ));
        }
    }
    if let Some(c) = &clean {
        if c.d() != d || c.m() != m {
            return Err(Error::argument(
                "--clean",
                format!("reference is {}x{} but input is {d}x{m}", c.d(), c.m()),
            ));
        }
    }

    let mean = a.subtract_mean.then(|| x.temporal_mean());
    let work = match &mean {
        Some(mu) => x.add_field(mu, -1.0)?,
        None => x.clone(),
    };
    let factors = compute_svd(&work, a.rank).map_err(|e| rename_flag(e, "--"))?;
    let factors_copy = a.factors_out.as_ref().map(|_| factors.clone());
    let (rec, coeffs, projected, rank_mssa) = match method {
        Method::Tsvd => {
            let c = project(&factors);
            (reconstruct(factors.modes(), &c)?, c, None, None)
        }
        Method::Pmssa => {
            let out = pmssa_from_factors(factors, window, a.rank_mssa).map_err(|e| rename_flag(e, "--"))?;
            let rec = out.reconstruct()?;
            (rec, out.denoised, Some(out.projected), Some(out.rank_mssa))
        }
    };
    let mut rec = rec.with_metadata_of(&x);
    if let Some(mu) = &mean {
        rec = rec.add_field(mu, 1.0)?;
    }
    let error = clean.as_ref().map(|c| relative_error(&rec, c)).transpose()?;

    let mut batch = OutputBatch::new();
    batch.stage_matrix(&rec, &a.out, Format::from_path(&a.out))?;
    if let Some(path) = &a.coeffs_out {
        batch.stage_matrix(&coefficients_matrix(&coeffs)?, path, Format::from_path(path))?;
        if let Some(p) = &projected {
            let path2 = sibling(path, "projected");
            batch.stage_matrix(&coefficients_matrix(p)?, &path2, Format::from_path(&path2))?;
        }
    }
    if let (Some(stem), Some(f)) = (&a.factors_out, &factors_copy) {
        batch.stage_factors(f, stem)?;
    }
    batch.commit()?;

    let mut summary = format!("method={method} r={}", a.rank);
    match rank_mssa {
        Some(r2) => summary += &format!(" L={window} rank_mssa={r2}"),
        None => summary += " L=-",
    }
    if let Some(e) = error {
        summary += &format!(" relative_error={e:.6e}");
    }
    summary += &format!(" out={}", a.out.display());
    Ok(summary)
}

fn sweep(a: SweepArgs) -> Result<String> {
    let methods = a
        .methods
        .iter()
        .map(|s| s.parse::<Method>())
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Error::argument("--methods", format!("expected tsvd and/or pmssa, got {:?}", a.methods)))?;
    if let Some(&r) = a.ranks.iter().find(|&&r| r == 0) {
        return Err(Error::argument("--ranks", format!("ranks must be positive, got {r}")));
    }
    let noisy = load(&a.input)?;
    let clean = load(&a.clean)?;
    let (d, m) = (noisy.d(), noisy.m());
    if let Some(&r) = a.ranks.iter().find(|&&r| r > d.min(m)) {
        return Err(Error::argument(
            "--ranks",
            format!("rank {r} exceeds min(d, m) = {}", d.min(m)),
        ));
    }
    if methods.contains(&Method::Pmssa) {
        if let Some(&l) = a.windows.iter().find(|&&l| l < 2 || l >= m) {
            return Err(Error::argument(
                "--windows",
                format!("window {l} must lie in 2..={}", m - 1),
            ));
        }
    }
    let report = rank_sweep(&clean, &noisy, &a.ranks, &a.windows, &methods)?;
    let mut batch = OutputBatch::new();
    batch.stage(&a.report, |w| report.write_csv(w))?;
    batch.commit()?;

    let sigma = estimate_sigma(&clean, &noisy)?;
    let mut summary = format!("sweep sigma={sigma:.4} rows={}", report.len());
    for method in [Method::Tsvd, Method::Pmssa] {
        if let Some(best) = report
            .rows()
            .iter()
            .filter(|r| r.method == method)
            .min_by(|a, b| a.relative_error.total_cmp(&b.relative_error))
        {
            let l = best.window.map_or("-".to_string(), |l| l.to_string());
            summary += &format!(" best_{method}=(r={} L={l} err={:.6e})", best.r, best.relative_error);
        }
    }
    summary += &format!(" report={}", a.report.display());
    Ok(summary)
}

fn domain_of(values: &[f64]) -> Result<Domain> {
    match values {
        [x0, x1, y0, y1] => Domain::new(*x0, *x1, *y0, *y1).map_err(|e| rename_domain(e.into())),
        _ => Err(Error::argument("--domain", "expected x_min,x_max,y_min,y_max")),
    }
}

fn rename_domain(e: Error) -> Error {
    match e {
        Error::Core(pmssa_core::Error::Argument { message, .. }) => Error::Argument {
            name: "--domain",
            message,
        },
        other => other,
    }
}

/// Loads the matrix and extracts the probed series.
fn probe_point(p: &PointArgs) -> Result<(SnapshotMatrix, Vec<f64>, (usize, usize))> {
    let domain = domain_of(&p.domain)?;
    let x = load(&p.input)?;
    let grid = x
        .grid()
        .ok_or_else(|| Error::argument("--in", "matrix has no grid; probing needs one"))?;
    let node = domain
        .nearest_node(grid.nx(), grid.ny(), p.x, p.y)
        .map_err(|e| match e {
            pmssa_core::Error::Argument { message, .. } => Error::Argument {
                name: "--x/--y",
                message,
            },
            other => other.into(),
        })?;
    let series = pmssa_core::probe_signal(&x, p.x, p.y, &domain)?;
    Ok((x, series, node))
}

fn probe(a: ProbeArgs) -> Result<String> {
    let (x, series, (row, col)) = probe_point(&a.point)?;
    let dt = x.dt();
    let rows: Vec<[f64; 2]> = series
        .iter()
        .enumerate()
        .map(|(j, v)| [if dt > 0.0 { j as f64 * dt } else { j as f64 }, *v])
        .collect();
    let mut batch = OutputBatch::new();
    batch.stage(&a.out, |w| write_table(w, "t,value", rows.iter().map(|r| &r[..])))?;
    batch.commit()?;
    Ok(format!(
        "probe ({}, {}) -> row={row} col={col} samples={} out={}",
        a.point.x,
        a.point.y,
        series.len(),
        a.out.display()
    ))
}

fn spectrum(a: SpectrumArgs) -> Result<String> {
    if !(0.0..1.0).contains(&a.overlap) {
        return Err(Error::argument(
            "--overlap",
            format!("must lie in [0, 1), got {}", a.overlap),
        ));
    }
    let (x, series, (row, col)) = probe_point(&a.point)?;
    let m = x.m();
    let segment = a.segment.unwrap_or_else(|| default_segment_length(m));
    if segment < 2 || segment > m {
        return Err(Error::argument(
            "--segment",
            format!("must lie in 2..={m}, got {segment}"),
        ));
    }
    let dt = if x.dt() > 0.0 { x.dt() } else { 1.0 };
    let spec = periodogram(&series, dt, segment, a.overlap)?;
    let mut batch = OutputBatch::new();
    batch.stage(&a.out, |w| spec.write_csv(w))?;
    batch.commit()?;
    let (k, p) = spec
        .power
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, 0.0), |best, (k, &p)| if p > best.1 { (k, p) } else { best });
    Ok(format!(
        "spectrum row={row} col={col} segment={segment} segments={} peak_frequency={:.6e} peak_power={p:.6e} out={}",
        spec.segments,
        spec.frequencies[k],
        a.out.display()
    ))
}

fn phase(a: PhaseArgs) -> Result<String> {
    let [i, j] = a.modes[..] else {
        return Err(Error::argument(
            "--modes",
            format!("expected two mode numbers, got {:?}", a.modes),
        ));
    };
    let coeffs = load_coefficients(&a.coeffs)?;
    let pairs = phase_export(&coeffs, i, j).map_err(|e| match e {
        pmssa_core::Error::Argument { message, .. } => Error::Argument {
            name: "--modes",
            message,
        },
        other => other.into(),
    })?;
    let rows: Vec<[f64; 2]> = pairs.iter().map(|&(x, y)| [x, y]).collect();
    let mut batch = OutputBatch::new();
    batch.stage(&a.out, |w| {
        write_table(w, &format!("c{i},c{j}"), rows.iter().map(|r| &r[..]))
    })?;
    batch.commit()?;
    Ok(format!(
        "phase modes={i},{j} points={} out={}",
        pairs.len(),
        a.out.display()
    ))
}

/// Flushes stdout; used by the binary before exiting.
pub fn flush() {
    let _ = std::io::stdout().flush();
}
