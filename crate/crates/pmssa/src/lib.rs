//! File formats, spectral analysis, parameter sweeps and the `pmssa`
//! command-line tool, built on [`pmssa_core`].

pub mod cli;
pub mod config;
mod error;
pub mod filter;
pub mod format;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
pub use filter::highpass_filter;
pub use format::{load_matrix, save_matrix, Format};
pub use spectrum::{periodogram, Spectrum};
pub use sweep::{rank_sweep, DenoiseReport, Method, ReportRow};
