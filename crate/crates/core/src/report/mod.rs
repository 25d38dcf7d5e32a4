//! Tables, CSV and SVG output, and run manifests.

mod csv;
mod manifest;
mod svg;
mod table;

pub use self::csv::{csv_string, emit_csv, read_csv};
pub use manifest::{
    hash_file, now_rfc3339, prepare_output_dir, sha256_hex, verify_manifest, FileHash, RunManifest, MANIFEST_FILE,
};
pub use svg::{emit_svg_plot, render_svg, PlotKind, PlotStyle, Series};
pub use table::{Cell, Table};

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("IoError: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("Csv: {0}")]
    Csv(String),
    #[error("EmptySeries: a plot needs at least one series")]
    EmptySeries,
    #[error("OutputNotEmpty: {0} is not empty (use --force to overwrite)")]
    OutputNotEmpty(String),
    #[error("Manifest: {0}")]
    Manifest(String),
}

impl ReportError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ReportError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
