//! Simulation reports and the files they are exported to.
//!
//! CSV files use CRLF line ends and a header row; reals carry 12 significant
//! digits. JSON files are pretty-printed with complex numbers as `{re, im}`.

mod bundle;
mod metadata;
pub mod number;
pub mod report;

use std::path::PathBuf;

pub use bundle::{
    export_bundle, heatmap_csv, parse_density_json, probabilities_csv, round_json, to_json_text,
    DensityBlock, DensityFile, ExportBundle, ALGORITHM_MATRIX_FILE, BLOCH_FILE, DENSITY_FILE,
    HEATMAP_FILE, METADATA_FILE, PROBABILITIES_FILE,
};
pub use metadata::{circuit_hash, Metadata, TIMESTAMP_FIELD};
pub use report::{simulate, RunOptions, SimulationReport};

use qsim_core::vqe::VqeRunLog;

pub const VQE_LOG_FILE: &str = "vqe_run.json";

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bundle is missing {0}")]
    Missing(&'static str),
    #[error("invalid bundle: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] qsim_core::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ExportError>;

/// Writes a VQE run log and its metadata into `dir`.
pub fn export_vqe_run(
    log: &VqeRunLog,
    metadata: &Metadata,
    dir: &std::path::Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| ExportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for (name, text) in [
        (VQE_LOG_FILE, to_json_text(log)?),
        (METADATA_FILE, to_json_text(metadata)?),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|source| ExportError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
