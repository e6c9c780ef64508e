use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use qsim_core::limits::MATRIX_MODE_MAX_QUBITS;
use qsim_core::linalg::CMatrix;
use qsim_core::wire::{matrix_from_json, matrix_to_json, ComplexJson};
use qsim_core::{
    build_algorithm_matrix, BlochVector, Circuit, DensityMatrix, MeasurementDistribution,
};

use crate::metadata::Metadata;
use crate::number::{format_real, round_sig};
use crate::report::SimulationReport;
use crate::{ExportError, Result};

pub const HEATMAP_FILE: &str = "heatmap.csv";
pub const PROBABILITIES_FILE: &str = "probabilities.csv";
pub const DENSITY_FILE: &str = "density.json";
pub const BLOCH_FILE: &str = "bloch_trace.json";
pub const ALGORITHM_MATRIX_FILE: &str = "algorithm_matrix.json";
pub const METADATA_FILE: &str = "metadata.json";

/// Magnitudes of a unitary are at most one; allow this much rounding above it.
const HEATMAP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ExportBundle {
    pub num_qubits: usize,
    pub algorithm_matrix: Option<CMatrix<f64>>,
    /// `|entries|` of the algorithm matrix.
    pub heatmap: Vec<Vec<f64>>,
    pub probabilities: MeasurementDistribution<f64>,
    /// Final density; the noisy one when noise was applied.
    pub density: Option<DensityMatrix>,
    /// Noiseless counterpart, present alongside a noisy `density`.
    pub density_noiseless: Option<DensityMatrix>,
    pub bloch_trace: Vec<Vec<BlochVector>>,
    pub metadata: Metadata,
}

impl ExportBundle {
    /// Bundles a report. Vector-mode runs get their heatmap from a separately
    /// built algorithm matrix, which limits them to the matrix-mode qubit cap.
    pub fn from_report(
        circuit: &Circuit,
        report: &SimulationReport,
        metadata: Metadata,
    ) -> Result<Self> {
        let heatmap = match &report.algorithm_matrix {
            Some(a) => a.heatmap(),
            None if circuit.num_qubits() <= MATRIX_MODE_MAX_QUBITS => {
                build_algorithm_matrix::<f64>(circuit)?.heatmap()
            }
            None => return Err(ExportError::Missing("heatmap")),
        };
        let noisy = report.density_noisy.is_some();
        Ok(Self {
            num_qubits: report.num_qubits,
            algorithm_matrix: report
                .algorithm_matrix
                .as_ref()
                .map(|a| a.unitary().matrix().clone()),
            heatmap,
            probabilities: report.probabilities.clone(),
            density: report.density().cloned(),
            density_noiseless: if noisy {
                report.density_noiseless.clone()
            } else {
                None
            },
            bloch_trace: report.bloch_trace.clone(),
            metadata,
        })
    }

    fn validate(&self) -> Result<()> {
        let dim = 1usize << self.num_qubits;
        if self.heatmap.len() != dim || self.heatmap.iter().any(|r| r.len() != dim) {
            return Err(ExportError::Invalid(format!("heatmap must be {dim}x{dim}")));
        }
        if let Some(v) = self
            .heatmap
            .iter()
            .flatten()
            .find(|v| !(0.0..=1.0 + HEATMAP_SLACK).contains(*v))
        {
            return Err(ExportError::Invalid(format!(
                "heatmap entry {v} outside [0, 1]"
            )));
        }
        if self.probabilities.probabilities.is_empty() {
            return Err(ExportError::Missing("probabilities"));
        }
        if self.bloch_trace.is_empty() {
            return Err(ExportError::Missing("bloch_trace"));
        }
        Ok(())
    }
}

/// Rounds every non-integer number in `v` to 12 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with rounded numbers and a trailing newline.
pub fn to_json_text<S: Serialize>(value: &S) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityBlock {
    pub trace: f64,
    pub purity: f64,
    pub entries: Vec<Vec<ComplexJson>>,
}

impl DensityBlock {
    pub fn new(rho: &DensityMatrix) -> Self {
        Self {
            trace: rho.trace().re,
            purity: rho.purity(),
            entries: matrix_to_json(rho.matrix()),
        }
    }
}

/// Layout of `density.json`. The density fields are null past the density qubit cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub num_qubits: usize,
    pub trace: Option<f64>,
    pub purity: Option<f64>,
    pub entries: Option<Vec<Vec<ComplexJson>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noiseless: Option<DensityBlock>,
}

impl DensityFile {
    fn new(
        num_qubits: usize,
        density: Option<&DensityMatrix>,
        noiseless: Option<&DensityMatrix>,
    ) -> Self {
        let block = density.map(DensityBlock::new);
        Self {
            num_qubits,
            trace: block.as_ref().map(|b| b.trace),
            purity: block.as_ref().map(|b| b.purity),
            entries: block.map(|b| b.entries),
            noiseless: noiseless.map(DensityBlock::new),
        }
    }
}

/// Reads the main density matrix back from `density.json` text.
pub fn parse_density_json(text: &str) -> Result<DensityMatrix> {
    let file: DensityFile = serde_json::from_str(text)?;
    let entries = file
        .entries
        .ok_or(ExportError::Missing("density entries"))?;
    Ok(DensityMatrix::new(matrix_from_json(&entries)?)?)
}

#[derive(Serialize)]
struct BlochStage<'a> {
    stage: usize,
    bloch: &'a [BlochVector],
}

#[derive(Serialize)]
struct BlochFile<'a> {
    num_qubits: usize,
    stages: Vec<BlochStage<'a>>,
}

#[derive(Serialize)]
struct MatrixFile {
    num_qubits: usize,
    dim: usize,
    entries: Vec<Vec<ComplexJson>>,
}

pub fn heatmap_csv(heatmap: &[Vec<f64>]) -> String {
    let mut out = String::from("row");
    for c in 0..heatmap.first().map_or(0, Vec::len) {
        let _ = write!(out, ",{c}");
    }
    out.push_str("\r\n");
    for (r, row) in heatmap.iter().enumerate() {
        let _ = write!(out, "{r}");
        for &v in row {
            let _ = write!(out, ",{}", format_real(v));
        }
        out.push_str("\r\n");
    }
    out
}

/// One row per outcome: the label, one column per measured qubit (highest first), the probability.
pub fn probabilities_csv(dist: &MeasurementDistribution<f64>) -> String {
    let mut out = String::from("bitstring");
    for q in dist.measured_qubits.iter().rev() {
        let _ = write!(out, ",q{q}");
    }
    out.push_str(",probability\r\n");
    for (outcome, &p) in dist.probabilities.iter().enumerate() {
        let label = dist.label(outcome);
        let _ = write!(out, "{label}");
        for bit in label.chars() {
            let _ = write!(out, ",{bit}");
        }
        let _ = write!(out, ",{}\r\n", format_real(p));
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| ExportError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(())
}

/// Writes the bundle's files into `dir` (created if missing) and returns their paths.
pub fn export_bundle(bundle: &ExportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    bundle.validate()?;
    fs::create_dir_all(dir).map_err(|source| ExportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    write_file(
        dir,
        HEATMAP_FILE,
        &heatmap_csv(&bundle.heatmap),
        &mut written,
    )?;
    write_file(
        dir,
        PROBABILITIES_FILE,
        &probabilities_csv(&bundle.probabilities),
        &mut written,
    )?;
    let density = DensityFile::new(
        bundle.num_qubits,
        bundle.density.as_ref(),
        bundle.density_noiseless.as_ref(),
    );
    write_file(dir, DENSITY_FILE, &to_json_text(&density)?, &mut written)?;
    let bloch = BlochFile {
        num_qubits: bundle.num_qubits,
        stages: bundle
            .bloch_trace
            .iter()
            .enumerate()
            .map(|(stage, bloch)| BlochStage { stage, bloch })
            .collect(),
    };
    write_file(dir, BLOCH_FILE, &to_json_text(&bloch)?, &mut written)?;
    if let Some(m) = &bundle.algorithm_matrix {
        let file = MatrixFile {
            num_qubits: bundle.num_qubits,
            dim: m.dim(),
            entries: matrix_to_json(m),
        };
        write_file(
            dir,
            ALGORITHM_MATRIX_FILE,
            &to_json_text(&file)?,
            &mut written,
        )?;
    }
    write_file(
        dir,
        METADATA_FILE,
        &to_json_text(&bundle.metadata)?,
        &mut written,
    )?;
    Ok(written)
}
