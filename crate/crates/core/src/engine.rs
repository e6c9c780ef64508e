//! Circuit execution.
//!
//! Matrix mode multiplies the stage operators into one algorithm matrix and
//! applies it to the initial state. Vector mode evolves the state stage by stage
//! with in-place gate kernels and never materializes a `2^N × 2^N` operator.
//! Stage 0 is applied first, so it is the rightmost factor of the product.

use serde::{Serialize, Serializer};

use crate::circuit::{apply_gate_in_place, stage_operator, Circuit};
use crate::error::{Error, Result};
use crate::gates::gate_matrix;
use crate::limits::{
    check_cap, MATRIX_MODE_MAX_QUBITS, TRACE_DENSITY_MAX_QUBITS, VECTOR_MODE_MAX_QUBITS,
};
use crate::scalar::Scalar;
use crate::state::{
    apply_unitary, bloch_vector, mat_mul, BlochVector, DensityMatrix, StateVector, UnitaryMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimulationMode {
    #[default]
    Matrix,
    Vector,
}

impl std::str::FromStr for SimulationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "matrix" => Ok(SimulationMode::Matrix),
            "vector" => Ok(SimulationMode::Vector),
            other => Err(format!(
                "unknown mode `{other}` (expected matrix or vector)"
            )),
        }
    }
}

impl std::fmt::Display for SimulationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SimulationMode::Matrix => "matrix",
            SimulationMode::Vector => "vector",
        })
    }
}

impl SimulationMode {
    /// Label used in resource-limit errors.
    pub fn cap_context(self) -> &'static str {
        match self {
            SimulationMode::Matrix => "matrix mode",
            SimulationMode::Vector => "vector mode",
        }
    }

    pub fn qubit_cap(self) -> usize {
        match self {
            SimulationMode::Matrix => MATRIX_MODE_MAX_QUBITS,
            SimulationMode::Vector => VECTOR_MODE_MAX_QUBITS,
        }
    }
}

/// Product of all stage operators.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmMatrix<T>(pub UnitaryMatrix<T>);

impl<T: Scalar> AlgorithmMatrix<T> {
    pub fn unitary(&self) -> &UnitaryMatrix<T> {
        &self.0
    }

    /// |entries|, row-major.
    pub fn heatmap(&self) -> Vec<Vec<T>> {
        self.0.matrix().magnitudes()
    }
}

pub fn build_algorithm_matrix<T: Scalar>(circuit: &Circuit) -> Result<AlgorithmMatrix<T>> {
    check_cap(
        "algorithm matrix",
        circuit.num_qubits(),
        MATRIX_MODE_MAX_QUBITS,
    )?;
    let mut acc = stage_operator::<T>(circuit, 0)?;
    for stage in 1..circuit.num_stages() {
        acc = mat_mul(&stage_operator::<T>(circuit, stage)?, &acc)?;
    }
    Ok(AlgorithmMatrix(acc))
}

/// Snapshot after a stage; index 0 is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<T> {
    pub stage_index: usize,
    pub state: StateVector<T>,
    /// Present only up to [`TRACE_DENSITY_MAX_QUBITS`] qubits.
    pub density: Option<DensityMatrix<T>>,
    pub bloch: Vec<BlochVector<T>>,
}

impl<T: Scalar> TraceRecord<T> {
    pub fn capture(stage_index: usize, state: &StateVector<T>) -> Result<Self> {
        let n = state.num_qubits();
        let density = (n <= TRACE_DENSITY_MAX_QUBITS).then(|| DensityMatrix::from_state(state));
        Ok(Self {
            stage_index,
            density,
            bloch: bloch_vectors(state)?,
            state: state.clone(),
        })
    }
}

/// Per-qubit Bloch vectors from single-qubit reduced states.
pub fn bloch_vectors<T: Scalar>(state: &StateVector<T>) -> Result<Vec<BlochVector<T>>> {
    (0..state.num_qubits())
        .map(|k| bloch_vector(&state.reduced_density(&[k])?))
        .collect()
}

/// Applies one stage to `state` in place.
pub fn apply_stage<T: Scalar>(
    state: &mut StateVector<T>,
    circuit: &Circuit,
    stage: usize,
) -> Result<()> {
    if state.num_qubits() != circuit.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.num_qubits(),
            found: state.num_qubits(),
        });
    }
    for op in circuit.stage_ops(stage)? {
        let m = gate_matrix::<T>(&op.gate)?.into_matrix();
        apply_gate_in_place(state.amplitudes_mut(), &m, &op.qubits);
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct VectorRun<T> {
    pub final_state: StateVector<T>,
    /// `num_stages + 1` records, empty unless tracing was requested.
    pub trace: Vec<TraceRecord<T>>,
}

pub fn run_vector_mode<T: Scalar>(circuit: &Circuit) -> Result<VectorRun<T>> {
    run_vector_mode_with(circuit, true)
}

pub fn run_vector_mode_with<T: Scalar>(circuit: &Circuit, trace: bool) -> Result<VectorRun<T>> {
    check_cap("vector mode", circuit.num_qubits(), VECTOR_MODE_MAX_QUBITS)?;
    let mut state = circuit.initial_state::<T>()?;
    let mut records = Vec::new();
    if trace {
        records.push(TraceRecord::capture(0, &state)?);
    }
    for stage in 0..circuit.num_stages() {
        apply_stage(&mut state, circuit, stage)?;
        if trace {
            records.push(TraceRecord::capture(stage + 1, &state)?);
        }
    }
    Ok(VectorRun {
        final_state: state,
        trace: records,
    })
}

#[derive(Debug, Clone)]
pub struct MatrixRun<T> {
    pub algorithm_matrix: AlgorithmMatrix<T>,
    pub final_state: StateVector<T>,
}

pub fn run_matrix_mode<T: Scalar>(circuit: &Circuit) -> Result<MatrixRun<T>> {
    let algorithm_matrix = build_algorithm_matrix::<T>(circuit)?;
    let final_state = apply_unitary(algorithm_matrix.unitary(), &circuit.initial_state()?)?;
    Ok(MatrixRun {
        algorithm_matrix,
        final_state,
    })
}

/// Per-stage Bloch vectors (index 0 is the initial state).
pub fn trace_bloch<T: Scalar>(circuit: &Circuit) -> Result<Vec<Vec<BlochVector<T>>>> {
    check_cap("vector mode", circuit.num_qubits(), VECTOR_MODE_MAX_QUBITS)?;
    let mut state = circuit.initial_state::<T>()?;
    let mut out = vec![bloch_vectors(&state)?];
    for stage in 0..circuit.num_stages() {
        apply_stage(&mut state, circuit, stage)?;
        out.push(bloch_vectors(&state)?);
    }
    Ok(out)
}

/// Marginal distribution over a set of measured qubits.
///
/// Outcome index bit `i` is the value of `measured_qubits[i]` (ascending), so
/// labels read with the highest measured qubit leftmost.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDistribution<T> {
    pub measured_qubits: Vec<usize>,
    pub probabilities: Vec<T>,
}

impl<T: Scalar> MeasurementDistribution<T> {
    fn from_populations(populations: &[T], num_qubits: usize, measured: &[usize]) -> Result<Self> {
        if measured.is_empty() {
            return Err(Error::InvalidQubits("no qubits measured".into()));
        }
        let mut qubits = measured.to_vec();
        qubits.sort_unstable();
        qubits.dedup();
        if let Some(&q) = qubits.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::InvalidQubits(format!(
                "qubit {q} out of range for {num_qubits} qubits"
            )));
        }
        let mut probabilities = vec![T::zero(); 1 << qubits.len()];
        for (index, &p) in populations.iter().enumerate() {
            let outcome = qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &q)| acc | (index >> q & 1) << i);
            probabilities[outcome] = probabilities[outcome] + p;
        }
        Ok(Self {
            measured_qubits: qubits,
            probabilities,
        })
    }

    pub fn label(&self, outcome: usize) -> String {
        (0..self.measured_qubits.len())
            .rev()
            .map(|i| if outcome >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn get(&self, label: &str) -> Option<T> {
        if label.len() != self.measured_qubits.len() {
            return None;
        }
        let outcome = usize::from_str_radix(label, 2).ok()?;
        self.probabilities.get(outcome).copied()
    }

    /// Value of measured qubit `qubit` in outcome `outcome`.
    pub fn bit(&self, outcome: usize, qubit: usize) -> Option<bool> {
        let i = self.measured_qubits.iter().position(|&q| q == qubit)?;
        Some(outcome >> i & 1 == 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (String, T)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, &p)| (self.label(k), p))
    }

    pub fn total(&self) -> T {
        self.probabilities.iter().copied().sum()
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = k;
            }
        }
        best
    }
}

impl<T: Scalar> Serialize for MeasurementDistribution<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.probabilities.len()))?;
        for (label, p) in self.iter() {
            map.serialize_entry(&label, &p.as_f64())?;
        }
        map.end()
    }
}

pub fn measure_distribution<T: Scalar>(
    state: &StateVector<T>,
    measured: &[usize],
) -> Result<MeasurementDistribution<T>> {
    MeasurementDistribution::from_populations(&state.probabilities(), state.num_qubits(), measured)
}

/// Distribution read from the diagonal of a (possibly mixed) density matrix.
pub fn measure_density<T: Scalar>(
    rho: &DensityMatrix<T>,
    measured: &[usize],
) -> Result<MeasurementDistribution<T>> {
    MeasurementDistribution::from_populations(&rho.diagonal(), rho.num_qubits(), measured)
}
