//! One simulation run with everything the exporters and the service report.

use serde::{Deserialize, Serialize};

use qsim_core::engine::{apply_stage, bloch_vectors, TraceRecord};
use qsim_core::limits::{check_cap, DENSITY_MAX_QUBITS};
use qsim_core::noise::NoisyRun;
use qsim_core::{
    bloch_vector, build_algorithm_matrix, measure_density, measure_distribution, run_noisy,
    AlgorithmMatrix, BlochVector, Circuit, DensityMatrix, MeasurementDistribution, NoiseConfig,
    Result, SimulationMode, StateVector,
};

/// Resolved run configuration. Serialized verbatim into export metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub mode: SimulationMode,
    pub noise: Option<NoiseConfig>,
    /// Keep the per-stage state vectors.
    pub include_trace: bool,
    /// Report the noiseless density matrix even without noise.
    pub include_density: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            mode: SimulationMode::Matrix,
            noise: None,
            include_trace: false,
            include_density: true,
        }
    }
}

impl RunOptions {
    /// Rejects requests beyond the engine caps without allocating state.
    pub fn check(&self, circuit: &Circuit) -> Result<()> {
        let n = circuit.num_qubits();
        check_cap(self.mode.cap_context(), n, self.mode.qubit_cap())?;
        if let Some(noise) = &self.noise {
            check_cap("density evolution", n, DENSITY_MAX_QUBITS)?;
            noise.validate(n)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub options: RunOptions,
    pub num_qubits: usize,
    pub num_stages: usize,
    /// From the noisy density when noise is configured.
    pub probabilities: MeasurementDistribution<f64>,
    pub final_state: StateVector,
    pub algorithm_matrix: Option<AlgorithmMatrix<f64>>,
    /// `num_stages + 1` records when requested.
    pub trace: Option<Vec<TraceRecord<f64>>>,
    /// Per-stage Bloch vectors; taken from the noisy densities under noise.
    pub bloch_trace: Vec<Vec<BlochVector>>,
    pub density_noiseless: Option<DensityMatrix>,
    pub density_noisy: Option<DensityMatrix>,
    pub stage_rates: Option<Vec<f64>>,
    pub rate_above_unity: bool,
}

impl SimulationReport {
    /// The density reported as the run's result: noisy if present, else noiseless.
    pub fn density(&self) -> Option<&DensityMatrix> {
        self.density_noisy
            .as_ref()
            .or(self.density_noiseless.as_ref())
    }
}

fn noisy_bloch(run: &NoisyRun<f64>) -> Result<Vec<Vec<BlochVector>>> {
    run.trace
        .iter()
        .map(|rho| {
            (0..rho.num_qubits())
                .map(|k| bloch_vector(&rho.partial_trace(&[k])?))
                .collect()
        })
        .collect()
}

pub fn simulate(circuit: &Circuit, options: &RunOptions) -> Result<SimulationReport> {
    options.check(circuit)?;
    let n = circuit.num_qubits();

    let algorithm_matrix = match options.mode {
        SimulationMode::Matrix => Some(build_algorithm_matrix::<f64>(circuit)?),
        SimulationMode::Vector => None,
    };

    let mut state = circuit.initial_state::<f64>()?;
    let mut trace = options.include_trace.then(Vec::new);
    let mut bloch_trace = vec![bloch_vectors(&state)?];
    if let Some(t) = trace.as_mut() {
        t.push(TraceRecord::capture(0, &state)?);
    }
    for stage in 0..circuit.num_stages() {
        apply_stage(&mut state, circuit, stage)?;
        bloch_trace.push(bloch_vectors(&state)?);
        if let Some(t) = trace.as_mut() {
            t.push(TraceRecord::capture(stage + 1, &state)?);
        }
    }
    if let Some(a) = &algorithm_matrix {
        // the product of stage operators is the reported final state in matrix mode
        state = qsim_core::apply_unitary(a.unitary(), &circuit.initial_state()?)?;
    }

    let want_noiseless = options.include_density || options.noise.is_some();
    let density_noiseless =
        (want_noiseless && n <= DENSITY_MAX_QUBITS).then(|| DensityMatrix::from_state(&state));

    let (probabilities, density_noisy, stage_rates, rate_above_unity) = match &options.noise {
        Some(cfg) => {
            let run = run_noisy::<f64>(circuit, cfg)?;
            bloch_trace = noisy_bloch(&run)?;
            (
                measure_density(&run.final_density, circuit.measured())?,
                Some(run.final_density),
                Some(run.stage_rates),
                run.rate_above_unity,
            )
        }
        None => (
            measure_distribution(&state, circuit.measured())?,
            None,
            None,
            false,
        ),
    };

    Ok(SimulationReport {
        options: options.clone(),
        num_qubits: n,
        num_stages: circuit.num_stages(),
        probabilities,
        final_state: state,
        algorithm_matrix,
        trace,
        bloch_trace,
        density_noiseless,
        density_noisy,
        stage_rates,
        rate_above_unity,
    })
}
