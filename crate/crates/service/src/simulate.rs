use axum::body::Bytes;
use axum::http::header::CONTENT_TYPE;
use axum::response::{IntoResponse, Response};
use serde::{Deserialize, Serialize};

use qsim_core::limits::check_cap;
use qsim_core::wire::{vector_to_json, ComplexJson};
use qsim_core::BlochVector;
use qsim_core::{CircuitJson, MeasurementDistribution, NoiseConfig, SimulationMode};
use qsim_export::{simulate, to_json_text, DensityBlock, RunOptions, SimulationReport};

use crate::error::ApiError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationRequest {
    pub circuit: CircuitJson,
    /// Overrides any noise block embedded in the circuit.
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub mode: SimulationMode,
    #[serde(default)]
    pub include_trace: bool,
    #[serde(default)]
    pub include_density: bool,
}

#[derive(Serialize)]
struct TraceStage {
    stage: usize,
    state: Vec<ComplexJson>,
    bloch: Vec<BlochVector>,
}

#[derive(Serialize)]
struct SimulationResponse {
    num_qubits: usize,
    num_stages: usize,
    mode: SimulationMode,
    measured: Vec<usize>,
    probabilities: MeasurementDistribution<f64>,
    bloch_trace: Vec<Vec<BlochVector>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceStage>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    heatmap: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density_noiseless: Option<DensityBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density_noisy: Option<DensityBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage_rates: Option<Vec<f64>>,
    rate_above_unity: bool,
}

impl SimulationResponse {
    fn new(report: SimulationReport, measured: Vec<usize>) -> Self {
        Self {
            num_qubits: report.num_qubits,
            num_stages: report.num_stages,
            mode: report.options.mode,
            measured,
            probabilities: report.probabilities,
            bloch_trace: report.bloch_trace,
            trace: report.trace.map(|t| {
                t.into_iter()
                    .map(|r| TraceStage {
                        stage: r.stage_index,
                        state: vector_to_json(r.state.amplitudes()),
                        bloch: r.bloch,
                    })
                    .collect()
            }),
            heatmap: report.algorithm_matrix.map(|a| a.heatmap()),
            density_noiseless: report.density_noiseless.as_ref().map(DensityBlock::new),
            density_noisy: report.density_noisy.as_ref().map(DensityBlock::new),
            noise: report.options.noise,
            stage_rates: report.stage_rates,
            rate_above_unity: report.rate_above_unity,
        }
    }
}

/// Validates a request body in the order schema → caps → shape → circuit semantics.
pub fn prepare(body: &[u8]) -> Result<(qsim_core::Circuit, RunOptions), ApiError> {
    let req: SimulationRequest = ApiError::parse_body(body)?;
    check_cap(
        req.mode.cap_context(),
        req.circuit.qubits,
        req.mode.qubit_cap(),
    )?;
    req.circuit.check_shape().map_err(ApiError::schema)?;
    let circuit = req.circuit.to_circuit()?;
    let options = RunOptions {
        mode: req.mode,
        noise: req.noise.or_else(|| circuit.noise().cloned()),
        include_trace: req.include_trace,
        include_density: req.include_density,
    };
    options.check(&circuit)?;
    Ok((circuit, options))
}

pub async fn handler(body: Bytes) -> Result<Response, ApiError> {
    let (circuit, options) = prepare(&body)?;
    let text = tokio::task::spawn_blocking(move || -> Result<String, ApiError> {
        let report = simulate(&circuit, &options)?;
        let response = SimulationResponse::new(report, circuit.measured().to_vec());
        to_json_text(&response).map_err(|e| ApiError::internal(e.to_string()))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(([(CONTENT_TYPE, "application/json")], text).into_response())
}
