use std::convert::Infallible;
use std::ops::ControlFlow;
use std::sync::atomic::Ordering;

use axum::body::Bytes;
use axum::extract::State;
use axum::response::sse::{Event, KeepAlive, Sse};
use futures::stream::{self, Stream};
use serde::{Deserialize, Serialize};
use tokio::sync::mpsc;

use qsim_core::vqe::{
    optimize_with, random_params, AnsatzConfig, FactorizationProblem, StateProbability,
    DEFAULT_CONVERGENCE, DEFAULT_LAYERS, DEFAULT_LEARNING_RATE, DEFAULT_MAX_ITERS, TOP_K,
};
use qsim_export::round_json;

use crate::error::ApiError;
use crate::AppState;

/// Factorization target plus optional optimizer settings; omitted fields take the defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorRequest {
    pub target: u64,
    pub bits_p: u32,
    pub bits_q: u32,
    pub layers: Option<usize>,
    pub learning_rate: Option<f64>,
    pub max_iters: Option<usize>,
    pub convergence_amplitude: Option<f64>,
    pub seed: Option<u64>,
    pub initial_params: Option<Vec<f64>>,
    pub normalize_cost: Option<bool>,
}

impl FactorRequest {
    pub fn resolve(&self) -> Result<(FactorizationProblem, AnsatzConfig), ApiError> {
        let problem = FactorizationProblem::new(self.target, self.bits_p, self.bits_q)?;
        let qubits = problem.free_qubits();
        let layers = self.layers.unwrap_or(DEFAULT_LAYERS);
        let seed = self.seed.unwrap_or(0);
        let cfg = AnsatzConfig {
            layers,
            initial_params: self.initial_params.clone().unwrap_or_else(|| {
                random_params(qsim_core::vqe::param_count(layers, qubits), seed)
            }),
            learning_rate: self.learning_rate.unwrap_or(DEFAULT_LEARNING_RATE),
            max_iters: self.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
            convergence_amplitude: self.convergence_amplitude.unwrap_or(DEFAULT_CONVERGENCE),
            seed,
            normalize_cost: self.normalize_cost.unwrap_or(true),
        };
        cfg.validate(qubits)?;
        Ok((problem, cfg))
    }
}

#[derive(Serialize)]
struct IterationEvent {
    iter: usize,
    cost: f64,
    solution_probability: f64,
    top_states: Vec<StateProbability>,
}

fn json_event(name: &str, value: &impl Serialize) -> Event {
    let mut v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
    round_json(&mut v);
    Event::default().event(name).data(v.to_string())
}

/// Decrements the live-run counter however the worker exits.
struct RunGuard(std::sync::Arc<std::sync::atomic::AtomicUsize>);

impl Drop for RunGuard {
    fn drop(&mut self) {
        self.0.fetch_sub(1, Ordering::SeqCst);
    }
}

pub async fn handler(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let req: FactorRequest = ApiError::parse_body(&body)?;
    let (problem, cfg) = req.resolve()?;
    let (tx, rx) = mpsc::channel::<Event>(16);
    state.active_vqe_runs.fetch_add(1, Ordering::SeqCst);
    let guard = RunGuard(state.active_vqe_runs.clone());
    tokio::task::spawn_blocking(move || {
        let _guard = guard;
        let qubits = problem.free_qubits();
        let outcome = optimize_with(&problem, &cfg, |rec| {
            let event = IterationEvent {
                iter: rec.iter,
                cost: rec.cost,
                solution_probability: rec.solution_probability,
                top_states: rec.top_states(TOP_K, qubits),
            };
            // a closed channel means the client went away
            match tx.blocking_send(json_event("iteration", &event)) {
                Ok(()) => ControlFlow::Continue(()),
                Err(_) => ControlFlow::Break(()),
            }
        });
        let last = match outcome {
            Ok(result) if result.aborted => return,
            Ok(result) => json_event("result", &result),
            Err(e) => json_event("error", &serde_json::json!({ "message": e.to_string() })),
        };
        let _ = tx.blocking_send(last);
    });
    let events = stream::unfold(
        rx,
        |mut rx| async move { rx.recv().await.map(|e| (Ok(e), rx)) },
    );
    Ok(Sse::new(events).keep_alive(KeepAlive::default()))
}
