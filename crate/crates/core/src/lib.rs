//! Gate-model quantum circuit simulation on dense complex linear algebra.
//!
//! Numerical types are generic over the real scalar ([`Scalar`], implemented
//! for `f32` and `f64`). The aliases below fix double precision, which is what
//! the circuit engine, noise evolution and VQE use by default.

pub mod circuit;
pub mod engine;
pub mod error;
pub mod gates;
pub mod limits;
pub mod linalg;
pub mod noise;
pub mod scalar;
pub mod state;
pub mod vqe;
pub mod wire;

pub use circuit::{
    builtin_circuit, builtin_circuits, stage_operator, Circuit, CircuitCell, CircuitJson,
};
pub use engine::{
    build_algorithm_matrix, measure_density, measure_distribution, run_matrix_mode,
    run_vector_mode, trace_bloch, AlgorithmMatrix, MeasurementDistribution, SimulationMode,
    TraceRecord,
};
pub use error::{Error, Result};
pub use gates::{gate_matrix, validate_catalog, GateKind, GateSpec};
pub use noise::{depolarize, max_error_rate, run_noisy, NoiseConfig, NoiseMode};
pub use scalar::{Scalar, TOLERANCE};
pub use state::{apply_unitary, bloch_vector, mat_mul, tensor_product};

pub use num_complex::Complex;

pub type Complex64 = num_complex::Complex<f64>;
pub type CMatrix = linalg::CMatrix<f64>;
pub type StateVector = state::StateVector<f64>;
pub type DensityMatrix = state::DensityMatrix<f64>;
pub type UnitaryMatrix = state::UnitaryMatrix<f64>;
pub type BlochVector = state::BlochVector<f64>;

pub type Complex32 = num_complex::Complex<f32>;
pub type CMatrix32 = linalg::CMatrix<f32>;
pub type StateVector32 = state::StateVector<f32>;
pub type DensityMatrix32 = state::DensityMatrix<f32>;
pub type UnitaryMatrix32 = state::UnitaryMatrix<f32>;
pub type BlochVector32 = state::BlochVector<f32>;
