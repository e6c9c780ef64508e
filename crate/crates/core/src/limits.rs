//! Qubit caps for dense storage.

/// Largest register for which a full `2^N × 2^N` operator is materialized.
pub const MATRIX_MODE_MAX_QUBITS: usize = 12;
/// Largest register for stage-by-stage state-vector evolution.
pub const VECTOR_MODE_MAX_QUBITS: usize = 24;
/// Largest register for density-matrix (noisy) evolution.
pub const DENSITY_MAX_QUBITS: usize = 8;
/// Trace records carry a full density matrix only up to this many qubits.
pub const TRACE_DENSITY_MAX_QUBITS: usize = 8;

use crate::error::{Error, Result};

pub fn check_cap(context: &'static str, requested: usize, cap: usize) -> Result<()> {
    if requested > cap {
        Err(Error::ResourceLimit {
            context,
            requested,
            cap,
        })
    } else {
        Ok(())
    }
}
