//! Random circuits over the whole gate catalog, for fuzzing and equivalence checks.

use std::f64::consts::TAU;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{Circuit, CircuitCell};
use crate::error::Result;
use crate::gates::{GateKind, GateSpec};

fn random_single<R: Rng + ?Sized>(rng: &mut R) -> CircuitCell {
    let kind = *GateKind::SINGLE_QUBIT.choose(rng).expect("non-empty");
    let params = (0..kind.num_params())
        .map(|_| rng.random_range(-TAU..TAU))
        .collect();
    CircuitCell::Gate(GateSpec { kind, params })
}

fn distinct<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, count).into_vec()
}

/// Draws a valid `num_qubits × num_stages` circuit.
///
/// Each column is either a layer of random single-qubit gates (identity cells
/// included) or one of CNOT, Toffoli, SWAP on random wires, with the remaining
/// wires filled by single-qubit gates where the column rules allow.
pub fn random_circuit<R: Rng + ?Sized>(
    rng: &mut R,
    num_qubits: usize,
    num_stages: usize,
) -> Result<Circuit> {
    let mut grid = vec![Vec::with_capacity(num_stages); num_qubits];
    for _ in 0..num_stages {
        let mut column: Vec<CircuitCell> = (0..num_qubits)
            .map(|_| {
                if rng.random_bool(0.2) {
                    CircuitCell::Identity
                } else {
                    random_single(rng)
                }
            })
            .collect();
        let choice = rng.random_range(0..4u8);
        match choice {
            1 if num_qubits >= 2 => {
                column.fill(CircuitCell::Identity);
                let w = distinct(rng, num_qubits, 2);
                column[w[0]] = CircuitCell::Control;
                column[w[1]] = CircuitCell::gate(GateKind::X);
            }
            2 if num_qubits >= 3 => {
                column.fill(CircuitCell::Identity);
                let w = distinct(rng, num_qubits, 3);
                column[w[0]] = CircuitCell::Control;
                column[w[1]] = CircuitCell::Control;
                column[w[2]] = CircuitCell::gate(GateKind::X);
            }
            3 if num_qubits >= 2 => {
                let w = distinct(rng, num_qubits, 2);
                column[w[0]] = CircuitCell::SwapEndpoint;
                column[w[1]] = CircuitCell::SwapEndpoint;
            }
            _ => {}
        }
        for (row, cell) in grid.iter_mut().zip(column) {
            row.push(cell);
        }
    }
    let bits = (0..num_qubits).map(|_| rng.random_bool(0.5)).collect();
    let measured = (0..num_qubits).collect();
    Circuit::new(grid, bits, measured)
}
