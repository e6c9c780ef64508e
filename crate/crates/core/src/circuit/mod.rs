//! The N×M circuit grid: rows are qubits, columns are stages.

mod fixtures;
mod json;
mod random;
mod text;

pub use fixtures::{builtin_circuit, builtin_circuits, FIXTURE_NAMES};
pub use json::{CellJson, CircuitJson, FORMAT_VERSION};
pub use random::random_circuit;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{gate_matrix, GateKind, GateSpec};
use crate::limits::{check_cap, MATRIX_MODE_MAX_QUBITS};
use crate::linalg::CMatrix;
use crate::noise::NoiseConfig;
use crate::scalar::Scalar;
use crate::state::{scatter_table, StateVector, UnitaryMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CircuitCell {
    Identity,
    Gate(GateSpec),
    /// Control dot for the X target in the same column.
    Control,
    /// One end of a SWAP; a column holds exactly two.
    SwapEndpoint,
}

impl CircuitCell {
    pub fn gate(kind: GateKind) -> Self {
        CircuitCell::Gate(GateSpec::fixed(kind))
    }

    pub fn rotation(kind: GateKind, params: Vec<f64>) -> Self {
        CircuitCell::Gate(GateSpec { kind, params })
    }

    fn is_identity(&self) -> bool {
        matches!(self, CircuitCell::Identity)
            || matches!(self, CircuitCell::Gate(g) if g.kind == GateKind::I)
    }
}

/// One resolved operation of a stage. `qubits[0]` maps to the most significant
/// index bit of the gate's matrix (the control for CNOT).
#[derive(Debug, Clone, PartialEq)]
pub struct StageOp {
    pub gate: GateSpec,
    pub qubits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    num_stages: usize,
    /// `grid[qubit][stage]`.
    grid: Vec<Vec<CircuitCell>>,
    /// Initial bit per qubit, indexed by qubit.
    initial_bits: Vec<bool>,
    /// Sorted, without duplicates.
    measured: Vec<usize>,
    noise: Option<NoiseConfig>,
}

impl Circuit {
    /// Validates the grid and derives its dimensions.
    pub fn new(
        mut grid: Vec<Vec<CircuitCell>>,
        initial_bits: Vec<bool>,
        measured: Vec<usize>,
    ) -> Result<Self> {
        for cell in grid.iter_mut().flatten() {
            if matches!(cell, CircuitCell::Gate(g) if g.kind == GateKind::I && g.params.is_empty())
            {
                *cell = CircuitCell::Identity;
            }
        }
        let num_qubits = grid.len();
        if num_qubits == 0 {
            return Err(Error::circuit(
                None,
                None,
                "circuit needs at least one qubit",
            ));
        }
        let num_stages = grid[0].len();
        if num_stages == 0 {
            return Err(Error::circuit(
                None,
                None,
                "circuit needs at least one stage",
            ));
        }
        if let Some((q, row)) = grid.iter().enumerate().find(|(_, r)| r.len() != num_stages) {
            return Err(Error::circuit(
                Some(q),
                None,
                format!("row has {} stages, expected {num_stages}", row.len()),
            ));
        }
        if initial_bits.len() != num_qubits {
            return Err(Error::circuit(
                None,
                None,
                format!(
                    "{} initial bits for {num_qubits} qubits",
                    initial_bits.len()
                ),
            ));
        }
        let mut measured = measured;
        measured.sort_unstable();
        measured.dedup();
        if let Some(&q) = measured.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::circuit(Some(q), None, "measured qubit out of range"));
        }
        let circuit = Self {
            num_qubits,
            num_stages,
            grid,
            initial_bits,
            measured,
            noise: None,
        };
        for stage in 0..num_stages {
            circuit.stage_ops(stage)?;
        }
        Ok(circuit)
    }

    /// All-|0⟩ circuit with every qubit measured.
    pub fn from_grid(grid: Vec<Vec<CircuitCell>>) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![false; n], (0..n).collect())
    }

    pub fn with_noise(mut self, noise: Option<NoiseConfig>) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_initial_bits(mut self, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != self.num_qubits {
            return Err(Error::circuit(
                None,
                None,
                "initial bit count differs from qubit count",
            ));
        }
        self.initial_bits = bits;
        Ok(self)
    }

    /// Sets the initial basis state from an index (bit k is qubit k).
    pub fn with_initial_index(self, index: usize) -> Result<Self> {
        let n = self.num_qubits;
        self.with_initial_bits((0..n).map(|k| index >> k & 1 == 1).collect())
    }

    pub fn with_measured(mut self, measured: Vec<usize>) -> Result<Self> {
        let c = Self::new(
            std::mem::take(&mut self.grid),
            self.initial_bits.clone(),
            measured,
        )?;
        Ok(c.with_noise(self.noise))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_stages(&self) -> usize {
        self.num_stages
    }

    pub fn cell(&self, qubit: usize, stage: usize) -> &CircuitCell {
        &self.grid[qubit][stage]
    }

    pub fn grid(&self) -> &[Vec<CircuitCell>] {
        &self.grid
    }

    pub fn initial_bits(&self) -> &[bool] {
        &self.initial_bits
    }

    /// Basis index of the initial state.
    pub fn initial_index(&self) -> usize {
        self.initial_bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .fold(0, |acc, (k, _)| acc | 1 << k)
    }

    pub fn initial_state<T: Scalar>(&self) -> Result<StateVector<T>> {
        StateVector::basis(self.num_qubits, self.initial_index())
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    pub fn noise(&self) -> Option<&NoiseConfig> {
        self.noise.as_ref()
    }

    /// Resolves one column into gate applications on explicit qubits.
    pub fn stage_ops(&self, stage: usize) -> Result<Vec<StageOp>> {
        if stage >= self.num_stages {
            return Err(Error::circuit(
                None,
                Some(stage),
                format!("stage out of range (circuit has {})", self.num_stages),
            ));
        }
        let mut controls = Vec::new();
        let mut swaps = Vec::new();
        let mut gates = Vec::new();
        for q in 0..self.num_qubits {
            match &self.grid[q][stage] {
                CircuitCell::Control => controls.push(q),
                CircuitCell::SwapEndpoint => swaps.push(q),
                cell if cell.is_identity() => {}
                CircuitCell::Gate(spec) => {
                    if spec.kind.num_qubits() != 1 {
                        return Err(Error::circuit(
                            Some(q),
                            Some(stage),
                            format!(
                                "{} cannot occupy a single cell; use C/SW markers",
                                spec.kind
                            ),
                        ));
                    }
                    spec.validate()
                        .map_err(|e| Error::circuit(Some(q), Some(stage), e.to_string()))?;
                    gates.push((q, spec.clone()));
                }
                CircuitCell::Identity => unreachable!(),
            }
        }
        let mut ops = Vec::new();
        if !swaps.is_empty() {
            if swaps.len() != 2 {
                return Err(Error::circuit(
                    Some(swaps[0]),
                    Some(stage),
                    format!("column has {} swap endpoints, expected 2", swaps.len()),
                ));
            }
            if let Some(&c) = controls.first() {
                return Err(Error::circuit(
                    Some(c),
                    Some(stage),
                    "controls and swaps cannot share a column",
                ));
            }
            ops.push(StageOp {
                gate: GateSpec::fixed(GateKind::SWAP),
                qubits: vec![swaps[1], swaps[0]],
            });
        }
        if !controls.is_empty() {
            let target = match gates.as_slice() {
                [] => {
                    return Err(Error::circuit(
                        Some(controls[0]),
                        Some(stage),
                        "control without a target",
                    ));
                }
                [(q, spec)] if spec.kind == GateKind::X => *q,
                [(q, spec)] => {
                    return Err(Error::circuit(
                        Some(*q),
                        Some(stage),
                        format!("controlled target must be X, found {}", spec.kind),
                    ));
                }
                [_, (q, _), ..] => {
                    return Err(Error::circuit(
                        Some(*q),
                        Some(stage),
                        "a controlled column holds exactly one gate (the X target)",
                    ));
                }
            };
            let kind = match controls.len() {
                1 => GateKind::CNOT,
                2 => GateKind::TOFFOLI,
                n => {
                    return Err(Error::circuit(
                        Some(controls[2]),
                        Some(stage),
                        format!("{n} controls on one target; at most 2 supported"),
                    ));
                }
            };
            let mut qubits: Vec<usize> = controls.iter().rev().copied().collect();
            qubits.push(target);
            ops.push(StageOp {
                gate: GateSpec::fixed(kind),
                qubits,
            });
            return Ok(ops);
        }
        ops.extend(gates.into_iter().map(|(q, gate)| StageOp {
            gate,
            qubits: vec![q],
        }));
        Ok(ops)
    }

    /// Circuit running the adjoint of every stage in reverse order.
    pub fn inverse(&self) -> Self {
        let mut grid = vec![Vec::with_capacity(self.num_stages); self.num_qubits];
        for stage in (0..self.num_stages).rev() {
            for (q, row) in grid.iter_mut().enumerate() {
                let cell = match &self.grid[q][stage] {
                    CircuitCell::Gate(spec) => CircuitCell::Gate(adjoint_spec(spec)),
                    other => other.clone(),
                };
                row.push(cell);
            }
        }
        Self {
            grid,
            ..self.clone()
        }
    }
}

fn adjoint_spec(spec: &GateSpec) -> GateSpec {
    use GateKind::*;
    let p = &spec.params;
    match spec.kind {
        S => GateSpec::fixed(Sdg),
        Sdg => GateSpec::fixed(S),
        T => GateSpec::fixed(Tdg),
        Tdg => GateSpec::fixed(T),
        SX => GateSpec::fixed(SXdg),
        SXdg => GateSpec::fixed(SX),
        U1 | RX | RY | RZ => GateSpec {
            kind: spec.kind,
            params: vec![-p[0]],
        },
        // U2(θ, φ) = U3(π/2, φ, θ); its adjoint is U3(-π/2, -θ, -φ)
        U2 => GateSpec {
            kind: U3,
            params: vec![-std::f64::consts::FRAC_PI_2, -p[0], -p[1]],
        },
        U3 => GateSpec {
            kind: U3,
            params: vec![-p[0], -p[2], -p[1]],
        },
        _ => spec.clone(),
    }
}

/// Lifts a `k`-qubit gate matrix onto an `n`-qubit register by conjugating
/// `gate ⊗ I` with the basis permutation that brings `qubits` to the top.
pub fn embed_gate<T: Scalar>(gate: &CMatrix<T>, qubits: &[usize], num_qubits: usize) -> CMatrix<T> {
    let k = qubits.len();
    debug_assert_eq!(gate.dim(), 1 << k);
    let rest: Vec<usize> = (0..num_qubits).filter(|q| !qubits.contains(q)).collect();
    let lifted = gate.kron(&CMatrix::identity(1 << rest.len()));
    // virtual bit (n-1-i) carries qubits[i]; lower virtual bits carry `rest` in order
    let perm: Vec<usize> = (0..1usize << num_qubits)
        .map(|x| {
            let mut v = 0;
            for (i, &q) in qubits.iter().enumerate() {
                v |= (x >> q & 1) << (num_qubits - 1 - i);
            }
            for (i, &q) in rest.iter().enumerate() {
                v |= (x >> q & 1) << i;
            }
            v
        })
        .collect();
    lifted.permute_basis(&perm)
}

/// Full `2^N × 2^N` operator for one stage.
pub fn stage_operator<T: Scalar>(circuit: &Circuit, stage: usize) -> Result<UnitaryMatrix<T>> {
    check_cap("stage operator", circuit.num_qubits, MATRIX_MODE_MAX_QUBITS)?;
    let ops = circuit.stage_ops(stage)?;
    let n = circuit.num_qubits;
    let mut singles: Vec<CMatrix<T>> = vec![CMatrix::identity(2); n];
    let mut multi = Vec::new();
    for op in ops {
        let m = gate_matrix::<T>(&op.gate)?.into_matrix();
        if op.qubits.len() == 1 {
            singles[op.qubits[0]] = m;
        } else {
            multi.push((m, op.qubits));
        }
    }
    let mut full = singles
        .iter()
        .rev()
        .skip(1)
        .fold(singles[n - 1].clone(), |acc, m| acc.kron(m));
    for (m, qubits) in multi {
        full = embed_gate(&m, &qubits, n).matmul(&full)?;
    }
    Ok(UnitaryMatrix::from_matrix_unchecked(full))
}

/// Applies a `k`-qubit gate to the amplitudes in place without forming the full operator.
pub(crate) fn apply_gate_in_place<T: Scalar>(
    amps: &mut [num_complex::Complex<T>],
    gate: &CMatrix<T>,
    qubits: &[usize],
) {
    use rayon::prelude::*;
    let k = qubits.len();
    let sub = 1usize << k;
    let reversed: Vec<usize> = qubits.iter().rev().copied().collect();
    let offsets = scatter_table(&reversed);
    let mask = offsets[sub - 1];
    let block = 1usize << (qubits.iter().max().copied().unwrap_or(0) + 1);
    let kernel = |chunk: &mut [num_complex::Complex<T>]| {
        let mut gathered = vec![num_complex::Complex::new(T::zero(), T::zero()); sub];
        for base in (0..chunk.len()).filter(|b| b & mask == 0) {
            for (s, g) in gathered.iter_mut().enumerate() {
                *g = chunk[base | offsets[s]];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let row = gate.row(r);
                chunk[base | off] = row.iter().zip(&gathered).fold(
                    num_complex::Complex::new(T::zero(), T::zero()),
                    |acc, (a, b)| acc + a * b,
                );
            }
        }
    };
    if amps.len() >= 1 << 14 && amps.len() / block >= 2 {
        amps.par_chunks_mut(block).for_each(kernel);
    } else {
        amps.chunks_mut(block).for_each(kernel);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{apply_unitary, tensor_product};
    use num_complex::Complex;

    fn cells(row: &[&str]) -> Vec<CircuitCell> {
        row.iter().map(|t| text::parse_token(t).unwrap()).collect()
    }

    #[test]
    fn control_column_resolution() {
        let c = Circuit::from_grid(vec![cells(&["H", "C"]), cells(&["I", "X"])]).unwrap();
        let ops = c.stage_ops(1).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].gate.kind, GateKind::CNOT);
        assert_eq!(ops[0].qubits, vec![0, 1]);
    }

    #[test]
    fn column_errors_carry_coordinates() {
        let dangling = Circuit::from_grid(vec![cells(&["C"]), cells(&["I"])]).unwrap_err();
        assert!(matches!(
            dangling,
            Error::Circuit {
                row: Some(0),
                column: Some(0),
                ..
            }
        ));
        let wrong_target = Circuit::from_grid(vec![cells(&["C"]), cells(&["H"])]).unwrap_err();
        assert!(matches!(
            wrong_target,
            Error::Circuit {
                row: Some(1),
                column: Some(0),
                ..
            }
        ));
        let one_swap = Circuit::from_grid(vec![cells(&["SW"]), cells(&["I"])]).unwrap_err();
        assert!(matches!(
            one_swap,
            Error::Circuit {
                column: Some(0),
                ..
            }
        ));
        let three = Circuit::from_grid(vec![
            cells(&["C"]),
            cells(&["C"]),
            cells(&["C"]),
            cells(&["X"]),
        ]);
        assert!(three.is_err());
        let extra = Circuit::from_grid(vec![cells(&["C"]), cells(&["X"]), cells(&["X"])]);
        assert!(extra.is_err());
        let ragged = Circuit::from_grid(vec![cells(&["H", "H"]), cells(&["H"])]);
        assert!(matches!(ragged, Err(Error::Circuit { row: Some(1), .. })));
        let bad_cell = Circuit::from_grid(vec![vec![CircuitCell::gate(GateKind::CNOT)]]);
        assert!(bad_cell.is_err());
    }

    #[test]
    fn identity_column_is_identity() {
        let c = Circuit::from_grid(vec![cells(&["I"]), cells(&["I"]), cells(&["I"])]).unwrap();
        let u = stage_operator::<f64>(&c, 0).unwrap();
        assert_eq!(u.matrix(), &CMatrix::identity(8));
    }

    #[test]
    fn h_on_qubit_zero_is_i_kron_h() {
        let c = Circuit::from_grid(vec![cells(&["H"]), cells(&["I"])]).unwrap();
        let u = stage_operator::<f64>(&c, 0).unwrap();
        let h = gate_matrix::<f64>(&GateSpec::fixed(GateKind::H)).unwrap();
        let expect = tensor_product(&UnitaryMatrix::identity(1), &h).unwrap();
        assert!(u.matrix().max_abs_diff(expect.matrix()) < 1e-15);
    }

    #[test]
    fn cnot_q0_to_q2_truth_table() {
        // oracle: flip bit 2 iff bit 0 set
        let c = Circuit::from_grid(vec![cells(&["C"]), cells(&["I"]), cells(&["X"])]).unwrap();
        let u = stage_operator::<f64>(&c, 0).unwrap();
        for x in 0..8usize {
            let expect = if x & 1 == 1 { x ^ 0b100 } else { x };
            let out = apply_unitary(&u, &StateVector::basis(3, x).unwrap()).unwrap();
            assert_eq!(out.probabilities()[expect], 1.0, "input {x:03b}");
        }
    }

    #[test]
    fn swap_and_toffoli_placement() {
        let c = Circuit::from_grid(vec![
            cells(&["SW", "X"]),
            cells(&["H", "C"]),
            cells(&["SW", "C"]),
        ])
        .unwrap();
        let swap = stage_operator::<f64>(&c, 0).unwrap();
        // qubit 1 carries H, the swap exchanges qubits 0 and 2
        let out = apply_unitary(&swap, &StateVector::basis(3, 0b001).unwrap()).unwrap();
        let p = out.probabilities();
        assert!((p[0b100] - 0.5).abs() < 1e-15 && (p[0b110] - 0.5).abs() < 1e-15);
        let tof = stage_operator::<f64>(&c, 1).unwrap();
        for x in 0..8usize {
            let expect = if x & 0b110 == 0b110 { x ^ 1 } else { x };
            let out = apply_unitary(&tof, &StateVector::basis(3, x).unwrap()).unwrap();
            assert_eq!(out.probabilities()[expect], 1.0);
        }
    }

    #[test]
    fn in_place_kernel_matches_embedding() {
        let psi: Vec<Complex<f64>> = (0..16)
            .map(|k| Complex::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let u3 = gate_matrix::<f64>(&GateSpec::new(GateKind::U3, vec![0.3, 1.2, -0.4]).unwrap())
            .unwrap()
            .into_matrix();
        let tof = gate_matrix::<f64>(&GateSpec::fixed(GateKind::TOFFOLI))
            .unwrap()
            .into_matrix();
        for (gate, qubits) in [
            (u3.clone(), vec![2]),
            (tof.clone(), vec![3, 0, 1]),
            (tof, vec![1, 2, 3]),
        ] {
            let mut fast = psi.clone();
            apply_gate_in_place(&mut fast, &gate, &qubits);
            let slow = embed_gate(&gate, &qubits, 4).apply(&psi).unwrap();
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn inverse_undoes_circuit() {
        let c = Circuit::from_grid(vec![
            cells(&["H", "U2(0.3,1.1)", "C", "S"]),
            cells(&["T", "U3(0.5,0.2,-0.9)", "X", "SX"]),
        ])
        .unwrap();
        let inv = c.inverse();
        let mut total = CMatrix::<f64>::identity(4);
        for s in 0..4 {
            total = stage_operator::<f64>(&c, s)
                .unwrap()
                .matrix()
                .matmul(&total)
                .unwrap();
        }
        for s in 0..4 {
            total = stage_operator::<f64>(&inv, s)
                .unwrap()
                .matrix()
                .matmul(&total)
                .unwrap();
        }
        assert!(total.max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn stage_cap() {
        let c = Circuit::from_grid(vec![cells(&["H"]); 13]).unwrap();
        assert!(matches!(
            stage_operator::<f64>(&c, 0),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
