//! Built-in validation circuits.

use super::Circuit;
use crate::vqe::{build_ansatz, AnsatzConfig, FactorizationProblem};

pub const FIXTURE_NAMES: [&str; 4] = ["full_adder", "dj_balanced", "grover3_110", "vqe91_ansatz"];

/// A = q0, B = q1, Cin = q2; S lands on q3 and Cout on q4. B is restored.
const FULL_ADDER: &str = "\
qubits 5 stages 6
init 00000
q0: C , C , I , I , I , C
q1: C , X , C , C , I , X
q2: I , I , C , I , C , I
q3: I , I , I , X , X , I
q4: X , I , X , I , I , I
measure 3 4
";

/// Balanced oracle f(x) = x0 ⊕ x1 ⊕ x2 ⊕ x3 on ancilla q4.
const DJ_BALANCED: &str = "\
qubits 5 stages 7
init 00000
q0: I , H , C , I , I , I , H
q1: I , H , I , C , I , I , H
q2: I , H , I , I , C , I , H
q3: I , H , I , I , I , C , H
q4: X , H , X , X , X , X , I
measure 0 1 2 3
";

/// Two Grover iterations searching for |110⟩, starting from |110⟩.
///
/// The oracle `X·H·CCX·H·X` on q0 flips the sign of |110⟩. Because the start
/// state H|110⟩ overlaps |110⟩ with modulus 1/√8, reflecting about it
/// (`H·oracle·H`, up to a global sign) gives standard amplitude amplification.
fn grover3_110() -> String {
    type Column = [&'static str; 3];
    let oracle: [Column; 5] = [
        ["X", "I", "I"],
        ["H", "I", "I"],
        ["X", "C", "C"],
        ["H", "I", "I"],
        ["X", "I", "I"],
    ];
    let hall: Column = ["H", "H", "H"];
    let mut cols = vec![hall];
    for _ in 0..2 {
        cols.extend(oracle);
        cols.push(hall);
        cols.extend(oracle);
        cols.push(hall);
    }
    let row = |q: usize| cols.iter().map(|c| c[q]).collect::<Vec<_>>().join(" , ");
    format!(
        "qubits 3 stages {}\ninit 110\nq0: {}\nq1: {}\nq2: {}\nmeasure 0 1 2\n",
        cols.len(),
        row(0),
        row(1),
        row(2)
    )
}

/// Seed used to draw the initial angles of the factorization ansatz fixture.
pub const VQE91_FIXTURE_SEED: u64 = 1;

fn vqe91_ansatz() -> Circuit {
    let problem = FactorizationProblem::new(91, 4, 3).expect("91 = 13 x 7 fits 4/3 bits");
    let cfg = AnsatzConfig::seeded(3, problem.free_qubits(), VQE91_FIXTURE_SEED);
    build_ansatz(&cfg.initial_params, cfg.layers, problem.free_qubits()).expect("valid ansatz")
}

pub fn builtin_circuit(name: &str) -> Option<Circuit> {
    let parse = |src: &str| Circuit::parse_text(src).expect("built-in fixture parses");
    match name {
        "full_adder" => Some(parse(FULL_ADDER)),
        "dj_balanced" => Some(parse(DJ_BALANCED)),
        "grover3_110" => Some(parse(&grover3_110())),
        "vqe91_ansatz" => Some(vqe91_ansatz()),
        _ => None,
    }
}

pub fn builtin_circuits() -> Vec<(&'static str, Circuit)> {
    FIXTURE_NAMES
        .iter()
        .map(|&n| (n, builtin_circuit(n).expect("listed fixture exists")))
        .collect()
}
