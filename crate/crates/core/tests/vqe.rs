use std::ops::ControlFlow;

use proptest::prelude::*;

use qsim_core::vqe::{
    build_cost_diagonal, cost, gradient_for_diagonal, optimize, optimize_with, param_count,
    AnsatzConfig, FactorizationProblem, VqeRunLog, COMMITTED_SEEDS,
};

fn central_difference(
    params: &[f64],
    layers: usize,
    qubits: usize,
    diag: &[f64],
    h: f64,
) -> Vec<f64> {
    (0..params.len())
        .map(|j| {
            let mut p = params.to_vec();
            p[j] += h;
            let plus = cost::<f64>(&p, layers, qubits, diag).unwrap();
            p[j] -= 2.0 * h;
            let minus = cost::<f64>(&p, layers, qubits, diag).unwrap();
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parameter_shift_matches_finite_differences(
        seed in any::<u64>(),
        layers in 1usize..=3,
        qubits in 1usize..=4,
    ) {
        let params = qsim_core::vqe::random_params(param_count(layers, qubits), seed);
        // a small, unnormalized diagonal keeps finite-difference noise low
        let diag: Vec<f64> = (0..1usize << qubits).map(|x| ((x * 7 + 3) % 5) as f64).collect();
        let exact = gradient_for_diagonal(&params, layers, qubits, &diag).unwrap();
        let fd = central_difference(&params, layers, qubits, &diag, 1e-5);
        for (a, b) in exact.iter().zip(&fd) {
            prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}

#[test]
fn single_rotation_gradient_is_half_sine() {
    // C(θ) = sin²(θ/2) for RY(θ)|0⟩ against diag(0, 1).
    for theta in [0.1, 0.7, 1.9, -2.4] {
        let g = gradient_for_diagonal(&[theta], 0, 1, &[0.0, 1.0]).unwrap();
        assert!((g[0] - theta.sin() / 2.0).abs() < 1e-12);
    }
}

#[test]
fn cost_diagonal_marks_the_factorization() {
    let problem = FactorizationProblem::new(91, 4, 3).unwrap();
    let diag = build_cost_diagonal(&problem).unwrap();
    let zeros: Vec<usize> = (0..diag.len()).filter(|&x| diag[x] == 0.0).collect();
    assert_eq!(zeros, vec![problem.encode(13, 7).unwrap()]);
    assert_eq!(problem.label(zeros[0]), "11110");
    assert_eq!(problem.decode(zeros[0]), (13, 7));
}

#[test]
fn tiny_problem_finds_its_only_factorization() {
    let problem = FactorizationProblem::new(9, 2, 2).unwrap();
    let cfg = AnsatzConfig::seeded(1, problem.free_qubits(), 0);
    let run = optimize(&problem, &cfg).unwrap();
    assert!(run.converged_at.is_some());
    assert_eq!(run.recovered_factors, (3, 3));
}

#[test]
fn runs_are_bitwise_reproducible() {
    let problem = FactorizationProblem::new(77, 4, 3).unwrap();
    let mut cfg = AnsatzConfig::seeded(3, problem.free_qubits(), COMMITTED_SEEDS[2]);
    cfg.max_iters = 15;
    let a = optimize(&problem, &cfg).unwrap();
    let b = optimize(&problem, &cfg).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.cost_curve), bits(&b.cost_curve));
    assert_eq!(bits(&a.final_params), bits(&b.final_params));
}

#[test]
fn observer_can_abort() {
    let problem = FactorizationProblem::new(91, 4, 3).unwrap();
    let cfg = AnsatzConfig::seeded(3, problem.free_qubits(), 1);
    let mut seen = 0;
    let run = optimize_with(&problem, &cfg, |rec| {
        seen += 1;
        if rec.iter == 4 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .unwrap();
    assert!(run.aborted);
    assert_eq!(seen, 5);
    assert_eq!(run.cost_curve.len(), 5);
}

#[test]
fn run_log_reports_top_states() {
    let problem = FactorizationProblem::new(91, 4, 3).unwrap();
    let mut cfg = AnsatzConfig::seeded(3, problem.free_qubits(), 0);
    cfg.max_iters = 3;
    let run = optimize(&problem, &cfg).unwrap();
    let log = VqeRunLog::new(&problem, &cfg, &run);
    assert_eq!(log.iterations.len(), 4);
    for it in &log.iterations {
        assert_eq!(it.top_states.len(), qsim_core::vqe::TOP_K);
        assert!(it.top_states.windows(2).all(|w| w[0].prob >= w[1].prob));
    }
}

#[test]
fn rejects_bad_problems() {
    assert!(FactorizationProblem::new(90, 4, 3).is_err());
    assert!(FactorizationProblem::new(1001, 4, 3).is_err());
    assert!(FactorizationProblem::new(3, 1, 1).is_err());
}
