use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsim_core::circuit::random_circuit;
use qsim_core::noise::stage_rates;
use qsim_core::{
    builtin_circuit, depolarize, max_error_rate, measure_density, run_noisy, run_vector_mode,
    Complex64, DensityMatrix, NoiseConfig, StateVector,
};

fn pure_density(qubits: usize, seed: u64) -> DensityMatrix {
    let c = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), qubits, 4).unwrap();
    DensityMatrix::from_state(&run_vector_mode::<f64>(&c).unwrap().final_state)
}

proptest! {
    #[test]
    fn purity_follows_closed_form(seed in any::<u64>(), qubits in 1usize..=3, frac in 0.0f64..=1.0) {
        let p = frac * max_error_rate(qubits);
        let rho = pure_density(qubits, seed);
        let d = (1usize << qubits) as f64;
        let expected = (1.0 - p).powi(2) * rho.purity() + 2.0 * p * (1.0 - p) / d + p * p / d;
        let out = depolarize(&rho, p).unwrap();
        prop_assert!((out.purity() - expected).abs() < 1e-12);
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.matrix().hermiticity_deviation() < 1e-14);
    }

    #[test]
    fn output_stays_positive_over_the_whole_range(seed in any::<u64>(), qubits in 1usize..=3, frac in 0.0f64..=1.0) {
        let p = frac * max_error_rate(qubits);
        let out = depolarize(&pure_density(qubits, seed), p).unwrap();
        prop_assert!(out.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn stochastic_rates_are_seeded_and_bounded(seed in any::<u64>(), p in 0.0f64..1.0) {
        let cfg = NoiseConfig::stochastic(p, seed);
        let a = stage_rates(&cfg, 12);
        prop_assert_eq!(&a, &stage_rates(&cfg, 12));
        prop_assert!(a.iter().all(|&r| (0.0..=p).contains(&r)));
    }
}

#[test]
fn identity_and_full_mixing() {
    let rho = pure_density(2, 3);
    assert_eq!(depolarize(&rho, 0.0).unwrap(), rho);
    let mixed = depolarize(&rho, 1.0).unwrap();
    assert!(
        mixed
            .matrix()
            .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
            < 1e-15
    );
    assert!((mixed.purity() - 0.25).abs() < 1e-15);
}

#[test]
fn rates_past_the_bound_are_rejected() {
    for n in 1..=5 {
        let max = max_error_rate(n);
        let rho = DensityMatrix::maximally_mixed(n);
        assert!(depolarize(&rho, max).is_ok());
        assert!(depolarize(&rho, max + 1e-9).is_err());
    }
    assert!((max_error_rate(5) - 1024.0 / 1023.0).abs() < 1e-15);
}

#[test]
fn bound_rate_on_a_pure_state_overshoots_the_mixed_state() {
    // p = 4/3 on |0⟩⟨0| gives diag(1/3, 2/3): past I/2 but still positive.
    let psi = StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
    let out = depolarize(&DensityMatrix::from_state(&psi), max_error_rate(1)).unwrap();
    assert!((out.get(0, 0).re - 1.0 / 3.0).abs() < 1e-15);
    assert!((out.min_eigenvalue() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn fixtures_keep_their_answer_under_overshoot_noise() {
    for name in ["full_adder", "dj_balanced", "grover3_110"] {
        let c = builtin_circuit(name).unwrap();
        let noisy = run_noisy::<f64>(&c, &NoiseConfig::overshoot(0.05)).unwrap();
        let clean = run_noisy::<f64>(&c, &NoiseConfig::overshoot(0.0)).unwrap();
        let rho = &noisy.final_density;
        assert!((rho.trace().re - 1.0).abs() < 1e-10, "{name}");
        assert!(rho.purity() < clean.final_density.purity(), "{name}");
        let argmax = |v: Vec<f64>| (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b });
        assert_eq!(
            argmax(rho.diagonal()),
            argmax(clean.final_density.diagonal()),
            "{name}"
        );
        let noisy_dist = measure_density(rho, c.measured()).unwrap();
        let clean_dist = measure_density(&clean.final_density, c.measured()).unwrap();
        assert_eq!(noisy_dist.argmax(), clean_dist.argmax(), "{name}");
    }
}
