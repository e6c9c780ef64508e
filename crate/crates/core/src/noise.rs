//! Global depolarizing channel `ξ(ρ) = (1 − p)ρ + p·I/2^n` and noisy circuit evolution.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{stage_operator, Circuit};
use crate::error::{Error, Result};
use crate::limits::{check_cap, DENSITY_MAX_QUBITS};
use crate::scalar::Scalar;
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Constant rate `p` at every stage.
    #[default]
    Overshoot,
    /// Per-stage rate drawn uniformly from `[0, p]`.
    Stochastic,
}

impl FromStr for NoiseMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "overshoot" => Ok(NoiseMode::Overshoot),
            "stochastic" => Ok(NoiseMode::Stochastic),
            other => Err(format!(
                "unknown noise mode `{other}` (expected overshoot or stochastic)"
            )),
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseMode::Overshoot => "overshoot",
            NoiseMode::Stochastic => "stochastic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub p: f64,
    #[serde(default)]
    pub mode: NoiseMode,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseConfig {
    pub fn overshoot(p: f64) -> Self {
        Self {
            p,
            mode: NoiseMode::Overshoot,
            seed: 0,
        }
    }

    pub fn stochastic(p: f64, seed: u64) -> Self {
        Self {
            p,
            mode: NoiseMode::Stochastic,
            seed,
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        check_rate(self.p, num_qubits)
    }
}

/// Upper end of the admissible error rate, `4^n / (4^n − 1)`.
pub fn max_error_rate(num_qubits: usize) -> f64 {
    let d2 = 4f64.powi(num_qubits as i32);
    d2 / (d2 - 1.0)
}

fn check_rate(p: f64, num_qubits: usize) -> Result<()> {
    let max = max_error_rate(num_qubits);
    if !(0.0..=max).contains(&p) {
        return Err(Error::NoiseRate {
            p,
            max,
            qubits: num_qubits,
        });
    }
    Ok(())
}

/// One application of the depolarizing channel over the whole register.
pub fn depolarize<T: Scalar>(rho: &DensityMatrix<T>, p: f64) -> Result<DensityMatrix<T>> {
    let n = rho.num_qubits();
    check_rate(p, n)?;
    let keep = Complex::new(T::of(1.0 - p), T::zero());
    let mixed = T::of(p) / T::of(rho.dim() as f64);
    let mut m = rho.matrix().scale(keep);
    for i in 0..rho.dim() {
        let d = m.get(i, i);
        m.set(i, i, Complex::new(d.re + mixed, d.im));
    }
    let out = DensityMatrix::from_raw(n, m);
    if p > 1.0 {
        // beyond p = 1 the channel is no longer a convex mixture
        out.validate_psd()?;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct NoisyRun<T> {
    pub final_density: DensityMatrix<T>,
    /// Index 0 is the initial state, then one entry per stage.
    pub trace: Vec<DensityMatrix<T>>,
    /// Rate applied after each stage.
    pub stage_rates: Vec<f64>,
    /// Set when `p > 1`, where only the global form of the channel stays valid.
    pub rate_above_unity: bool,
}

/// Deterministic per-stage rates for `cfg` over `num_stages` stages.
pub fn stage_rates(cfg: &NoiseConfig, num_stages: usize) -> Vec<f64> {
    match cfg.mode {
        NoiseMode::Overshoot => vec![cfg.p; num_stages],
        NoiseMode::Stochastic => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..num_stages)
                .map(|_| rng.random_range(0.0..=cfg.p))
                .collect()
        }
    }
}

/// Density evolution `ρ ← ξ_s(U_s ρ U_s†)` over every stage.
pub fn run_noisy<T: Scalar>(circuit: &Circuit, cfg: &NoiseConfig) -> Result<NoisyRun<T>> {
    let n = circuit.num_qubits();
    check_cap("density evolution", n, DENSITY_MAX_QUBITS)?;
    cfg.validate(n)?;
    let rates = stage_rates(cfg, circuit.num_stages());
    let mut rho = DensityMatrix::from_state(&circuit.initial_state::<T>()?);
    let mut trace = vec![rho.clone()];
    for (stage, &p) in rates.iter().enumerate() {
        let u = stage_operator::<T>(circuit, stage)?;
        rho = depolarize(&rho.conjugate_by(&u)?, p)?;
        trace.push(rho.clone());
    }
    Ok(NoisyRun {
        final_density: rho,
        trace,
        stage_rates: rates,
        rate_above_unity: cfg.p > 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;

    fn plus() -> DensityMatrix<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_state(
            &StateVector::new(vec![Complex::new(h, 0.), Complex::new(h, 0.)]).unwrap(),
        )
    }

    #[test]
    fn p_zero_and_one() {
        let rho = plus();
        assert_eq!(depolarize(&rho, 0.0).unwrap(), rho);
        let mixed = depolarize(&rho, 1.0).unwrap();
        assert!(
            mixed
                .matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(1).matrix())
                < 1e-15
        );
    }

    #[test]
    fn purity_formula_single_qubit() {
        let out = depolarize(&plus(), 0.05).unwrap();
        assert!((out.purity() - 0.95125).abs() < 1e-12);
    }

    #[test]
    fn range_rejection() {
        assert!((max_error_rate(1) - 4.0 / 3.0).abs() < 1e-15);
        assert!(depolarize(&plus(), 4.0 / 3.0).is_ok());
        assert!(matches!(
            depolarize(&plus(), 1.34),
            Err(Error::NoiseRate { .. })
        ));
        assert!(depolarize(&plus(), -0.01).is_err());
        assert!(depolarize(&plus(), f64::NAN).is_err());
    }

    #[test]
    fn maximally_mixed_is_fixed_point() {
        let m = DensityMatrix::<f64>::maximally_mixed(2);
        for p in [0.0, 0.3, 1.0, max_error_rate(2)] {
            assert!(depolarize(&m, p).unwrap().matrix().max_abs_diff(m.matrix()) < 1e-15);
        }
    }

    #[test]
    fn stochastic_rates_reproducible_and_bounded() {
        let cfg = NoiseConfig::stochastic(0.2, 42);
        let a = stage_rates(&cfg, 50);
        assert_eq!(a, stage_rates(&cfg, 50));
        assert!(a.iter().all(|&p| (0.0..=0.2).contains(&p)));
        assert_ne!(a, stage_rates(&NoiseConfig::stochastic(0.2, 43), 50));
        assert_eq!(stage_rates(&NoiseConfig::overshoot(0.1), 3), vec![0.1; 3]);
    }

    #[test]
    fn mode_parse() {
        assert_eq!(
            "stochastic".parse::<NoiseMode>().unwrap(),
            NoiseMode::Stochastic
        );
        assert!("loud".parse::<NoiseMode>().is_err());
    }
}
