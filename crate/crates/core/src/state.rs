//! Quantum state types: state vectors, density matrices, unitaries and Bloch vectors.
//!
//! Basis index bit `k` holds qubit `k`, so qubit 0 is the rightmost character of
//! a basis label and the operator for qubit `N-1` is the leftmost tensor factor.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{check_cap, MATRIX_MODE_MAX_QUBITS, VECTOR_MODE_MAX_QUBITS};
use crate::linalg::CMatrix;
use crate::scalar::Scalar;

fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim >= 2 && dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

/// A unitary operator on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix<T> {
    num_qubits: usize,
    matrix: CMatrix<T>,
}

impl<T: Scalar> UnitaryMatrix<T> {
    /// Validates dimension and `U†U = I` at the scalar's default tolerance.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let num_qubits = qubits_for_dim(matrix.dim()).ok_or(Error::DimensionMismatch {
            expected: matrix.dim().next_power_of_two().max(2),
            found: matrix.dim(),
        })?;
        let deviation = matrix.unitarity_deviation();
        if deviation.is_nan() || deviation > T::tolerance() {
            return Err(Error::NotUnitary {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self { num_qubits, matrix })
    }

    /// Wraps a matrix that is unitary by construction. Panics on a
    /// non-power-of-two dimension; unitarity is not rechecked.
    pub fn from_matrix_unchecked(matrix: CMatrix<T>) -> Self {
        let num_qubits =
            qubits_for_dim(matrix.dim()).expect("unitary dimension must be a power of two");
        Self { num_qubits, matrix }
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            matrix: CMatrix::identity(1 << num_qubits),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            matrix: self.matrix.adjoint(),
        }
    }
}

/// `a ⊗ b`, with `a` acting on the higher-index qubits.
pub fn tensor_product<T: Scalar>(
    a: &UnitaryMatrix<T>,
    b: &UnitaryMatrix<T>,
) -> Result<UnitaryMatrix<T>> {
    let n = a.num_qubits + b.num_qubits;
    check_cap("tensor product", n, MATRIX_MODE_MAX_QUBITS)?;
    Ok(UnitaryMatrix {
        num_qubits: n,
        matrix: a.matrix.kron(&b.matrix),
    })
}

/// `a · b` (apply `b` first).
pub fn mat_mul<T: Scalar>(a: &UnitaryMatrix<T>, b: &UnitaryMatrix<T>) -> Result<UnitaryMatrix<T>> {
    Ok(UnitaryMatrix {
        num_qubits: a.num_qubits,
        matrix: a.matrix.matmul(&b.matrix)?,
    })
}

/// State vector of `num_qubits` qubits, `2^num_qubits` amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector<T> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// Checks length, finiteness and normalization.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len()).ok_or_else(|| {
            Error::InvalidState(format!(
                "length {} is not 2^N with N >= 1",
                amplitudes.len()
            ))
        })?;
        check_cap("state vector", num_qubits, VECTOR_MODE_MAX_QUBITS)?;
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let state = Self {
            num_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > T::tolerance() {
            return Err(Error::InvalidState(format!(
                "squared norm {norm} differs from 1"
            )));
        }
        Ok(state)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::zero() || !norm.is_finite() {
            return Err(Error::InvalidState(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidState("at least one qubit required".into()));
        }
        check_cap("state vector", num_qubits, VECTOR_MODE_MAX_QUBITS)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|a_n|²` for every basis state.
    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Largest elementwise modulus of the amplitude difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Reduced density matrix over `keep`, computed directly from the amplitudes.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let split = QubitSplit::new(self.num_qubits, keep)?;
        let sub = 1usize << split.kept.len();
        let mut m = CMatrix::zeros(sub);
        for r in 0..sub {
            for c in r..sub {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &t in &split.traced_offsets {
                    acc = acc
                        + self.amplitudes[split.kept_offsets[r] | t]
                            * self.amplitudes[split.kept_offsets[c] | t].conj();
                }
                m.set(r, c, acc);
                m.set(c, r, acc.conj());
            }
        }
        Ok(DensityMatrix {
            num_qubits: split.kept.len(),
            matrix: m,
        })
    }

    pub fn cast<U: Scalar>(&self) -> StateVector<U> {
        StateVector {
            num_qubits: self.num_qubits,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|z| Complex::new(U::of(z.re.as_f64()), U::of(z.im.as_f64())))
                .collect(),
        }
    }
}

/// `u |psi⟩`.
pub fn apply_unitary<T: Scalar>(
    u: &UnitaryMatrix<T>,
    psi: &StateVector<T>,
) -> Result<StateVector<T>> {
    let amplitudes = u.matrix.apply(&psi.amplitudes)?;
    Ok(StateVector {
        num_qubits: psi.num_qubits,
        amplitudes,
    })
}

/// Index bookkeeping for splitting a register into kept and traced qubits.
struct QubitSplit {
    kept: Vec<usize>,
    /// Full-register index contribution of each reduced index.
    kept_offsets: Vec<usize>,
    /// Full-register index contribution of each traced configuration.
    traced_offsets: Vec<usize>,
}

impl QubitSplit {
    fn new(num_qubits: usize, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidQubits("no qubits to keep".into()));
        }
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        if kept.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidQubits(format!("duplicate qubit in {keep:?}")));
        }
        if let Some(&q) = kept.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::InvalidQubits(format!(
                "qubit {q} out of range for {num_qubits} qubits"
            )));
        }
        let traced: Vec<usize> = (0..num_qubits).filter(|q| !kept.contains(q)).collect();
        Ok(Self {
            kept_offsets: scatter_table(&kept),
            traced_offsets: scatter_table(&traced),
            kept,
        })
    }
}

/// For each `x` in `0..2^qubits.len()`, the index with bit `i` of `x` moved to bit `qubits[i]`.
pub(crate) fn scatter_table(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|x| {
            qubits
                .iter()
                .enumerate()
                .filter(|(i, _)| x >> i & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | 1 << q)
        })
        .collect()
}

/// Density matrix ρ over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    num_qubits: usize,
    matrix: CMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Checks hermiticity and unit trace. Positivity is checked separately by
    /// [`DensityMatrix::validate_psd`] since it needs an eigendecomposition.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let num_qubits = qubits_for_dim(matrix.dim()).ok_or_else(|| {
            Error::InvalidDensity(format!("dimension {} is not 2^n with n >= 1", matrix.dim()))
        })?;
        let tol = T::tolerance();
        let herm = matrix.hermiticity_deviation();
        if herm.is_nan() || herm > tol {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {herm})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub(crate) fn from_raw(num_qubits: usize, matrix: CMatrix<T>) -> Self {
        Self { num_qubits, matrix }
    }

    /// `|psi⟩⟨psi|`.
    pub fn from_state(psi: &StateVector<T>) -> Self {
        let dim = psi.dim();
        let a = psi.amplitudes();
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, a[i] * a[j].conj());
            }
        }
        Self {
            num_qubits: psi.num_qubits,
            matrix: m,
        }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let w = T::one() / T::of(dim as f64);
        Self {
            num_qubits,
            matrix: CMatrix::diagonal(&vec![Complex::new(w, T::zero()); dim]),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix.get(row, col)
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    /// Real diagonal: basis-state populations.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.matrix.get(i, i).re).collect()
    }

    /// Tr(ρ²), computed as Σ|ρ_ij|² (valid for Hermitian ρ).
    pub fn purity(&self) -> T {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reduced state over `keep`; kept qubits are renumbered in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let split = QubitSplit::new(self.num_qubits, keep)?;
        let sub = 1usize << split.kept.len();
        let mut m = CMatrix::zeros(sub);
        for r in 0..sub {
            for c in 0..sub {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &t in &split.traced_offsets {
                    acc = acc
                        + self
                            .matrix
                            .get(split.kept_offsets[r] | t, split.kept_offsets[c] | t);
                }
                m.set(r, c, acc);
            }
        }
        Ok(Self {
            num_qubits: split.kept.len(),
            matrix: m,
        })
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &UnitaryMatrix<T>) -> Result<Self> {
        let left = u.matrix().matmul(&self.matrix)?;
        let matrix = left.matmul(&u.matrix().adjoint())?;
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix,
        })
    }

    /// Smallest eigenvalue, computed in double precision.
    ///
    /// The Hermitian `A + iB` is embedded as the real symmetric `[[A, -B], [B, A]]`,
    /// whose spectrum is that of ρ with every eigenvalue doubled in multiplicity.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let embed = nalgebra::DMatrix::<f64>::from_fn(2 * d, 2 * d, |i, j| {
            let z = self.matrix.get(i % d, j % d);
            let (re, im) = (z.re.as_f64(), z.im.as_f64());
            match (i < d, j < d) {
                (true, true) | (false, false) => re,
                (true, false) => -im,
                (false, true) => im,
            }
        });
        nalgebra::SymmetricEigen::new(embed)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Full validity check: Hermitian, unit trace, eigenvalues ≥ −1e-9.
    pub fn validate_psd(&self) -> Result<()> {
        Self::new(self.matrix.clone())?;
        let min = self.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

/// Bloch vector `(Tr ρX, Tr ρY, Tr ρZ)` of a single-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> BlochVector<T> {
    pub fn length(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

pub fn bloch_vector<T: Scalar>(rho: &DensityMatrix<T>) -> Result<BlochVector<T>> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let (r00, r01, r10, r11) = (rho.get(0, 0), rho.get(0, 1), rho.get(1, 0), rho.get(1, 1));
    let i = Complex::new(T::zero(), T::one());
    Ok(BlochVector {
        x: (r01 + r10).re,
        y: (i * (r01 - r10)).re,
        z: (r00 - r11).re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn bell() -> StateVector<f64> {
        StateVector::new(vec![
            c(FRAC_1_SQRT_2, 0.),
            c(0., 0.),
            c(0., 0.),
            c(FRAC_1_SQRT_2, 0.),
        ])
        .unwrap()
    }

    fn plus() -> StateVector<f64> {
        StateVector::new(vec![c(FRAC_1_SQRT_2, 0.), c(FRAC_1_SQRT_2, 0.)]).unwrap()
    }

    #[test]
    fn state_rejects_bad_inputs() {
        assert!(StateVector::<f64>::new(vec![c(1., 0.)]).is_err());
        assert!(StateVector::<f64>::new(vec![c(1., 0.), c(0., 0.), c(0., 0.)]).is_err());
        assert!(StateVector::<f64>::new(vec![c(1., 0.), c(1., 0.)]).is_err());
        assert!(StateVector::<f64>::new(vec![c(f64::NAN, 0.), c(0., 0.)]).is_err());
        assert!(StateVector::<f64>::basis(2, 4).is_err());
        assert!(matches!(
            StateVector::<f64>::basis(25, 0),
            Err(Error::ResourceLimit { cap: 24, .. })
        ));
    }

    #[test]
    fn tensor_product_cap() {
        let a = UnitaryMatrix::<f64>::identity(6);
        let b = UnitaryMatrix::<f64>::identity(7);
        assert!(matches!(
            tensor_product(&a, &b),
            Err(Error::ResourceLimit { cap: 12, .. })
        ));
    }

    #[test]
    fn unitary_new_rejects_non_unitary() {
        let m = CMatrix::from_rows(vec![
            vec![c(1., 0.), c(1., 0.)],
            vec![c(1., 0.), c(-1., 0.)],
        ])
        .unwrap();
        assert!(matches!(
            UnitaryMatrix::new(m),
            Err(Error::NotUnitary { .. })
        ));
        assert!(UnitaryMatrix::new(CMatrix::<f64>::identity(3)).is_err());
    }

    #[test]
    fn density_from_basis_and_plus() {
        let rho = DensityMatrix::from_state(&StateVector::<f64>::basis(1, 0).unwrap());
        assert_eq!(rho.diagonal(), vec![1.0, 0.0]);
        assert_eq!(rho.get(0, 1), c(0., 0.));
        let rho = DensityMatrix::from_state(&plus());
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.get(i, j) - c(0.5, 0.)).norm() < 1e-15);
            }
        }
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_product_state() {
        // |0⟩⊗|1⟩ = |01⟩: qubit 1 is 0, qubit 0 is 1
        let rho = DensityMatrix::from_state(&StateVector::<f64>::basis(2, 0b01).unwrap());
        let q0 = rho.partial_trace(&[0]).unwrap();
        assert_eq!(q0.diagonal(), vec![0.0, 1.0]);
        let q1 = rho.partial_trace(&[1]).unwrap();
        assert_eq!(q1.diagonal(), vec![1.0, 0.0]);
        assert!((q0.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        // hand oracle: ρ_A[i][j] = Σ_k ρ[(k,i)][(k,j)] over the 4x4 Bell density
        let rho = DensityMatrix::from_state(&bell());
        for keep in [0, 1] {
            let red = rho.partial_trace(&[keep]).unwrap();
            assert!(
                red.matrix()
                    .max_abs_diff(DensityMatrix::maximally_mixed(1).matrix())
                    < 1e-15
            );
        }
    }

    #[test]
    fn partial_trace_keep_all_is_identity_op() {
        let rho = DensityMatrix::from_state(&bell());
        assert_eq!(rho.partial_trace(&[1, 0]).unwrap(), rho);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = DensityMatrix::from_state(&bell());
        assert!(rho.partial_trace(&[]).is_err());
        assert!(rho.partial_trace(&[2]).is_err());
        assert!(rho.partial_trace(&[0, 0]).is_err());
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let psi = StateVector::normalized(vec![
            c(0.3, 0.1),
            c(-0.2, 0.5),
            c(0.7, 0.0),
            c(0.1, -0.4),
            c(0.2, 0.2),
            c(0., 0.3),
            c(-0.5, 0.),
            c(0.1, 0.1),
        ])
        .unwrap();
        let rho = DensityMatrix::from_state(&psi);
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![2, 1, 0]] {
            let a = rho.partial_trace(&keep).unwrap();
            let b = psi.reduced_density(&keep).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
        }
    }

    #[test]
    fn bloch_vectors() {
        let z = bloch_vector(&DensityMatrix::from_state(
            &StateVector::<f64>::basis(1, 0).unwrap(),
        ))
        .unwrap();
        assert_eq!((z.x, z.y, z.z), (0.0, 0.0, 1.0));
        let x = bloch_vector(&DensityMatrix::from_state(&plus())).unwrap();
        assert!((x.x - 1.0).abs() < 1e-15 && x.y.abs() < 1e-15 && x.z.abs() < 1e-15);
        let m = bloch_vector(&DensityMatrix::<f64>::maximally_mixed(1)).unwrap();
        assert_eq!((m.x, m.y, m.z), (0.0, 0.0, 0.0));
        // |+i⟩ = (|0⟩ + i|1⟩)/√2 points along +y
        let yi = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.), c(0., FRAC_1_SQRT_2)]).unwrap();
        let y = bloch_vector(&DensityMatrix::from_state(&yi)).unwrap();
        assert!((y.y - 1.0).abs() < 1e-15);
        assert!(bloch_vector(&DensityMatrix::from_state(&bell())).is_err());
    }

    #[test]
    fn purity_of_mixed() {
        for n in 1..4 {
            let p = DensityMatrix::<f64>::maximally_mixed(n).purity();
            assert!((p - 1.0 / (1 << n) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn psd_check() {
        let rho = DensityMatrix::from_state(&bell());
        assert!(rho.min_eigenvalue() > -1e-12);
        rho.validate_psd().unwrap();
        let bad = CMatrix::diagonal(&[c(1.5, 0.), c(-0.5, 0.)]);
        let bad = DensityMatrix::new(bad).unwrap();
        assert!(bad.validate_psd().is_err());
    }

    #[test]
    fn density_new_checks() {
        assert!(DensityMatrix::new(CMatrix::<f64>::identity(2)).is_err());
        let skew = CMatrix::from_rows(vec![
            vec![c(0.5, 0.), c(0.1, 0.)],
            vec![c(0.2, 0.), c(0.5, 0.)],
        ])
        .unwrap();
        assert!(DensityMatrix::new(skew).is_err());
    }
}
