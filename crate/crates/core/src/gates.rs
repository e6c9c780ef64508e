//! Gate catalog: the twenty named gates and their unitary matrices.
//!
//! Entries follow the usual normalized forms: H and U2 carry a 1/√2 prefactor,
//! SX and SX† carry 1/2, and the lower-right entry of U3 is `e^{i(λ+φ)} cos(θ/2)`.
//! Multi-qubit matrices are written with the control(s) on the high index bits.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Scalar;
use crate::state::UnitaryMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Sdg,
    Tdg,
    U1,
    U2,
    U3,
    RX,
    RY,
    RZ,
    SX,
    SXdg,
    SWAP,
    CNOT,
    TOFFOLI,
}

impl GateKind {
    pub const ALL: [GateKind; 20] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::Sdg,
        GateKind::Tdg,
        GateKind::U1,
        GateKind::U2,
        GateKind::U3,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::SX,
        GateKind::SXdg,
        GateKind::SWAP,
        GateKind::CNOT,
        GateKind::TOFFOLI,
    ];

    /// Single-qubit gates, i.e. the ones that may occupy one grid cell.
    pub const SINGLE_QUBIT: [GateKind; 17] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::Sdg,
        GateKind::Tdg,
        GateKind::U1,
        GateKind::U2,
        GateKind::U3,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::SX,
        GateKind::SXdg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Sdg => "Sdg",
            GateKind::Tdg => "Tdg",
            GateKind::U1 => "U1",
            GateKind::U2 => "U2",
            GateKind::U3 => "U3",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::SX => "SX",
            GateKind::SXdg => "SXdg",
            GateKind::SWAP => "SWAP",
            GateKind::CNOT => "CNOT",
            GateKind::TOFFOLI => "TOFFOLI",
        }
    }

    /// Token used in the text grid format. Multi-qubit gates have none: they
    /// are spelled with `C` and `SW` markers.
    pub fn token(self) -> Option<&'static str> {
        Some(match self {
            GateKind::Sdg => "SD",
            GateKind::Tdg => "TD",
            GateKind::SXdg => "SXD",
            GateKind::SWAP | GateKind::CNOT | GateKind::TOFFOLI => return None,
            other => other.name(),
        })
    }

    /// Human-facing symbol for palettes.
    pub fn symbol(self) -> &'static str {
        match self {
            GateKind::Sdg => "S†",
            GateKind::Tdg => "T†",
            GateKind::SXdg => "SX†",
            GateKind::RX => "Rx",
            GateKind::RY => "Ry",
            GateKind::RZ => "Rz",
            GateKind::TOFFOLI => "Toffoli",
            other => other.name(),
        }
    }

    pub fn num_qubits(self) -> usize {
        match self {
            GateKind::SWAP | GateKind::CNOT => 2,
            GateKind::TOFFOLI => 3,
            _ => 1,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            GateKind::U1 | GateKind::RX | GateKind::RY => &["theta"],
            GateKind::RZ => &["phi"],
            GateKind::U2 => &["theta", "phi"],
            GateKind::U3 => &["theta", "phi", "lambda"],
            _ => &[],
        }
    }

    pub fn num_params(self) -> usize {
        self.param_names().len()
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    /// Accepts catalog names and text tokens, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_uppercase() == upper || k.token() == Some(upper.as_str()))
            .ok_or_else(|| Error::UnknownGate(s.to_string()))
    }
}

/// A catalog gate with bound angles (radians).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: GateKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
}

impl GateSpec {
    /// Validated constructor.
    pub fn new(kind: GateKind, params: Vec<f64>) -> Result<Self> {
        let spec = Self { kind, params };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fixed(kind: GateKind) -> Self {
        debug_assert_eq!(kind.num_params(), 0);
        Self {
            kind,
            params: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.len() != self.kind.num_params() {
            return Err(Error::ParamCount {
                gate: self.kind.name(),
                expected: self.kind.num_params(),
                found: self.params.len(),
            });
        }
        if self.params.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFiniteAngle {
                gate: self.kind.name(),
            });
        }
        Ok(())
    }
}

fn raw_matrix<T: Scalar>(spec: &GateSpec) -> CMatrix<T> {
    let re = |x: f64| Complex::new(T::of(x), T::zero());
    let cis = |a: f64| Complex::new(T::of(a.cos()), T::of(a.sin()));
    let zero = re(0.0);
    let one = re(1.0);
    let i = Complex::new(T::zero(), T::one());
    let p = |k: usize| spec.params[k];
    let m2 = |a, b, c, d| CMatrix::from_vec(2, vec![a, b, c, d]).expect("2x2");
    let permutation = |dim: usize, swap: (usize, usize)| {
        let mut m = CMatrix::identity(dim);
        let (a, b) = swap;
        m.set(a, a, zero);
        m.set(b, b, zero);
        m.set(a, b, one);
        m.set(b, a, one);
        m
    };
    match spec.kind {
        GateKind::I => CMatrix::identity(2),
        GateKind::X => m2(zero, one, one, zero),
        GateKind::Y => m2(zero, -i, i, zero),
        GateKind::Z => m2(one, zero, zero, -one),
        GateKind::H => {
            let h = re(FRAC_1_SQRT_2);
            m2(h, h, h, -h)
        }
        GateKind::S => m2(one, zero, zero, i),
        GateKind::T => m2(one, zero, zero, cis(FRAC_PI_4)),
        GateKind::Sdg => m2(one, zero, zero, -i),
        GateKind::Tdg => m2(one, zero, zero, cis(-FRAC_PI_4)),
        GateKind::U1 => m2(one, zero, zero, cis(p(0))),
        GateKind::U2 => {
            let (theta, phi) = (p(0), p(1));
            let h = re(FRAC_1_SQRT_2);
            m2(h, -cis(theta) * h, cis(phi) * h, cis(theta + phi) * h)
        }
        GateKind::U3 => {
            let (theta, phi, lambda) = (p(0), p(1), p(2));
            let (c, s) = (re((theta / 2.0).cos()), re((theta / 2.0).sin()));
            m2(c, -cis(lambda) * s, cis(phi) * s, cis(lambda + phi) * c)
        }
        GateKind::RX => {
            let (c, s) = (re((p(0) / 2.0).cos()), re((p(0) / 2.0).sin()));
            m2(c, -i * s, -i * s, c)
        }
        GateKind::RY => {
            let (c, s) = (re((p(0) / 2.0).cos()), re((p(0) / 2.0).sin()));
            m2(c, -s, s, c)
        }
        GateKind::RZ => m2(cis(-p(0) / 2.0), zero, zero, cis(p(0) / 2.0)),
        GateKind::SX => {
            let (a, b) = (
                Complex::new(T::of(0.5), T::of(0.5)),
                Complex::new(T::of(0.5), T::of(-0.5)),
            );
            m2(a, b, b, a)
        }
        GateKind::SXdg => {
            let (a, b) = (
                Complex::new(T::of(0.5), T::of(-0.5)),
                Complex::new(T::of(0.5), T::of(0.5)),
            );
            m2(a, b, b, a)
        }
        GateKind::SWAP => permutation(4, (1, 2)),
        GateKind::CNOT => permutation(4, (2, 3)),
        GateKind::TOFFOLI => permutation(8, (6, 7)),
    }
}

/// Unitary matrix of a catalog gate.
pub fn gate_matrix<T: Scalar>(spec: &GateSpec) -> Result<UnitaryMatrix<T>> {
    spec.validate()?;
    Ok(UnitaryMatrix::from_matrix_unchecked(raw_matrix(spec)))
}

/// Angles sampled per parameter when validating the catalog.
pub const VALIDATION_ANGLES: [f64; 4] = [0.0, FRAC_PI_3, FRAC_PI_2, PI];

/// Tolerance for catalog unitarity and algebraic identities.
pub const CATALOG_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitarityViolation {
    pub gate: GateKind,
    pub params: Vec<f64>,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogReport {
    pub gates: usize,
    pub matrices_checked: usize,
    pub violations: Vec<UnitarityViolation>,
    pub identities: Vec<IdentityCheck>,
}

impl CatalogReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.identities.iter().all(|c| c.passed)
    }
}

/// Every parameter binding on the validation grid for `kind`.
pub fn parameter_grid(kind: GateKind) -> Vec<Vec<f64>> {
    (0..kind.num_params()).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                VALIDATION_ANGLES.iter().map(move |&a| {
                    let mut next = prefix.clone();
                    next.push(a);
                    next
                })
            })
            .collect()
    })
}

/// Validates the built-in catalog: unitarity over the parameter grid plus the
/// algebraic identities between gates.
pub fn validate_catalog() -> CatalogReport {
    let mut report = validate_catalog_with(raw_matrix::<f64>);
    report.identities = check_identities();
    report
}

/// Unitarity sweep over an arbitrary matrix provider (identities are not checked).
pub fn validate_catalog_with(provider: impl Fn(&GateSpec) -> CMatrix<f64>) -> CatalogReport {
    let mut violations = Vec::new();
    let mut checked = 0;
    for kind in GateKind::ALL {
        for params in parameter_grid(kind) {
            let spec = GateSpec { kind, params };
            let deviation = provider(&spec).unitarity_deviation();
            checked += 1;
            if deviation.is_nan() || deviation > CATALOG_TOLERANCE {
                violations.push(UnitarityViolation {
                    gate: kind,
                    params: spec.params,
                    deviation,
                });
            }
        }
    }
    CatalogReport {
        gates: GateKind::ALL.len(),
        matrices_checked: checked,
        violations,
        identities: Vec::new(),
    }
}

fn m(kind: GateKind, params: &[f64]) -> CMatrix<f64> {
    raw_matrix(&GateSpec {
        kind,
        params: params.to_vec(),
    })
}

/// Largest |A_ij - c·B_ij| where `c` is the phase fixed by the largest entry of `b`.
pub fn global_phase_deviation(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
    let (mut best, mut idx) = (0.0, 0);
    for (k, z) in b.as_slice().iter().enumerate() {
        if z.norm() > best {
            best = z.norm();
            idx = k;
        }
    }
    let phase = a.as_slice()[idx] / b.as_slice()[idx];
    a.max_abs_diff(&b.scale(phase))
        .max((phase.norm() - 1.0).abs())
}

/// The algebraic relations between catalog gates.
pub fn check_identities() -> Vec<IdentityCheck> {
    let prod = |a: &CMatrix<f64>, b: &CMatrix<f64>| a.matmul(b).expect("equal dims");
    let id = |d| CMatrix::<f64>::identity(d);
    let mut out = Vec::new();
    let mut record = |identity: &'static str, deviation: f64| {
        out.push(IdentityCheck {
            identity,
            deviation,
            passed: deviation <= CATALOG_TOLERANCE,
        })
    };
    use GateKind::*;
    for (name, kind) in [
        ("X^2 = I", X),
        ("Y^2 = I", Y),
        ("Z^2 = I", Z),
        ("H^2 = I", H),
        ("SWAP^2 = I", SWAP),
        ("CNOT^2 = I", CNOT),
        ("TOFFOLI^2 = I", TOFFOLI),
    ] {
        let g = m(kind, &[]);
        record(name, prod(&g, &g).max_abs_diff(&id(g.dim())));
    }
    for (name, a, b) in [
        ("S Sdg = I", S, Sdg),
        ("T Tdg = I", T, Tdg),
        ("SX SXdg = I", SX, SXdg),
    ] {
        record(name, prod(&m(a, &[]), &m(b, &[])).max_abs_diff(&id(2)));
    }
    record(
        "T^2 = S",
        prod(&m(T, &[]), &m(T, &[])).max_abs_diff(&m(S, &[])),
    );
    record(
        "S^2 = Z",
        prod(&m(S, &[]), &m(S, &[])).max_abs_diff(&m(Z, &[])),
    );
    record(
        "SX^2 = X",
        prod(&m(SX, &[]), &m(SX, &[])).max_abs_diff(&m(X, &[])),
    );
    let mut worst_rz: f64 = 0.0;
    let mut worst_u3: f64 = 0.0;
    for a in VALIDATION_ANGLES.iter().chain(&[0.37, -1.9, 2.6]) {
        worst_rz = worst_rz.max(global_phase_deviation(&m(RZ, &[*a]), &m(U1, &[*a])));
        worst_u3 = worst_u3.max(global_phase_deviation(
            &m(U3, &[*a, 0.0, 0.0]),
            &m(RY, &[*a]),
        ));
    }
    record("RZ(phi) ~ U1(phi) up to global phase", worst_rz);
    record("U3(theta, 0, 0) ~ RY(theta) up to global phase", worst_u3);
    // TOFFOLI restricted to the control-high-bit-set subspace acts as CNOT
    let toffoli = m(TOFFOLI, &[]);
    let cnot = m(CNOT, &[]);
    let mut dev: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            dev = dev.max((toffoli.get(4 + r, 4 + c) - cnot.get(r, c)).norm());
        }
    }
    record("TOFFOLI with control fixed to |1> = CNOT", dev);
    out
}

/// Palette/catalog entry shipped to front ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateDescriptor {
    pub name: &'static str,
    pub token: Option<&'static str>,
    pub symbol: &'static str,
    pub qubits: usize,
    pub params: &'static [&'static str],
    /// Matrix at all-zero angles, rows of `{re, im}`.
    pub matrix: Vec<Vec<crate::wire::ComplexJson>>,
}

pub fn catalog() -> Vec<GateDescriptor> {
    GateKind::ALL
        .into_iter()
        .map(|kind| GateDescriptor {
            name: kind.name(),
            token: kind.token(),
            symbol: kind.symbol(),
            qubits: kind.num_qubits(),
            params: kind.param_names(),
            matrix: crate::wire::matrix_to_json(&m(kind, &vec![0.0; kind.num_params()])),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn printed_entries() {
        let x = gate_matrix::<f64>(&GateSpec::fixed(GateKind::X)).unwrap();
        assert_eq!(
            x.matrix().as_slice(),
            &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]
        );
        let t = gate_matrix::<f64>(&GateSpec::fixed(GateKind::T)).unwrap();
        let e = c(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert_eq!(t.matrix().get(0, 0), c(1., 0.));
        assert!((t.matrix().get(1, 1) - e).norm() < 1e-15);
        assert_eq!(t.matrix().get(0, 1), c(0., 0.));
    }

    #[test]
    fn ry_pi() {
        let ry = gate_matrix::<f64>(&GateSpec::new(GateKind::RY, vec![PI]).unwrap()).unwrap();
        let want = CMatrix::from_vec(2, vec![c(0., 0.), c(-1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        assert!(ry.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn param_count_and_finiteness() {
        assert!(matches!(
            GateSpec::new(GateKind::U3, vec![0.1]),
            Err(Error::ParamCount {
                expected: 3,
                found: 1,
                ..
            })
        ));
        assert!(GateSpec::new(GateKind::X, vec![0.1]).is_err());
        assert!(GateSpec::new(GateKind::RX, vec![f64::INFINITY]).is_err());
        let bad = GateSpec {
            kind: GateKind::U2,
            params: vec![],
        };
        assert!(gate_matrix::<f64>(&bad).is_err());
    }

    #[test]
    fn names_and_tokens_parse() {
        for kind in GateKind::ALL {
            assert_eq!(kind.name().parse::<GateKind>().unwrap(), kind);
            if let Some(tok) = kind.token() {
                assert_eq!(tok.parse::<GateKind>().unwrap(), kind);
            }
        }
        assert_eq!("sxd".parse::<GateKind>().unwrap(), GateKind::SXdg);
        assert!(matches!(
            "FOO".parse::<GateKind>(),
            Err(Error::UnknownGate(_))
        ));
    }

    #[test]
    fn catalog_validates_clean() {
        let report = validate_catalog();
        assert_eq!(report.gates, 20);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        for id in &report.identities {
            assert!(id.passed, "{} deviates by {}", id.identity, id.deviation);
        }
        // 14 fixed + U1/RX/RY/RZ (4 each) + U2 (16) + U3 (64)
        assert_eq!(report.matrices_checked, 14 + 16 + 16 + 64);
    }

    #[test]
    fn unnormalized_h_is_reported() {
        let report = validate_catalog_with(|spec| {
            if spec.kind == GateKind::H {
                CMatrix::from_vec(2, vec![c(1., 0.), c(1., 0.), c(1., 0.), c(-1., 0.)]).unwrap()
            } else {
                raw_matrix(spec)
            }
        });
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].gate, GateKind::H);
    }

    #[test]
    fn printed_u3_phase_is_not_unitary() {
        // lower-right entry e^{i(λ+θ)}cos(θ/2) as printed
        let (theta, phi, lambda) = (1.1, 0.4, -0.7);
        let cis = |a: f64| c(a.cos(), a.sin());
        let (co, si) = ((theta / 2.0f64).cos(), (theta / 2.0f64).sin());
        let printed = CMatrix::from_vec(
            2,
            vec![
                c(co, 0.),
                -cis(lambda) * si,
                cis(phi) * si,
                cis(lambda + theta) * co,
            ],
        )
        .unwrap();
        assert!(printed.unitarity_deviation() > 1e-3);
    }

    #[test]
    fn toffoli_is_permutation() {
        let t = m(GateKind::TOFFOLI, &[]);
        for row in t.rows() {
            assert_eq!(row.iter().filter(|z| **z == c(1., 0.)).count(), 1);
            assert_eq!(row.iter().filter(|z| **z == c(0., 0.)).count(), 7);
        }
    }

    #[test]
    fn descriptors() {
        let cat = catalog();
        assert_eq!(cat.len(), 20);
        let u3 = cat.iter().find(|d| d.name == "U3").unwrap();
        assert_eq!(u3.params.len(), 3);
        assert_eq!(cat.iter().find(|d| d.name == "TOFFOLI").unwrap().qubits, 3);
    }

    #[test]
    fn single_precision_catalog_is_unitary() {
        for kind in GateKind::ALL {
            for params in parameter_grid(kind) {
                let u = gate_matrix::<f32>(&GateSpec { kind, params }).unwrap();
                assert!(u.matrix().is_unitary(1e-6));
            }
        }
    }
}
