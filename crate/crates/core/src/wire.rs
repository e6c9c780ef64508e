//! JSON shapes for complex numbers and matrices.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::CMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl<T: Scalar> From<Complex<T>> for ComplexJson {
    fn from(z: Complex<T>) -> Self {
        Self {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        }
    }
}

impl ComplexJson {
    pub fn to_complex<T: Scalar>(self) -> Complex<T> {
        Complex::new(T::of(self.re), T::of(self.im))
    }
}

pub fn matrix_to_json<T: Scalar>(m: &CMatrix<T>) -> Vec<Vec<ComplexJson>> {
    m.rows()
        .map(|r| r.iter().map(|&z| z.into()).collect())
        .collect()
}

pub fn matrix_from_json<T: Scalar>(rows: &[Vec<ComplexJson>]) -> Result<CMatrix<T>> {
    CMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|z| z.to_complex()).collect())
            .collect(),
    )
}

pub fn vector_to_json<T: Scalar>(v: &[Complex<T>]) -> Vec<ComplexJson> {
    v.iter().map(|&z| z.into()).collect()
}
