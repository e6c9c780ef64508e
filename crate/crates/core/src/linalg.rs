//! Dense complex matrix kernels.
//!
//! Matrices are square and stored row-major. Row blocks are distributed over
//! the rayon pool once the dimension reaches [`PARALLEL_MIN_DIM`]; every output
//! row is accumulated in a fixed order, so results do not depend on the number
//! of worker threads.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dimension from which row-parallel kernels are used.
pub const PARALLEL_MIN_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds a matrix from row-major data; `data.len()` must be a perfect square.
    pub fn from_vec(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    /// Real diagonal matrix.
    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = *d;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[Complex<T>] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.data.chunks(self.dim.max(1))
    }

    /// Kronecker product `self ⊗ other`; `self` occupies the high index bits.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let dim = da * db;
        let mut out = Self::zeros(dim);
        let fill = |(row, out_row): (usize, &mut [Complex<T>])| {
            let (ia, ib) = (row / db, row % db);
            let a_row = &self.data[ia * da..(ia + 1) * da];
            let b_row = &other.data[ib * db..(ib + 1) * db];
            for (ja, a) in a_row.iter().enumerate() {
                let block = &mut out_row[ja * db..(ja + 1) * db];
                for (o, b) in block.iter_mut().zip(b_row) {
                    *o = a * b;
                }
            }
        };
        if dim >= PARALLEL_MIN_DIM {
            out.data.par_chunks_mut(dim).enumerate().for_each(fill);
        } else {
            out.data.chunks_mut(dim.max(1)).enumerate().for_each(fill);
        }
        out
    }

    /// Standard product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let dim = self.dim;
        let mut out = Self::zeros(dim);
        let fill = |(i, out_row): (usize, &mut [Complex<T>])| {
            for (j, a) in self.data[i * dim..(i + 1) * dim].iter().enumerate() {
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(&other.data[j * dim..(j + 1) * dim]) {
                    *o = *o + a * b;
                }
            }
        };
        if dim >= PARALLEL_MIN_DIM {
            out.data.par_chunks_mut(dim).enumerate().for_each(fill);
        } else {
            out.data.chunks_mut(dim.max(1)).enumerate().for_each(fill);
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let row_dot = |row: &[Complex<T>]| {
            row.iter()
                .zip(v)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                    acc + a * b
                })
        };
        Ok(if self.dim >= PARALLEL_MIN_DIM {
            self.data.par_chunks(self.dim).map(row_dot).collect()
        } else {
            self.rows().map(row_dot).collect()
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let dim = self.dim;
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                out.data[j * dim + i] = self.data[i * dim + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self.get(i, i)
        })
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Elementwise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest elementwise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> T {
        let product = self
            .adjoint()
            .matmul(self)
            .expect("square matrix times its adjoint");
        product.max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn hermiticity_deviation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Elementwise modulus, row-major.
    pub fn magnitudes(&self) -> Vec<Vec<T>> {
        self.rows()
            .map(|r| r.iter().map(|z| z.norm()).collect())
            .collect()
    }

    /// Reindexes rows and columns: `out[i][j] = self[perm[i]][perm[j]]`.
    /// With `P` the permutation matrix sending basis `i` to `perm[i]`, this is `Pᵀ·self·P`.
    pub fn permute_basis(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim, "permutation length");
        let dim = self.dim;
        let mut out = Self::zeros(dim);
        for (i, &pi) in perm.iter().enumerate() {
            for (j, &pj) in perm.iter().enumerate() {
                out.data[i * dim + j] = self.data[pi * dim + pj];
            }
        }
        out
    }

    /// Converts the scalar type (e.g. `f64` to `f32`).
    pub fn cast<U: Scalar>(&self) -> CMatrix<U> {
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::of(z.re.as_f64()), U::of(z.im.as_f64())))
                .collect(),
        }
    }
}
