//! Quadratic Majorana Hamiltonians `H = (i/4) c^T A c + offset`.

use std::ops::{Add, AddAssign, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `H = (i/4) sum_kl A_kl c_k c_l + constant_offset` with `A` real antisymmetric.
///
/// Under this convention the Heisenberg flow of the Majorana vector is
/// `dc/dt = A c`, and the canonical single-particle energies are the
/// magnitudes of the eigenvalues of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticHamiltonian {
    a: DMatrix<f64>,
    pub constant_offset: f64,
}

impl QuadraticHamiltonian {
    pub fn zeros(dim: usize) -> Self {
        Self {
            a: DMatrix::zeros(dim, dim),
            constant_offset: 0.0,
        }
    }

    /// Builds from an arbitrary square matrix, keeping only its antisymmetric part.
    pub fn from_matrix(a: DMatrix<f64>, constant_offset: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        if !a.nrows().is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "Majorana dimension must be even, got {}",
                a.nrows()
            )));
        }
        if !a.iter().all(|x| x.is_finite()) || !constant_offset.is_finite() {
            return Err(Error::NonFinite("hamiltonian matrix"));
        }
        let a = (&a - a.transpose()) * 0.5;
        Ok(Self { a, constant_offset })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Adds `coeff * i c_p c_q`.
    pub fn add_bilinear(&mut self, p: usize, q: usize, coeff: f64) {
        debug_assert_ne!(p, q, "c_p c_p is a scalar");
        self.a[(p, q)] += 2.0 * coeff;
        self.a[(q, p)] -= 2.0 * coeff;
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            a: &self.a * factor,
            constant_offset: self.constant_offset * factor,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.constant_offset.is_finite() && self.a.iter().all(|x| x.is_finite())
    }

    /// `max |A - A'|` together with the offset difference.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let m = (&self.a - &other.a).amax();
        m.max((self.constant_offset - other.constant_offset).abs())
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        (&self.a + self.a.transpose()).amax()
    }

    /// Nonzero entries `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = self.a[(i, j)];
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

impl AddAssign<&QuadraticHamiltonian> for QuadraticHamiltonian {
    fn add_assign(&mut self, rhs: &QuadraticHamiltonian) {
        assert_eq!(self.dim(), rhs.dim(), "hamiltonian dimension mismatch");
        self.a += &rhs.a;
        self.constant_offset += rhs.constant_offset;
    }
}

impl Add for &QuadraticHamiltonian {
    type Output = QuadraticHamiltonian;

    fn add(self, rhs: &QuadraticHamiltonian) -> QuadraticHamiltonian {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &QuadraticHamiltonian {
    type Output = QuadraticHamiltonian;

    fn sub(self, rhs: &QuadraticHamiltonian) -> QuadraticHamiltonian {
        assert_eq!(self.dim(), rhs.dim(), "hamiltonian dimension mismatch");
        QuadraticHamiltonian {
            a: &self.a - &rhs.a,
            constant_offset: self.constant_offset - rhs.constant_offset,
        }
    }
}

impl Mul<f64> for &QuadraticHamiltonian {
    type Output = QuadraticHamiltonian;

    fn mul(self, rhs: f64) -> QuadraticHamiltonian {
        self.scaled(rhs)
    }
}
