//! Majorana covariance matrices of fermionic Gaussian states.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::mode::MajoranaMode;
use crate::pfaffian::{pfaffian, pfaffian_of_block};
use crate::quadratic::QuadraticHamiltonian;

pub const ANTISYMMETRY_TOL: f64 = 1e-12;
pub const SINGULAR_VALUE_TOL: f64 = 1e-9;
pub const PURITY_TOL: f64 = 1e-8;

/// `Gamma_kl = (i/2) <[c_k, c_l]>`, so `<i gamma_a gamma_b> = v_a^T Gamma v_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceState {
    gamma: DMatrix<f64>,
}

impl CovarianceState {
    /// Validates antisymmetry and the singular-value bound, then stores the
    /// exactly antisymmetrized matrix.
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        if !gamma.is_square() {
            return Err(Error::Dimension {
                expected: gamma.nrows(),
                got: gamma.ncols(),
            });
        }
        if !gamma.nrows().is_multiple_of(2) {
            return Err(Error::Parameter("covariance dimension must be even".into()));
        }
        if !gamma.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("covariance matrix"));
        }
        let asym = (&gamma + gamma.transpose()).amax();
        if asym > ANTISYMMETRY_TOL {
            return Err(Error::Parameter(format!(
                "covariance matrix not antisymmetric (residual {asym:.3e})"
            )));
        }
        let state = Self::from_raw(gamma);
        let smax = state.max_singular_value();
        if smax > 1.0 + SINGULAR_VALUE_TOL {
            return Err(Error::Parameter(format!(
                "covariance singular value {smax} exceeds 1"
            )));
        }
        Ok(state)
    }

    /// Antisymmetrizes without the physical bound checks.
    pub(crate) fn from_raw(gamma: DMatrix<f64>) -> Self {
        let gamma = (&gamma - gamma.transpose()) * 0.5;
        Self { gamma }
    }

    /// The maximally mixed state, `Gamma = 0`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            gamma: DMatrix::zeros(dim, dim),
        }
    }

    /// Every mode empty: `<i c_{2j} c_{2j+1}> = +1` (zero-based labels).
    pub fn vacuum(dim: usize) -> Self {
        let mut gamma = DMatrix::zeros(dim, dim);
        for j in (0..dim).step_by(2) {
            gamma[(j, j + 1)] = 1.0;
            gamma[(j + 1, j)] = -1.0;
        }
        Self { gamma }
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn correlation(&self, a: &MajoranaMode, b: &MajoranaMode) -> Result<f64> {
        for m in [a, b] {
            if m.dim() != self.dim() {
                return Err(Error::Dimension {
                    expected: self.dim(),
                    got: m.dim(),
                });
            }
        }
        Ok(a.vector().dot(&(&self.gamma * b.vector())))
    }

    /// `<H> = (1/4) sum_kl A_kl Gamma_kl + offset`.
    pub fn energy(&self, h: &QuadraticHamiltonian) -> Result<f64> {
        if h.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: h.dim(),
            });
        }
        Ok(0.25 * h.matrix().dot(&self.gamma) + h.constant_offset)
    }

    /// `max |Gamma^2 + I|`; zero for pure states.
    pub fn purity_residual(&self) -> f64 {
        let mut sq = &self.gamma * &self.gamma;
        for i in 0..self.dim() {
            sq[(i, i)] += 1.0;
        }
        sq.amax()
    }

    pub fn is_pure(&self) -> bool {
        self.purity_residual() <= PURITY_TOL
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        (&self.gamma + self.gamma.transpose()).amax()
    }

    pub fn max_singular_value(&self) -> f64 {
        let gtg = self.gamma.transpose() * &self.gamma;
        let eig = SymmetricEigen::new(gtg);
        eig.eigenvalues
            .iter()
            .cloned()
            .fold(0.0, f64::max)
            .max(0.0)
            .sqrt()
    }

    /// Parity expectation of the modes whose labels are listed, `Pf(Gamma|_labels)`.
    pub fn parity_of_labels(&self, labels: &[usize]) -> f64 {
        pfaffian_of_block(&self.gamma, labels)
    }

    /// Global fermion parity `<prod_j (1 - 2 n_j)>`.
    pub fn total_parity(&self) -> f64 {
        pfaffian(&self.gamma)
    }

    /// `R Gamma R^T` for an orthogonal `R` acting on mode space.
    pub fn rotated(&self, r: &DMatrix<f64>) -> Self {
        Self::from_raw(r * &self.gamma * r.transpose())
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        (&self.gamma - &other.gamma).amax()
    }
}
