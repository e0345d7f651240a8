//! Dense Fock-space oracle.
//!
//! Fermionic mode `j` is bit `j` of the basis index, with the Jordan-Wigner
//! string running over lower modes. Majorana label `2j` is `a_j† + a_j` and
//! `2j + 1` is `-i(a_j† - a_j)`, matching the network label order.

mod deutsch_jozsa;
mod verify;

pub use deutsch_jozsa::{
    dj_basis, dj_braid_sequence, dj_register, oracle_braids, run_deutsch_jozsa, DjBasis, DjOutcome,
    DjRegister, OracleId, QUBIT_STATES,
};
pub use verify::{
    verify_braid_group, verify_hadamard_decomposition, BraidGroupReport, HadamardReport,
};

use std::ops::Mul;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::covariance::CovarianceState;
use crate::error::{Error, Result};
use crate::quadratic::QuadraticHamiltonian;

pub type C64 = Complex<f64>;

/// Largest supported number of fermionic modes (an 8192-dimensional space).
pub const MAX_MODES: usize = 13;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn check_modes(modes: usize) -> Result<()> {
    if modes > MAX_MODES {
        return Err(Error::FockTooLarge {
            modes,
            limit: MAX_MODES,
        });
    }
    Ok(())
}

fn string_sign(state: usize, mode: usize) -> f64 {
    if (state & ((1 << mode) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `c_k |state> = phase |image>`.
pub fn majorana_action(k: usize, state: usize) -> (C64, usize) {
    let mode = k / 2;
    let bit = 1 << mode;
    let sign = string_sign(state, mode);
    let image = state ^ bit;
    let occupied = state & bit != 0;
    let phase = if k.is_multiple_of(2) {
        ONE * sign
    } else if occupied {
        // -i(-a)|1> = i|0>
        I * sign
    } else {
        -I * sign
    };
    (phase, image)
}

/// A dense operator on the `2^modes` dimensional Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub modes: usize,
    pub matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn identity(modes: usize) -> Result<Self> {
        check_modes(modes)?;
        let d = 1 << modes;
        Ok(Self {
            modes,
            matrix: DMatrix::identity(d, d),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            modes: self.modes,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scaled(&self, z: C64) -> Self {
        Self {
            modes: self.modes,
            matrix: &self.matrix * z,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.modes, other.modes);
        Self {
            modes: self.modes,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(-ONE))
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.minus(other).max_abs()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_deviation(&self.adjoint())
    }

    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        (self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Best phase `z` with `self ≈ z * other` and the remaining max deviation.
    pub fn phase_relative_to(&self, other: &Self) -> (C64, f64) {
        let overlap: C64 = other
            .matrix
            .iter()
            .zip(self.matrix.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        (phase, self.max_deviation(&other.scaled(phase)))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        (self * other).minus(&(other * self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        (self * other).plus(&(other * self))
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;

    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.modes, rhs.modes);
        DenseOperator {
            modes: self.modes,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

pub fn majorana_matrix(k: usize, modes: usize) -> Result<DenseOperator> {
    check_modes(modes)?;
    if k >= 2 * modes {
        return Err(Error::Index(format!("majorana {k} outside {modes} modes")));
    }
    let d = 1 << modes;
    let mut m = DMatrix::zeros(d, d);
    for s in 0..d {
        let (p, t) = majorana_action(k, s);
        m[(t, s)] = p;
    }
    Ok(DenseOperator { modes, matrix: m })
}

/// `a_j`.
pub fn annihilation(j: usize, modes: usize) -> Result<DenseOperator> {
    check_modes(modes)?;
    if j >= modes {
        return Err(Error::Index(format!("mode {j} outside {modes} modes")));
    }
    let d = 1 << modes;
    let mut m = DMatrix::zeros(d, d);
    for s in 0..d {
        if s & (1 << j) != 0 {
            m[(s ^ (1 << j), s)] = ONE * string_sign(s, j);
        }
    }
    Ok(DenseOperator { modes, matrix: m })
}

/// Product of `(1 - 2 n_j)` over the listed modes.
pub fn parity_operator(modes: usize, of: impl IntoIterator<Item = usize>) -> Result<DenseOperator> {
    check_modes(modes)?;
    let mask = of.into_iter().fold(0usize, |m, j| m | (1 << j));
    let d = 1 << modes;
    let diag = DVector::from_fn(d, |s, _| {
        if (s & mask).count_ones() % 2 == 0 {
            ONE
        } else {
            -ONE
        }
    });
    Ok(DenseOperator {
        modes,
        matrix: DMatrix::from_diagonal(&diag),
    })
}

pub fn total_parity_operator(modes: usize) -> Result<DenseOperator> {
    parity_operator(modes, 0..modes)
}

/// `(i/4) sum_kl A_kl c_k c_l + offset`.
pub fn embed_quadratic(h: &QuadraticHamiltonian) -> Result<DenseOperator> {
    if !h.dim().is_multiple_of(2) {
        return Err(Error::Dimension {
            expected: h.dim() + 1,
            got: h.dim(),
        });
    }
    let modes = h.dim() / 2;
    check_modes(modes)?;
    let d = 1 << modes;
    let entries = h.nonzeros();
    let mut m = DMatrix::from_diagonal_element(d, d, ONE * h.constant_offset);
    for s in 0..d {
        for &(k, l, a) in &entries {
            let (p1, s1) = majorana_action(l, s);
            let (p2, s2) = majorana_action(k, s1);
            m[(s2, s)] += I * 0.25 * a * p1 * p2;
        }
    }
    Ok(DenseOperator { modes, matrix: m })
}

/// `exp(pi c_i c_j / 4) = (1 + c_i c_j) / sqrt 2`; conjugation sends
/// `c_i -> -c_j` and `c_j -> c_i`.
pub fn braid_unitary(i: usize, j: usize, modes: usize) -> Result<DenseOperator> {
    if i == j {
        return Err(Error::Parameter("braid of a Majorana with itself".into()));
    }
    let ci = majorana_matrix(i, modes)?;
    let cj = majorana_matrix(j, modes)?;
    let prod = &ci * &cj;
    Ok(DenseOperator::identity(modes)?
        .plus(&prod)
        .scaled(ONE * std::f64::consts::FRAC_1_SQRT_2))
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn time_evolution(h: &DenseOperator, t: f64) -> DenseOperator {
    let eig = SymmetricEigen::new(h.matrix.clone());
    let phases = DVector::from_fn(eig.eigenvalues.len(), |k, _| {
        (-I * eig.eigenvalues[k] * t).exp()
    });
    let v = &eig.eigenvectors;
    DenseOperator {
        modes: h.modes,
        matrix: v * DMatrix::from_diagonal(&phases) * v.adjoint(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    pub modes: usize,
    pub amplitudes: DVector<C64>,
}

impl FockState {
    pub fn vacuum(modes: usize) -> Result<Self> {
        Self::basis(modes, 0)
    }

    pub fn basis(modes: usize, index: usize) -> Result<Self> {
        check_modes(modes)?;
        let mut amplitudes = DVector::zeros(1 << modes);
        amplitudes[index] = ONE;
        Ok(Self { modes, amplitudes })
    }

    pub fn from_amplitudes(modes: usize, amplitudes: DVector<C64>) -> Result<Self> {
        check_modes(modes)?;
        if amplitudes.len() != 1 << modes {
            return Err(Error::Dimension {
                expected: 1 << modes,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("state norm {norm} is not 1")));
        }
        Ok(Self { modes, amplitudes })
    }

    pub fn normalized(modes: usize, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Parameter("cannot normalize a null state".into()));
        }
        Self::from_amplitudes(modes, amplitudes.unscale(norm))
    }

    pub fn apply(&self, op: &DenseOperator) -> DVector<C64> {
        &op.matrix * &self.amplitudes
    }

    pub fn evolved(&self, u: &DenseOperator) -> Self {
        Self {
            modes: self.modes,
            amplitudes: self.apply(u),
        }
    }

    pub fn inner(&self, other: &FockState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn expectation(&self, op: &DenseOperator) -> C64 {
        self.amplitudes.dotc(&self.apply(op))
    }

    /// `Gamma_kl = (i/2) <[c_k, c_l]>`.
    pub fn covariance(&self) -> Result<CovarianceState> {
        let n = 2 * self.modes;
        let cs = (0..n)
            .map(|k| majorana_matrix(k, self.modes))
            .collect::<Result<Vec<_>>>()?;
        let applied: Vec<DVector<C64>> = cs.iter().map(|c| self.apply(c)).collect();
        let mut gamma = DMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                if k != l {
                    // <c_k c_l> = (c_k psi)^† (c_l psi) since c_k is Hermitian
                    let kl = applied[k].dotc(&applied[l]);
                    gamma[(k, l)] = (I * kl).re;
                }
            }
        }
        CovarianceState::new((&gamma - gamma.transpose()) * 0.5)
    }
}

/// Lowest eigenvector of a Hermitian operator and its energy.
pub fn ground_state_of(h: &DenseOperator) -> Result<(f64, FockState)> {
    let eig = SymmetricEigen::new(h.matrix.clone());
    let k = eig.eigenvalues.argmin().0;
    let v = eig.eigenvectors.column(k).into_owned();
    Ok((eig.eigenvalues[k], FockState::normalized(h.modes, v)?))
}

/// Ascending eigenvalues of a Hermitian operator.
pub fn eigenvalues(h: &DenseOperator) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(h.matrix.clone())
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    e.sort_by(f64::total_cmp);
    e
}
