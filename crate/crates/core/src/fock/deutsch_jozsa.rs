//! Two-qubit Deutsch-Jozsa register on three ideal two-site wires.
//!
//! Qubit fermion `i` is `f_i = (gamma_iL - i gamma_iR) / 2`, built from the
//! end Majoranas of wire `i`. The register Majoranas are numbered
//! `gamma_1..gamma_6 = (gamma_1L, gamma_1R, gamma_2L, gamma_2R, gamma_3L, gamma_3R)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{majorana_matrix, parity_operator, DenseOperator, FockState, C64, I};
use crate::error::{Error, Result};
use crate::geometry::{Flavor, NetworkGeometry, SiteIndex};

/// Labels of the computational basis in `DjBasis::states` order.
pub const QUBIT_STATES: [&str; 4] = ["00", "01", "10", "11"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleId {
    G0,
    G1,
    G2,
    G3,
}

impl OracleId {
    pub const ALL: [OracleId; 4] = [Self::G0, Self::G1, Self::G2, Self::G3];

    /// Braids realizing the oracle, as one-based register pairs.
    pub fn braids(self) -> Vec<(usize, usize)> {
        match self {
            Self::G0 => vec![],
            Self::G1 => vec![(1, 2), (1, 2)],
            Self::G2 => vec![(3, 4), (3, 4)],
            Self::G3 => vec![(5, 6), (5, 6)],
        }
    }

    pub fn is_constant(self) -> bool {
        matches!(self, Self::G0)
    }

    /// Index into `QUBIT_STATES` of the ideal outcome.
    pub fn expected_outcome(self) -> usize {
        match self {
            Self::G0 => 0,
            Self::G1 => 2,
            Self::G2 => 3,
            Self::G3 => 1,
        }
    }
}

impl fmt::Display for OracleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::G0 => "g0",
            Self::G1 => "g1",
            Self::G2 => "g2",
            Self::G3 => "g3",
        };
        f.write_str(s)
    }
}

impl FromStr for OracleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g0" => Ok(Self::G0),
            "g1" => Ok(Self::G1),
            "g2" => Ok(Self::G2),
            "g3" => Ok(Self::G3),
            other => Err(Error::Parameter(format!("unknown oracle {other:?}"))),
        }
    }
}

pub fn oracle_braids(oracle: OracleId) -> Vec<(usize, usize)> {
    oracle.braids()
}

/// Full time-ordered braid sequence: input Hadamard, oracle, output Hadamard.
pub fn dj_braid_sequence(oracle: OracleId) -> Vec<(usize, usize)> {
    let mut seq = vec![(2, 3), (1, 2), (4, 5), (5, 6)];
    seq.extend(oracle.braids());
    seq.extend([(1, 2), (2, 3), (5, 6), (4, 5)]);
    seq
}

#[derive(Clone, Debug)]
pub struct DjRegister {
    pub geometry: NetworkGeometry,
    /// Network labels of `gamma_1..gamma_6`.
    pub labels: [usize; 6],
    /// All qubit fermions empty, bulk of every wire in its ground state.
    pub vacuum: FockState,
}

impl DjRegister {
    pub fn modes(&self) -> usize {
        self.geometry.sites()
    }

    /// `gamma_k` with one-based `k`.
    pub fn gamma(&self, k: usize) -> Result<DenseOperator> {
        if !(1..=6).contains(&k) {
            return Err(Error::Index(format!("register majorana {k} outside 1..=6")));
        }
        majorana_matrix(self.labels[k - 1], self.modes())
    }

    pub fn braid(&self, i: usize, j: usize) -> Result<DenseOperator> {
        if !(1..=6).contains(&i) || !(1..=6).contains(&j) {
            return Err(Error::Index(format!(
                "register braid ({i}, {j}) outside 1..=6"
            )));
        }
        super::braid_unitary(self.labels[i - 1], self.labels[j - 1], self.modes())
    }

    /// `f_q` for qubit fermion `q` in `1..=3`.
    pub fn annihilator(&self, q: usize) -> Result<DenseOperator> {
        let l = self.gamma(2 * q - 1)?;
        let r = self.gamma(2 * q)?;
        Ok(l.minus(&r.scaled(I)).scaled(C64::new(0.5, 0.0)))
    }

    pub fn creator(&self, q: usize) -> Result<DenseOperator> {
        Ok(self.annihilator(q)?.adjoint())
    }

    /// `|00>, |01>, |10>, |11>` as `f2†, f3†, f1†, f1† f2† f3†` on the vacuum.
    pub fn basis(&self) -> Result<[FockState; 4]> {
        let create = |qs: &[usize]| -> Result<FockState> {
            let mut v = self.vacuum.amplitudes.clone();
            for &q in qs.iter().rev() {
                v = &self.creator(q)?.matrix * v;
            }
            FockState::normalized(self.modes(), v)
        };
        Ok([
            create(&[2])?,
            create(&[3])?,
            create(&[1])?,
            create(&[1, 2, 3])?,
        ])
    }

    pub fn wire_parity_operator(&self, wire: usize) -> Result<DenseOperator> {
        let l = self.geometry.length;
        parity_operator(self.modes(), wire * l..(wire + 1) * l)
    }

    pub fn sequence_unitary(&self, braids: &[(usize, usize)]) -> Result<DenseOperator> {
        let mut w = DenseOperator::identity(self.modes())?;
        for &(i, j) in braids {
            w = &self.braid(i, j)? * &w;
        }
        Ok(w)
    }
}

pub fn dj_register() -> Result<DjRegister> {
    let geometry = NetworkGeometry::new(3, 2)?;
    let mut labels = [0; 6];
    for w in 0..3 {
        labels[2 * w] = geometry.label_of(SiteIndex::new(w, 0), Flavor::Odd)?.0;
        labels[2 * w + 1] = geometry.label_of(SiteIndex::new(w, 1), Flavor::Even)?.0;
    }
    let modes = geometry.sites();
    let id = DenseOperator::identity(modes)?;
    let half = C64::new(0.5, 0.0);
    // projectors onto <i gamma_L gamma_R> = +1 and <i c_2 c_3> = +1 per wire
    let mut projector = id.clone();
    for w in 0..3 {
        let bulk = (
            geometry.label_of(SiteIndex::new(w, 0), Flavor::Even)?.0,
            geometry.label_of(SiteIndex::new(w, 1), Flavor::Odd)?.0,
        );
        for (a, b) in [(labels[2 * w], labels[2 * w + 1]), bulk] {
            let pair = &majorana_matrix(a, modes)? * &majorana_matrix(b, modes)?;
            let p = id.plus(&pair.scaled(I)).scaled(half);
            projector = &p * &projector;
        }
    }
    let seed = (0..1usize << modes)
        .map(|s| projector.matrix.column(s).into_owned())
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .filter(|c| c.norm() > 1e-6)
        .ok_or_else(|| Error::Convention("register vacuum projector is null".into()))?;
    let k = (0..seed.len())
        .max_by(|&a, &b| seed[a].norm().total_cmp(&seed[b].norm()))
        .unwrap_or(0);
    let phase = seed[k].conj() / seed[k].norm();
    let vacuum = FockState::normalized(modes, seed * phase)?;
    Ok(DjRegister {
        geometry,
        labels,
        vacuum,
    })
}

pub fn dj_basis() -> Result<[FockState; 4]> {
    dj_register()?.basis()
}

pub type DjBasis = [FockState; 4];

#[derive(Clone, Debug)]
pub struct DjOutcome {
    pub oracle: OracleId,
    pub final_state: FockState,
    /// Overlaps with `|00>, |01>, |10>, |11>`.
    pub amplitudes: [C64; 4],
    pub probabilities: [f64; 4],
    /// Weight outside the computational subspace.
    pub leakage: f64,
    pub wire_parities: [f64; 3],
}

impl DjOutcome {
    /// `|<00|final>|^2`.
    pub fn p00(&self) -> f64 {
        self.probabilities[0]
    }

    pub fn measured(&self) -> usize {
        (0..4)
            .max_by(|&a, &b| self.probabilities[a].total_cmp(&self.probabilities[b]))
            .unwrap_or(0)
    }

    pub fn says_constant(&self) -> bool {
        self.p00() > 0.5
    }
}

/// Runs the nine-braid circuit from `|00>`.
pub fn run_deutsch_jozsa(oracle: OracleId) -> Result<DjOutcome> {
    let reg = dj_register()?;
    let basis = reg.basis()?;
    let w = reg.sequence_unitary(&dj_braid_sequence(oracle))?;
    let final_state = basis[0].evolved(&w);
    let mut amplitudes = [C64::new(0.0, 0.0); 4];
    let mut probabilities = [0.0; 4];
    for k in 0..4 {
        amplitudes[k] = basis[k].inner(&final_state);
        probabilities[k] = amplitudes[k].norm_sqr();
    }
    let mut wire_parities = [0.0; 3];
    for (w, p) in wire_parities.iter_mut().enumerate() {
        *p = final_state.expectation(&reg.wire_parity_operator(w)?).re;
    }
    Ok(DjOutcome {
        oracle,
        leakage: (1.0 - probabilities.iter().sum::<f64>()).max(0.0),
        final_state,
        amplitudes,
        probabilities,
        wire_parities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_empty() {
        let reg = dj_register().unwrap();
        for q in 1..=3 {
            let f = reg.annihilator(q).unwrap();
            assert!(reg.vacuum.apply(&f).norm() < 1e-12);
        }
        for w in 0..3 {
            let p = reg
                .vacuum
                .expectation(&reg.wire_parity_operator(w).unwrap());
            assert!((p.re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_is_orthonormal_with_expected_parities() {
        let reg = dj_register().unwrap();
        let basis = reg.basis().unwrap();
        let signatures = [
            [1.0, -1.0, 1.0],
            [1.0, 1.0, -1.0],
            [-1.0, 1.0, 1.0],
            [-1.0, -1.0, -1.0],
        ];
        for (a, sa) in basis.iter().zip(signatures) {
            for b in &basis {
                let want = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                assert!((a.inner(b).norm() - want).abs() < 1e-12);
            }
            for (w, s) in sa.iter().enumerate() {
                let p = a.expectation(&reg.wire_parity_operator(w).unwrap()).re;
                assert!((p - s).abs() < 1e-12, "parity of wire {w}");
            }
        }
    }

    #[test]
    fn sequence_shape() {
        assert_eq!(dj_braid_sequence(OracleId::G0).len(), 8);
        assert_eq!(dj_braid_sequence(OracleId::G2).len(), 10);
        assert_eq!("G3".parse::<OracleId>().unwrap(), OracleId::G3);
        assert!("g4".parse::<OracleId>().is_err());
    }

    #[test]
    fn outcomes_match_oracle_class() {
        for oracle in OracleId::ALL {
            let out = run_deutsch_jozsa(oracle).unwrap();
            assert!(out.leakage < 1e-12);
            assert_eq!(out.measured(), oracle.expected_outcome(), "{oracle}");
            assert!((out.probabilities[oracle.expected_outcome()] - 1.0).abs() < 1e-12);
            assert_eq!(out.says_constant(), oracle.is_constant());
        }
    }
}
