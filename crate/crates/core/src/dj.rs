//! Deutsch-Jozsa circuit run on covariance matrices.

use crate::builder::{build_network, WireParams};
use crate::covariance::CovarianceState;
use crate::error::{Error, Result};
use crate::evolution::{
    apply_exact_braid, ground_state, wire_pair, wire_parity, Parity, ParityChoice,
};
use crate::fock::{dj_braid_sequence, OracleId};
use crate::geometry::NetworkGeometry;
use crate::mode::MajoranaMode;
use crate::spectral::{zero_modes, DEFAULT_ZERO_TOL};

#[derive(Clone, Debug)]
pub struct GaussianDjOutcome {
    pub oracle: OracleId,
    pub state: CovarianceState,
    pub wire_parities: [f64; 3],
}

impl GaussianDjOutcome {
    /// Computational basis state with this parity signature, if any.
    pub fn decoded(&self) -> Option<usize> {
        let signs: Vec<i8> = self
            .wire_parities
            .iter()
            .map(|&p| {
                if p > 0.5 {
                    1
                } else if p < -0.5 {
                    -1
                } else {
                    0
                }
            })
            .collect();
        PARITY_SIGNATURES.iter().position(|s| s[..] == signs[..])
    }
}

/// Wire parities of `|00>, |01>, |10>, |11>`.
pub const PARITY_SIGNATURES: [[i8; 3]; 4] = [[1, -1, 1], [1, 1, -1], [-1, 1, 1], [-1, -1, -1]];

/// Register Majoranas `gamma_1..gamma_6` and the `|00>` covariance.
pub fn gaussian_register() -> Result<(NetworkGeometry, Vec<MajoranaMode>, CovarianceState)> {
    let g = NetworkGeometry::new(3, 2)?;
    let h = build_network(&WireParams::ideal(2), &g)?;
    let modes = zero_modes(&h, &g, DEFAULT_ZERO_TOL)?;
    let mut gammas = Vec::with_capacity(6);
    for w in 0..3 {
        let (l, r) = wire_pair(&modes, w)
            .ok_or_else(|| Error::Assignment(format!("wire {w} has no zero modes")))?;
        gammas.push(l.mode.clone());
        gammas.push(r.mode.clone());
    }
    let state = ground_state(
        &h,
        &g,
        &ParityChoice(vec![Parity::Even, Parity::Odd, Parity::Even]),
        DEFAULT_ZERO_TOL,
    )?;
    Ok((g, gammas, state))
}

pub fn gaussian_deutsch_jozsa(oracle: OracleId) -> Result<GaussianDjOutcome> {
    let (g, gammas, mut state) = gaussian_register()?;
    for (i, j) in dj_braid_sequence(oracle) {
        state = apply_exact_braid(&state, &gammas[i - 1], &gammas[j - 1])?;
    }
    let mut wire_parities = [0.0; 3];
    for (w, p) in wire_parities.iter_mut().enumerate() {
        *p = wire_parity(&state, &g, w)?;
    }
    Ok(GaussianDjOutcome {
        oracle,
        state,
        wire_parities,
    })
}
