//! Gaussian ground states, covariance propagation and exact braid rotations.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceState;
use crate::error::{Error, Result};
use crate::geometry::NetworkGeometry;
use crate::mode::MajoranaMode;
use crate::quadratic::QuadraticHamiltonian;
use crate::schedule::Schedule;
use crate::spectral::{
    normal_form, spectrum_with_tol, zero_modes, Edge, LocalizedMode, DEFAULT_ZERO_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Self::Even => 1.0,
            Self::Odd => -1.0,
        }
    }
}

/// Requested fermion parity of each wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityChoice(pub Vec<Parity>);

impl ParityChoice {
    pub fn all_even(wires: usize) -> Self {
        Self(vec![Parity::Even; wires])
    }
}

/// Ground state of `h` with every positive-energy mode empty and the zero
/// mode pair of each wire fixed so that the wire parity matches `choice`.
pub fn ground_state(
    h: &QuadraticHamiltonian,
    g: &NetworkGeometry,
    choice: &ParityChoice,
    zero_tol: f64,
) -> Result<CovarianceState> {
    if h.dim() != g.dim() {
        return Err(Error::Dimension {
            expected: g.dim(),
            got: h.dim(),
        });
    }
    if choice.0.len() != g.wires {
        return Err(Error::Parameter(format!(
            "parity choice lists {} wires, network has {}",
            choice.0.len(),
            g.wires
        )));
    }
    let nf = normal_form(h, zero_tol)?;
    let n = h.dim();
    let mut gamma = DMatrix::zeros(n, n);
    for (_, q1, q2) in &nf.blocks {
        gamma += q2 * q1.transpose() - q1 * q2.transpose();
    }
    if nf.kernel.is_empty() {
        if choice.0.iter().any(|&p| p != Parity::Even) {
            log::warn!("no zero modes; parity choice ignored");
        }
        return Ok(CovarianceState::from_raw(gamma));
    }
    let modes = zero_modes(h, g, zero_tol)?;
    for w in 0..g.wires {
        let Some((left, right)) = wire_pair(&modes, w) else {
            continue;
        };
        let pair = left.mode.vector() * right.mode.vector().transpose()
            - right.mode.vector() * left.mode.vector().transpose();
        gamma += &pair;
        let trial = CovarianceState::from_raw(gamma.clone());
        let parity = trial.parity_of_labels(&g.wire_range(w).collect::<Vec<_>>());
        if parity.abs() < 0.5 {
            return Err(Error::Degeneracy(format!(
                "wire {w} parity {parity:.3} is not fixed by its zero modes"
            )));
        }
        if parity.signum() != choice.0[w].sign() {
            gamma -= pair * 2.0;
        }
    }
    Ok(CovarianceState::from_raw(gamma))
}

pub fn wire_pair(modes: &[LocalizedMode], wire: usize) -> Option<(&LocalizedMode, &LocalizedMode)> {
    let left = modes
        .iter()
        .find(|m| m.wire == wire && m.edge == Edge::Left)?;
    let right = modes
        .iter()
        .find(|m| m.wire == wire && m.edge == Edge::Right)?;
    Some((left, right))
}

/// `<prod_j (1 - 2 n_j)>` over the sites of one wire.
pub fn wire_parity(state: &CovarianceState, g: &NetworkGeometry, wire: usize) -> Result<f64> {
    if state.dim() != g.dim() {
        return Err(Error::Dimension {
            expected: g.dim(),
            got: state.dim(),
        });
    }
    if wire >= g.wires {
        return Err(Error::Index(format!(
            "wire {wire} outside {} wires",
            g.wires
        )));
    }
    Ok(state.parity_of_labels(&g.wire_range(wire).collect::<Vec<_>>()))
}

const ORTHONORMAL_TOL: f64 = 1e-10;

/// Orthogonal `R` with `R v_i = -v_j`, `R v_j = v_i`, identity elsewhere.
pub fn braid_rotation(mode_i: &MajoranaMode, mode_j: &MajoranaMode) -> Result<DMatrix<f64>> {
    if mode_i.dim() != mode_j.dim() {
        return Err(Error::Dimension {
            expected: mode_i.dim(),
            got: mode_j.dim(),
        });
    }
    let overlap = mode_i.dot(mode_j).abs();
    if overlap > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(overlap));
    }
    let (vi, vj) = (mode_i.vector(), mode_j.vector());
    let n = vi.len();
    let r =
        DMatrix::identity(n, n) - vi * vi.transpose() - vj * vj.transpose() - vj * vi.transpose()
            + vi * vj.transpose();
    Ok(r)
}

/// Conjugation by `exp(pi gamma_i gamma_j / 4)`: correlations of `gamma_i`
/// are afterwards carried by `-gamma_j`, those of `gamma_j` by `gamma_i`.
pub fn apply_exact_braid(
    state: &CovarianceState,
    mode_i: &MajoranaMode,
    mode_j: &MajoranaMode,
) -> Result<CovarianceState> {
    if mode_i.dim() != state.dim() {
        return Err(Error::Dimension {
            expected: state.dim(),
            got: mode_i.dim(),
        });
    }
    Ok(state.rotated(&braid_rotation(mode_i, mode_j)?))
}

/// A correlation `<i gamma_a gamma_b>` recorded along a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub name: String,
    pub a: MajoranaMode,
    pub b: MajoranaMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub segment: usize,
    pub step_label: &'static str,
    pub phi: Option<f64>,
    pub observables: Vec<f64>,
    pub gap: Option<f64>,
    pub purity_residual: f64,
    pub total_parity: f64,
    pub antisymmetry: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub final_state: CovarianceState,
    /// Accumulated propagator `O` with `c(t) = O c(0)`.
    pub propagator: DMatrix<f64>,
    pub reorthonormalizations: usize,
    pub steps: usize,
}

impl Trajectory {
    pub fn max_purity_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.purity_residual)
            .fold(0.0, f64::max)
    }

    pub fn max_parity_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        self.samples
            .iter()
            .map(|s| (s.total_parity - first.total_parity).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_antisymmetry(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.antisymmetry)
            .fold(0.0, f64::max)
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.samples.iter().filter_map(|s| s.gap).reduce(f64::min)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveOptions {
    /// Requested time step; each segment uses the largest step not above it
    /// that divides the segment duration evenly.
    pub dt: f64,
    /// Record a sample every this many steps, plus at every segment end.
    pub sample_stride: usize,
    pub record_gap: bool,
    pub zero_tol: f64,
    /// Orthogonality drift `max |O^T O - I|` that triggers re-orthonormalization.
    pub drift_tol: f64,
    /// Steps between drift checks; every segment end is checked as well.
    pub check_interval: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 0.02,
            sample_stride: 100,
            record_gap: true,
            zero_tol: DEFAULT_ZERO_TOL,
            drift_tol: 1e-10,
            check_interval: 25,
        }
    }
}

/// Generator in compressed-row form, applied to each column of `X`.
struct SparseGenerator {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseGenerator {
    /// `wa A(ta) + wb A(tb)` in sparse form.
    fn combine(
        ha: &QuadraticHamiltonian,
        wa: f64,
        hb: &QuadraticHamiltonian,
        wb: f64,
    ) -> Result<Self> {
        if !ha.is_finite() || !hb.is_finite() {
            return Err(Error::NonFinite("schedule hamiltonian"));
        }
        let (ma, mb) = (ha.matrix(), hb.matrix());
        let n = ma.nrows();
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            row_start.push(cols.len());
            for k in 0..n {
                let v = wa * ma[(i, k)] + wb * mb[(i, k)];
                if v != 0.0 {
                    cols.push(k);
                    vals.push(v);
                }
            }
        }
        row_start.push(cols.len());
        Ok(Self {
            row_start,
            cols,
            vals,
        })
    }

    /// `p <- p exp(h A)^T` for `p = O^T`, by Taylor summation until the
    /// terms reach rounding level. Column `i` of `p` is row `i` of `O`, so
    /// each update is a sum of contiguous columns.
    fn exp_apply(
        &self,
        h: f64,
        p: &mut DMatrix<f64>,
        term: &mut DMatrix<f64>,
        next: &mut DMatrix<f64>,
    ) -> Result<()> {
        let n = p.nrows();
        term.copy_from(p);
        for k in 1..=40 {
            let scale = h / k as f64;
            let mut size = 0.0f64;
            let src = term.as_slice();
            for (i, (nc, pc)) in next
                .as_mut_slice()
                .chunks_exact_mut(n)
                .zip(p.as_mut_slice().chunks_exact_mut(n))
                .enumerate()
            {
                nc.fill(0.0);
                for q in self.row_start[i]..self.row_start[i + 1] {
                    let v = scale * self.vals[q];
                    let c = self.cols[q];
                    for (o, t) in nc.iter_mut().zip(&src[c * n..(c + 1) * n]) {
                        *o += v * t;
                    }
                }
                for (o, t) in pc.iter_mut().zip(nc.iter()) {
                    *o += t;
                    size = size.max(t.abs());
                }
            }
            std::mem::swap(term, next);
            if !size.is_finite() {
                return Err(Error::NonFinite("propagator"));
            }
            if size < 1e-17 {
                return Ok(());
            }
        }
        Err(Error::Parameter(format!(
            "time step {h} too large for the generator norm"
        )))
    }
}

fn orthogonality_drift(o: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let mut s = o.tr_mul(o);
    for i in 0..s.nrows() {
        s[(i, i)] -= 1.0;
    }
    (s.amax(), s)
}

/// Newton-Schulz step towards the polar factor: `O <- O (I - S/2)` with `S = O^T O - I`.
fn reorthonormalize(o: &mut DMatrix<f64>, mut s: DMatrix<f64>, tol: f64) {
    for _ in 0..8 {
        s *= -0.5;
        for i in 0..s.nrows() {
            s[(i, i)] += 1.0;
        }
        *o = &*o * &s;
        let (drift, next) = orthogonality_drift(o);
        if drift <= tol * 1e-3 {
            return;
        }
        s = next;
    }
}

// Fourth-order commutator-free Magnus coefficients.
const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // sqrt(3) / 6
const CF_MAJOR: f64 = 0.25 + GAUSS_OFFSET;
const CF_MINOR: f64 = 0.25 - GAUSS_OFFSET;

/// Propagates `state` through `schedule` by integrating `dO/dt = A(t) O`,
/// `Gamma(t) = O Gamma(0) O^T`.
///
/// Each step is a fourth-order commutator-free Magnus product of two
/// exponentials of generators sampled at the Gauss points, so `O` stays
/// orthogonal up to rounding; the drift is still checked periodically and
/// repaired by a polar correction.
pub fn evolve(
    state: &CovarianceState,
    schedule: &Schedule,
    observables: &[Observable],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    let n = schedule.geometry.dim();
    if state.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: state.dim(),
        });
    }
    if !(opts.dt.is_finite() && opts.dt > 0.0) {
        return Err(Error::Parameter(format!(
            "time step must be positive, got {}",
            opts.dt
        )));
    }
    for o in observables {
        if o.a.dim() != n || o.b.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                got: o.a.dim().max(o.b.dim()),
            });
        }
    }
    schedule.check_continuity()?;
    let stride = opts.sample_stride.max(1);
    let gamma0 = state.matrix().clone();
    // transposed propagator O^T
    let mut ot = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::zeros(n, n);
    let mut next = DMatrix::zeros(n, n);
    let check = opts.check_interval.max(1);
    let mut samples = Vec::new();
    let mut reorth = 0;
    let mut total_steps = 0;
    let mut t0 = 0.0;

    let record = |ot: &DMatrix<f64>,
                  time: f64,
                  segment: usize,
                  s: f64,
                  h: &QuadraticHamiltonian|
     -> Result<Sample> {
        let raw = ot.tr_mul(&gamma0) * ot;
        let antisymmetry = (&raw + raw.transpose()).amax();
        let current = CovarianceState::from_raw(raw);
        if !current.matrix().iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("evolved covariance"));
        }
        let seg = &schedule.segments[segment];
        let values = observables
            .iter()
            .map(|ob| current.correlation(&ob.a, &ob.b))
            .collect::<Result<Vec<_>>>()?;
        let gap = if opts.record_gap {
            spectrum_with_tol(h, opts.zero_tol)?.gap
        } else {
            None
        };
        Ok(Sample {
            time,
            segment,
            step_label: seg.label(),
            phi: seg.phi(s),
            observables: values,
            gap,
            purity_residual: current.purity_residual(),
            total_parity: current.total_parity(),
            antisymmetry,
        })
    };

    let first = schedule.hamiltonian_at(0, 0.0)?;
    samples.push(record(&ot, 0.0, 0, 0.0, &first)?);

    for (si, seg) in schedule.segments.iter().enumerate() {
        let steps = (seg.duration / opts.dt).ceil().max(1.0) as usize;
        let h = seg.duration / steps as f64;
        for step in 0..steps {
            let s1 = (step + 1) as f64 / steps as f64;
            let sa = (step as f64 + 0.5 - GAUSS_OFFSET) / steps as f64;
            let sb = (step as f64 + 0.5 + GAUSS_OFFSET) / steps as f64;
            let ha = seg.hamiltonian(sa, &schedule.geometry)?;
            let hb = seg.hamiltonian(sb, &schedule.geometry)?;
            SparseGenerator::combine(&ha, CF_MAJOR, &hb, CF_MINOR)?
                .exp_apply(h, &mut ot, &mut term, &mut next)?;
            SparseGenerator::combine(&ha, CF_MINOR, &hb, CF_MAJOR)?
                .exp_apply(h, &mut ot, &mut term, &mut next)?;
            total_steps += 1;
            let last = step + 1 == steps;
            if last || total_steps % check == 0 {
                let (drift, s) = orthogonality_drift(&ot);
                if !drift.is_finite() {
                    return Err(Error::NonFinite("propagator"));
                }
                if drift > opts.drift_tol {
                    reorthonormalize(&mut ot, s, opts.drift_tol);
                    reorth += 1;
                }
            }
            if last || (step + 1) % stride == 0 {
                let h_end = seg.hamiltonian(s1, &schedule.geometry)?;
                samples.push(record(&ot, t0 + (step + 1) as f64 * h, si, s1, &h_end)?);
            }
        }
        t0 += seg.duration;
    }

    let final_state = CovarianceState::from_raw(ot.tr_mul(&gamma0) * &ot);
    Ok(Trajectory {
        samples,
        final_state,
        propagator: ot.transpose(),
        reorthonormalizations: reorth,
        steps: total_steps,
    })
}

/// `Gamma` after the combined rotation of a sequence of exact braids.
pub fn apply_exact_braids<'a>(
    state: &CovarianceState,
    braids: impl IntoIterator<Item = (&'a MajoranaMode, &'a MajoranaMode)>,
) -> Result<CovarianceState> {
    let mut out = state.clone();
    for (i, j) in braids {
        out = apply_exact_braid(&out, i, j)?;
    }
    Ok(out)
}
