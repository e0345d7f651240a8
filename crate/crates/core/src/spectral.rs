//! Spectra, gaps and zero modes of quadratic Majorana Hamiltonians.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen, SVD};

use crate::builder::ProtocolStep;
use crate::error::{Error, Result};
use crate::geometry::{Flavor, NetworkGeometry, SiteIndex};
use crate::mode::MajoranaMode;
use crate::quadratic::QuadraticHamiltonian;

pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

/// Canonical decomposition `A = Q (⊕ [[0, e_k], [-e_k, 0]]) Q^T`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    /// Real orthonormal basis of the (near-)kernel of `A`.
    pub kernel: Vec<DVector<f64>>,
    /// `(energy, q1, q2)` with `q1^T A q2 = energy > zero_tol`, sorted by energy.
    pub blocks: Vec<(f64, DVector<f64>, DVector<f64>)>,
}

pub fn normal_form(h: &QuadraticHamiltonian, zero_tol: f64) -> Result<NormalForm> {
    if !h.is_finite() {
        return Err(Error::NonFinite("hamiltonian matrix"));
    }
    let n = h.dim();
    let a = h.matrix();
    let herm = DMatrix::from_fn(n, n, |i, j| Complex::new(0.0, a[(i, j)]));
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));

    let mut blocks = Vec::new();
    let mut near_zero = Vec::new();
    for &k in &order {
        let lambda = eig.eigenvalues[k];
        let u = eig.eigenvectors.column(k);
        if lambda.abs() <= zero_tol {
            near_zero.push(k);
        } else if lambda > 0.0 {
            // i A u = lambda u  =>  A x = lambda y, A y = -lambda x
            let x = DVector::from_fn(n, |i, _| u[i].re);
            let y = DVector::from_fn(n, |i, _| u[i].im);
            let q1 = y * std::f64::consts::SQRT_2;
            let q2 = x * std::f64::consts::SQRT_2;
            blocks.push((lambda, q1, q2));
        }
    }
    let kernel = real_span(&eig.eigenvectors, &near_zero, n);
    Ok(NormalForm { kernel, blocks })
}

/// Orthonormal real basis of the span of the given complex eigenvectors.
fn real_span(vectors: &DMatrix<Complex<f64>>, cols: &[usize], n: usize) -> Vec<DVector<f64>> {
    let k = cols.len();
    if k == 0 {
        return Vec::new();
    }
    let mut stacked = DMatrix::zeros(n, 2 * k);
    for (c, &col) in cols.iter().enumerate() {
        for i in 0..n {
            stacked[(i, 2 * c)] = vectors[(i, col)].re;
            stacked[(i, 2 * c + 1)] = vectors[(i, col)].im;
        }
    }
    let svd = SVD::new(stacked, true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&p, &q| svd.singular_values[q].total_cmp(&svd.singular_values[p]));
    idx.into_iter()
        .take(k)
        .map(|c| gauge(u.column(c).into_owned()))
        .collect()
}

/// Largest-magnitude coefficient positive.
fn gauge(v: DVector<f64>) -> DVector<f64> {
    let imax = v.iamax();
    if v[imax] < 0.0 {
        -v
    } else {
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// Canonical single-particle energies, ascending, `dim / 2` entries.
    pub energies: Vec<f64>,
    /// Smallest energy above the zero tolerance, if any.
    pub gap: Option<f64>,
    /// Number of fermionic modes at (near-)zero energy.
    pub zero_count: usize,
}

pub fn spectrum(h: &QuadraticHamiltonian) -> Result<SpectrumReport> {
    spectrum_with_tol(h, DEFAULT_ZERO_TOL)
}

pub fn spectrum_with_tol(h: &QuadraticHamiltonian, zero_tol: f64) -> Result<SpectrumReport> {
    let nf = normal_form(h, zero_tol)?;
    let kernel = nf.kernel.len();
    let zero_count = kernel / 2;
    let mut energies = vec![0.0; zero_count];
    energies.extend(nf.blocks.iter().map(|b| b.0));
    if kernel % 2 == 1 {
        // an unpaired near-zero eigenvalue of iA sits right at the tolerance
        log::warn!("odd near-kernel dimension {kernel}; zero tolerance straddles a mode");
        energies.push(0.0);
    }
    Ok(SpectrumReport {
        gap: nf.blocks.first().map(|b| b.0),
        energies,
        zero_count,
    })
}

/// Orthonormal basis of the near-kernel, gauge fixed by sign only.
pub fn zero_mode_basis(h: &QuadraticHamiltonian, zero_tol: f64) -> Result<Vec<MajoranaMode>> {
    let nf = normal_form(h, zero_tol)?;
    if nf.kernel.len() % 2 == 1 {
        return Err(Error::Degeneracy(format!(
            "odd kernel dimension {}",
            nf.kernel.len()
        )));
    }
    nf.kernel
        .into_iter()
        .map(MajoranaMode::normalized)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Left,
    Right,
}

/// A zero mode assigned to one end of one wire.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizedMode {
    pub wire: usize,
    pub edge: Edge,
    pub mode: MajoranaMode,
}

const ASSIGN_TOL: f64 = 0.1;

/// Zero modes rotated to maximize their weight on single wires, then split
/// into left and right ends by mean position.
///
/// Fails when the kernel is odd, when a wire carries other than zero or two
/// zero modes, or when a mode is shared between wires.
pub fn zero_modes(
    h: &QuadraticHamiltonian,
    g: &NetworkGeometry,
    zero_tol: f64,
) -> Result<Vec<LocalizedMode>> {
    if h.dim() != g.dim() {
        return Err(Error::Dimension {
            expected: g.dim(),
            got: h.dim(),
        });
    }
    let nf = normal_form(h, zero_tol)?;
    let k = nf.kernel.len();
    if k % 2 == 1 {
        return Err(Error::Degeneracy(format!("odd kernel dimension {k}")));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let kmat = DMatrix::from_columns(&nf.kernel);
    let mut out = Vec::new();
    let mut assigned = 0;
    for w in 0..g.wires {
        let range = g.wire_range(w);
        let sub = kmat.rows(range.start, range.len());
        let weight = sub.transpose() * sub;
        let eig = SymmetricEigen::new(weight);
        let mut cols: Vec<usize> = Vec::new();
        for (i, &e) in eig.eigenvalues.iter().enumerate() {
            if e > 1.0 - ASSIGN_TOL {
                cols.push(i);
            } else if e > ASSIGN_TOL {
                return Err(Error::Assignment(format!(
                    "zero mode shares weight {e:.3} with wire {w}"
                )));
            }
        }
        match cols.len() {
            0 => continue,
            2 => {}
            n => {
                return Err(Error::Degeneracy(format!(
                    "wire {w} carries {n} zero modes; zero modes are not isolated"
                )))
            }
        }
        assigned += 2;
        let local = DMatrix::from_columns(&[
            &kmat * eig.eigenvectors.column(cols[0]),
            &kmat * eig.eigenvectors.column(cols[1]),
        ]);
        let position = DVector::from_fn(g.dim(), |i, _| (i / 2 % g.length) as f64);
        let mut xmat = DMatrix::zeros(2, 2);
        for p in 0..2 {
            for q in 0..2 {
                xmat[(p, q)] = (0..g.dim())
                    .map(|i| local[(i, p)] * position[i] * local[(i, q)])
                    .sum::<f64>();
            }
        }
        let xe = SymmetricEigen::new(xmat);
        let (left, right) = if xe.eigenvalues[0] <= xe.eigenvalues[1] {
            (0, 1)
        } else {
            (1, 0)
        };
        for (edge, c) in [(Edge::Left, left), (Edge::Right, right)] {
            let v = gauge(&local * xe.eigenvectors.column(c));
            out.push(LocalizedMode {
                wire: w,
                edge,
                mode: MajoranaMode::normalized(v)?,
            });
        }
    }
    if assigned != k {
        return Err(Error::Assignment(format!(
            "{assigned} of {k} zero modes localized on single wires"
        )));
    }
    Ok(out)
}

/// Per-site weight `v_odd^2 + v_even^2` of a mode, wire-major.
pub fn site_weights(mode: &MajoranaMode) -> Vec<f64> {
    let v = mode.vector();
    (0..v.len() / 2)
        .map(|s| v[2 * s].powi(2) + v[2 * s + 1].powi(2))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Upper,
    Lower,
}

/// Closed-form left zero mode of the upper or lower wire during a forward
/// braid on an ideal pair of wires `(upper, upper + 1)`.
pub fn analytic_zero_mode(
    step: ProtocolStep,
    phi: f64,
    which: Which,
    potential: f64,
    hopping: f64,
    g: &NetworkGeometry,
    upper: usize,
) -> Result<MajoranaMode> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
        return Err(Error::Parameter(format!("phi = {phi} outside [0, pi/2]")));
    }
    if upper + 1 >= g.wires || g.length < 2 {
        return Err(Error::Geometry(
            "analytic modes need two wires of at least two sites".into(),
        ));
    }
    // c_k / d_k with the one-based indices of the protocol description
    let c = |k: usize| label_1based(g, upper, k);
    let d = |k: usize| label_1based(g, upper + 1, k);
    let (s, co) = phi.sin_cos();
    let (j, v) = (hopping, potential);
    let terms: Vec<(usize, f64)> = match (step, which) {
        (ProtocolStep::I, Which::Upper) => vec![(c(1), 2.0 * co), (d(3), -s)],
        (ProtocolStep::I, Which::Lower) => vec![(d(1), 2.0 * co), (c(3), -s)],
        (ProtocolStep::II, Which::Upper) => vec![(c(1), 2.0 * s), (d(3), -(1.0 - s))],
        (ProtocolStep::II | ProtocolStep::III, Which::Lower) => vec![(c(3), -1.0)],
        (ProtocolStep::III, Which::Upper) => vec![(c(1), j * co), (d(1), v * s)],
        (ProtocolStep::IV, Which::Upper) => vec![(d(1), 1.0)],
        (ProtocolStep::IV, Which::Lower) => vec![(c(1), -j * s), (c(3), -v * co)],
    };
    let mut vec = DVector::zeros(g.dim());
    for (label, coeff) in terms {
        vec[label] += coeff;
    }
    MajoranaMode::normalized(vec)
}

fn label_1based(g: &NetworkGeometry, wire: usize, k: usize) -> usize {
    let site = SiteIndex::new(wire, (k - 1) / 2);
    let flavor = if k % 2 == 1 {
        Flavor::Odd
    } else {
        Flavor::Even
    };
    g.label_of(site, flavor)
        .expect("boundary label inside geometry")
        .0
}

pub fn mode_overlap(a: &MajoranaMode, b: &MajoranaMode) -> f64 {
    assert_eq!(a.dim(), b.dim(), "mode dimension mismatch");
    a.dot(b).abs().min(1.0)
}

/// Norm of the projection of `mode` onto the span of an orthonormal basis.
pub fn subspace_overlap(basis: &[MajoranaMode], mode: &MajoranaMode) -> f64 {
    basis
        .iter()
        .map(|b| b.dot(mode).powi(2))
        .sum::<f64>()
        .sqrt()
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{
        build_network, build_wire, step_hamiltonian, Direction, ErrorModel, WireParams,
    };
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn ideal_two_site_wire() {
        let g = NetworkGeometry::new(1, 2).unwrap();
        let h = build_wire(&WireParams::ideal(2), &g, 0).unwrap();
        let s = spectrum(&h).unwrap();
        assert_eq!(s.zero_count, 1);
        assert_eq!(s.energies.len(), 2);
        assert!(s.energies[0].abs() < 1e-14);
        assert!((s.energies[1] - 2.0).abs() < 1e-12);
        assert!((s.gap.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn chemical_potential_only_spectrum() {
        let g = NetworkGeometry::new(2, 3).unwrap();
        let params = WireParams {
            length: 3,
            hopping: 1.0,
            pairing: 0.0,
            chemical_potential: -0.8,
            potential: 1.0,
        };
        let mut h = build_network(&params, &g).unwrap();
        let bonds = build_network(
            &WireParams {
                chemical_potential: 0.0,
                ..params
            },
            &g,
        )
        .unwrap();
        h = &h - &bonds;
        let s = spectrum(&h).unwrap();
        assert_eq!(s.energies.len(), 6);
        assert!(s.energies.iter().all(|e| (e - 0.8).abs() < 1e-12));
    }

    #[test]
    fn all_zero_is_gapless() {
        let h = QuadraticHamiltonian::zeros(8);
        let s = spectrum(&h).unwrap();
        assert_eq!(s.zero_count, 4);
        assert!(s.gap.is_none());
        let g = NetworkGeometry::new(2, 2).unwrap();
        assert!(matches!(
            zero_modes(&h, &g, DEFAULT_ZERO_TOL),
            Err(Error::Degeneracy(_))
        ));
    }

    #[test]
    fn end_of_step_one_spectrum() {
        let g = NetworkGeometry::new(2, 2).unwrap();
        let h = step_hamiltonian(
            ProtocolStep::I,
            FRAC_PI_2,
            &WireParams::ideal(2),
            Direction::Forward,
            &ErrorModel::NONE,
            &g,
            0,
        )
        .unwrap();
        let s = spectrum(&h).unwrap();
        // c3, c4, d3, d4 free; the vertical hopping pairs (c2, d1) and (c1, d2) at energy J
        assert_eq!(s.zero_count, 2);
        assert!((s.energies[2] - 1.0).abs() < 1e-12);
        assert!((s.energies[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_wire_modes_are_end_majoranas() {
        let g = NetworkGeometry::new(2, 5).unwrap();
        let h = build_network(&WireParams::ideal(5), &g).unwrap();
        let modes = zero_modes(&h, &g, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(modes.len(), 4);
        for m in &modes {
            let expect = match m.edge {
                Edge::Left => g.wire_range(m.wire).start,
                Edge::Right => g.wire_range(m.wire).end - 1,
            };
            assert!((m.mode.vector()[expect] - 1.0).abs() < 1e-12, "{m:?}");
        }
        // orthonormal
        for a in &modes {
            for b in &modes {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((a.mode.dot(&b.mode) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nonideal_modes_decay() {
        let g = NetworkGeometry::new(2, 40).unwrap();
        let params = WireParams {
            pairing: 1.5,
            ..WireParams::ideal(40)
        };
        let h = build_network(&params, &g).unwrap();
        let modes = zero_modes(&h, &g, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(modes.len(), 4);
        for m in &modes {
            let r = g.wire_range(m.wire);
            let half = r.start + r.len() / 2;
            let far = match m.edge {
                Edge::Left => m.mode.weight_on(half..r.end),
                Edge::Right => m.mode.weight_on(r.start..half),
            };
            assert!(far <= 1e-6, "far-half weight {far}");
        }
    }

    #[test]
    fn trivial_phase_has_no_modes() {
        let g = NetworkGeometry::new(2, 6).unwrap();
        let params = WireParams {
            chemical_potential: -10.0,
            ..WireParams::ideal(6)
        };
        let h = build_network(&params, &g).unwrap();
        assert!(zero_modes(&h, &g, DEFAULT_ZERO_TOL).unwrap().is_empty());
        assert!(spectrum(&h).unwrap().gap.unwrap() > 1.0);
    }

    #[test]
    fn analytic_mode_values() {
        let g = NetworkGeometry::new(2, 2).unwrap();
        let m = analytic_zero_mode(ProtocolStep::I, 0.0, Which::Upper, 1.0, 1.0, &g, 0).unwrap();
        assert_eq!(m, MajoranaMode::unit(8, 0));
        let m = analytic_zero_mode(
            ProtocolStep::I,
            std::f64::consts::FRAC_PI_4,
            Which::Upper,
            1.0,
            1.0,
            &g,
            0,
        )
        .unwrap();
        assert!((m.vector()[0] - 0.894427190999916).abs() < 1e-12);
        assert!((m.vector()[6] + 0.447213595499958).abs() < 1e-12);
        let m =
            analytic_zero_mode(ProtocolStep::IV, FRAC_PI_2, Which::Lower, 1.0, 1.0, &g, 0).unwrap();
        assert!((m.vector()[0] + 1.0).abs() < 1e-12);
        assert!(m.vector()[2].abs() < 1e-12);
    }

    #[test]
    fn overlaps() {
        let a = MajoranaMode::unit(4, 1);
        assert_eq!(mode_overlap(&a, &a), 1.0);
        assert_eq!(mode_overlap(&a, &MajoranaMode::unit(4, 2)), 0.0);
        assert_eq!(mode_overlap(&a, &a.negated()), 1.0);
    }

    #[test]
    fn step_one_mode_at_third_of_pi() {
        let g = NetworkGeometry::new(2, 2).unwrap();
        let phi = std::f64::consts::FRAC_PI_3;
        let h = step_hamiltonian(
            ProtocolStep::I,
            phi,
            &WireParams::ideal(2),
            Direction::Forward,
            &ErrorModel::NONE,
            &g,
            0,
        )
        .unwrap();
        let kernel = zero_mode_basis(&h, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(kernel.len(), 4);
        for which in [Which::Upper, Which::Lower] {
            let m = analytic_zero_mode(ProtocolStep::I, phi, which, 1.0, 1.0, &g, 0).unwrap();
            assert!(subspace_overlap(&kernel, &m) >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn normal_form_reconstructs_matrix() {
        let g = NetworkGeometry::new(2, 4).unwrap();
        let params = WireParams {
            pairing: 1.5,
            chemical_potential: 0.3,
            ..WireParams::ideal(4)
        };
        let h = step_hamiltonian(
            ProtocolStep::III,
            0.4,
            &params,
            Direction::Forward,
            &ErrorModel::new(0.1).unwrap(),
            &g,
            0,
        )
        .unwrap();
        let nf = normal_form(&h, DEFAULT_ZERO_TOL).unwrap();
        let mut a = DMatrix::zeros(16, 16);
        for (e, q1, q2) in &nf.blocks {
            a += (q1 * q2.transpose() - q2 * q1.transpose()) * *e;
        }
        assert!((a - h.matrix()).amax() < 1e-12);
        assert_eq!(nf.kernel.len() + 2 * nf.blocks.len(), 16);
    }
}
