//! Checks of the braid-group relations and the Hadamard decompositions.

use nalgebra::{Matrix3, Matrix4};

use super::deutsch_jozsa::{dj_register, DjRegister};
use super::{braid_unitary, majorana_matrix, DenseOperator, C64};
use crate::error::{Error, Result};
use crate::geometry::{Flavor, SiteIndex};

const IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct GateCheck {
    pub name: &'static str,
    /// Restriction of the braid product to the computational subspace.
    pub restricted: Matrix4<C64>,
    pub phase: C64,
    pub deviation: f64,
    pub leakage: f64,
}

#[derive(Clone, Debug)]
pub struct HadamardReport {
    pub first: GateCheck,
    pub second: GateCheck,
}

fn restrict(reg: &DjRegister, w: &DenseOperator) -> Result<(Matrix4<C64>, f64)> {
    let basis = reg.basis()?;
    let mut r = Matrix4::zeros();
    for b in 0..4 {
        let image = basis[b].apply(w);
        for a in 0..4 {
            r[(a, b)] = basis[a].amplitudes.dotc(&image);
        }
    }
    let leakage = (0..4)
        .map(|b| (1.0 - r.column(b).norm_squared()).abs())
        .fold(0.0, f64::max);
    Ok((r, leakage))
}

fn best_phase(got: &Matrix4<C64>, want: &Matrix4<C64>) -> (C64, f64) {
    let overlap: C64 = want.iter().zip(got.iter()).map(|(a, b)| a.conj() * b).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let dev = (got - want * phase)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    (phase, dev)
}

fn hadamard_first() -> Matrix4<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix4::new(
        1.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 1.0, //
        1.0, 0.0, -1.0, 0.0, //
        0.0, 1.0, 0.0, -1.0,
    )
    .map(|x| C64::new(x * s, 0.0))
}

fn hadamard_second() -> Matrix4<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix4::new(
        1.0, 1.0, 0.0, 0.0, //
        1.0, -1.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 1.0, //
        0.0, 0.0, 1.0, -1.0,
    )
    .map(|x| C64::new(x * s, 0.0))
}

fn gate_check(
    reg: &DjRegister,
    name: &'static str,
    operator_product: &[(usize, usize)],
    want: &Matrix4<C64>,
) -> Result<GateCheck> {
    // operator order: the rightmost braid acts first
    let time_order: Vec<_> = operator_product.iter().rev().cloned().collect();
    let w = reg.sequence_unitary(&time_order)?;
    let (restricted, leakage) = restrict(reg, &w)?;
    let (phase, deviation) = best_phase(&restricted, want);
    if deviation > IDENTITY_TOL || leakage > IDENTITY_TOL {
        return Err(Error::Convention(format!(
            "{name}: deviation {deviation:.3e}, leakage {leakage:.3e}"
        )));
    }
    Ok(GateCheck {
        name,
        restricted,
        phase,
        deviation,
        leakage,
    })
}

/// `H (x) 1 = U12 U23 U12` and `1 (x) H = U56 U45 U56` on the register
/// subspace, each up to one global phase.
pub fn verify_hadamard_decomposition() -> Result<HadamardReport> {
    let reg = dj_register()?;
    Ok(HadamardReport {
        first: gate_check(&reg, "H x 1", &[(1, 2), (2, 3), (1, 2)], &hadamard_first())?,
        second: gate_check(&reg, "1 x H", &[(5, 6), (4, 5), (5, 6)], &hadamard_second())?,
    })
}

#[derive(Clone, Debug)]
pub struct MappingCheck {
    pub name: &'static str,
    /// Column `a` holds the image of `gamma_a` under `W† gamma_a W`.
    pub action: Matrix3<f64>,
    pub expected: Matrix3<f64>,
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct BraidGroupReport {
    pub mappings: Vec<MappingCheck>,
    /// `min_z |U1 U2 U1 - z U2 U1 U2|` entrywise.
    pub yang_baxter_deviation: f64,
    /// Largest entry of `U1 U2 - U2 U1`.
    pub commutator_norm: f64,
}

impl BraidGroupReport {
    pub fn max_deviation(&self) -> f64 {
        self.mappings
            .iter()
            .map(|m| m.deviation)
            .fold(self.yang_baxter_deviation, f64::max)
    }
}

fn heisenberg_action(w: &DenseOperator, gammas: &[DenseOperator; 3]) -> Result<Matrix3<f64>> {
    let d = w.dim() as f64;
    let wd = w.adjoint();
    let mut m = Matrix3::zeros();
    for a in 0..3 {
        let image = &(&wd * &gammas[a]) * w;
        let mut rest = image.clone();
        for b in 0..3 {
            let c = (&gammas[b] * &image).matrix.trace() / d;
            if c.im.abs() > 1e-12 {
                return Err(Error::Convention("complex Heisenberg image".into()));
            }
            m[(b, a)] = c.re;
            rest = rest.minus(&gammas[b].scaled(C64::new(c.re, 0.0)));
        }
        if rest.max_abs() > 1e-12 {
            return Err(Error::Convention(format!(
                "image of gamma_{} leaves the span of the left modes",
                a + 1
            )));
        }
    }
    Ok(m)
}

fn signed_images(images: [(usize, f64); 3]) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for (a, (b, s)) in images.into_iter().enumerate() {
        m[(b, a)] = s;
    }
    m
}

type SignedImages = [(usize, f64); 3];

/// Braid relations on the left end Majoranas of three ideal wires with
/// `U1 = exp(pi g1 g2 / 4)` and `U2 = exp(pi g2 g3 / 4)`.
pub fn verify_braid_group() -> Result<BraidGroupReport> {
    let reg = dj_register()?;
    let g = &reg.geometry;
    let modes = reg.modes();
    let mut labels = [0; 3];
    for (w, l) in labels.iter_mut().enumerate() {
        *l = g.label_of(SiteIndex::new(w, 0), Flavor::Odd)?.0;
    }
    let gammas = [
        majorana_matrix(labels[0], modes)?,
        majorana_matrix(labels[1], modes)?,
        majorana_matrix(labels[2], modes)?,
    ];
    let u1 = braid_unitary(labels[0], labels[1], modes)?;
    let u2 = braid_unitary(labels[1], labels[2], modes)?;
    let u12 = &u1 * &u2;
    let u21 = &u2 * &u1;
    let u121 = &u12 * &u1;
    let u212 = &u21 * &u2;
    // images (index, sign) of gamma_1, gamma_2, gamma_3
    let cases: [(&'static str, &DenseOperator, SignedImages); 4] = [
        ("U1 U2", &u12, [(2, 1.0), (0, -1.0), (1, -1.0)]),
        ("U2 U1", &u21, [(1, 1.0), (2, 1.0), (0, 1.0)]),
        ("U1 U2 U1", &u121, [(2, 1.0), (1, -1.0), (0, 1.0)]),
        ("U2 U1 U2", &u212, [(2, 1.0), (1, -1.0), (0, 1.0)]),
    ];
    let mut mappings = Vec::new();
    for (name, w, images) in cases {
        let action = heisenberg_action(w, &gammas)?;
        let expected = signed_images(images);
        let deviation = (action - expected).amax();
        mappings.push(MappingCheck {
            name,
            action,
            expected,
            deviation,
        });
    }
    let (_, yang_baxter_deviation) = u121.phase_relative_to(&u212);
    let commutator_norm = u12.minus(&u21).max_abs();
    let report = BraidGroupReport {
        mappings,
        yang_baxter_deviation,
        commutator_norm,
    };
    if let Some(bad) = report.mappings.iter().find(|m| m.deviation > 1e-12) {
        return Err(Error::Convention(format!(
            "{} deviates by {:.3e}",
            bad.name, bad.deviation
        )));
    }
    if yang_baxter_deviation > 1e-12 {
        return Err(Error::Convention(format!(
            "Yang-Baxter deviation {yang_baxter_deviation:.3e}"
        )));
    }
    if commutator_norm < 0.1 {
        return Err(Error::Convention("U1 and U2 commute".into()));
    }
    Ok(report)
}
