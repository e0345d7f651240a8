//! Kitaev wires, the local lattice operations, and the four-step braiding
//! Hamiltonians with the leakage error model.
//!
//! All terms are expressed on the Majorana labels of a [`NetworkGeometry`].
//! With `a = (c_odd - i c_even)/2` the building blocks are
//!
//! * hopping `-t a_i† a_j + h.c. = -i t (c_i,e c_j,o - c_i,o c_j,e) / 2`
//! * pairing `p a_i a_j + h.c. = -i p (c_i,e c_j,o + c_i,o c_j,e) / 2`
//! * occupation `w a† a = w/2 - i (w/2) c_o c_e`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NetworkGeometry, SiteIndex};
use crate::quadratic::QuadraticHamiltonian;

/// Parameters of every wire in the network. Energies are in units of the
/// reference hopping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireParams {
    /// Sites per wire.
    pub length: usize,
    pub hopping: f64,
    pub pairing: f64,
    pub chemical_potential: f64,
    /// Local potential strength `V` used in steps III and IV.
    pub potential: f64,
}

impl WireParams {
    /// `J = |Delta| = V = 1`, `mu = 0`.
    pub fn ideal(length: usize) -> Self {
        Self {
            length,
            hopping: 1.0,
            pairing: 1.0,
            chemical_potential: 0.0,
            potential: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::Parameter(format!(
                "wire length must be at least 2, got {}",
                self.length
            )));
        }
        for (name, v) in [
            ("hopping", self.hopping),
            ("pairing", self.pairing),
            ("chemical_potential", self.chemical_potential),
            ("potential", self.potential),
        ] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite")));
            }
        }
        if self.hopping <= 0.0 {
            return Err(Error::Parameter("hopping must be positive".into()));
        }
        if self.potential <= 0.0 {
            return Err(Error::Parameter("local potential must be positive".into()));
        }
        Ok(())
    }

    pub fn is_topological(&self) -> bool {
        self.chemical_potential.abs() < 2.0 * self.hopping
    }

    pub fn is_ideal(&self) -> bool {
        self.hopping == self.pairing.abs() && self.chemical_potential == 0.0
    }
}

/// One addressable lattice operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LocalOp {
    /// `-t a_i† a_j + h.c.`
    Hopping {
        from: SiteIndex,
        to: SiteIndex,
        strength: f64,
    },
    /// `p a_i a_j + h.c.`; odd under exchanging the two sites.
    Pairing {
        from: SiteIndex,
        to: SiteIndex,
        strength: f64,
    },
    /// Hopping plus pairing of equal strength.
    Kitaev {
        from: SiteIndex,
        to: SiteIndex,
        strength: f64,
    },
    /// `2 V a† a`.
    LocalPotential { site: SiteIndex, strength: f64 },
}

/// Leakage fraction of imperfect local operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    pub alpha: f64,
}

impl ErrorModel {
    pub const NONE: ErrorModel = ErrorModel { alpha: 0.0 };

    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Parameter(format!(
                "error fraction alpha must lie in [0, 1), got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolStep {
    I,
    II,
    III,
    IV,
}

impl ProtocolStep {
    pub const ALL: [ProtocolStep; 4] = [Self::I, Self::II, Self::III, Self::IV];

    pub fn label(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
        }
    }
}

/// `Forward` deposits the decoupled fermion in the lower wire, `Reverse`
/// in the upper one, realizing the inverse exchange.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn inverse(self) -> Self {
        match self {
            Self::Forward => Self::Reverse,
            Self::Reverse => Self::Forward,
        }
    }
}

fn hopping_terms(
    h: &mut QuadraticHamiltonian,
    g: &NetworkGeometry,
    i: SiteIndex,
    j: SiteIndex,
    t: f64,
) -> Result<()> {
    let (io, ie) = g.site_labels(i)?;
    let (jo, je) = g.site_labels(j)?;
    h.add_bilinear(ie, jo, -0.5 * t);
    h.add_bilinear(io, je, 0.5 * t);
    Ok(())
}

fn pairing_terms(
    h: &mut QuadraticHamiltonian,
    g: &NetworkGeometry,
    i: SiteIndex,
    j: SiteIndex,
    p: f64,
) -> Result<()> {
    let (io, ie) = g.site_labels(i)?;
    let (jo, je) = g.site_labels(j)?;
    h.add_bilinear(ie, jo, -0.5 * p);
    h.add_bilinear(io, je, -0.5 * p);
    Ok(())
}

fn occupation_term(
    h: &mut QuadraticHamiltonian,
    g: &NetworkGeometry,
    site: SiteIndex,
    w: f64,
) -> Result<()> {
    let (o, e) = g.site_labels(site)?;
    h.add_bilinear(o, e, -0.5 * w);
    h.constant_offset += 0.5 * w;
    Ok(())
}

fn check_link(g: &NetworkGeometry, from: SiteIndex, to: SiteIndex) -> Result<()> {
    g.check(from)?;
    g.check(to)?;
    if from == to {
        return Err(Error::Geometry(format!(
            "two-site operation on a single site ({}, {})",
            from.wire, from.site
        )));
    }
    if !g.adjacent(from, to) {
        return Err(Error::Geometry(format!(
            "sites ({}, {}) and ({}, {}) are not adjacent",
            from.wire, from.site, to.wire, to.site
        )));
    }
    Ok(())
}

/// Adds a local operation to an existing Hamiltonian.
pub fn add_local_op(h: &mut QuadraticHamiltonian, op: &LocalOp, g: &NetworkGeometry) -> Result<()> {
    if h.dim() != g.dim() {
        return Err(Error::Dimension {
            expected: g.dim(),
            got: h.dim(),
        });
    }
    match *op {
        LocalOp::Hopping { from, to, strength } => {
            check_link(g, from, to)?;
            hopping_terms(h, g, from, to, strength)
        }
        LocalOp::Pairing { from, to, strength } => {
            check_link(g, from, to)?;
            pairing_terms(h, g, from, to, strength)
        }
        LocalOp::Kitaev { from, to, strength } => {
            check_link(g, from, to)?;
            hopping_terms(h, g, from, to, strength)?;
            pairing_terms(h, g, from, to, strength)
        }
        LocalOp::LocalPotential { site, strength } => {
            g.check(site)?;
            occupation_term(h, g, site, 2.0 * strength)
        }
    }
}

pub fn build_local_op(op: &LocalOp, g: &NetworkGeometry) -> Result<QuadraticHamiltonian> {
    let mut h = QuadraticHamiltonian::zeros(g.dim());
    add_local_op(&mut h, op, g)?;
    Ok(h)
}

/// Adds one wire with per-bond scale factors (`bond_scale(j)` multiplies
/// the bond between sites `j` and `j + 1`).
fn add_wire(
    h: &mut QuadraticHamiltonian,
    params: &WireParams,
    g: &NetworkGeometry,
    wire: usize,
    bond_scale: impl Fn(usize) -> f64,
) -> Result<()> {
    if wire >= g.wires {
        return Err(Error::Index(format!(
            "wire {wire} outside {} wires",
            g.wires
        )));
    }
    if params.length != g.length {
        return Err(Error::Geometry(format!(
            "wire parameters describe {} sites but geometry has {}",
            params.length, g.length
        )));
    }
    for j in 0..g.length - 1 {
        let s = bond_scale(j);
        if s == 0.0 {
            continue;
        }
        let a = SiteIndex::new(wire, j);
        let b = SiteIndex::new(wire, j + 1);
        hopping_terms(h, g, a, b, s * params.hopping)?;
        pairing_terms(h, g, a, b, s * params.pairing)?;
    }
    if params.chemical_potential != 0.0 {
        for j in 0..g.length {
            occupation_term(h, g, SiteIndex::new(wire, j), -params.chemical_potential)?;
        }
    }
    Ok(())
}

/// Kitaev chain `sum_j -J a_j† a_j+1 + Delta a_j a_j+1 + h.c. - mu sum_j a_j† a_j`
/// on one wire of the network.
pub fn build_wire(
    params: &WireParams,
    g: &NetworkGeometry,
    wire: usize,
) -> Result<QuadraticHamiltonian> {
    let mut h = QuadraticHamiltonian::zeros(g.dim());
    add_wire(&mut h, params, g, wire, |_| 1.0)?;
    Ok(h)
}

/// All wires, unperturbed.
pub fn build_network(params: &WireParams, g: &NetworkGeometry) -> Result<QuadraticHamiltonian> {
    let mut h = QuadraticHamiltonian::zeros(g.dim());
    for w in 0..g.wires {
        add_wire(&mut h, params, g, w, |_| 1.0)?;
    }
    Ok(h)
}

/// Envelope values of every switchable term at one instant of a step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControls {
    /// Scale of the `(u,1)-(u,2)` bond.
    pub upper_link: f64,
    /// Scale of the `(l,1)-(l,2)` bond.
    pub lower_link: f64,
    /// Vertical `(u,1)-(l,1)` hopping, strength `J`.
    pub vertical_hopping: f64,
    /// Vertical pairing `J a_(u,1) a_(l,1) + h.c.`, signed.
    pub vertical_pairing: f64,
    /// Local potential on `(u,1)`, in units of `V`.
    pub upper_potential: f64,
    /// Local potential on `(l,1)`, in units of `V`.
    pub lower_potential: f64,
}

impl StepControls {
    pub fn at(step: ProtocolStep, phi: f64, direction: Direction) -> Self {
        let (s, c) = phi.sin_cos();
        // forward: the decoupled fermion ends up in the lower wire
        let (deposit_link, keep_link, pairing, potential) = match step {
            ProtocolStep::I => {
                return Self {
                    upper_link: c,
                    lower_link: c,
                    vertical_hopping: s,
                    vertical_pairing: 0.0,
                    upper_potential: 0.0,
                    lower_potential: 0.0,
                }
            }
            ProtocolStep::II => (s, 0.0, s, 0.0),
            ProtocolStep::III => (1.0, 0.0, c, s),
            ProtocolStep::IV => (1.0, s, 0.0, c),
        };
        let vertical_hopping = match step {
            ProtocolStep::II => 1.0,
            ProtocolStep::III => c,
            _ => 0.0,
        };
        match direction {
            Direction::Forward => Self {
                upper_link: keep_link,
                lower_link: deposit_link,
                vertical_hopping,
                vertical_pairing: pairing,
                upper_potential: potential,
                lower_potential: 0.0,
            },
            // mirror image under exchanging the two wires; the pairing term
            // is odd under site exchange
            Direction::Reverse => Self {
                upper_link: deposit_link,
                lower_link: keep_link,
                vertical_hopping,
                vertical_pairing: -pairing,
                upper_potential: 0.0,
                lower_potential: potential,
            },
        }
    }
}

/// Full-network Hamiltonian during one protocol step for the braid of the
/// left ends of wires `upper` and `upper + 1`.
///
/// With `error.alpha > 0` every switched term leaks onto its neighbours with
/// the same envelope: the vertical link onto `(u,2)-(l,2)`, a switched-off
/// `(w,1)-(w,2)` bond weakens `(w,2)-(w,3)` by `1 - alpha`, and the local
/// potential spreads `alpha V` onto the two adjacent sites.
#[allow(clippy::too_many_arguments)]
pub fn step_hamiltonian(
    step: ProtocolStep,
    phi: f64,
    params: &WireParams,
    direction: Direction,
    error: &ErrorModel,
    g: &NetworkGeometry,
    upper: usize,
) -> Result<QuadraticHamiltonian> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
        return Err(Error::Parameter(format!("phi = {phi} outside [0, pi/2]")));
    }
    if upper + 1 >= g.wires {
        return Err(Error::Geometry(format!(
            "braid of wires {upper} and {} needs at least {} wires, network has {}",
            upper + 1,
            upper + 2,
            g.wires
        )));
    }
    let controls = StepControls::at(step, phi, direction);
    controlled_hamiltonian(&controls, params, error, g, upper)
}

pub fn controlled_hamiltonian(
    k: &StepControls,
    params: &WireParams,
    error: &ErrorModel,
    g: &NetworkGeometry,
    upper: usize,
) -> Result<QuadraticHamiltonian> {
    params.validate()?;
    let alpha = error.alpha;
    let lower = upper + 1;
    let second_bond = g.length >= 3;
    if alpha > 0.0 && !second_bond {
        log::warn!(
            "wires of length {} have no third site; bond leakage skipped",
            g.length
        );
    }
    let mut h = QuadraticHamiltonian::zeros(g.dim());
    for w in 0..g.wires {
        let link = if w == upper {
            k.upper_link
        } else if w == lower {
            k.lower_link
        } else {
            1.0
        };
        add_wire(&mut h, params, g, w, |j| match j {
            0 => link,
            1 => 1.0 - alpha * (1.0 - link),
            _ => 1.0,
        })?;
    }
    let j = params.hopping;
    let v = params.potential;
    let u1 = SiteIndex::new(upper, 0);
    let l1 = SiteIndex::new(lower, 0);
    let u2 = SiteIndex::new(upper, 1);
    let l2 = SiteIndex::new(lower, 1);
    hopping_terms(&mut h, g, u1, l1, k.vertical_hopping * j)?;
    pairing_terms(&mut h, g, u1, l1, k.vertical_pairing * j)?;
    occupation_term(&mut h, g, u1, 2.0 * v * k.upper_potential)?;
    occupation_term(&mut h, g, l1, 2.0 * v * k.lower_potential)?;
    if alpha > 0.0 {
        hopping_terms(&mut h, g, u2, l2, alpha * k.vertical_hopping * j)?;
        pairing_terms(&mut h, g, u2, l2, alpha * k.vertical_pairing * j)?;
        let leak_u = alpha * 2.0 * v * k.upper_potential;
        occupation_term(&mut h, g, u2, leak_u)?;
        occupation_term(&mut h, g, l1, leak_u)?;
        let leak_l = alpha * 2.0 * v * k.lower_potential;
        occupation_term(&mut h, g, l2, leak_l)?;
        occupation_term(&mut h, g, u1, leak_l)?;
    }
    Ok(h)
}

/// Deviation at each gluing point of the four steps, including the return
/// from the end of step IV to the start of the next braid.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport {
    pub junctions: Vec<Junction>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Junction {
    pub direction: Direction,
    pub from: ProtocolStep,
    pub to: ProtocolStep,
    pub deviation: f64,
}

pub const CONTINUITY_TOL: f64 = 1e-12;

impl ContinuityReport {
    pub fn max_deviation(&self) -> f64 {
        self.junctions
            .iter()
            .map(|j| j.deviation)
            .fold(0.0, f64::max)
    }

    pub fn first_discontinuity(&self) -> Option<&Junction> {
        self.junctions.iter().find(|j| j.deviation > CONTINUITY_TOL)
    }

    pub fn ok(&self) -> Result<()> {
        match self
            .junctions
            .iter()
            .position(|j| j.deviation > CONTINUITY_TOL)
        {
            None => Ok(()),
            Some(i) => Err(Error::Discontinuity {
                junction: i,
                deviation: self.junctions[i].deviation,
            }),
        }
    }
}

pub fn check_step_continuity(
    params: &WireParams,
    error: &ErrorModel,
    wires: usize,
) -> Result<ContinuityReport> {
    let g = NetworkGeometry::new(wires.max(2), params.length)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut junctions = Vec::new();
    for direction in [Direction::Forward, Direction::Reverse] {
        for (i, &from) in ProtocolStep::ALL.iter().enumerate() {
            let to = ProtocolStep::ALL[(i + 1) % 4];
            let end = step_hamiltonian(from, half_pi, params, direction, error, &g, 0)?;
            let start = step_hamiltonian(to, 0.0, params, direction, error, &g, 0)?;
            junctions.push(Junction {
                direction,
                from,
                to,
                deviation: end.max_deviation(&start),
            });
        }
    }
    Ok(ContinuityReport { junctions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn ladder() -> NetworkGeometry {
        NetworkGeometry::new(2, 2).unwrap()
    }

    /// `coeff * i c_p c_q` terms of the expected Hamiltonian.
    fn from_terms(dim: usize, terms: &[(usize, usize, f64)], offset: f64) -> QuadraticHamiltonian {
        let mut h = QuadraticHamiltonian::zeros(dim);
        for &(p, q, c) in terms {
            h.add_bilinear(p, q, c);
        }
        h.constant_offset = offset;
        h
    }

    // labels on the 2x2 ladder: c1..c4 -> 0..3, d1..d4 -> 4..7
    const C1: usize = 0;
    const C2: usize = 1;
    const C3: usize = 2;
    const D1: usize = 4;
    const D2: usize = 5;
    const D3: usize = 6;

    #[test]
    fn ideal_wire_is_single_bond() {
        let g = NetworkGeometry::new(1, 2).unwrap();
        let h = build_wire(&WireParams::ideal(2), &g, 0).unwrap();
        // -i J c2 c3
        assert_eq!(h.max_deviation(&from_terms(4, &[(1, 2, -1.0)], 0.0)), 0.0);
    }

    #[test]
    fn vertical_hopping_form() {
        let h = build_local_op(
            &LocalOp::Hopping {
                from: SiteIndex::new(0, 0),
                to: SiteIndex::new(1, 0),
                strength: 1.0,
            },
            &ladder(),
        )
        .unwrap();
        // -i J (c2 d1 - c1 d2) / 2
        let want = from_terms(8, &[(C2, D1, -0.5), (C1, D2, 0.5)], 0.0);
        assert!(h.max_deviation(&want) < 1e-15);
    }

    #[test]
    fn local_potential_form() {
        let h = build_local_op(
            &LocalOp::LocalPotential {
                site: SiteIndex::new(0, 0),
                strength: 0.7,
            },
            &ladder(),
        )
        .unwrap();
        let want = from_terms(8, &[(C1, C2, -0.7)], 0.7);
        assert!(h.max_deviation(&want) < 1e-15);
    }

    #[test]
    fn zero_pairing_is_zero() {
        let h = build_local_op(
            &LocalOp::Pairing {
                from: SiteIndex::new(0, 0),
                to: SiteIndex::new(0, 1),
                strength: 0.0,
            },
            &ladder(),
        )
        .unwrap();
        assert_eq!(h.matrix().amax(), 0.0);
    }

    #[test]
    fn rejects_non_adjacent_links() {
        let g = NetworkGeometry::new(2, 3).unwrap();
        let op = LocalOp::Kitaev {
            from: SiteIndex::new(0, 0),
            to: SiteIndex::new(1, 1),
            strength: 1.0,
        };
        assert!(matches!(build_local_op(&op, &g), Err(Error::Geometry(_))));
        let op = LocalOp::Hopping {
            from: SiteIndex::new(0, 0),
            to: SiteIndex::new(0, 0),
            strength: 1.0,
        };
        assert!(build_local_op(&op, &g).is_err());
        let op = LocalOp::LocalPotential {
            site: SiteIndex::new(3, 0),
            strength: 1.0,
        };
        assert!(matches!(build_local_op(&op, &g), Err(Error::Index(_))));
    }

    #[test]
    fn local_ops_are_linear() {
        let g = NetworkGeometry::new(2, 3).unwrap();
        let ops = [
            LocalOp::Hopping {
                from: SiteIndex::new(0, 1),
                to: SiteIndex::new(1, 1),
                strength: 0.4,
            },
            LocalOp::Pairing {
                from: SiteIndex::new(1, 1),
                to: SiteIndex::new(1, 2),
                strength: -1.3,
            },
            LocalOp::LocalPotential {
                site: SiteIndex::new(0, 2),
                strength: 0.9,
            },
        ];
        let mut together = QuadraticHamiltonian::zeros(g.dim());
        let mut summed = QuadraticHamiltonian::zeros(g.dim());
        for op in &ops {
            add_local_op(&mut together, op, &g).unwrap();
            summed += &build_local_op(op, &g).unwrap();
        }
        assert!(together.max_deviation(&summed) < 1e-15);
        let kitaev = build_local_op(
            &LocalOp::Kitaev {
                from: SiteIndex::new(0, 0),
                to: SiteIndex::new(0, 1),
                strength: 0.8,
            },
            &g,
        )
        .unwrap();
        let split = &build_local_op(
            &LocalOp::Hopping {
                from: SiteIndex::new(0, 0),
                to: SiteIndex::new(0, 1),
                strength: 0.8,
            },
            &g,
        )
        .unwrap()
            + &build_local_op(
                &LocalOp::Pairing {
                    from: SiteIndex::new(0, 0),
                    to: SiteIndex::new(0, 1),
                    strength: 0.8,
                },
                &g,
            )
            .unwrap();
        assert!(kitaev.max_deviation(&split) < 1e-15);
    }

    #[test]
    fn chemical_potential_only_wire() {
        let g = NetworkGeometry::new(1, 3).unwrap();
        let params = WireParams {
            length: 3,
            hopping: 1.0,
            pairing: 0.0,
            chemical_potential: 0.6,
            potential: 1.0,
        };
        let mut h = build_wire(&params, &g, 0).unwrap();
        // remove the bond part, leaving -mu sum n_j
        let bonds = build_wire(
            &WireParams {
                chemical_potential: 0.0,
                ..params
            },
            &g,
            0,
        )
        .unwrap();
        h = &h - &bonds;
        let want = from_terms(6, &[(0, 1, 0.3), (2, 3, 0.3), (4, 5, 0.3)], -0.9);
        assert!(h.max_deviation(&want) < 1e-15);
    }

    #[test]
    fn step_one_at_start() {
        let p = WireParams::ideal(2);
        let h = step_hamiltonian(
            ProtocolStep::I,
            0.0,
            &p,
            Direction::Forward,
            &ErrorModel::NONE,
            &ladder(),
            0,
        )
        .unwrap();
        let want = from_terms(8, &[(C2, C3, -1.0), (D2, D3, -1.0)], 0.0);
        assert!(h.max_deviation(&want) < 1e-15);
    }

    #[test]
    fn step_two_at_end() {
        let p = WireParams::ideal(2);
        let h = step_hamiltonian(
            ProtocolStep::II,
            FRAC_PI_2,
            &p,
            Direction::Forward,
            &ErrorModel::NONE,
            &ladder(),
            0,
        )
        .unwrap();
        // -i (J/2)[(c2 d1 - c1 d2) + (c2 d1 + c1 d2 + 2 d2 d3)]
        let want = from_terms(
            8,
            &[
                (C2, D1, -0.5),
                (C1, D2, 0.5),
                (C2, D1, -0.5),
                (C1, D2, -0.5),
                (D2, D3, -1.0),
            ],
            0.0,
        );
        assert!(h.max_deviation(&want) < 1e-15);
    }

    #[test]
    fn step_three_and_four_forms() {
        let p = WireParams {
            potential: 0.6,
            ..WireParams::ideal(2)
        };
        let phi = 0.3_f64;
        let (s, c) = phi.sin_cos();
        let h3 = step_hamiltonian(
            ProtocolStep::III,
            phi,
            &p,
            Direction::Forward,
            &ErrorModel::NONE,
            &ladder(),
            0,
        )
        .unwrap();
        let want3 = from_terms(
            8,
            &[(C2, D1, -c), (D2, D3, -1.0), (C1, C2, -0.6 * s)],
            0.6 * s,
        );
        assert!(h3.max_deviation(&want3) < 1e-15);
        let h4 = step_hamiltonian(
            ProtocolStep::IV,
            phi,
            &p,
            Direction::Forward,
            &ErrorModel::NONE,
            &ladder(),
            0,
        )
        .unwrap();
        let want4 = from_terms(
            8,
            &[(C2, C3, -s), (D2, D3, -1.0), (C1, C2, -0.6 * c)],
            0.6 * c,
        );
        assert!(h4.max_deviation(&want4) < 1e-15);
    }

    #[test]
    fn step_hamiltonian_rejects_bad_input() {
        let p = WireParams::ideal(2);
        assert!(step_hamiltonian(
            ProtocolStep::I,
            2.0,
            &p,
            Direction::Forward,
            &ErrorModel::NONE,
            &ladder(),
            0
        )
        .is_err());
        assert!(step_hamiltonian(
            ProtocolStep::I,
            0.0,
            &p,
            Direction::Forward,
            &ErrorModel::NONE,
            &ladder(),
            1
        )
        .is_err());
        assert!(ErrorModel::new(1.0).is_err());
        assert!(ErrorModel::new(-0.1).is_err());
    }

    #[test]
    fn continuity_all_junctions() {
        for alpha in [0.0, 0.1] {
            for params in [
                WireParams::ideal(4),
                WireParams {
                    pairing: 1.5,
                    chemical_potential: 0.2,
                    ..WireParams::ideal(5)
                },
            ] {
                let report =
                    check_step_continuity(&params, &ErrorModel::new(alpha).unwrap(), 2).unwrap();
                assert_eq!(report.junctions.len(), 8);
                assert!(report.ok().is_ok(), "{report:?}");
                assert!(report.max_deviation() <= CONTINUITY_TOL);
            }
        }
    }

    #[test]
    fn error_leaks_only_where_expected() {
        let p = WireParams {
            pairing: 1.5,
            ..WireParams::ideal(4)
        };
        let g = NetworkGeometry::new(2, 4).unwrap();
        for step in ProtocolStep::ALL {
            for dir in [Direction::Forward, Direction::Reverse] {
                let clean = step_hamiltonian(step, 0.7, &p, dir, &ErrorModel::NONE, &g, 0).unwrap();
                let noisy =
                    step_hamiltonian(step, 0.7, &p, dir, &ErrorModel::new(0.1).unwrap(), &g, 0)
                        .unwrap();
                let diff = &noisy - &clean;
                for (r, c, _) in diff.nonzeros() {
                    let (sr, _) = g.site_of(crate::geometry::MajoranaLabel(r)).unwrap();
                    let (sc, _) = g.site_of(crate::geometry::MajoranaLabel(c)).unwrap();
                    assert!(
                        sr.site <= 2 && sc.site <= 2,
                        "leak reached site {} / {}",
                        sr.site,
                        sc.site
                    );
                }
            }
        }
    }

    #[test]
    fn error_rules_at_alpha() {
        let p = WireParams::ideal(3);
        let g = NetworkGeometry::new(2, 3).unwrap();
        let e = ErrorModel::new(0.1).unwrap();
        // end of step I: (w,1)-(w,2) off, (w,2)-(w,3) at 0.9, vertical hopping on with 0.1 copy
        let h = step_hamiltonian(
            ProtocolStep::I,
            FRAC_PI_2,
            &p,
            Direction::Forward,
            &e,
            &g,
            0,
        )
        .unwrap();
        let mut want = QuadraticHamiltonian::zeros(12);
        add_local_op(
            &mut want,
            &LocalOp::Kitaev {
                from: SiteIndex::new(0, 1),
                to: SiteIndex::new(0, 2),
                strength: 0.9,
            },
            &g,
        )
        .unwrap();
        add_local_op(
            &mut want,
            &LocalOp::Kitaev {
                from: SiteIndex::new(1, 1),
                to: SiteIndex::new(1, 2),
                strength: 0.9,
            },
            &g,
        )
        .unwrap();
        add_local_op(
            &mut want,
            &LocalOp::Hopping {
                from: SiteIndex::new(0, 0),
                to: SiteIndex::new(1, 0),
                strength: 1.0,
            },
            &g,
        )
        .unwrap();
        add_local_op(
            &mut want,
            &LocalOp::Hopping {
                from: SiteIndex::new(0, 1),
                to: SiteIndex::new(1, 1),
                strength: 0.1,
            },
            &g,
        )
        .unwrap();
        // cos(pi/2) leaves a ~1e-17 remnant of the switched-off bonds
        assert!(h.max_deviation(&want) < 1e-12);
        // end of step III: potential V on (u,1), 0.1 V on (u,2) and (l,1)
        let h = step_hamiltonian(
            ProtocolStep::III,
            FRAC_PI_2,
            &p,
            Direction::Forward,
            &e,
            &g,
            0,
        )
        .unwrap();
        let mut want = QuadraticHamiltonian::zeros(12);
        add_local_op(
            &mut want,
            &LocalOp::Kitaev {
                from: SiteIndex::new(0, 1),
                to: SiteIndex::new(0, 2),
                strength: 0.9,
            },
            &g,
        )
        .unwrap();
        add_local_op(
            &mut want,
            &LocalOp::Kitaev {
                from: SiteIndex::new(1, 0),
                to: SiteIndex::new(1, 1),
                strength: 1.0,
            },
            &g,
        )
        .unwrap();
        add_local_op(
            &mut want,
            &LocalOp::Kitaev {
                from: SiteIndex::new(1, 1),
                to: SiteIndex::new(1, 2),
                strength: 1.0,
            },
            &g,
        )
        .unwrap();
        add_local_op(
            &mut want,
            &LocalOp::LocalPotential {
                site: SiteIndex::new(0, 0),
                strength: 1.0,
            },
            &g,
        )
        .unwrap();
        add_local_op(
            &mut want,
            &LocalOp::LocalPotential {
                site: SiteIndex::new(0, 1),
                strength: 0.1,
            },
            &g,
        )
        .unwrap();
        add_local_op(
            &mut want,
            &LocalOp::LocalPotential {
                site: SiteIndex::new(1, 0),
                strength: 0.1,
            },
            &g,
        )
        .unwrap();
        assert!(h.max_deviation(&want) < 1e-12);
    }

    #[test]
    fn zero_alpha_is_identity() {
        let p = WireParams {
            pairing: 1.5,
            ..WireParams::ideal(4)
        };
        let g = NetworkGeometry::new(3, 4).unwrap();
        let base = build_network(&p, &g).unwrap();
        for pair in 0..2 {
            let h = step_hamiltonian(
                ProtocolStep::I,
                0.0,
                &p,
                Direction::Forward,
                &ErrorModel::NONE,
                &g,
                pair,
            )
            .unwrap();
            assert!(h.max_deviation(&base) < 1e-15);
            let h = step_hamiltonian(
                ProtocolStep::IV,
                FRAC_PI_2,
                &p,
                Direction::Reverse,
                &ErrorModel::new(0.05).unwrap(),
                &g,
                pair,
            )
            .unwrap();
            assert!(h.max_deviation(&base) < 1e-12);
        }
    }
}
