//! Piecewise time-dependent Hamiltonians built from braid words.
//!
//! A [`BraidWord`] lists generators in *time order*: the first token is
//! performed first. The unitary it realizes is therefore the product of the
//! generator unitaries in reverse, with the rightmost factor acting first.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::builder::{
    step_hamiltonian, Direction, ErrorModel, ProtocolStep, WireParams, CONTINUITY_TOL,
};
use crate::error::{Error, Result};
use crate::geometry::NetworkGeometry;
use crate::quadratic::QuadraticHamiltonian;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampShape {
    /// `phi(s) = (pi/2) s`
    Linear,
    /// `phi(s) = (pi/2) sin^2(pi s / 2)`, zero velocity at both ends.
    Smooth,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ramp {
    pub shape: RampShape,
    /// Duration of one protocol step, in units of `1/J`.
    pub duration: f64,
}

impl Ramp {
    pub const DEFAULT_DURATION: f64 = 50.0;

    pub fn new(shape: RampShape, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Parameter(format!(
                "ramp duration must be positive, got {duration}"
            )));
        }
        Ok(Self { shape, duration })
    }

    pub fn smooth(duration: f64) -> Result<Self> {
        Self::new(RampShape::Smooth, duration)
    }

    /// `phi(s)` for normalized time `s` in `[0, 1]`; exact at both ends.
    pub fn phi(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        if s == 0.0 {
            return 0.0;
        }
        if s == 1.0 {
            return FRAC_PI_2;
        }
        let phi = match self.shape {
            RampShape::Linear => FRAC_PI_2 * s,
            RampShape::Smooth => FRAC_PI_2 * (FRAC_PI_2 * s).sin().powi(2),
        };
        phi.min(FRAC_PI_2)
    }
}

impl Default for Ramp {
    fn default() -> Self {
        Self {
            shape: RampShape::Smooth,
            duration: Self::DEFAULT_DURATION,
        }
    }
}

/// One protocol step of one braid.
#[derive(Clone, Debug, PartialEq)]
pub struct BraidStep {
    pub step: ProtocolStep,
    pub direction: Direction,
    /// Upper wire of the braided pair.
    pub pair: usize,
    pub shape: RampShape,
    pub params: WireParams,
    pub error: ErrorModel,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SegmentGenerator {
    Static(QuadraticHamiltonian),
    Braid(BraidStep),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub generator: SegmentGenerator,
}

impl Segment {
    pub fn label(&self) -> &'static str {
        match &self.generator {
            SegmentGenerator::Static(_) => "static",
            SegmentGenerator::Braid(b) => b.step.label(),
        }
    }

    /// Protocol angle at normalized time `s`, if this is a braid step.
    pub fn phi(&self, s: f64) -> Option<f64> {
        match &self.generator {
            SegmentGenerator::Static(_) => None,
            SegmentGenerator::Braid(b) => Some(
                Ramp {
                    shape: b.shape,
                    duration: self.duration,
                }
                .phi(s),
            ),
        }
    }

    pub fn hamiltonian(&self, s: f64, g: &NetworkGeometry) -> Result<QuadraticHamiltonian> {
        match &self.generator {
            SegmentGenerator::Static(h) => Ok(h.clone()),
            SegmentGenerator::Braid(b) => {
                let phi = self.phi(s).expect("braid segments carry a ramp");
                step_hamiltonian(b.step, phi, &b.params, b.direction, &b.error, g, b.pair)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub geometry: NetworkGeometry,
    pub segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(geometry: NetworkGeometry, segments: Vec<Segment>) -> Result<Self> {
        for seg in &segments {
            if !(seg.duration.is_finite() && seg.duration > 0.0) {
                return Err(Error::Parameter(
                    "segment durations must be positive".into(),
                ));
            }
            if let SegmentGenerator::Static(h) = &seg.generator {
                if h.dim() != geometry.dim() {
                    return Err(Error::Dimension {
                        expected: geometry.dim(),
                        got: h.dim(),
                    });
                }
            }
        }
        let schedule = Self { geometry, segments };
        schedule.check_continuity()?;
        Ok(schedule)
    }

    /// A single time-independent segment.
    pub fn constant(
        geometry: NetworkGeometry,
        h: QuadraticHamiltonian,
        duration: f64,
    ) -> Result<Self> {
        Self::new(
            geometry,
            vec![Segment {
                duration,
                generator: SegmentGenerator::Static(h),
            }],
        )
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn hamiltonian_at(&self, segment: usize, s: f64) -> Result<QuadraticHamiltonian> {
        self.segments[segment].hamiltonian(s, &self.geometry)
    }

    /// Largest mismatch between the end of one segment and the start of the next.
    pub fn max_junction_deviation(&self) -> Result<(usize, f64)> {
        let mut worst = (0, 0.0);
        for i in 1..self.segments.len() {
            let end = self.hamiltonian_at(i - 1, 1.0)?;
            let start = self.hamiltonian_at(i, 0.0)?;
            let dev = end.max_deviation(&start);
            if dev > worst.1 {
                worst = (i - 1, dev);
            }
        }
        Ok(worst)
    }

    pub fn check_continuity(&self) -> Result<()> {
        let (junction, deviation) = self.max_junction_deviation()?;
        if deviation > CONTINUITY_TOL {
            return Err(Error::Discontinuity {
                junction,
                deviation,
            });
        }
        Ok(())
    }

    /// Appends another schedule on the same geometry.
    pub fn concat(mut self, other: Schedule) -> Result<Self> {
        if self.geometry != other.geometry {
            return Err(Error::Geometry(
                "cannot join schedules on different networks".into(),
            ));
        }
        self.segments.extend(other.segments);
        self.check_continuity()?;
        Ok(self)
    }
}

/// `s<n>` (forward) or `s<n>'` (reverse) exchange of the left ends of
/// wires `n` and `n + 1`, one-based as written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BraidGenerator {
    /// One-based index of the upper wire.
    pub index: usize,
    pub inverse: bool,
}

impl BraidGenerator {
    pub fn new(index: usize, inverse: bool) -> Self {
        assert!(index >= 1, "braid generators are one-based");
        Self { index, inverse }
    }

    pub fn pair(&self) -> usize {
        self.index - 1
    }

    pub fn direction(&self) -> Direction {
        if self.inverse {
            Direction::Reverse
        } else {
            Direction::Forward
        }
    }

    pub fn inverted(&self) -> Self {
        Self {
            index: self.index,
            inverse: !self.inverse,
        }
    }
}

impl fmt::Display for BraidGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}{}", self.index, if self.inverse { "'" } else { "" })
    }
}

impl FromStr for BraidGenerator {
    type Err = Error;

    fn from_str(tok: &str) -> Result<Self> {
        let body = tok
            .strip_prefix('s')
            .ok_or_else(|| Error::BraidWord(format!("token {tok:?} must start with 's'")))?;
        let (digits, inverse) = match body.strip_suffix('\'') {
            Some(d) => (d, true),
            None => (body, false),
        };
        let index: usize = digits
            .parse()
            .map_err(|_| Error::BraidWord(format!("token {tok:?} has no generator index")))?;
        if index == 0 {
            return Err(Error::BraidWord("generator indices start at 1".into()));
        }
        Ok(Self { index, inverse })
    }
}

/// Braid generators in time order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BraidWord(pub Vec<BraidGenerator>);

impl BraidWord {
    pub fn generators(&self) -> &[BraidGenerator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same word written as an operator product (rightmost acts first).
    pub fn operator_order(&self) -> String {
        self.0
            .iter()
            .rev()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|g| g.inverted()).collect())
    }

    pub fn max_index(&self) -> usize {
        self.0.iter().map(|g| g.index).max().unwrap_or(0)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self
            .0
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        f.write_str(&s)
    }
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// Four ramped segments exchanging the left Majoranas of wires `pair` and `pair + 1`.
pub fn braid_schedule(
    pair: usize,
    direction: Direction,
    ramp: &Ramp,
    params: &WireParams,
    error: &ErrorModel,
    geometry: &NetworkGeometry,
) -> Result<Schedule> {
    params.validate()?;
    if pair + 1 >= geometry.wires {
        return Err(Error::Geometry(format!(
            "braid of wires {} and {} on a network of {} wires",
            pair + 1,
            pair + 2,
            geometry.wires
        )));
    }
    let segments = ProtocolStep::ALL
        .iter()
        .map(|&step| Segment {
            duration: ramp.duration,
            generator: SegmentGenerator::Braid(BraidStep {
                step,
                direction,
                pair,
                shape: ramp.shape,
                params: *params,
                error: *error,
            }),
        })
        .collect();
    Schedule::new(*geometry, segments)
}

pub fn compile_word(
    word: &BraidWord,
    ramp: &Ramp,
    params: &WireParams,
    error: &ErrorModel,
    geometry: &NetworkGeometry,
) -> Result<Schedule> {
    if word.is_empty() {
        return Err(Error::BraidWord("empty braid word".into()));
    }
    if word.max_index() + 1 > geometry.wires {
        return Err(Error::BraidWord(format!(
            "generator s{} needs {} wires, network has {}",
            word.max_index(),
            word.max_index() + 1,
            geometry.wires
        )));
    }
    let mut segments = Vec::with_capacity(4 * word.len());
    for g in word.generators() {
        segments.extend(
            braid_schedule(g.pair(), g.direction(), ramp, params, error, geometry)?.segments,
        );
    }
    Schedule::new(*geometry, segments)
}
