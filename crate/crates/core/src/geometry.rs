//! Wire/site coordinates and the map onto Majorana labels.
//!
//! Labels are enumerated wire-major, then site, then flavor, so that the
//! `2 * length` Majoranas of each wire form one contiguous block:
//! `label = 2 * (wire * length + site) + flavor`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An array of `wires` parallel Kitaev wires, each with `length` sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkGeometry {
    pub wires: usize,
    pub length: usize,
}

/// Site `(wire, site)`, both zero-based. The protocol's `(u, 1)` is
/// `SiteIndex { wire: n, site: 0 }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex {
    pub wire: usize,
    pub site: usize,
}

impl SiteIndex {
    pub const fn new(wire: usize, site: usize) -> Self {
        Self { wire, site }
    }
}

/// Which of the two Majoranas of a site: `Odd` is `a† + a`, `Even` is `-i(a† - a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Odd,
    Even,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MajoranaLabel(pub usize);

impl MajoranaLabel {
    pub fn index(self) -> usize {
        self.0
    }
}

impl NetworkGeometry {
    pub fn new(wires: usize, length: usize) -> Result<Self> {
        if wires == 0 {
            return Err(Error::Geometry("network needs at least one wire".into()));
        }
        if length < 2 {
            return Err(Error::Geometry(format!(
                "wire length must be at least 2, got {length}"
            )));
        }
        Ok(Self { wires, length })
    }

    pub fn sites(&self) -> usize {
        self.wires * self.length
    }

    /// Number of Majorana labels, `2 * sites`.
    pub fn dim(&self) -> usize {
        2 * self.sites()
    }

    pub fn contains(&self, site: SiteIndex) -> bool {
        site.wire < self.wires && site.site < self.length
    }

    pub fn check(&self, site: SiteIndex) -> Result<()> {
        if self.contains(site) {
            Ok(())
        } else {
            Err(Error::Index(format!(
                "site ({}, {}) outside {} wires x {} sites",
                site.wire, site.site, self.wires, self.length
            )))
        }
    }

    pub fn label_of(&self, site: SiteIndex, flavor: Flavor) -> Result<MajoranaLabel> {
        self.check(site)?;
        let offset = match flavor {
            Flavor::Odd => 0,
            Flavor::Even => 1,
        };
        Ok(MajoranaLabel(
            2 * (site.wire * self.length + site.site) + offset,
        ))
    }

    pub fn site_of(&self, label: MajoranaLabel) -> Result<(SiteIndex, Flavor)> {
        if label.0 >= self.dim() {
            return Err(Error::Index(format!(
                "label {} outside dimension {}",
                label.0,
                self.dim()
            )));
        }
        let flavor = if label.0.is_multiple_of(2) {
            Flavor::Odd
        } else {
            Flavor::Even
        };
        let flat = label.0 / 2;
        Ok((
            SiteIndex::new(flat / self.length, flat % self.length),
            flavor,
        ))
    }

    /// Both labels of a site, `(odd, even)`.
    pub fn site_labels(&self, site: SiteIndex) -> Result<(usize, usize)> {
        let odd = self.label_of(site, Flavor::Odd)?.0;
        Ok((odd, odd + 1))
    }

    /// Half-open label range of one wire.
    pub fn wire_range(&self, wire: usize) -> std::ops::Range<usize> {
        let start = 2 * wire * self.length;
        start..start + 2 * self.length
    }

    /// Same-wire neighbours, or the same site column on adjacent wires.
    pub fn adjacent(&self, a: SiteIndex, b: SiteIndex) -> bool {
        if a.wire == b.wire {
            a.site.abs_diff(b.site) == 1
        } else {
            a.wire.abs_diff(b.wire) == 1 && a.site == b.site
        }
    }
}
