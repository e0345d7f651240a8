use nalgebra::DVector;

use crate::error::{Error, Result};

/// A real unit vector `v` defining the Majorana operator `gamma = sum_k v_k c_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaMode {
    v: DVector<f64>,
}

const NORM_TOL: f64 = 1e-12;

impl MajoranaMode {
    pub fn new(v: DVector<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("mode vector"));
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Parameter(format!(
                "mode vector must have unit norm, got {norm}"
            )));
        }
        Ok(Self { v })
    }

    pub fn normalized(v: DVector<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Parameter(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Ok(Self { v: v / norm })
    }

    /// The bare Majorana `c_k`.
    pub fn unit(dim: usize, k: usize) -> Self {
        assert!(k < dim, "label {k} outside dimension {dim}");
        let mut v = DVector::zeros(dim);
        v[k] = 1.0;
        Self { v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn negated(&self) -> Self {
        Self { v: -&self.v }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.v.dot(&other.v)
    }

    /// Squared weight of the mode on a label range.
    pub fn weight_on(&self, range: std::ops::Range<usize>) -> f64 {
        range.map(|k| self.v[k] * self.v[k]).sum()
    }
}
