use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite, strictly positive observations with a note on where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
    pub origin: String,
}

impl Sample {
    pub fn new(values: Vec<f64>, origin: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientSample { needed: 1, got: 0 });
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::domain(
                "Sample",
                format!("values must be finite and positive, found {bad}"),
            ));
        }
        Ok(Self {
            values,
            origin: origin.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Apply `f` to every value; the result must again be finite and positive.
    pub fn map(&self, f: impl Fn(f64) -> f64, origin: impl Into<String>) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect(), origin)
    }

    pub fn reciprocal(&self) -> Self {
        self.map(f64::recip, format!("1/({})", self.origin))
            .expect("reciprocal of a positive finite value is positive and finite")
    }

    pub fn mean(&self) -> f64 {
        crate::montecarlo::mean_sd(&self.values).0
    }

    pub fn std_dev(&self) -> f64 {
        crate::montecarlo::mean_sd(&self.values).1
    }

    /// Linear-interpolation quantile of the sorted values.
    pub fn quantile(&self, q: f64) -> f64 {
        quantile_sorted(&self.sorted(), q)
    }
}

pub(crate) fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < v.len() {
        v[i] + frac * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}
