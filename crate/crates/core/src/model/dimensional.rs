use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::params::ModelParams;

/// Rates in physical units, used only for ingestion. All fields strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalParams<T> {
    /// Tumor intrinsic growth rate (1/day).
    pub a: T,
    /// Reciprocal tumor carrying capacity (1/cell).
    pub b: T,
    /// Effector inflow (cells/day).
    pub s: T,
    /// Effector destruction and migration (1/day).
    pub d: T,
    /// Half-saturation of the response functional (cells).
    pub g: T,
    /// Maximal stimulation rate (1/day).
    pub q: T,
    /// Effector inactivation per encounter (1/(day cell)).
    pub r1: T,
    /// Tumor lysis programming per encounter (1/(day cell)).
    pub r2: T,
    /// Effector population scale (cells).
    pub e0: T,
    /// Tumor population scale (cells).
    pub t0: T,
}

impl<T: Scalar> DimensionalParams<T> {
    /// Rescale to the nondimensional system. Noise intensities come back zero.
    pub fn nondimensionalize(&self) -> Result<ModelParams<T>> {
        let fields = [
            ("a", self.a),
            ("b", self.b),
            ("s", self.s),
            ("d", self.d),
            ("g", self.g),
            ("q", self.q),
            ("r1", self.r1),
            ("r2", self.r2),
            ("e0", self.e0),
            ("t0", self.t0),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::domain(
                    "nondimensionalize",
                    format!("{name} must be finite and > 0, got {v}"),
                ));
            }
        }
        let r2t0 = self.r2 * self.t0;
        let p = ModelParams {
            sigma: self.s / (self.r2 * self.e0 * self.t0),
            rho: self.q / r2t0,
            eta: self.g / self.t0,
            mu: self.r1 / self.r2,
            delta: self.d / r2t0,
            alpha: self.a / r2t0,
            beta: self.a * self.b / self.r2,
            sigma1: T::zero(),
            sigma2: T::zero(),
        };
        p.validate()?;
        Ok(p)
    }
}
