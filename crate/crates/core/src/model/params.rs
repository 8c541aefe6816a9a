use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Nondimensional rates of the stochastic system plus its two noise intensities.
///
/// ```text
/// dx = (sigma + rho*x*y/(eta + y) - mu*x*y - delta*x) dt + sigma1*x dB1
/// dy = (alpha*y - beta*y^2 - x*y) dt                   + sigma2*y dB2
/// ```
///
/// Fields are public so special sub-cases (e.g. `sigma = 0` for a pure
/// geometric Brownian motion in `x`) can be built directly; [`ModelParams::new`]
/// and [`ModelParams::validate`] enforce the admissible parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub sigma: T,
    pub rho: T,
    pub eta: T,
    pub mu: T,
    pub delta: T,
    pub alpha: T,
    pub beta: T,
    #[serde(default)]
    pub sigma1: T,
    #[serde(default)]
    pub sigma2: T,
}

impl<T: Scalar> ModelParams<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sigma: T,
        rho: T,
        eta: T,
        mu: T,
        delta: T,
        alpha: T,
        beta: T,
        sigma1: T,
        sigma2: T,
    ) -> Result<Self> {
        let p = Self {
            sigma,
            rho,
            eta,
            mu,
            delta,
            alpha,
            beta,
            sigma1,
            sigma2,
        };
        p.validate()?;
        Ok(p)
    }

    /// sigma, eta, delta, alpha, beta must be strictly positive; rho, mu and
    /// both noise intensities non-negative. Everything finite.
    pub fn validate(&self) -> Result<()> {
        let strict = [
            ("sigma", self.sigma),
            ("eta", self.eta),
            ("delta", self.delta),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ];
        for (name, v) in strict {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::domain(
                    "ModelParams",
                    format!("{name} must be finite and > 0, got {v}"),
                ));
            }
        }
        let nonneg = [
            ("rho", self.rho),
            ("mu", self.mu),
            ("sigma1", self.sigma1),
            ("sigma2", self.sigma2),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= T::zero()) {
                return Err(Error::domain(
                    "ModelParams",
                    format!("{name} must be finite and >= 0, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn with_noise(mut self, sigma1: T, sigma2: T) -> Self {
        self.sigma1 = sigma1;
        self.sigma2 = sigma2;
        self
    }

    /// Same rates with both noise intensities switched off.
    pub fn deterministic(self) -> Self {
        self.with_noise(T::zero(), T::zero())
    }

    pub fn cast<U: Scalar>(&self) -> ModelParams<U> {
        let c = |v: T| U::from(v).expect("parameter representable in target scalar");
        ModelParams {
            sigma: c(self.sigma),
            rho: c(self.rho),
            eta: c(self.eta),
            mu: c(self.mu),
            delta: c(self.delta),
            alpha: c(self.alpha),
            beta: c(self.beta),
            sigma1: c(self.sigma1),
            sigma2: c(self.sigma2),
        }
    }
}

/// Effector-cell density `x` and tumor-cell density `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> State<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        let s = Self { x, y };
        if s.is_positive() {
            Ok(s)
        } else {
            Err(Error::domain(
                "State",
                format!("both coordinates must be finite and > 0, got ({x}, {y})"),
            ))
        }
    }

    pub fn is_positive(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.x > T::zero() && self.y > T::zero()
    }
}
