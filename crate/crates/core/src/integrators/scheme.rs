use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{drift, ModelParams, State};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Milstein,
    EulerMaruyama,
}

impl Scheme {
    /// Multiplicative noise factor for one step of `du = a dt + b u dW`.
    #[inline]
    pub(crate) fn noise_factor<T: Scalar>(self, b: T, dw: T, dt: T) -> T {
        match self {
            Scheme::Milstein => b * dw + lit::<T>(0.5) * b * b * (dw * dw - dt),
            Scheme::EulerMaruyama => b * dw,
        }
    }

    #[inline]
    pub(crate) fn advance<T: Scalar>(self, u: T, drift: T, b: T, dw: T, dt: T) -> T {
        u + drift * dt + u * self.noise_factor(b, dw, dt)
    }

    pub fn step<T: Scalar>(
        self,
        p: &ModelParams<T>,
        s: State<T>,
        dw1: T,
        dw2: T,
        dt: T,
    ) -> Result<State<T>, PositivityViolation<T>> {
        let (dx, dy) = drift(p, s);
        let next = State {
            x: self.advance(s.x, dx, p.sigma1, dw1, dt),
            y: self.advance(s.y, dy, p.sigma2, dw2, dt),
        };
        if next.is_positive() {
            Ok(next)
        } else {
            Err(PositivityViolation { candidate: next })
        }
    }
}

/// A step left the open positive quadrant; carries the rejected candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityViolation<T> {
    pub candidate: State<T>,
}

/// One Milstein step driven by Brownian increments `dw1`, `dw2` (variance `dt`).
pub fn milstein_step<T: Scalar>(
    p: &ModelParams<T>,
    s: State<T>,
    dw1: T,
    dw2: T,
    dt: T,
) -> Result<State<T>, PositivityViolation<T>> {
    Scheme::Milstein.step(p, s, dw1, dw2, dt)
}

/// One Euler-Maruyama step driven by Brownian increments `dw1`, `dw2`.
pub fn em_step<T: Scalar>(
    p: &ModelParams<T>,
    s: State<T>,
    dw1: T,
    dw2: T,
    dt: T,
) -> Result<State<T>, PositivityViolation<T>> {
    Scheme::EulerMaruyama.step(p, s, dw1, dw2, dt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Positivity<T> {
    /// Reject a step whose new coordinate is at or below `floor` times the
    /// old one and retry it as two half steps on a refined Brownian path.
    RejectAndHalve { floor: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy<T> {
    pub scheme: Scheme,
    pub dt: T,
    pub positivity: Positivity<T>,
    pub max_halvings: u32,
}

impl<T: Scalar> Default for StepPolicy<T> {
    fn default() -> Self {
        Self {
            scheme: Scheme::Milstein,
            dt: lit(1e-3),
            positivity: Positivity::RejectAndHalve { floor: lit(1e-12) },
            max_halvings: 20,
        }
    }
}

impl<T: Scalar> StepPolicy<T> {
    pub fn new(scheme: Scheme, dt: T) -> Self {
        Self {
            scheme,
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(Error::domain(
                "StepPolicy",
                format!("dt must be > 0, got {}", self.dt),
            ));
        }
        let Positivity::RejectAndHalve { floor } = self.positivity;
        if !(floor > T::zero() && floor < T::one()) {
            return Err(Error::domain(
                "StepPolicy",
                format!("positivity floor must lie in (0, 1), got {floor}"),
            ));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn accepts(&self, old: T, new: T) -> bool {
        let Positivity::RejectAndHalve { floor } = self.positivity;
        new.is_finite() && new > floor * old
    }
}
