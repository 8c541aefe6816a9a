use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::params::{ModelParams, State};

/// Drift of the system at `s`, returned as `(dx/dt, dy/dt)`.
#[inline]
pub fn drift<T: Scalar>(p: &ModelParams<T>, s: State<T>) -> (T, T) {
    let State { x, y } = s;
    let xy = x * y;
    let dx = p.sigma + p.rho * xy / (p.eta + y) - p.mu * xy - p.delta * x;
    let dy = p.alpha * y - p.beta * y * y - xy;
    (dx, dy)
}

/// Diagonal diffusion coefficients `(sigma1 * x, sigma2 * y)`.
#[inline]
pub fn diffusion<T: Scalar>(p: &ModelParams<T>, s: State<T>) -> (T, T) {
    (p.sigma1 * s.x, p.sigma2 * s.y)
}

/// Net per-capita effector stimulation by the tumor, `rho*y/(eta+y) - mu*y`.
pub fn response_f2<T: Scalar>(p: &ModelParams<T>, y: T) -> Result<T> {
    if !(y >= T::zero()) {
        return Err(Error::domain(
            "response_f2",
            format!("y must be >= 0, got {y}"),
        ));
    }
    Ok(p.rho * y / (p.eta + y) - p.mu * y)
}

/// `max(sqrt(rho) - sqrt(mu*eta), 0)`; `h^2` bounds `response_f2` from above.
pub fn threshold_h<T: Scalar>(p: &ModelParams<T>) -> T {
    (p.rho.sqrt() - (p.mu * p.eta).sqrt()).max(T::zero())
}
