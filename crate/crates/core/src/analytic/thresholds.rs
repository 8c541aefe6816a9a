use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{threshold_h, ModelParams};
use crate::scalar::{lit, Scalar};

use super::laws::{phi_law, psi_law, z_law, StationaryLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Extinction,
    Permanence,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiFate {
    Extinct,
    StationaryGamma,
}

/// One inequality checked during classification. `value` is the left-hand
/// side minus the right-hand side; absent when the expression is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate<T> {
    pub condition: String,
    pub value: Option<T>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport<T> {
    pub regime: Regime,
    pub lambda1: T,
    pub lambda2: T,
    pub lambda3: Option<T>,
    pub h: T,
    pub delta_minus_h2: T,
    pub aux_psi_fate: PsiFate,
    pub aux_phi_law: Option<StationaryLaw<T>>,
    pub boundary_z_law: Option<StationaryLaw<T>>,
    pub certificates: Vec<Certificate<T>>,
}

/// Tumor extinction rate `sigma2^2 / 2 - alpha`.
pub fn lambda1<T: Scalar>(p: &ModelParams<T>) -> T {
    p.sigma2 * p.sigma2 * lit(0.5) - p.alpha
}

/// Upper bound on the long-run time average of `1/x` under permanence.
pub fn lambda2<T: Scalar>(p: &ModelParams<T>) -> T {
    let half: T = lit(0.5);
    ((p.mu / p.beta) * (p.alpha - half * p.sigma2 * p.sigma2)
        + p.delta
        + half * p.sigma1 * p.sigma1)
        / p.sigma
}

/// Lower bound on the long-run time average of `y`; defined when `delta > h^2`.
pub fn lambda3<T: Scalar>(p: &ModelParams<T>) -> Option<T> {
    permanence_margin(p).map(|m| m / p.beta)
}

/// `alpha - sigma2^2/2 - sigma/(delta - h^2)` when `delta > h^2`.
pub fn permanence_margin<T: Scalar>(p: &ModelParams<T>) -> Option<T> {
    let h = threshold_h(p);
    let gap = p.delta - h * h;
    (gap > T::zero()).then(|| p.alpha - p.sigma2 * p.sigma2 * lit(0.5) - p.sigma / gap)
}

pub fn regime_classify<T: Scalar>(p: &ModelParams<T>) -> RegimeReport<T> {
    let h = threshold_h(p);
    let gap = p.delta - h * h;
    let l1 = lambda1(p);
    let l2 = lambda2(p);
    let l3 = lambda3(p);
    let margin = permanence_margin(p);
    let two: T = lit(2.0);
    let psi_margin = two * p.alpha - p.sigma2 * p.sigma2;

    let extinct = l1 > T::zero();
    let permanent = gap > T::zero() && margin.is_some_and(|m| m > T::zero());
    let regime = if extinct {
        Regime::Extinction
    } else if permanent {
        Regime::Permanence
    } else {
        Regime::Indeterminate
    };

    let cert = |condition: &str, value: Option<T>| Certificate {
        condition: condition.to_string(),
        value,
        satisfied: value.is_some_and(|v| v > T::zero()),
    };
    let certificates = vec![
        cert("sigma2^2/2 - alpha > 0", Some(l1)),
        cert("2 alpha - sigma2^2 > 0", Some(psi_margin)),
        cert("delta - h^2 > 0", Some(gap)),
        cert("alpha - sigma2^2/2 - sigma/(delta - h^2) > 0", margin),
        cert("sigma1 > 0", Some(p.sigma1)),
    ];

    RegimeReport {
        regime,
        lambda1: l1,
        lambda2: l2,
        lambda3: l3,
        h,
        delta_minus_h2: gap,
        aux_psi_fate: if psi_law(p).law().is_some() {
            PsiFate::StationaryGamma
        } else {
            PsiFate::Extinct
        },
        aux_phi_law: phi_law(p).law().copied(),
        boundary_z_law: z_law(p).law().copied(),
        certificates,
    }
}

/// `((2 alpha + (k-1) sigma2^2) / (2 beta))^k`, the long-run bound on `E psi^k`.
pub fn rho_k<T: Scalar>(p: &ModelParams<T>, k: T) -> Result<T> {
    if !(k > T::one()) {
        return Err(Error::domain(
            "rho_k",
            format!("order must exceed 1, got {k}"),
        ));
    }
    let two: T = lit(2.0);
    let base = (two * p.alpha + (k - T::one()) * p.sigma2 * p.sigma2) / (two * p.beta);
    Ok(base.powf(k))
}

/// Bound on `E psi(t)^k` for the logistic comparison process started at `y0`:
/// `[e^(-r t)/y0 + (1 - e^(-r t)) / M]^(-k)` with `r = alpha + (k-1) sigma2^2/2`
/// and `M = rho_k^(1/k)`.
pub fn psi_moment_bound<T: Scalar>(p: &ModelParams<T>, k: T, t: T, y0: T) -> Result<T> {
    if !(k > T::one()) {
        return Err(Error::domain(
            "psi_moment_bound",
            format!("order must exceed 1, got {k}"),
        ));
    }
    if !(y0 > T::zero()) {
        return Err(Error::domain(
            "psi_moment_bound",
            format!("y0 must be positive, got {y0}"),
        ));
    }
    if !(t >= T::zero()) {
        return Err(Error::domain(
            "psi_moment_bound",
            format!("t must be >= 0, got {t}"),
        ));
    }
    let two: T = lit(2.0);
    let r = p.alpha + (k - T::one()) * p.sigma2 * p.sigma2 / two;
    if r == T::zero() {
        return Err(Error::domain(
            "psi_moment_bound",
            "alpha + (k-1) sigma2^2/2 must be nonzero",
        ));
    }
    let decay = (-r * t).exp();
    let bracket = decay / y0 + (p.beta / r) * (T::one() - decay);
    Ok(bracket.powf(-k))
}
