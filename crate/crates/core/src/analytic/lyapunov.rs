use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::{lit, to64, Scalar};

use super::laws::{phi_law, psi_law};
use super::optimize::{sup_cubic, sup_polynomial, sup_quadratic};
use super::thresholds::{lambda1, lambda2, lambda3, rho_k};

/// Constants appearing in the moment and positivity bounds for given
/// exponent `theta` and mixing coefficient `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants<T> {
    pub theta: T,
    pub c: T,
    /// Rate of the exponential weight `e^(kappa t)`.
    pub kappa: T,
    pub l1: T,
    pub l2: T,
    pub l3: T,
    pub l4: T,
    /// `limsup E[(1 + x + c y)^theta] <= L4 / kappa`.
    pub l: T,
    /// Present for `theta < 2`.
    pub l6: Option<T>,
    pub l7: Option<T>,
    /// `limsup E[x^(-theta)] <= L7 / kappa`, present for `theta < 2`.
    pub inverse_moment_bound: Option<T>,
    pub rho_k: BTreeMap<u32, T>,
    /// Moments of the stationary law of the linear effector process.
    pub m_p: BTreeMap<u32, T>,
    /// Moments of the stationary law of the logistic tumor process.
    pub mbar_p: BTreeMap<u32, T>,
    pub lambda1: T,
    pub lambda2: T,
    pub lambda3: Option<T>,
    /// Half of `(delta - h^2)(alpha - sigma2^2/2) - sigma`, when positive.
    pub zeta: Option<T>,
}

/// `kappa = theta (delta + (1 - theta) sigma1^2 / 2) / 2`.
pub fn kappa<T: Scalar>(p: &ModelParams<T>, theta: T) -> T {
    let half: T = lit(0.5);
    theta * (p.delta + (T::one() - theta) * p.sigma1 * p.sigma1 * half) * half
}

pub fn check_bound_premises<T: Scalar>(p: &ModelParams<T>, theta: T, c: T) -> Result<()> {
    p.validate()?;
    let s1 = p.sigma1 * p.sigma1;
    let theta_max = if s1 > T::zero() {
        T::one() + lit::<T>(2.0) * p.delta / s1
    } else {
        T::infinity()
    };
    if !(theta > T::zero() && theta < theta_max) {
        return Err(Error::domain(
            "lyapunov_constants",
            format!("0 < theta < 1 + 2 delta / sigma1^2 = {theta_max} violated by theta = {theta}"),
        ));
    }
    let c_min = (p.rho / p.eta - p.mu).max(T::zero());
    if !(c.is_finite() && c > c_min) {
        return Err(Error::domain(
            "lyapunov_constants",
            format!("c > max(rho/eta - mu, 0) = {c_min} violated by c = {c}"),
        ));
    }
    let k = kappa(p, theta);
    let l1_full = p.delta + (T::one() - theta) * s1 * lit(0.5);
    if !(k > T::zero() && k < theta * l1_full) {
        return Err(Error::domain(
            "lyapunov_constants",
            format!("0 < kappa < theta (delta + (1 - theta) sigma1^2/2) violated by kappa = {k}"),
        ));
    }
    Ok(())
}

/// Coefficients `(A, B, C)` of `-A y^2 + B y + C`, whose supremum over `y >= 0` is `L2`.
///
/// Two constant terms `alpha` and `sigma` are admissible for the last
/// coefficient; the larger one is used so the bound holds in either case.
pub fn l2_coefficients(p: &ModelParams<f64>, theta: f64, c: f64, kappa: f64) -> (f64, f64, f64) {
    let kt = kappa / theta;
    let a = c * (p.beta + p.mu + c);
    let b = c * p.alpha + c * p.rho - c * p.delta - p.mu - c + 2.0 * c * kt;
    let k0 = p.rho - p.delta + p.alpha.max(p.sigma) + 2.0 * kt;
    (a, b, k0)
}

/// Coefficients `(A, B, C, D)` of `-A y^3 + B y^2 + C y + D`, whose supremum is `L3`.
pub fn l3_coefficients(
    p: &ModelParams<f64>,
    theta: f64,
    c: f64,
    kappa: f64,
) -> (f64, f64, f64, f64) {
    let kt = kappa / theta;
    let c2 = c * c;
    let a = c2 * p.beta;
    let b = c2 * p.alpha - c * p.beta + 0.5 * (theta - 1.0) * c2 * p.sigma2 * p.sigma2 + c2 * kt;
    let cc = c * (p.alpha + p.sigma + 2.0 * kt);
    let d = p.sigma + kt;
    (a, b, cc, d)
}

/// Ascending coefficients in `u = x^(-1/2)` of the expression whose supremum over `x > 0` is `L6`.
pub fn l6_coefficients(p: &ModelParams<f64>, theta: f64, kappa: f64) -> [f64; 7] {
    let kt = kappa / theta;
    let e = p.sigma - p.delta - 0.5 * (theta + 1.0) * p.sigma1 * p.sigma1 - kt - 0.5 * p.mu;
    let f = p.delta + p.sigma1 * p.sigma1 + 2.0 * kt;
    [kt, 0.0, f, 0.0, -e, 0.8 * p.mu, -p.sigma]
}

pub fn lyapunov_constants<T: Scalar>(
    p: &ModelParams<T>,
    theta: T,
    c: T,
) -> Result<BoundConstants<T>> {
    check_bound_premises(p, theta, c)?;
    let q = p.cast::<f64>();
    let th = to64(theta);
    let cc = to64(c);
    let k = to64(kappa(p, theta));

    let l1 = q.delta + 0.5 * (1.0 - th) * q.sigma1 * q.sigma1 - k / th;
    let (a2, b2, c2) = l2_coefficients(&q, th, cc, k);
    let (l2, _) = sup_quadratic(a2, b2, c2)?;
    let (a3, b3, c3, d3) = l3_coefficients(&q, th, cc, k);
    let (l3, _) = sup_cubic(a3, b3, c3, d3)?;
    let (inner, _) = sup_quadratic(l1, l2, l3)?;
    let l4 = inner.max(1.0);

    let mut rho = BTreeMap::new();
    for order in 2..=5u32 {
        rho.insert(order, to64(rho_k(p, lit(order as f64))?));
    }
    let (l6, l7) = if th < 2.0 {
        let (l6, _) = sup_polynomial(&l6_coefficients(&q, th, k))?;
        (
            Some(l6),
            Some(l6 + q.mu / 5.0 * rho[&5] + q.mu / 2.0 * rho[&2]),
        )
    } else {
        (None, None)
    };

    let mut m_p = BTreeMap::new();
    if let Some(law) = phi_law(p).law() {
        for order in 1..=2u32 {
            if let Ok(m) = law.moment(lit(order as f64)) {
                m_p.insert(order, m);
            }
        }
    }
    let mut mbar_p = BTreeMap::new();
    if let Some(law) = psi_law(p).law() {
        for order in 1..=2u32 {
            mbar_p.insert(order, law.moment(lit(order as f64))?);
        }
    }

    let vals = [l1, l2, l3, l4];
    if vals
        .iter()
        .chain(l6.iter())
        .chain(l7.iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::Overflow {
            what: "Lyapunov constants".into(),
        });
    }

    Ok(BoundConstants {
        theta,
        c,
        kappa: lit(k),
        l1: lit(l1),
        l2: lit(l2),
        l3: lit(l3),
        l4: lit(l4),
        l: lit(l4 / k),
        l6: l6.map(lit),
        l7: l7.map(lit),
        inverse_moment_bound: l7.map(|v| lit(v / k)),
        rho_k: rho.into_iter().map(|(k, v)| (k, lit(v))).collect(),
        m_p,
        mbar_p,
        lambda1: lambda1(p),
        lambda2: lambda2(p),
        lambda3: lambda3(p),
        zeta: super::recurrence::zeta(p),
    })
}
