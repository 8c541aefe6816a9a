use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::model::{threshold_h, ModelParams};
use crate::scalar::{lit, to64, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    /// Density `b^a / Γ(a) x^(a-1) e^(-b x)`.
    Gamma,
    /// Density `b^a / Γ(a) x^(-(a+1)) e^(-b / x)`.
    InverseGamma,
}

/// Gamma or inverse-Gamma law with shape `a` and rate (resp. scale) `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryLaw<T> {
    pub kind: LawKind,
    pub shape: T,
    pub rate: T,
}

impl<T: Scalar> StationaryLaw<T> {
    pub fn new(kind: LawKind, shape: T, rate: T) -> Result<Self> {
        if !(shape.is_finite() && shape > T::zero() && rate.is_finite() && rate > T::zero()) {
            return Err(Error::domain(
                "StationaryLaw",
                format!("shape and rate must be positive and finite, got a = {shape}, b = {rate}"),
            ));
        }
        Ok(Self { kind, shape, rate })
    }

    pub fn gamma(shape: T, rate: T) -> Result<Self> {
        Self::new(LawKind::Gamma, shape, rate)
    }

    pub fn inverse_gamma(shape: T, rate: T) -> Result<Self> {
        Self::new(LawKind::InverseGamma, shape, rate)
    }

    fn ab(&self) -> (f64, f64) {
        (to64(self.shape), to64(self.rate))
    }

    pub fn ln_pdf(&self, x: T) -> T {
        let (a, b) = self.ab();
        let x = to64(x);
        if x <= 0.0 {
            return T::neg_infinity();
        }
        let norm = a * b.ln() - ln_gamma(a);
        lit(match self.kind {
            LawKind::Gamma => norm + (a - 1.0) * x.ln() - b * x,
            LawKind::InverseGamma => norm - (a + 1.0) * x.ln() - b / x,
        })
    }

    pub fn pdf(&self, x: T) -> T {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: T) -> T {
        let (a, b) = self.ab();
        let x = to64(x);
        if x <= 0.0 {
            return T::zero();
        }
        if x.is_infinite() {
            return T::one();
        }
        lit(match self.kind {
            LawKind::Gamma => gamma_lr(a, b * x),
            LawKind::InverseGamma => gamma_ur(a, b / x),
        })
    }

    /// Inverse of [`cdf`](Self::cdf) for `q` in `[0, 1]`.
    pub fn quantile(&self, q: T) -> Result<T> {
        let q = to64(q);
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(
                "quantile",
                format!("probability must lie in [0, 1], got {q}"),
            ));
        }
        let (a, b) = self.ab();
        let g = Gamma::new(a, b).map_err(|e| Error::domain("quantile", e.to_string()))?;
        Ok(lit(match self.kind {
            LawKind::Gamma => g.inverse_cdf(q),
            LawKind::InverseGamma => 1.0 / g.inverse_cdf(1.0 - q),
        }))
    }

    /// `E[X^p]`, evaluated through log-gamma so large shapes do not overflow.
    pub fn moment(&self, p: T) -> Result<T> {
        let (a, b) = self.ab();
        let p = to64(p);
        let ln_m = match self.kind {
            LawKind::Gamma => {
                if p <= -a {
                    return Err(Error::domain(
                        "moment",
                        format!("Gamma moment of order p requires p > -a; p = {p}, a = {a}"),
                    ));
                }
                ln_gamma(a + p) - ln_gamma(a) - p * b.ln()
            }
            LawKind::InverseGamma => {
                if p >= a {
                    return Err(Error::domain(
                        "moment",
                        format!("inverse-Gamma moment of order p requires p < a; p = {p}, a = {a}"),
                    ));
                }
                p * b.ln() + ln_gamma(a - p) - ln_gamma(a)
            }
        };
        let m = ln_m.exp();
        if !m.is_finite() {
            return Err(Error::Overflow {
                what: format!("moment of order {p}"),
            });
        }
        Ok(lit(m))
    }

    pub fn mean(&self) -> Result<T> {
        self.moment(T::one())
    }

    pub fn variance(&self) -> Result<T> {
        let m1 = self.moment(T::one())?;
        Ok(self.moment(lit(2.0))? - m1 * m1)
    }

    pub fn mode(&self) -> T {
        let (a, b) = (self.shape, self.rate);
        match self.kind {
            LawKind::Gamma if a >= T::one() => (a - T::one()) / b,
            LawKind::Gamma => T::zero(),
            LawKind::InverseGamma => b / (a + T::one()),
        }
    }

    /// The law of `1/X`.
    pub fn dual(&self) -> Self {
        let kind = match self.kind {
            LawKind::Gamma => LawKind::InverseGamma,
            LawKind::InverseGamma => LawKind::Gamma,
        };
        Self { kind, ..*self }
    }

    pub fn cast<U: Scalar>(&self) -> StationaryLaw<U> {
        StationaryLaw {
            kind: self.kind,
            shape: lit(to64(self.shape)),
            rate: lit(to64(self.rate)),
        }
    }
}

/// A closed-form law, or the reason it does not exist for these parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LawStatus<T> {
    Available(StationaryLaw<T>),
    Absent { reason: String },
}

impl<T: Scalar> LawStatus<T> {
    pub fn law(&self) -> Option<&StationaryLaw<T>> {
        match self {
            LawStatus::Available(l) => Some(l),
            LawStatus::Absent { .. } => None,
        }
    }

    pub fn require(&self) -> Result<StationaryLaw<T>> {
        match self {
            LawStatus::Available(l) => Ok(*l),
            LawStatus::Absent { reason } => Err(Error::LawUnavailable(reason.clone())),
        }
    }
}

/// Stationary laws of the comparison processes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryLaws<T> {
    /// Linear effector process with death rate `delta - h^2`.
    pub phi: LawStatus<T>,
    /// Stochastic logistic tumor process.
    pub psi: LawStatus<T>,
    /// Tumor-free effector process.
    pub z: LawStatus<T>,
}

pub fn phi_law<T: Scalar>(p: &ModelParams<T>) -> LawStatus<T> {
    let h = threshold_h(p);
    let gap = p.delta - h * h;
    let s1 = p.sigma1 * p.sigma1;
    if !(gap > T::zero()) {
        return LawStatus::Absent {
            reason: format!("requires delta > h^2, got delta - h^2 = {gap}"),
        };
    }
    if !(s1 > T::zero()) {
        return LawStatus::Absent {
            reason: "requires sigma1 > 0".into(),
        };
    }
    let two: T = lit(2.0);
    match StationaryLaw::inverse_gamma(two * gap / s1 + T::one(), two * p.sigma / s1) {
        Ok(l) => LawStatus::Available(l),
        Err(e) => LawStatus::Absent {
            reason: e.to_string(),
        },
    }
}

pub fn psi_law<T: Scalar>(p: &ModelParams<T>) -> LawStatus<T> {
    let s2 = p.sigma2 * p.sigma2;
    let two: T = lit(2.0);
    if !(two * p.alpha > s2) {
        return LawStatus::Absent {
            reason: format!(
                "requires 2 alpha > sigma2^2, got 2 alpha - sigma2^2 = {}",
                two * p.alpha - s2
            ),
        };
    }
    if !(s2 > T::zero()) {
        return LawStatus::Absent {
            reason: "requires sigma2 > 0".into(),
        };
    }
    match StationaryLaw::gamma(two * p.alpha / s2 - T::one(), two * p.beta / s2) {
        Ok(l) => LawStatus::Available(l),
        Err(e) => LawStatus::Absent {
            reason: e.to_string(),
        },
    }
}

pub fn z_law<T: Scalar>(p: &ModelParams<T>) -> LawStatus<T> {
    let s1 = p.sigma1 * p.sigma1;
    if !(s1 > T::zero()) {
        return LawStatus::Absent {
            reason: "requires sigma1 > 0".into(),
        };
    }
    let two: T = lit(2.0);
    match StationaryLaw::inverse_gamma(two * p.delta / s1 + T::one(), two * p.sigma / s1) {
        Ok(l) => LawStatus::Available(l),
        Err(e) => LawStatus::Absent {
            reason: e.to_string(),
        },
    }
}

pub fn stationary_laws<T: Scalar>(p: &ModelParams<T>) -> StationaryLaws<T> {
    StationaryLaws {
        phi: phi_law(p),
        psi: psi_law(p),
        z: z_law(p),
    }
}

/// `E[X^p]` under a stationary law; alias of [`StationaryLaw::moment`].
pub fn ergodic_moments<T: Scalar>(law: &StationaryLaw<T>, p: T) -> Result<T> {
    law.moment(p)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::presets;

    #[test]
    fn boundary_law_for_strong_noise_preset() {
        let p = presets::strong_tumor_noise::<f64>();
        let z = z_law(&p).require().unwrap();
        assert_eq!(z.kind, LawKind::InverseGamma);
        assert_relative_eq!(z.shape, 19.715, max_relative = 1e-12);
        assert_relative_eq!(z.rate, 5.905, max_relative = 1e-12);
        assert_relative_eq!(z.mean().unwrap(), p.sigma / p.delta, max_relative = 1e-12);
        assert_relative_eq!(z.mean().unwrap(), 0.31552, max_relative = 1e-4);
        assert!(psi_law(&p).law().is_none());
        // delta < h^2 for rho = 1.131.
        assert!(phi_law(&p).law().is_none());
    }

    #[test]
    fn tumor_law_for_weak_noise_preset() {
        let p = presets::weak_tumor_noise::<f64>();
        let psi = psi_law(&p).require().unwrap();
        assert_relative_eq!(psi.shape, 51.352, max_relative = 1e-12);
        assert_relative_eq!(psi.rate, 0.104704, max_relative = 1e-12);
        let mbar1 = (p.alpha - p.sigma2 * p.sigma2 / 2.0) / p.beta;
        assert_relative_eq!(psi.mean().unwrap(), mbar1, max_relative = 1e-12);
        assert!((psi.mean().unwrap() - 490.4).abs() < 0.05);

        let phi = phi_law(&p).require().unwrap();
        let h = threshold_h(&p);
        assert_relative_eq!(
            phi.mean().unwrap(),
            p.sigma / (p.delta - h * h),
            max_relative = 1e-12
        );
        assert_relative_eq!(phi.mean().unwrap(), 1.29937, max_relative = 1e-5);
    }

    #[test]
    fn zeroth_moment_is_one_and_out_of_range_moments_fail() {
        let g = StationaryLaw::gamma(2.5, 0.7).unwrap();
        let ig = StationaryLaw::inverse_gamma(2.5, 0.7).unwrap();
        assert_relative_eq!(g.moment(0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(ig.moment(0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert!(g.moment(-2.5).is_err());
        assert!(ig.moment(2.5).is_err());
        assert!(ig.moment(2.4).is_ok());
    }

    #[test]
    fn large_shape_moments_do_not_overflow() {
        let g = StationaryLaw::gamma(51.352, 0.104704).unwrap();
        let m2 = g.moment(2.0).unwrap();
        assert_relative_eq!(
            m2,
            51.352 * 52.352 / (0.104704 * 0.104704),
            max_relative = 1e-10
        );
    }

    #[test]
    fn quantile_inverts_cdf() {
        for law in [
            StationaryLaw::gamma(3.0, 2.0).unwrap(),
            StationaryLaw::inverse_gamma(19.715, 5.905).unwrap(),
        ] {
            for q in [0.01, 0.25, 0.5, 0.9, 0.999] {
                let x = law.quantile(q).unwrap();
                assert_relative_eq!(law.cdf(x), q, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn mode_maximizes_density() {
        for law in [
            StationaryLaw::gamma(3.0, 2.0).unwrap(),
            StationaryLaw::inverse_gamma(4.0, 1.5).unwrap(),
        ] {
            let m = law.mode();
            assert!(law.pdf(m) > law.pdf(m * 1.01));
            assert!(law.pdf(m) > law.pdf(m * 0.99));
        }
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(StationaryLaw::gamma(0.0, 1.0).is_err());
        assert!(StationaryLaw::inverse_gamma(1.0, -1.0).is_err());
        assert!(StationaryLaw::<f64>::gamma(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn law_status_json() {
        let p = presets::strong_tumor_noise::<f64>();
        let laws = stationary_laws(&p);
        let v = serde_json::to_value(&laws).unwrap();
        assert_eq!(v["z"]["status"], "available");
        assert_eq!(v["z"]["kind"], "inverse_gamma");
        assert_eq!(v["psi"]["status"], "absent");
    }
}
