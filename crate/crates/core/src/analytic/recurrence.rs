use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{threshold_h, ModelParams, State, TestFunction};
use crate::scalar::{lit, to64, Scalar};

/// `zeta = ((delta - h^2)(alpha - sigma2^2/2) - sigma) / 2` when `delta > h^2` and it is positive.
pub fn zeta<T: Scalar>(p: &ModelParams<T>) -> Option<T> {
    let h = threshold_h(p);
    let gap = p.delta - h * h;
    let half: T = lit(0.5);
    let z = half * (gap * (p.alpha - half * p.sigma2 * p.sigma2) - p.sigma);
    (gap > T::zero() && z > T::zero()).then_some(z)
}

/// Largest admissible `c`: `sigma zeta / (delta + sigma1^2)`.
pub fn max_mixing_c<T: Scalar>(p: &ModelParams<T>) -> Option<T> {
    zeta(p).map(|z| p.sigma * z / (p.delta + p.sigma1 * p.sigma1))
}

/// Default mixing coefficient, 90% of the admissible maximum.
pub fn default_mixing_c<T: Scalar>(p: &ModelParams<T>) -> Option<T> {
    max_mixing_c(p).map(|c| c * lit(0.9))
}

/// `U(x, y) = x + c/x + y^2 + (delta - h^2) ln(1 + 1/y)`, the recurrence
/// Lyapunov function for the permanence regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovU<T> {
    pub params: ModelParams<T>,
    pub c: T,
    pub zeta: T,
    gap: T,
}

impl<T: Scalar> LyapunovU<T> {
    /// Checks `zeta > 0` and `c (delta + sigma1^2) <= sigma zeta`.
    pub fn new(p: &ModelParams<T>, c: T) -> Result<Self> {
        p.validate()?;
        let h = threshold_h(p);
        let gap = p.delta - h * h;
        let half: T = lit(0.5);
        let two_zeta = gap * (p.alpha - half * p.sigma2 * p.sigma2) - p.sigma;
        if !(gap > T::zero()) {
            return Err(Error::domain(
                "LyapunovU",
                format!("delta > h^2 violated: delta - h^2 = {gap}"),
            ));
        }
        if !(two_zeta > T::zero()) {
            return Err(Error::domain(
                "LyapunovU",
                format!("(delta - h^2)(alpha - sigma2^2/2) - sigma > 0 violated: value {two_zeta}"),
            ));
        }
        let zeta = two_zeta * half;
        let lhs = c * (p.delta + p.sigma1 * p.sigma1);
        if !(c > T::zero() && lhs <= p.sigma * zeta) {
            return Err(Error::domain(
                "LyapunovU",
                format!(
                    "0 < c and c (delta + sigma1^2) <= sigma zeta violated: c = {c}, lhs = {lhs}, rhs = {}",
                    p.sigma * zeta
                ),
            ));
        }
        Ok(Self {
            params: *p,
            c,
            zeta,
            gap,
        })
    }

    pub fn with_default_c(p: &ModelParams<T>) -> Result<Self> {
        let c = default_mixing_c(p).ok_or_else(|| {
            Error::domain(
                "LyapunovU",
                "no admissible c: requires delta > h^2 and zeta > 0",
            )
        })?;
        Self::new(p, c)
    }

    pub fn value(&self, s: State<T>) -> T {
        s.x + self.c / s.x + s.y * s.y + self.gap * (T::one() + s.y.recip()).ln()
    }

    /// The generator applied to `U`, written out term by term.
    pub fn generator(&self, s: State<T>) -> T {
        let p = &self.params;
        let (x, y, c) = (s.x, s.y, self.c);
        let two: T = lit(2.0);
        let half: T = lit(0.5);
        let s1 = p.sigma1 * p.sigma1;
        let s2 = p.sigma2 * p.sigma2;
        let y1 = y + T::one();
        let resp = p.rho * y / (p.eta + y);
        let linear = p.sigma + resp * x - p.mu * x * y - p.delta * x;
        let inverse = -c * (p.sigma / (x * x) + resp / x - p.mu * y / x - (p.delta + s1) / x);
        let square = (two * p.alpha + s2) * y * y - two * p.beta * y * y * y - two * x * y * y;
        let log = self.gap * (-s2 * half / (y1 * y1) - (p.alpha - s2 - x) / y1 + p.beta * y / y1);
        linear + inverse + square + log
    }

    /// Upper bound on [`generator`](Self::generator) obtained from `f2 <= h^2`,
    /// dropping nonpositive terms and Young's inequality on `mu y / x`.
    pub fn generator_bound(&self, s: State<T>) -> T {
        let p = &self.params;
        let (x, y, c) = (s.x, s.y, self.c);
        let two: T = lit(2.0);
        let half: T = lit(0.5);
        let s1 = p.sigma1 * p.sigma1;
        let s2 = p.sigma2 * p.sigma2;
        let y1 = y + T::one();
        p.sigma - self.gap * x - c * p.sigma * half / (x * x)
            + c * (p.delta + s1) / x
            + (two * p.alpha + s2 + c * p.mu * p.mu * half / p.sigma) * y * y
            - two * p.beta * y * y * y
            + self.gap * (-s2 * half / (y1 * y1) - (p.alpha - s2 - x) / y1 + p.beta * y / y1)
    }
}

impl<T: Scalar> TestFunction<T> for LyapunovU<T> {
    fn value(&self, s: State<T>) -> T {
        LyapunovU::value(self, s)
    }

    fn gradient(&self, s: State<T>) -> (T, T) {
        let two: T = lit(2.0);
        (
            T::one() - self.c / (s.x * s.x),
            two * s.y - self.gap / (s.y * (s.y + T::one())),
        )
    }

    fn hessian_diag(&self, s: State<T>) -> (T, T) {
        let two: T = lit(2.0);
        let y1 = s.y + T::one();
        (
            two * self.c / (s.x * s.x * s.x),
            two + self.gap * (T::one() / (s.y * s.y) - T::one() / (y1 * y1)),
        )
    }
}

/// Box `(x_lo, x_hi) x (y_lo, y_hi)` outside which the generator of `U` is at most `-zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceBox {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    /// Largest generator value found outside the box during verification.
    pub max_outside: f64,
    pub zeta: f64,
    /// Points examined during verification.
    pub checked: usize,
}

impl RecurrenceBox {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x > self.x_lo && x < self.x_hi && y > self.y_lo && y < self.y_hi
    }

    pub fn verified(&self) -> bool {
        self.max_outside <= -self.zeta
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Locate a box outside which the generator of `U` stays at or below `-zeta`.
///
/// A coarse log grid over `[lo, hi]^2` marks the points where the generator
/// exceeds `-zeta`; their bounding box, widened by one grid cell, is the
/// candidate. The candidate is then checked on a grid `refine` times finer
/// over the whole search window.
pub fn recurrence_domain<T: Scalar>(
    u: &LyapunovU<T>,
    lo: f64,
    hi: f64,
    n: usize,
    refine: usize,
) -> Result<RecurrenceBox> {
    if !(lo > 0.0 && hi > lo && n >= 3 && refine >= 1) {
        return Err(Error::domain(
            "recurrence_domain",
            "require 0 < lo < hi, n >= 3, refine >= 1",
        ));
    }
    let zeta = to64(u.zeta);
    let gen = |x: f64, y: f64| {
        to64(u.generator(State {
            x: lit(x),
            y: lit(y),
        }))
    };
    let grid = log_grid(lo, hi, n);
    let step = (hi / lo).ln() / (n - 1) as f64;
    let widen = step.exp();
    let mut bbox: Option<(f64, f64, f64, f64)> = None;
    for &x in &grid {
        for &y in &grid {
            if gen(x, y) > -zeta {
                bbox = Some(match bbox {
                    None => (x, x, y, y),
                    Some((a, b, c, d)) => (a.min(x), b.max(x), c.min(y), d.max(y)),
                });
            }
        }
    }
    let (x_lo, x_hi, y_lo, y_hi) = bbox
        .map(|(a, b, c, d)| (a / widen, b * widen, c / widen, d * widen))
        .ok_or_else(|| {
            Error::domain(
                "recurrence_domain",
                "generator never exceeds -zeta on the grid",
            )
        })?;
    let mut rbox = RecurrenceBox {
        x_lo,
        x_hi,
        y_lo,
        y_hi,
        max_outside: f64::NEG_INFINITY,
        zeta,
        checked: 0,
    };
    let fine = log_grid(lo, hi, (n - 1) * refine + 1);
    for &x in &fine {
        for &y in &fine {
            if !rbox.contains(x, y) {
                rbox.max_outside = rbox.max_outside.max(gen(x, y));
                rbox.checked += 1;
            }
        }
    }
    Ok(rbox)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::model::{check_derivatives, generator_apply};
    use crate::presets;

    #[test]
    fn zeta_and_admissible_c_for_permanence_preset() {
        let p = presets::weak_tumor_noise::<f64>();
        let z = zeta(&p).unwrap();
        // Four-digit inputs: delta - h^2 = 0.09089, alpha - sigma2^2/2 = 1.60475.
        assert_relative_eq!(2.0 * z, 0.09089 * 1.60475 - 0.1181, max_relative = 1e-4);
        assert_relative_eq!(2.0 * z, 0.02775678289688234, max_relative = 1e-12);
        assert_relative_eq!(
            max_mixing_c(&p).unwrap(),
            0.1181 * z / (0.3743 + 0.04),
            max_relative = 1e-12
        );
        assert!(zeta(&presets::strong_tumor_noise::<f64>()).is_none());
    }

    #[test]
    fn premises_are_checked() {
        let p = presets::weak_tumor_noise::<f64>();
        let cmax = max_mixing_c(&p).unwrap();
        assert!(LyapunovU::new(&p, cmax * (1.0 - 1e-12)).is_ok());
        assert!(LyapunovU::new(&p, cmax * 1.001).is_err());
        assert!(LyapunovU::new(&p, 0.0).is_err());
        assert!(LyapunovU::with_default_c(&presets::strong_tumor_noise::<f64>()).is_err());
    }

    #[test]
    fn expansion_matches_generator_of_derivatives() {
        let p = presets::weak_tumor_noise::<f64>();
        let u = LyapunovU::with_default_c(&p).unwrap();
        for &x in &[0.01, 0.3, 2.0, 40.0] {
            for &y in &[0.001, 0.5, 20.0, 700.0] {
                let s = State { x, y };
                check_derivatives(&u, s, 1e-5).unwrap();
                let g = generator_apply(&p, &u, s);
                assert_relative_eq!(u.generator(s), g, max_relative = 1e-10, epsilon = 1e-10);
                assert!(u.generator_bound(s) >= u.generator(s) - 1e-9 * (1.0 + g.abs()));
            }
        }
    }

    #[test]
    fn radially_unbounded() {
        let p = presets::weak_tumor_noise::<f64>();
        let u = LyapunovU::with_default_c(&p).unwrap();
        let v = |x, y| u.value(State { x, y });
        assert!(v(1e-8, 1.0) > v(1e-4, 1.0) && v(1e-4, 1.0) > 10.0);
        assert!(v(1e8, 1.0) > v(1e4, 1.0) && v(1e4, 1.0) > 1e3);
        assert!(v(1.0, 1e8) > v(1.0, 1e4));
        assert!(v(1.0, 1e-30) > v(1.0, 1e-3));
    }

    #[test]
    fn recurrence_box_for_permanence_preset() {
        let p = presets::weak_tumor_noise::<f64>();
        let u = LyapunovU::with_default_c(&p).unwrap();
        let b = recurrence_domain(&u, 1e-8, 1e8, 321, 2).unwrap();
        assert!(b.verified(), "{b:?}");
        assert!(
            b.x_lo > 1e-8 && b.y_lo > 1e-8 && b.x_hi < 1e8 && b.y_hi < 1e8,
            "{b:?}"
        );
    }
}
