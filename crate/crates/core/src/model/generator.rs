use crate::error::{Error, Result};
use crate::scalar::{lit, to64, Scalar};

use super::field::drift;
use super::params::{ModelParams, State};

/// A twice-differentiable function on the open quadrant with caller-supplied
/// analytic derivatives. Mixed partials are never needed: the two noise
/// sources are independent and act on separate coordinates.
pub trait TestFunction<T: Scalar> {
    fn value(&self, s: State<T>) -> T;
    fn gradient(&self, s: State<T>) -> (T, T);
    fn hessian_diag(&self, s: State<T>) -> (T, T);
}

/// Infinitesimal generator of the system applied to `f` at `s`.
pub fn generator_apply<T: Scalar, F: TestFunction<T> + ?Sized>(
    p: &ModelParams<T>,
    f: &F,
    s: State<T>,
) -> T {
    let (dx, dy) = drift(p, s);
    let (fx, fy) = f.gradient(s);
    let (fxx, fyy) = f.hessian_diag(s);
    let gx = p.sigma1 * s.x;
    let gy = p.sigma2 * s.y;
    fx * dx + fy * dy + lit::<T>(0.5) * (fxx * gx * gx + fyy * gy * gy)
}

/// Compare the analytic gradient and Hessian diagonal of `f` against centered
/// finite differences at `s`.
pub fn check_derivatives<T: Scalar, F: TestFunction<T> + ?Sized>(
    f: &F,
    s: State<T>,
    rel_tol: f64,
) -> Result<()> {
    let eval = |x: f64, y: f64| {
        to64(f.value(State {
            x: lit(x),
            y: lit(y),
        }))
    };
    let (x, y) = (to64(s.x), to64(s.y));
    let f0 = eval(x, y);
    // Centered differences with one Richardson step, O(h^4) truncation.
    let d1 = |g: &dyn Fn(f64) -> f64, h: f64| (g(h) - g(-h)) / (2.0 * h);
    let d2 = |g: &dyn Fn(f64) -> f64, h: f64| (g(h) - 2.0 * f0 + g(-h)) / (h * h);
    let rich = |d: &dyn Fn(f64) -> f64, h: f64| (4.0 * d(0.5 * h) - d(h)) / 3.0;
    let gx_ = |e: f64| eval(x + e, y);
    let gy_ = |e: f64| eval(x, y + e);
    let (h1x, h1y, h2x, h2y) = (1e-3 * x, 1e-3 * y, 1e-2 * x, 1e-2 * y);
    let fd = [
        ("df/dx", rich(&|h| d1(&gx_, h), h1x)),
        ("df/dy", rich(&|h| d1(&gy_, h), h1y)),
        ("d2f/dx2", rich(&|h| d2(&gx_, h), h2x)),
        ("d2f/dy2", rich(&|h| d2(&gy_, h), h2y)),
    ];
    let (gx, gy) = f.gradient(s);
    let (hx, hy) = f.hessian_diag(s);
    let analytic = [to64(gx), to64(gy), to64(hx), to64(hy)];
    // Rounding in the differenced values bounds the attainable accuracy.
    let noise = 16.0 * f64::EPSILON * (1.0 + f0.abs());
    let floors = [
        2.0 * noise / h1x,
        2.0 * noise / h1y,
        4.0 * noise / (h2x * h2x),
        4.0 * noise / (h2y * h2y),
    ];
    for (((name, numeric), exact), floor) in fd.iter().zip(analytic).zip(floors) {
        let scale = 0.5 * (numeric.abs() + exact.abs());
        if (numeric - exact).abs() > rel_tol * scale + floor {
            return Err(Error::domain(
                "check_derivatives",
                format!("{name} at ({x}, {y}): analytic {exact}, finite difference {numeric}"),
            ));
        }
    }
    Ok(())
}

/// `(x + 1 - ln x) + (y + 1 - ln y)`, the global-existence Lyapunov function.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogBarrier;

impl<T: Scalar> TestFunction<T> for LogBarrier {
    fn value(&self, s: State<T>) -> T {
        let one = T::one();
        (s.x + one - s.x.ln()) + (s.y + one - s.y.ln())
    }

    fn gradient(&self, s: State<T>) -> (T, T) {
        (T::one() - s.x.recip(), T::one() - s.y.recip())
    }

    fn hessian_diag(&self, s: State<T>) -> (T, T) {
        ((s.x * s.x).recip(), (s.y * s.y).recip())
    }
}

/// `(1 + x + c*y)^theta`, used for the moment bound on the effector density.
#[derive(Debug, Clone, Copy)]
pub struct MixedPower<T> {
    pub c: T,
    pub theta: T,
}

impl<T: Scalar> TestFunction<T> for MixedPower<T> {
    fn value(&self, s: State<T>) -> T {
        (T::one() + s.x + self.c * s.y).powf(self.theta)
    }

    fn gradient(&self, s: State<T>) -> (T, T) {
        let w = T::one() + s.x + self.c * s.y;
        let d = self.theta * w.powf(self.theta - T::one());
        (d, self.c * d)
    }

    fn hessian_diag(&self, s: State<T>) -> (T, T) {
        let w = T::one() + s.x + self.c * s.y;
        let d2 = self.theta * (self.theta - T::one()) * w.powf(self.theta - lit(2.0));
        (d2, self.c * self.c * d2)
    }
}

/// `(1 + 1/x)^theta`, used for the inverse-moment bound on the effector density.
#[derive(Debug, Clone, Copy)]
pub struct InversePower<T> {
    pub theta: T,
}

impl<T: Scalar> TestFunction<T> for InversePower<T> {
    fn value(&self, s: State<T>) -> T {
        (T::one() + s.x.recip()).powf(self.theta)
    }

    fn gradient(&self, s: State<T>) -> (T, T) {
        let w = T::one() + s.x.recip();
        let fx = -self.theta * w.powf(self.theta - T::one()) / (s.x * s.x);
        (fx, T::zero())
    }

    fn hessian_diag(&self, s: State<T>) -> (T, T) {
        let th = self.theta;
        let w = T::one() + s.x.recip();
        let x2 = s.x * s.x;
        let fxx = th * (th - T::one()) * w.powf(th - lit(2.0)) / (x2 * x2)
            + lit::<T>(2.0) * th * w.powf(th - T::one()) / (x2 * s.x);
        (fxx, T::zero())
    }
}

/// General quadratic in `(ln x, ln y)`:
/// `a (ln x)^2 + b ln x ln y + c (ln y)^2 + d ln x + e ln y`.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticLog<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
}

impl<T: Scalar> TestFunction<T> for QuadraticLog<T> {
    fn value(&self, s: State<T>) -> T {
        let (u, v) = (s.x.ln(), s.y.ln());
        self.a * u * u + self.b * u * v + self.c * v * v + self.d * u + self.e * v
    }

    fn gradient(&self, s: State<T>) -> (T, T) {
        let (u, v) = (s.x.ln(), s.y.ln());
        let two = lit::<T>(2.0);
        let gu = two * self.a * u + self.b * v + self.d;
        let gv = self.b * u + two * self.c * v + self.e;
        (gu / s.x, gv / s.y)
    }

    fn hessian_diag(&self, s: State<T>) -> (T, T) {
        let (u, v) = (s.x.ln(), s.y.ln());
        let two = lit::<T>(2.0);
        let gu = two * self.a * u + self.b * v + self.d;
        let gv = self.b * u + two * self.c * v + self.e;
        (
            (two * self.a - gu) / (s.x * s.x),
            (two * self.c - gv) / (s.y * s.y),
        )
    }
}

/// Test function assembled from three closures.
pub struct FnTestFunction<V, G, H> {
    pub value: V,
    pub gradient: G,
    pub hessian_diag: H,
}

impl<T, V, G, H> TestFunction<T> for FnTestFunction<V, G, H>
where
    T: Scalar,
    V: Fn(State<T>) -> T,
    G: Fn(State<T>) -> (T, T),
    H: Fn(State<T>) -> (T, T),
{
    fn value(&self, s: State<T>) -> T {
        (self.value)(s)
    }

    fn gradient(&self, s: State<T>) -> (T, T) {
        (self.gradient)(s)
    }

    fn hessian_diag(&self, s: State<T>) -> (T, T) {
        (self.hessian_diag)(s)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::presets;

    fn probes() -> Vec<State<f64>> {
        let mut out = Vec::new();
        for &x in &[0.05, 0.3, 1.0, 5.0, 40.0] {
            for &y in &[0.02, 1.0, 50.0, 300.0] {
                out.push(State { x, y });
            }
        }
        out
    }

    #[test]
    fn identity_in_x_with_vanishing_drift() {
        let mut p = presets::weak_tumor_noise::<f64>();
        p.sigma = 0.0;
        p.delta = 0.0;
        p.mu = 0.0;
        p.rho = 0.0;
        let f = FnTestFunction {
            value: |s: State<f64>| s.x,
            gradient: |_| (1.0, 0.0),
            hessian_diag: |_| (0.0, 0.0),
        };
        for s in probes() {
            assert_eq!(generator_apply(&p, &f, s), 0.0);
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let quad = QuadraticLog {
            a: 0.7,
            b: -0.3,
            c: 0.4,
            d: 0.2,
            e: -1.1,
        };
        let v1 = MixedPower {
            c: 0.05,
            theta: 1.5,
        };
        let v2 = InversePower { theta: 1.2 };
        for s in probes() {
            check_derivatives(&LogBarrier, s, 1e-5).unwrap();
            check_derivatives(&quad, s, 1e-5).unwrap();
            check_derivatives(&v1, s, 1e-5).unwrap();
            check_derivatives(&v2, s, 1e-5).unwrap();
        }
    }

    #[test]
    fn derivative_check_catches_wrong_gradient() {
        let f = FnTestFunction {
            value: |s: State<f64>| s.x * s.x,
            gradient: |s: State<f64>| (s.x, 0.0),
            hessian_diag: |_| (2.0, 0.0),
        };
        assert!(check_derivatives(&f, State { x: 1.0, y: 1.0 }, 1e-5).is_err());
    }

    #[test]
    fn log_barrier_generator_matches_expanded_form() {
        for p in [
            presets::strong_tumor_noise::<f64>(),
            presets::weak_tumor_noise(),
        ] {
            for s in probes() {
                let State { x, y } = s;
                let expanded = (p.sigma + p.delta - p.alpha
                    + 0.5 * p.sigma1 * p.sigma1
                    + 0.5 * p.sigma2 * p.sigma2)
                    + p.rho * x * y / (p.eta + y)
                    + x
                    + (p.mu + p.alpha + p.beta) * y
                    - p.mu * x * y
                    - p.delta * x
                    - p.sigma / x
                    - p.rho * y / (p.eta + y)
                    - p.beta * y * y
                    - x * y;
                let lv = generator_apply(&p, &LogBarrier, s);
                assert_relative_eq!(lv, expanded, max_relative = 1e-10, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn log_barrier_growth_bound_on_grid() {
        for p in [
            presets::strong_tumor_noise::<f64>(),
            presets::weak_tumor_noise(),
        ] {
            let v1 = p.sigma + p.delta + 0.5 * p.sigma1.powi(2) + 0.5 * p.sigma2.powi(2);
            let v2 = 2.0 * (p.rho + 1.0 + p.mu + p.alpha + p.beta);
            for i in 0..10 {
                for j in 0..10 {
                    let s = State {
                        x: 10f64.powf(-3.0 + 6.0 * i as f64 / 9.0),
                        y: 10f64.powf(-3.0 + 6.0 * j as f64 / 9.0),
                    };
                    let lv = generator_apply(&p, &LogBarrier, s);
                    let bound = v1 + v2 * TestFunction::<f64>::value(&LogBarrier, s);
                    assert!(lv <= bound, "at {s:?}: {lv} > {bound}");
                }
            }
        }
    }

    #[test]
    fn generic_over_f32() {
        let p = presets::weak_tumor_noise::<f32>();
        let s = State { x: 1.0f32, y: 1.0 };
        let v = generator_apply(&p, &LogBarrier, s);
        let w = generator_apply(&p.cast::<f64>(), &LogBarrier, State { x: 1.0, y: 1.0 });
        assert!((v as f64 - w).abs() < 1e-5);
    }
}
