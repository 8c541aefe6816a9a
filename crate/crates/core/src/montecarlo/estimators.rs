use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::AuxSet;
use crate::model::{ModelParams, State};
use crate::scalar::{to64, Scalar};

use super::ensemble::{run_paths, Coordinate, EnsembleSpec, EstimateWithCI};
use super::reduce::pairwise_sum;

/// Closed box `[x_lo, x_hi] x [y_lo, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Region {
    pub const QUADRANT: Region = Region {
        x_lo: 0.0,
        x_hi: f64::INFINITY,
        y_lo: 0.0,
        y_hi: f64::INFINITY,
    };

    /// `[zeta, 1/zeta]^2`.
    pub fn symmetric(zeta: f64) -> Self {
        Region {
            x_lo: zeta,
            x_hi: zeta.recip(),
            y_lo: zeta,
            y_hi: zeta.recip(),
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi && y >= self.y_lo && y <= self.y_hi
    }
}

/// Function of the state averaged along paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Functional {
    X,
    Y,
    InvX,
    XSquared,
    YSquared,
    Indicator(Region),
}

impl Functional {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Functional::X => x,
            Functional::Y => y,
            Functional::InvX => x.recip(),
            Functional::XSquared => x * x,
            Functional::YSquared => y * y,
            Functional::Indicator(r) => {
                if r.contains(x, y) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Functional::X => "x".into(),
            Functional::Y => "y".into(),
            Functional::InvX => "1/x".into(),
            Functional::XSquared => "x^2".into(),
            Functional::YSquared => "y^2".into(),
            Functional::Indicator(r) => {
                format!(
                    "1[x in [{}, {}], y in [{}, {}]]",
                    r.x_lo, r.x_hi, r.y_lo, r.y_hi
                )
            }
        }
    }
}

fn check_time<T: Scalar>(spec: &EnsembleSpec<T>, at: T) -> Result<()> {
    if !(at >= T::zero() && at <= spec.horizon) {
        return Err(Error::domain(
            "estimate_moment",
            format!("time {at} outside [0, {}]", spec.horizon),
        ));
    }
    Ok(())
}

/// Cross-path mean of `which^power` at each of `times` (nearest grid point).
pub fn estimate_moments_at<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    which: Coordinate,
    power: f64,
    times: &[T],
) -> Result<Vec<EstimateWithCI>> {
    if times.is_empty() {
        return Ok(Vec::new());
    }
    for &t in times {
        check_time(spec, t)?;
    }
    let idx: Vec<usize> = times.iter().map(|&t| spec.index_of(t)).collect();
    let last = *idx.iter().max().unwrap();
    let run_to = spec
        .horizon
        .min(T::from_usize(last.max(1)).unwrap() * spec.policy.dt);
    let per_path = run_paths(
        p,
        s0,
        spec,
        which.aux(),
        run_to,
        || vec![f64::NAN; idx.len()],
        |acc, k, _, c| {
            for (slot, &i) in acc.iter_mut().zip(&idx) {
                if i == k {
                    *slot = which
                        .read(c)
                        .map(|v| to64(v).powf(power))
                        .unwrap_or(f64::NAN);
                }
            }
            if k >= last {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
        Ok,
    )?;
    (0..idx.len())
        .map(|j| {
            let v: Vec<f64> = per_path.iter().map(|r| r[j]).collect();
            EstimateWithCI::from_values(&v, &format!("E[{}^{power}]", which.name()))
        })
        .collect()
}

/// Cross-path mean of `which^power` at the grid time nearest `at`.
pub fn estimate_moment<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    which: Coordinate,
    power: f64,
    at: T,
) -> Result<EstimateWithCI> {
    Ok(estimate_moments_at(p, s0, spec, which, power, &[at])?[0])
}

/// Per-path time average of `f` over grid points in `[burn_in, horizon]`
/// (every `record_stride`-th point), then cross-path mean and standard error.
pub fn time_average<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    f: Functional,
) -> Result<EstimateWithCI> {
    let start = spec.index_of(spec.burn_in);
    let stride = spec.record_stride;
    let per_path = run_paths(
        p,
        s0,
        spec,
        AuxSet::NONE,
        spec.horizon,
        || (0.0f64, 0usize),
        |acc, k, _, c| {
            if k >= start && (k - start).is_multiple_of(stride) {
                acc.0 += f.eval(to64(c.state.x), to64(c.state.y));
                acc.1 += 1;
            }
            ControlFlow::Continue(())
        },
        |(sum, n)| {
            if n == 0 {
                Err(Error::InsufficientSample { needed: 1, got: 0 })
            } else {
                Ok(sum / n as f64)
            }
        },
    )?;
    EstimateWithCI::from_values(&per_path, &format!("time average of {}", f.name()))
}

/// Least-squares slope of `ln y(t)` against `t` over `[burn_in, horizon]`.
pub fn decay_rate<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
) -> Result<EstimateWithCI> {
    decay_rate_of(p, s0, spec, Coordinate::Y)
}

#[derive(Default)]
struct Ols {
    n: f64,
    st: f64,
    sv: f64,
    stt: f64,
    stv: f64,
}

impl Ols {
    fn push(&mut self, t: f64, v: f64) {
        self.n += 1.0;
        self.st += t;
        self.sv += v;
        self.stt += t * t;
        self.stv += t * v;
    }

    fn slope(&self) -> Result<f64> {
        if self.n < 2.0 {
            return Err(Error::InsufficientSample {
                needed: 2,
                got: self.n as usize,
            });
        }
        let den = self.n * self.stt - self.st * self.st;
        Ok((self.n * self.stv - self.st * self.sv) / den)
    }
}

/// Least-squares slope of `ln which(t)` against `t` over `[burn_in, horizon]`.
///
/// A path whose coordinate reaches the underflow floor contributes only the
/// points up to and including the first floor crossing.
pub fn decay_rate_of<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    which: Coordinate,
) -> Result<EstimateWithCI> {
    let start = spec.index_of(spec.burn_in);
    let stride = spec.record_stride;
    let floor = T::underflow_floor();
    let per_path = run_paths(
        p,
        s0,
        spec,
        which.aux(),
        spec.horizon,
        Ols::default,
        |acc, k, t, c| {
            let Some(v) = which.read(c) else {
                return ControlFlow::Continue(());
            };
            let hit_floor = v <= floor;
            if k >= start && ((k - start).is_multiple_of(stride) || hit_floor) {
                acc.push(to64(t), to64(v).ln());
            }
            if hit_floor {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
        |acc| acc.slope(),
    )?;
    EstimateWithCI::from_values(&per_path, &format!("decay rate of {}", which.name()))
}

/// Fraction of paths whose state lies in `region` at the horizon.
pub fn occupation<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    region: Region,
) -> Result<EstimateWithCI> {
    let states = terminal_states(p, s0, spec)?;
    let hits: Vec<f64> = states
        .iter()
        .map(|s| Functional::Indicator(region).eval(s.x, s.y))
        .collect();
    EstimateWithCI::from_values(&hits, "occupation")
}

/// Fraction of paths inside `[zeta, 1/zeta]^2` at the horizon.
pub fn permanence_occupation<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    zeta_box: f64,
) -> Result<EstimateWithCI> {
    if !(zeta_box > 0.0 && zeta_box < 1.0) {
        return Err(Error::domain(
            "permanence_occupation",
            format!("box parameter must lie in (0, 1), got {zeta_box}"),
        ));
    }
    occupation(p, s0, spec, Region::symmetric(zeta_box))
}

/// Value of `which` at the horizon on every path, in path order.
pub fn terminal_values<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    which: Coordinate,
) -> Result<Vec<f64>> {
    run_paths(
        p,
        s0,
        spec,
        which.aux(),
        spec.horizon,
        || f64::NAN,
        |acc, _, _, c| {
            *acc = which.read(c).map(to64).unwrap_or(f64::NAN);
            ControlFlow::Continue(())
        },
        Ok,
    )
}

/// System state at the horizon on every path, in path order.
pub fn terminal_states<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
) -> Result<Vec<State<f64>>> {
    run_paths(
        p,
        s0,
        spec,
        AuxSet::NONE,
        spec.horizon,
        || State {
            x: f64::NAN,
            y: f64::NAN,
        },
        |acc, _, _, c| {
            *acc = State {
                x: to64(c.state.x),
                y: to64(c.state.y),
            };
            ControlFlow::Continue(())
        },
        Ok,
    )
}

/// Cross-path means on the recorded grid (every `record_stride`-th point from 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanTrajectory {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub psi: Option<Vec<f64>>,
    pub phi: Option<Vec<f64>>,
}

pub fn mean_trajectory<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    aux: AuxSet,
) -> Result<MeanTrajectory> {
    let stride = spec.record_stride;
    let aux = AuxSet { z: false, ..aux };
    let rows = run_paths(
        p,
        s0,
        spec,
        aux,
        spec.horizon,
        Vec::new,
        |acc: &mut Vec<[f64; 5]>, k, t, c| {
            if k % stride == 0 {
                acc.push([
                    to64(t),
                    to64(c.state.x),
                    to64(c.state.y),
                    c.psi.map(to64).unwrap_or(0.0),
                    c.phi.map(to64).unwrap_or(0.0),
                ]);
            }
            ControlFlow::Continue(())
        },
        Ok,
    )?;
    let len = rows[0].len();
    let column = |j: usize| -> Vec<f64> {
        (0..len)
            .map(|i| {
                let v: Vec<f64> = rows.iter().map(|r| r[i][j]).collect();
                pairwise_sum(&v) / v.len() as f64
            })
            .collect()
    };
    Ok(MeanTrajectory {
        times: rows[0].iter().map(|r| r[0]).collect(),
        x: column(1),
        y: column(2),
        psi: aux.psi.then(|| column(3)),
        phi: aux.phi.then(|| column(4)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn weak() -> (ModelParams<f64>, State<f64>) {
        (presets::weak_tumor_noise(), presets::initial_state())
    }

    #[test]
    fn zeroth_power_is_exactly_one() {
        let (p, s0) = weak();
        let spec = EnsembleSpec::new(16, 1.0, 3);
        let e = estimate_moment(&p, s0, &spec, Coordinate::Y, 0.0, 0.5).unwrap();
        assert_eq!((e.point, e.std_error, e.n), (1.0, 0.0, 16));
    }

    #[test]
    fn quadrant_indicator_averages_to_one() {
        let (p, s0) = weak();
        let spec = EnsembleSpec::new(8, 2.0, 3);
        let e = time_average(&p, s0, &spec, Functional::Indicator(Region::QUADRANT)).unwrap();
        assert_eq!((e.point, e.std_error), (1.0, 0.0));
    }

    #[test]
    fn estimates_are_reproducible() {
        let (p, s0) = weak();
        let spec = EnsembleSpec::new(12, 2.0, 99);
        let a = time_average(&p, s0, &spec, Functional::Y).unwrap();
        let b = time_average(&p, s0, &spec, Functional::Y).unwrap();
        assert_eq!(a, b);
        let c = time_average(&p, s0, &EnsembleSpec::new(12, 2.0, 100), Functional::Y).unwrap();
        assert_ne!(a.point, c.point);
    }

    #[test]
    fn moment_time_outside_horizon_is_rejected() {
        let (p, s0) = weak();
        let spec = EnsembleSpec::new(2, 1.0, 3);
        assert!(estimate_moment(&p, s0, &spec, Coordinate::Y, 1.0, 2.0).is_err());
    }

    #[test]
    fn deterministic_extinction_slope() {
        // No noise, alpha below the tumor-free effector level sigma/delta:
        // ln y decays at rate alpha - sigma/delta once x has settled.
        let mut p = presets::strong_tumor_noise::<f64>().deterministic();
        p.alpha = 0.1;
        let x_star = p.sigma / p.delta;
        let spec = EnsembleSpec::new(2, 100.0, 1)
            .with_burn_in(60.0)
            .with_stride(10);
        let e = decay_rate(&p, presets::initial_state(), &spec).unwrap();
        assert!((e.point - (p.alpha - x_star)).abs() < 1e-4, "{e:?}");
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn permanence_box_must_be_proper() {
        let (p, s0) = weak();
        let spec = EnsembleSpec::new(2, 1.0, 3);
        assert!(permanence_occupation(&p, s0, &spec, 0.0).is_err());
        assert!(permanence_occupation(&p, s0, &spec, 1.0).is_err());
        let e = permanence_occupation(&p, s0, &spec, 1e-3).unwrap();
        assert_eq!(e.point, 1.0);
    }
}
