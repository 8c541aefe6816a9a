use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{AuxProcess, AuxSet, Coupled, PathDriver, PathRecord, StepPolicy};
use crate::model::{ModelParams, State};
use crate::scalar::{lit, Scalar};

use super::reduce::mean_sd;

/// Ensemble layout. Path `i` is driven by the noise streams keyed by
/// `(master_seed, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec<T> {
    pub n_paths: usize,
    pub horizon: T,
    pub burn_in: T,
    pub policy: StepPolicy<T>,
    pub master_seed: u64,
    /// Use every `record_stride`-th grid point in time averages and trajectories.
    pub record_stride: usize,
}

impl<T: Scalar> EnsembleSpec<T> {
    /// Default policy, stride 1 and a burn-in of 20% of the horizon.
    pub fn new(n_paths: usize, horizon: T, master_seed: u64) -> Self {
        Self {
            n_paths,
            horizon,
            burn_in: horizon * lit(0.2),
            policy: StepPolicy::default(),
            master_seed,
            record_stride: 1,
        }
    }

    pub fn with_burn_in(mut self, burn_in: T) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_policy(mut self, policy: StepPolicy<T>) -> Self {
        self.policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        if self.n_paths == 0 {
            return Err(Error::domain("EnsembleSpec", "n_paths must be >= 1"));
        }
        if !(self.horizon.is_finite() && self.horizon > T::zero()) {
            return Err(Error::domain(
                "EnsembleSpec",
                format!("horizon must be > 0, got {}", self.horizon),
            ));
        }
        if !(self.burn_in >= T::zero() && self.burn_in < self.horizon) {
            return Err(Error::domain(
                "EnsembleSpec",
                format!("burn_in must lie in [0, horizon), got {}", self.burn_in),
            ));
        }
        if self.record_stride == 0 {
            return Err(Error::domain("EnsembleSpec", "record_stride must be >= 1"));
        }
        Ok(())
    }

    pub(crate) fn index_of(&self, t: T) -> usize {
        (t / self.policy.dt).round().to_usize().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    X,
    Y,
    Psi,
    Phi,
    Z,
}

impl Coordinate {
    pub fn name(self) -> &'static str {
        match self {
            Coordinate::X => "x",
            Coordinate::Y => "y",
            Coordinate::Psi => "psi",
            Coordinate::Phi => "phi",
            Coordinate::Z => "z",
        }
    }

    pub(crate) fn aux(self) -> AuxSet {
        match self {
            Coordinate::X | Coordinate::Y => AuxSet::NONE,
            Coordinate::Psi => AuxSet::NONE.with(AuxProcess::Psi),
            Coordinate::Phi => AuxSet::NONE.with(AuxProcess::Phi),
            Coordinate::Z => AuxSet::NONE.with(AuxProcess::Z),
        }
    }

    pub(crate) fn read<T: Copy>(self, c: &Coupled<T>) -> Option<T> {
        match self {
            Coordinate::X => Some(c.state.x),
            Coordinate::Y => Some(c.state.y),
            Coordinate::Psi => c.psi,
            Coordinate::Phi => c.phi,
            Coordinate::Z => c.z,
        }
    }
}

/// Point estimate with its standard error over `n` independent paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub point: f64,
    pub std_error: f64,
    pub n: usize,
}

impl EstimateWithCI {
    pub fn from_values(values: &[f64], what: &str) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientSample { needed: 1, got: 0 });
        }
        let (m, sd) = mean_sd(values);
        let se = sd / (values.len() as f64).sqrt();
        if !(m.is_finite() && se.is_finite()) {
            return Err(Error::Overflow {
                what: what.to_string(),
            });
        }
        Ok(Self {
            point: m,
            std_error: se,
            n: values.len(),
        })
    }

    /// Half-width of the 95% normal-approximation interval, `1.96 * std_error`.
    pub fn half_width(&self) -> f64 {
        1.96 * self.std_error
    }

    /// `point <= bound + k * std_error`.
    pub fn at_most(&self, bound: f64, k: f64) -> bool {
        self.point <= bound + k * self.std_error
    }

    /// `point >= bound - k * std_error`.
    pub fn at_least(&self, bound: f64, k: f64) -> bool {
        self.point >= bound - k * self.std_error
    }

    pub fn report(&self, functional: impl Into<String>, horizon: f64, seed: u64) -> EstimateReport {
        EstimateReport {
            functional: functional.into(),
            point: self.point,
            std_error: self.std_error,
            n: self.n,
            horizon,
            seed,
        }
    }
}

/// JSON form of an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub functional: String,
    pub point: f64,
    pub std_error: f64,
    pub n: usize,
    pub horizon: f64,
    pub seed: u64,
}

/// Full record of ensemble member `index`, on the same noise the
/// estimators use for that path.
pub fn ensemble_member<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    index: usize,
    which: AuxSet,
    t0_for_z: T,
) -> Result<PathRecord<T>> {
    spec.validate()?;
    if index >= spec.n_paths {
        return Err(Error::domain(
            "ensemble_member",
            format!("index {index} outside an ensemble of {}", spec.n_paths),
        ));
    }
    crate::integrators::record(
        p,
        s0,
        &spec.policy,
        spec.horizon,
        (spec.master_seed, index as u64),
        which,
        t0_for_z,
    )
}

/// Run every path of the ensemble up to `horizon`, folding each path with a
/// fresh accumulator from `init`. Results come back in path order.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_paths<T, A, I, V, F, R>(
    p: &ModelParams<T>,
    s0: State<T>,
    spec: &EnsembleSpec<T>,
    aux: AuxSet,
    horizon: T,
    init: I,
    visit: V,
    finish: F,
) -> Result<Vec<R>>
where
    T: Scalar,
    A: Send,
    R: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, usize, T, &Coupled<T>) -> ControlFlow<()> + Sync,
    F: Fn(A) -> Result<R> + Sync,
{
    spec.validate()?;
    (0..spec.n_paths as u64)
        .into_par_iter()
        .map(|path| {
            let driver = PathDriver::new(*p, spec.policy, aux, T::zero(), spec.master_seed, path)?;
            let mut acc = init();
            driver.run(s0, horizon, |k, t, c| visit(&mut acc, k, t, c))?;
            finish(acc)
        })
        .collect()
}
