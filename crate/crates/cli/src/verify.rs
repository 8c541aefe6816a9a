//! Verification suites. Each check compares an estimate, widened by three
//! standard errors where one exists, against its bound.

use clap::ValueEnum;
use serde::Serialize;
use tumor_immune_core::analytic::{
    lambda1, lambda2, lambda3, psi_law, psi_moment_bound, rho_k, z_law,
};
use tumor_immune_core::integrators::{gbm_strong_errors, log_log_slope};
use tumor_immune_core::montecarlo::{
    decay_rate, ensemble_member, estimate_moment, estimate_moments_at, occupation, terminal_values,
    time_average, Coordinate, Functional, Region,
};
use tumor_immune_core::stats::{ks_test, Sample};
use tumor_immune_core::{regime_classify, AuxSet, EnsembleSpec, ModelParams, Preset, Regime};

use crate::config::{Defaults, Resolved, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Moments,
    Comparison,
    Extinction,
    Permanence,
    Ks,
    Order,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Moments => "moments",
            Suite::Comparison => "comparison",
            Suite::Extinction => "extinction",
            Suite::Permanence => "permanence",
            Suite::Ks => "ks",
            Suite::Order => "order",
        }
    }

    pub fn defaults(self) -> Defaults {
        let (n_paths, horizon, burn_in) = match self {
            Suite::Moments => (200, 400.0, None),
            Suite::Comparison => (50, 50.0, None),
            Suite::Extinction => (100, 200.0, None),
            Suite::Permanence => (200, 500.0, Some(100.0)),
            Suite::Ks => (200, 100.0, None),
            Suite::Order => (400, 1.0, None),
        };
        Defaults {
            n_paths,
            horizon,
            burn_in,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    pub std_error: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Distance to the nearest bound after widening; negative on failure.
    pub slack: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn new(
        name: &str,
        measured: f64,
        std_error: Option<f64>,
        lower: Option<f64>,
        upper: Option<f64>,
    ) -> Self {
        let tol = 3.0 * std_error.unwrap_or(0.0);
        let slack = [
            upper.map(|u| u + tol - measured),
            lower.map(|l| measured - (l - tol)),
        ]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);
        Self {
            name: name.to_string(),
            measured,
            std_error,
            lower,
            upper,
            slack,
            passed: slack >= 0.0,
        }
    }

    fn at_most(name: &str, measured: f64, std_error: Option<f64>, bound: f64) -> Self {
        Self::new(name, measured, std_error, None, Some(bound))
    }

    fn at_least(name: &str, measured: f64, std_error: Option<f64>, bound: f64) -> Self {
        Self::new(name, measured, std_error, Some(bound), None)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub suite: Suite,
    pub preset: Option<Preset>,
    /// Absent for the scheme-order suite, which runs on its own test case.
    pub params: Option<ModelParams<f64>>,
    pub n_paths: usize,
    pub horizon: f64,
    pub seed: u64,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
}

fn require_regime(p: &ModelParams<f64>, want: Regime, suite: Suite) -> Result<()> {
    let got = regime_classify(p).regime;
    if got == want {
        Ok(())
    } else {
        Err(CliError::Premise(format!(
            "suite `{}` needs regime {want:?}, configured parameters give {got:?}",
            suite.name()
        )))
    }
}

fn moments(r: &Resolved, spec: &EnsembleSpec<f64>) -> Result<Vec<Assertion>> {
    let p = &r.params;
    if psi_law(p).law().is_none() {
        return Err(CliError::Premise(
            "suite `moments` needs 2 alpha > sigma2^2 so the tumor comparison process persists"
                .into(),
        ));
    }
    let t = spec.horizon;
    let y2 = estimate_moment(p, r.initial, spec, Coordinate::Y, 2.0, t)?;
    let mut out = vec![Assertion::at_most(
        &format!("E y^2 at t = {t} below rho_2"),
        y2.point,
        Some(y2.std_error),
        rho_k(p, 2.0)?,
    )];
    let times: Vec<f64> = [1.0, 10.0, 100.0].into_iter().filter(|&s| s <= t).collect();
    if !times.is_empty() {
        let psi_spec = EnsembleSpec {
            horizon: *times.last().unwrap(),
            burn_in: 0.0,
            ..*spec
        };
        let est = estimate_moments_at(p, r.initial, &psi_spec, Coordinate::Psi, 2.0, &times)?;
        for (s, e) in times.iter().zip(est) {
            out.push(Assertion::at_most(
                &format!("E psi^2 at t = {s} below its transient bound"),
                e.point,
                Some(e.std_error),
                psi_moment_bound(p, 2.0, *s, r.initial.y)?,
            ));
        }
    }
    Ok(out)
}

fn comparison(r: &Resolved, spec: &EnsembleSpec<f64>) -> Result<Vec<Assertion>> {
    let mut tumor = 0usize;
    let mut effector = 0usize;
    for i in 0..spec.n_paths {
        let rec = ensemble_member(
            &r.params,
            r.initial,
            spec,
            i,
            AuxSet {
                z: false,
                ..AuxSet::ALL
            },
            0.0,
        )?;
        let psi = rec.aux_psi.as_deref().unwrap_or_default();
        let phi = rec.aux_phi.as_deref().unwrap_or_default();
        for ((s, ps), ph) in rec.states.iter().zip(psi).zip(phi) {
            tumor += usize::from(s.y > *ps);
            effector += usize::from(s.x > *ph);
        }
    }
    Ok(vec![
        Assertion::at_most("grid points with y above psi", tumor as f64, None, 0.0),
        Assertion::at_most("grid points with x above phi", effector as f64, None, 0.0),
    ])
}

fn boundary_ks(r: &Resolved, spec: &EnsembleSpec<f64>) -> Result<Vec<Assertion>> {
    let law = z_law(&r.params).require()?;
    let x = terminal_values(&r.params, r.initial, spec, Coordinate::X)?;
    let x = Sample::new(x, "x(T)")?;
    let ks = ks_test(&x.reciprocal(), &law.dual(), 0.05)?;
    Ok(vec![Assertion::at_most(
        &format!(
            "K-S distance of 1/x(T) from Gamma({:.6}, {:.6})",
            law.shape, law.rate
        ),
        ks.statistic,
        None,
        ks.critical_value,
    )])
}

fn extinction(r: &Resolved, spec: &EnsembleSpec<f64>) -> Result<Vec<Assertion>> {
    let l1 = lambda1(&r.params);
    let slope = decay_rate(&r.params, r.initial, spec)?;
    let mut out = vec![Assertion::at_most(
        "mean slope of ln y below -lambda1",
        slope.point,
        Some(slope.std_error),
        -l1,
    )];
    out.extend(boundary_ks(r, spec)?);
    Ok(out)
}

fn permanence(r: &Resolved, spec: &EnsembleSpec<f64>) -> Result<Vec<Assertion>> {
    let p = &r.params;
    let l3 = lambda3(p).expect("defined under permanence");
    let m1 = psi_law(p).require()?.mean()?;
    let y = time_average(p, r.initial, spec, Functional::Y)?;
    let ix = time_average(p, r.initial, spec, Functional::InvX)?;
    let occ = occupation(
        p,
        r.initial,
        spec,
        Region {
            x_lo: 1e-3,
            x_hi: 1e3,
            y_lo: 1e-3,
            y_hi: 1e3,
        },
    )?;
    Ok(vec![
        Assertion::new(
            "time average of y",
            y.point,
            Some(y.std_error),
            Some(l3),
            Some(m1),
        ),
        Assertion::at_most(
            "time average of 1/x below lambda2",
            ix.point,
            Some(ix.std_error),
            lambda2(p),
        ),
        Assertion::at_least(
            "terminal occupation of [1e-3, 1e3]^2",
            occ.point,
            None,
            0.95,
        ),
    ])
}

fn order(spec: &EnsembleSpec<f64>) -> Result<Vec<Assertion>> {
    let errs = gbm_strong_errors(6..=12, spec.n_paths as u64, spec.master_seed)?;
    let m: Vec<_> = errs.iter().map(|e| (e.dt, e.milstein)).collect();
    let e: Vec<_> = errs.iter().map(|e| (e.dt, e.euler_maruyama)).collect();
    Ok(vec![
        Assertion::new(
            "Milstein strong order",
            log_log_slope(&m),
            None,
            Some(0.85),
            Some(1.15),
        ),
        Assertion::new(
            "Euler-Maruyama strong order",
            log_log_slope(&e),
            None,
            Some(0.35),
            Some(0.65),
        ),
    ])
}

/// The scheme-order suite, which needs no model parameters.
pub fn run_order(cfg: &RunConfig) -> Result<Verification> {
    let policy = cfg.policy.unwrap_or_default();
    let spec = cfg.ensemble.spec(policy, Suite::Order.defaults())?;
    let assertions = order(&spec)?;
    Ok(Verification {
        suite: Suite::Order,
        preset: None,
        params: None,
        n_paths: spec.n_paths,
        horizon: 1.0,
        seed: spec.master_seed,
        passed: assertions.iter().all(|a| a.passed),
        assertions,
    })
}

pub fn run(r: &Resolved, suite: Suite) -> Result<Verification> {
    let spec = r.spec(suite.defaults())?;
    let assertions = match suite {
        Suite::Moments => moments(r, &spec)?,
        Suite::Comparison => comparison(r, &spec)?,
        Suite::Extinction => {
            require_regime(&r.params, Regime::Extinction, suite)?;
            extinction(r, &spec)?
        }
        Suite::Permanence => {
            require_regime(&r.params, Regime::Permanence, suite)?;
            permanence(r, &spec)?
        }
        Suite::Ks => {
            require_regime(&r.params, Regime::Extinction, suite)?;
            boundary_ks(r, &spec)?
        }
        Suite::Order => order(&spec)?,
    };
    Ok(Verification {
        suite,
        preset: r.preset,
        params: Some(r.params),
        n_paths: spec.n_paths,
        horizon: spec.horizon,
        seed: spec.master_seed,
        passed: assertions.iter().all(|a| a.passed),
        assertions,
    })
}
