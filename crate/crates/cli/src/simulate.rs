use serde::Serialize;
use tumor_immune_core::integrators::Truncation;
use tumor_immune_core::montecarlo::ensemble_member;
use tumor_immune_core::{ModelParams, PathRecordF64, Preset, Scheme, State};

use crate::config::{Defaults, Resolved};
use crate::error::Result;
use crate::output::{log_slope, OutDir};

pub const DEFAULTS: Defaults = Defaults {
    n_paths: 1,
    horizon: 100.0,
    burn_in: None,
};

#[derive(Debug, Clone, Serialize)]
pub struct LogSlope {
    /// Fit window start (the burn-in).
    pub from: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub preset: Option<Preset>,
    pub params: ModelParams<f64>,
    pub initial: State<f64>,
    pub seed: u64,
    pub horizon: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub steps: usize,
    pub final_state: State<f64>,
    pub min: State<f64>,
    pub max: State<f64>,
    pub log_slope: LogSlope,
    pub halvings: u64,
    pub truncations: Vec<Truncation>,
}

pub fn summarize(r: &Resolved, rec: &PathRecordF64, burn_in: f64) -> Summary {
    let fold = |f: fn(f64, f64) -> f64, init: f64| {
        rec.states
            .iter()
            .fold(State { x: init, y: init }, |a, s| State {
                x: f(a.x, s.x),
                y: f(a.y, s.y),
            })
    };
    let start = rec.times.partition_point(|&t| t < burn_in);
    let ts = &rec.times[start..];
    let xs: Vec<f64> = rec.states[start..].iter().map(|s| s.x).collect();
    let ys: Vec<f64> = rec.states[start..].iter().map(|s| s.y).collect();
    Summary {
        preset: r.preset,
        params: r.params,
        initial: r.initial,
        seed: rec.seed,
        horizon: *rec.times.last().unwrap_or(&0.0),
        dt: r.policy.dt,
        scheme: r.policy.scheme,
        steps: rec.len().saturating_sub(1),
        final_state: rec.last().expect("record holds the initial state"),
        min: fold(f64::min, f64::INFINITY),
        max: fold(f64::max, f64::NEG_INFINITY),
        log_slope: LogSlope {
            from: burn_in,
            x: log_slope(ts, &xs),
            y: log_slope(ts, &ys),
        },
        halvings: rec.halvings,
        truncations: rec.truncations.clone(),
    }
}

/// Path 0 of the configured ensemble, written as `path.csv` and `summary.json`.
pub fn run(r: &Resolved) -> Result<Summary> {
    let spec = r.spec(DEFAULTS)?;
    let out = OutDir::create(&r.out)?;
    let rec = ensemble_member(&r.params, r.initial, &spec, 0, r.aux, r.z_start)?;
    let summary = summarize(r, &rec, spec.burn_in);
    out.write_with("path.csv", |w| rec.write_csv(w))?;
    out.write_json("summary.json", &summary)?;
    Ok(summary)
}
