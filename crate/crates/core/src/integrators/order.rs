//! Strong convergence order on the geometric Brownian sub-case.
//!
//! With `sigma = rho = mu = 0` the effector equation is
//! `dx = -delta x dt + sigma1 x dB`, solved exactly by
//! `x(T) = x0 exp((-delta - sigma1^2/2) T + sigma1 B(T))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, State};
use crate::montecarlo::{mean_sd, pairwise_sum};

use super::noise::NoiseStreams;
use super::scheme::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongError {
    pub dt: f64,
    pub milstein: f64,
    pub euler_maruyama: f64,
}

fn gbm_params() -> ModelParams<f64> {
    ModelParams {
        sigma: 0.0,
        rho: 0.0,
        eta: 1.0,
        mu: 0.0,
        delta: 0.5,
        alpha: 0.5,
        beta: 0.1,
        sigma1: 1.0,
        sigma2: 0.0,
    }
}

/// Mean absolute error at `T = 1` of both schemes for `dt = 2^-l`, `l` in
/// `levels`, all levels sharing one fine Brownian path per sample.
pub fn gbm_strong_errors(
    levels: std::ops::RangeInclusive<u32>,
    paths: u64,
    seed: u64,
) -> Result<Vec<StrongError>> {
    if levels.is_empty() || *levels.end() > 20 || paths < 2 {
        return Err(Error::domain(
            "gbm_strong_errors",
            "need levels within 0..=20 and at least 2 paths",
        ));
    }
    let p = gbm_params();
    let n_fine = 1usize << levels.end();
    let dt_fine = 1.0 / n_fine as f64;
    let per_path: Vec<Vec<(f64, f64)>> = (0..paths)
        .into_par_iter()
        .map(|path| {
            let mut noise = NoiseStreams::new(seed, path);
            let dw: Vec<f64> = (0..n_fine)
                .map(|_| noise.next_normals::<f64>().0 * dt_fine.sqrt())
                .collect();
            let exact =
                ((-p.delta - 0.5 * p.sigma1 * p.sigma1) + p.sigma1 * pairwise_sum(&dw)).exp();
            levels
                .clone()
                .map(|l| {
                    let n = 1usize << l;
                    let group = n_fine / n;
                    let dt = 1.0 / n as f64;
                    let run = |scheme: Scheme| {
                        let mut s = State { x: 1.0, y: 1.0 };
                        for chunk in dw.chunks(group) {
                            let inc = pairwise_sum(chunk);
                            s = scheme
                                .step(&p, s, inc, 0.0, dt)
                                .unwrap_or_else(|v| v.candidate);
                        }
                        (s.x - exact).abs()
                    };
                    (run(Scheme::Milstein), run(Scheme::EulerMaruyama))
                })
                .collect()
        })
        .collect();
    Ok(levels
        .enumerate()
        .map(|(j, l)| {
            let m: Vec<f64> = per_path.iter().map(|v| v[j].0).collect();
            let e: Vec<f64> = per_path.iter().map(|v| v[j].1).collect();
            StrongError {
                dt: 0.5f64.powi(l as i32),
                milstein: mean_sd(&m).0,
                euler_maruyama: mean_sd(&e).0,
            }
        })
        .collect())
}

/// Least-squares slope of `ln err` against `ln dt`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(h, e) in points {
        let (x, y) = (h.ln(), e.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
