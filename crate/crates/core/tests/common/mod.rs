//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code, clippy::excessive_precision)]

use std::collections::BinaryHeap;

use tumor_immune_core::integrators::{milstein_step, NoiseStreams};
use tumor_immune_core::model::{ModelParams, State, TestFunction};
use tumor_immune_core::montecarlo::mean_sd;

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Piece(f64, f64, f64, f64);

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.3.total_cmp(&o.3).is_eq()
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.3.total_cmp(&o.3)
    }
}

/// Globally adaptive Gauss-Kronrod integral of `f` over `[a, b]`: the piece
/// with the largest error estimate is bisected until the summed error drops
/// below `abs_tol` or the piece budget is spent.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, pieces: usize, abs_tol: f64) -> f64 {
    let w = (b - a) / pieces as f64;
    let mut heap: BinaryHeap<Piece> = (0..pieces)
        .map(|i| {
            let (l, r) = (a + w * i as f64, a + w * (i + 1) as f64);
            let (v, e) = gk15(f, l, r);
            Piece(l, r, v, e)
        })
        .collect();
    let mut err: f64 = heap.iter().map(|p| p.3).sum();
    for _ in 0..100_000 {
        if err <= abs_tol {
            break;
        }
        let Piece(l, r, _, e) = heap.pop().unwrap();
        let m = 0.5 * (l + r);
        let (v1, e1) = gk15(f, l, m);
        let (v2, e2) = gk15(f, m, r);
        err += e1 + e2 - e;
        heap.push(Piece(l, m, v1, e1));
        heap.push(Piece(m, r, v2, e2));
    }
    let mut vals: Vec<f64> = heap.iter().map(|p| p.2).collect();
    vals.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    vals.iter().sum()
}

/// `int_0^inf g(x) dx` for `g = exp(ln_g)`, integrated in `s = ln x` around
/// `center` (a point where the integrand is not negligible).
pub fn integrate_positive_axis(ln_g: &dyn Fn(f64) -> f64, center: f64) -> f64 {
    let s0 = center.ln();
    let f = |s: f64| (ln_g(s.exp()) + s).exp();
    let scale = integrate(&f, s0 - 40.0, s0 + 40.0, 400, f64::INFINITY).abs();
    let tol = 1e-14 * scale;
    integrate(&f, s0 - 400.0, s0 - 20.0, 16, tol)
        + integrate(&f, s0 - 20.0, s0 + 20.0, 200, tol)
        + integrate(&f, s0 + 20.0, s0 + 400.0, 16, tol)
}

/// Richardson-extrapolated Dynkin estimate of the generator applied to `f` at `s0`.
///
/// Each path runs Milstein steps of size `dt` up to `h`; the discrete Ito
/// integral of `grad f . diffusion` is subtracted as a zero-mean control
/// variate, and `2 D(h/2) - D(h)` cancels the first-order bias in `h`.
pub fn dynkin_oracle<F: TestFunction<f64>>(
    p: &ModelParams<f64>,
    f: &F,
    s0: State<f64>,
    h: f64,
    steps: usize,
    paths: usize,
    seed: u64,
) -> (f64, f64) {
    assert!(steps.is_multiple_of(2));
    let dt = h / steps as f64;
    let sq = dt.sqrt();
    let f0 = f.value(s0);
    let est: Vec<f64> = (0..paths as u64)
        .map(|path| {
            let mut noise = NoiseStreams::new(seed, path);
            let mut s = s0;
            let mut mart = 0.0;
            let mut half = 0.0;
            for k in 0..steps {
                let (xi, eta): (f64, f64) = noise.next_normals();
                let (dw1, dw2) = (xi * sq, eta * sq);
                let (gx, gy) = f.gradient(s);
                mart += gx * p.sigma1 * s.x * dw1 + gy * p.sigma2 * s.y * dw2;
                s = milstein_step(p, s, dw1, dw2, dt).expect("probe paths stay positive");
                if k + 1 == steps / 2 {
                    half = f.value(s) - f0 - mart;
                }
            }
            let full = f.value(s) - f0 - mart;
            2.0 * half / (0.5 * h) - full / h
        })
        .collect();
    let (m, sd) = mean_sd(&est);
    (m, sd / (paths as f64).sqrt())
}

/// Strong errors `E|X_N - X(T)|` of the effector coordinate on the
/// geometric-Brownian sub-case (`sigma = rho = mu = 0`), where
/// `x(T) = x0 exp((-delta - sigma1^2/2) T + sigma1 W(T))` exactly.
/// Returns `(dt, milstein_error, em_error)` for `dt = 2^-l`, `l` in `levels`.
pub fn gbm_strong_errors(
    levels: std::ops::RangeInclusive<u32>,
    paths: u64,
    seed: u64,
) -> Vec<(f64, f64, f64)> {
    use tumor_immune_core::integrators::em_step;
    let p = ModelParams {
        sigma: 0.0,
        rho: 0.0,
        eta: 1.0,
        mu: 0.0,
        delta: 0.5,
        alpha: 0.5,
        beta: 0.1,
        sigma1: 1.0,
        sigma2: 0.0,
    };
    let t_end = 1.0;
    let x0 = 1.0;
    let finest = *levels.end();
    let n_fine = 1usize << finest;
    let dt_fine = t_end / n_fine as f64;
    let mut err_m = vec![Vec::with_capacity(paths as usize); levels.clone().count()];
    let mut err_e = err_m.clone();
    for path in 0..paths {
        let mut noise = NoiseStreams::new(seed, path);
        let dw: Vec<f64> = (0..n_fine)
            .map(|_| noise.next_normals::<f64>().0 * dt_fine.sqrt())
            .collect();
        let w_t: f64 = dw.iter().sum();
        let exact = x0 * ((-p.delta - 0.5 * p.sigma1 * p.sigma1) * t_end + p.sigma1 * w_t).exp();
        for (j, l) in levels.clone().enumerate() {
            let n = 1usize << l;
            let dt = t_end / n as f64;
            let group = n_fine / n;
            let mut sm = State { x: x0, y: 1.0 };
            let mut se = sm;
            for k in 0..n {
                let inc: f64 = dw[k * group..(k + 1) * group].iter().sum();
                sm = milstein_step(&p, sm, inc, 0.0, dt).unwrap_or_else(|v| v.candidate);
                se = em_step(&p, se, inc, 0.0, dt).unwrap_or_else(|v| v.candidate);
            }
            err_m[j].push((sm.x - exact).abs());
            err_e[j].push((se.x - exact).abs());
        }
    }
    levels
        .enumerate()
        .map(|(j, l)| {
            (
                0.5f64.powi(l as i32),
                mean_sd(&err_m[j]).0,
                mean_sd(&err_e[j]).0,
            )
        })
        .collect()
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
