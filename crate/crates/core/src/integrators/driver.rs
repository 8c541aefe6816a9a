use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{drift, threshold_h, ModelParams, State};
use crate::scalar::{lit, to64, Scalar};

use super::noise::NoiseStreams;
use super::path::{PathRecord, Truncation, ZTrack};
use super::scheme::StepPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxProcess {
    /// Stochastic logistic process on the tumor noise, dominates `y`.
    Psi,
    /// Linear process on the effector noise with death rate `delta - h^2`, dominates `x`.
    Phi,
    /// Tumor-free effector process started from `x(t0)`.
    Z,
}

/// Subset of the auxiliary processes to integrate alongside the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AuxSet {
    pub psi: bool,
    pub phi: bool,
    pub z: bool,
}

impl AuxSet {
    pub const NONE: AuxSet = AuxSet {
        psi: false,
        phi: false,
        z: false,
    };
    pub const ALL: AuxSet = AuxSet {
        psi: true,
        phi: true,
        z: true,
    };

    pub fn is_empty(&self) -> bool {
        !(self.psi || self.phi || self.z)
    }

    pub fn contains(&self, p: AuxProcess) -> bool {
        match p {
            AuxProcess::Psi => self.psi,
            AuxProcess::Phi => self.phi,
            AuxProcess::Z => self.z,
        }
    }

    pub fn with(mut self, p: AuxProcess) -> Self {
        match p {
            AuxProcess::Psi => self.psi = true,
            AuxProcess::Phi => self.phi = true,
            AuxProcess::Z => self.z = true,
        }
        self
    }
}

impl FromIterator<AuxProcess> for AuxSet {
    fn from_iter<I: IntoIterator<Item = AuxProcess>>(iter: I) -> Self {
        iter.into_iter().fold(AuxSet::NONE, AuxSet::with)
    }
}

/// System state together with whichever comparison processes are active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupled<T> {
    pub state: State<T>,
    pub psi: Option<T>,
    pub phi: Option<T>,
    pub z: Option<T>,
}

/// Streaming integrator for one path. Visits every base grid point; the
/// visitor may stop the path early.
pub struct PathDriver<T: Scalar> {
    params: ModelParams<T>,
    policy: StepPolicy<T>,
    aux: AuxSet,
    z_start: T,
    h2: T,
    noise: NoiseStreams,
    halvings: u64,
    truncations: Vec<Truncation>,
    floored: [bool; 5],
}

pub struct DriveSummary {
    pub halvings: u64,
    pub truncations: Vec<Truncation>,
    pub steps: usize,
}

const NAMES: [&str; 5] = ["x", "y", "psi", "phi", "z"];

impl<T: Scalar> PathDriver<T> {
    pub fn new(
        params: ModelParams<T>,
        policy: StepPolicy<T>,
        aux: AuxSet,
        z_start: T,
        seed: u64,
        path: u64,
    ) -> Result<Self> {
        params.validate()?;
        policy.validate()?;
        if !(z_start >= T::zero()) {
            return Err(Error::domain(
                "simulate_coupled",
                format!("t0 must be >= 0, got {z_start}"),
            ));
        }
        let h = threshold_h(&params);
        Ok(Self {
            params,
            policy,
            aux,
            z_start,
            h2: h * h,
            noise: NoiseStreams::new(seed, path),
            halvings: 0,
            truncations: Vec::new(),
            floored: [false; 5],
        })
    }

    pub fn step_count(&self, horizon: T) -> usize {
        (horizon / self.policy.dt)
            .round()
            .to_usize()
            .unwrap_or(0)
            .max(1)
    }

    /// Integrate on the grid `t_k = k * dt`, `k = 0..=round(horizon/dt)`.
    pub fn run<F>(mut self, s0: State<T>, horizon: T, mut visit: F) -> Result<DriveSummary>
    where
        F: FnMut(usize, T, &Coupled<T>) -> ControlFlow<()>,
    {
        if !s0.is_positive() {
            return Err(Error::domain(
                "simulate",
                format!("initial state must be positive, got {s0:?}"),
            ));
        }
        if !(horizon.is_finite() && horizon > T::zero()) {
            return Err(Error::domain(
                "simulate",
                format!("horizon must be > 0, got {horizon}"),
            ));
        }
        let dt = self.policy.dt;
        let n = self.step_count(horizon);
        let z_index = (self.z_start / dt).round().to_usize().unwrap_or(usize::MAX);
        let mut cur = Coupled {
            state: s0,
            psi: self.aux.psi.then_some(s0.y),
            phi: self.aux.phi.then_some(s0.x),
            z: (self.aux.z && z_index == 0).then_some(s0.x),
        };
        let mut steps = 0;
        if visit(0, T::zero(), &cur).is_continue() {
            for k in 1..=n {
                let t_prev = T::from_usize(k - 1).unwrap() * dt;
                let (xi, eta) = self.noise.next_normals::<T>();
                let sq = dt.sqrt();
                let mut next = self.advance(&cur, xi * sq, eta * sq, dt, 0, t_prev)?;
                let t = T::from_usize(k).unwrap() * dt;
                self.clamp(&mut next, t);
                if self.aux.z && k == z_index {
                    next.z = Some(next.state.x);
                }
                cur = next;
                steps = k;
                if visit(k, t, &cur).is_break() {
                    break;
                }
            }
        }
        Ok(DriveSummary {
            halvings: self.halvings,
            truncations: self.truncations,
            steps,
        })
    }

    fn try_step(&self, c: &Coupled<T>, dw1: T, dw2: T, dt: T) -> Coupled<T> {
        let p = &self.params;
        let scheme = self.policy.scheme;
        let (dx, dy) = drift(p, c.state);
        let state = State {
            x: scheme.advance(c.state.x, dx, p.sigma1, dw1, dt),
            y: scheme.advance(c.state.y, dy, p.sigma2, dw2, dt),
        };
        let psi = c
            .psi
            .map(|u| scheme.advance(u, u * (p.alpha - p.beta * u), p.sigma2, dw2, dt));
        let phi = c
            .phi
            .map(|u| scheme.advance(u, p.sigma - (p.delta - self.h2) * u, p.sigma1, dw1, dt));
        let z =
            c.z.map(|u| scheme.advance(u, p.sigma - p.delta * u, p.sigma1, dw1, dt));
        Coupled { state, psi, phi, z }
    }

    fn accepts(&self, old: &Coupled<T>, new: &Coupled<T>) -> bool {
        let ok = |a: Option<T>, b: Option<T>| match (a, b) {
            (Some(a), Some(b)) => self.policy.accepts(a, b),
            _ => true,
        };
        self.policy.accepts(old.state.x, new.state.x)
            && self.policy.accepts(old.state.y, new.state.y)
            && ok(old.psi, new.psi)
            && ok(old.phi, new.phi)
            && ok(old.z, new.z)
    }

    fn advance(
        &mut self,
        c: &Coupled<T>,
        dw1: T,
        dw2: T,
        dt: T,
        depth: u32,
        t: T,
    ) -> Result<Coupled<T>> {
        let cand = self.try_step(c, dw1, dw2, dt);
        if self.accepts(c, &cand) {
            return Ok(cand);
        }
        if depth >= self.policy.max_halvings {
            return Err(Error::SimulationFailure {
                time: to64(t),
                halvings: depth,
            });
        }
        self.halvings += 1;
        // Brownian bridge midpoint: W(dt/2) | W(dt) ~ N(W(dt)/2, dt/4).
        let half = dt * lit(0.5);
        let sd = dt.sqrt() * lit(0.5);
        let a1 = dw1 * lit(0.5) + sd * self.noise.next_bridge::<T>();
        let a2 = dw2 * lit(0.5) + sd * self.noise.next_bridge::<T>();
        let mid = self.advance(c, a1, a2, half, depth + 1, t)?;
        self.advance(&mid, dw1 - a1, dw2 - a2, half, depth + 1, t + half)
    }

    fn clamp(&mut self, c: &mut Coupled<T>, t: T) {
        let floor = T::underflow_floor();
        let slots = [
            Some(&mut c.state.x),
            Some(&mut c.state.y),
            c.psi.as_mut(),
            c.phi.as_mut(),
            c.z.as_mut(),
        ];
        for (i, slot) in slots.into_iter().enumerate() {
            if let Some(v) = slot {
                if *v < floor {
                    *v = floor;
                    if !self.floored[i] {
                        self.floored[i] = true;
                        self.truncations.push(Truncation {
                            coordinate: NAMES[i].to_string(),
                            time: to64(t),
                        });
                    }
                }
            }
        }
    }
}

/// Integrate the system alone; grid of spacing `policy.dt` up to `horizon`.
pub fn simulate<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    policy: &StepPolicy<T>,
    horizon: T,
    seed: u64,
) -> Result<PathRecord<T>> {
    record(p, s0, policy, horizon, (seed, 0), AuxSet::NONE, T::zero())
}

/// Integrate the system together with the selected comparison processes,
/// all driven by the same Brownian increments. `z` starts at `t0_for_z`
/// from the current effector density.
pub fn simulate_coupled<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    policy: &StepPolicy<T>,
    horizon: T,
    seed: u64,
    which: AuxSet,
    t0_for_z: T,
) -> Result<PathRecord<T>> {
    if which.is_empty() {
        return Err(Error::domain(
            "simulate_coupled",
            "select at least one auxiliary process",
        ));
    }
    record(p, s0, policy, horizon, (seed, 0), which, t0_for_z)
}

/// Record the path keyed by `(seed, path)` on the full step grid.
pub(crate) fn record<T: Scalar>(
    p: &ModelParams<T>,
    s0: State<T>,
    policy: &StepPolicy<T>,
    horizon: T,
    (seed, path): (u64, u64),
    which: AuxSet,
    t0_for_z: T,
) -> Result<PathRecord<T>> {
    let driver = PathDriver::new(*p, *policy, which, t0_for_z, seed, path)?;
    let cap = driver.step_count(horizon) + 1;
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap);
    let mut psi = which.psi.then(|| Vec::with_capacity(cap));
    let mut phi = which.phi.then(|| Vec::with_capacity(cap));
    let mut z: Option<ZTrack<T>> = None;
    let summary = driver.run(s0, horizon, |k, t, c| {
        times.push(t);
        states.push(c.state);
        if let (Some(v), Some(u)) = (psi.as_mut(), c.psi) {
            v.push(u);
        }
        if let (Some(v), Some(u)) = (phi.as_mut(), c.phi) {
            v.push(u);
        }
        if let Some(u) = c.z {
            z.get_or_insert_with(|| ZTrack {
                start_index: k,
                values: Vec::new(),
            })
            .values
            .push(u);
        }
        ControlFlow::Continue(())
    })?;
    let aux_z = if which.z {
        Some(z.unwrap_or(ZTrack {
            start_index: times.len(),
            values: Vec::new(),
        }))
    } else {
        None
    };
    Ok(PathRecord {
        times,
        states,
        aux_psi: psi,
        aux_phi: phi,
        aux_z,
        truncations: summary.truncations,
        halvings: summary.halvings,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn ps0() -> (ModelParams<f64>, State<f64>) {
        (presets::strong_tumor_noise(), presets::initial_state())
    }

    #[test]
    fn same_seed_same_path() {
        let (p, s0) = ps0();
        let pol = StepPolicy::default();
        let a = simulate(&p, s0, &pol, 2.0, 11).unwrap();
        let b = simulate(&p, s0, &pol, 2.0, 11).unwrap();
        let c = simulate(&p, s0, &pol, 2.0, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.states, c.states);
        assert_eq!(a.len(), 2001);
        assert_eq!(a.states[0], s0);
        assert!((a.times[2000] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coupled_system_path_matches_plain_path() {
        let (p, s0) = ps0();
        let pol = StepPolicy::default();
        let a = simulate(&p, s0, &pol, 1.0, 3).unwrap();
        let b = simulate_coupled(&p, s0, &pol, 1.0, 3, AuxSet::ALL, 0.5).unwrap();
        assert_eq!(a.states, b.states);
        let z = b.aux_z.unwrap();
        assert_eq!(z.start_index, 500);
        assert_eq!(z.values[0], b.states[500].x);
        assert_eq!(z.values.len(), 501);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (p, s0) = ps0();
        let pol = StepPolicy::default();
        assert!(simulate(&p, s0, &pol, 0.0, 1).is_err());
        assert!(simulate(&p, State { x: 0.0, y: 1.0 }, &pol, 1.0, 1).is_err());
        assert!(simulate_coupled(&p, s0, &pol, 1.0, 1, AuxSet::NONE, 0.0).is_err());
        let bad = StepPolicy { dt: -1.0, ..pol };
        assert!(simulate(&p, s0, &bad, 1.0, 1).is_err());
    }

    #[test]
    fn comparison_orderings_hold_along_paths() {
        for preset in presets::Preset::ALL {
            let p = preset.params::<f64>();
            let s0 = preset.initial_state();
            for seed in 0..4 {
                let r =
                    simulate_coupled(&p, s0, &StepPolicy::default(), 20.0, seed, AuxSet::ALL, 0.0)
                        .unwrap();
                let psi = r.aux_psi.as_ref().unwrap();
                let phi = r.aux_phi.as_ref().unwrap();
                for (i, s) in r.states.iter().enumerate() {
                    assert!(s.y <= psi[i] * (1.0 + 1e-12), "y > psi at {i}");
                    assert!(s.x <= phi[i] * (1.0 + 1e-12), "x > phi at {i}");
                }
            }
        }
    }

    #[test]
    fn boundary_process_dominates_when_response_is_inhibitory() {
        // rho <= mu * eta makes f2 <= 0, so x stays below the tumor-free process.
        let mut p = presets::strong_tumor_noise::<f64>();
        p.rho = 0.05;
        assert!(p.rho <= p.mu * p.eta);
        let r = simulate_coupled(
            &p,
            presets::initial_state(),
            &StepPolicy::default(),
            10.0,
            5,
            AuxSet::NONE.with(AuxProcess::Z),
            0.0,
        )
        .unwrap();
        let z = r.aux_z.unwrap();
        for (i, v) in z.values.iter().enumerate() {
            assert!(r.states[i].x <= v * (1.0 + 1e-12));
        }
    }

    #[test]
    fn early_stop_and_stride_via_visitor() {
        let (p, s0) = ps0();
        let d = PathDriver::new(p, StepPolicy::default(), AuxSet::NONE, 0.0, 1, 0).unwrap();
        let mut seen = 0;
        let sum = d
            .run(s0, 1.0, |k, _, _| {
                seen += 1;
                if k == 100 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })
            .unwrap();
        assert_eq!(seen, 101);
        assert_eq!(sum.steps, 100);
    }

    #[test]
    fn large_steps_trigger_halving_but_stay_positive() {
        let (p, s0) = ps0();
        let pol = StepPolicy {
            dt: 0.2,
            ..StepPolicy::default()
        };
        let r = simulate(&p, s0, &pol, 40.0, 9).unwrap();
        assert!(r.halvings > 0);
        assert!(r.states.iter().all(|s| s.is_positive()));
    }

    #[test]
    fn runs_in_single_precision() {
        let p = presets::weak_tumor_noise::<f32>();
        let r = simulate(&p, presets::initial_state(), &StepPolicy::default(), 5.0, 2).unwrap();
        assert!(r.states.iter().all(|s| s.is_positive() && s.x.is_finite()));
    }
}
