//! Plot-ready CSV bundles.

use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use tumor_immune_core::analytic::z_law;
use tumor_immune_core::montecarlo::{ensemble_member, terminal_states};
use tumor_immune_core::stats::{empirical_density, histogram2d, DensityCurve, Sample};
use tumor_immune_core::{regime_classify, ModelParams, Preset, Regime, StationaryLaw};

use crate::config::{Defaults, Resolved};
use crate::error::Result;
use crate::output::OutDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    Paths,
    Phase,
    Density,
    JointDensity,
}

impl Figure {
    fn defaults(self) -> Defaults {
        match self {
            Figure::Paths => Defaults {
                n_paths: 1,
                horizon: 100.0,
                burn_in: None,
            },
            Figure::Phase => Defaults {
                n_paths: 4,
                horizon: 100.0,
                burn_in: None,
            },
            Figure::Density | Figure::JointDensity => Defaults {
                n_paths: 500,
                horizon: 100.0,
                burn_in: None,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub figure: Figure,
    pub preset: Option<Preset>,
    pub params: ModelParams<f64>,
    pub n_paths: usize,
    pub horizon: f64,
    pub seed: u64,
    pub files: Vec<PathBuf>,
}

fn write_law(w: &mut Vec<u8>, grid: &[f64], law: &StationaryLaw<f64>) -> std::io::Result<()> {
    writeln!(w, "grid,density")?;
    for &g in grid {
        writeln!(w, "{g:.16e},{:.16e}", law.pdf(g))?;
    }
    Ok(())
}

pub fn run(r: &Resolved, which: Figure) -> Result<Manifest> {
    let spec = r.spec(which.defaults())?;
    let out = OutDir::create(&r.out)?;
    let p = &r.params;
    let mut files = Vec::new();
    match which {
        Figure::Paths => {
            // Computed in batches, written in path order.
            let batch = rayon::current_num_threads().max(1);
            for start in (0..spec.n_paths).step_by(batch) {
                let end = (start + batch).min(spec.n_paths);
                let recs = (start..end)
                    .into_par_iter()
                    .map(|i| ensemble_member(p, r.initial, &spec, i, r.aux, r.z_start))
                    .collect::<Result<Vec<_>, _>>()?;
                for (i, rec) in (start..end).zip(recs) {
                    files.push(out.write_with(&format!("path_{i}.csv"), |w| rec.write_csv(w))?);
                }
            }
        }
        Figure::Phase => {
            let recs = (0..spec.n_paths)
                .into_par_iter()
                .map(|i| ensemble_member(p, r.initial, &spec, i, Default::default(), 0.0))
                .collect::<Result<Vec<_>, _>>()?;
            let from = recs[0].times.partition_point(|&t| t < spec.burn_in);
            files.push(out.write_with("phase.csv", |w| {
                writeln!(w, "path,t,x,y")?;
                for (i, rec) in recs.iter().enumerate() {
                    for k in (from..rec.len()).step_by(spec.record_stride) {
                        let s = rec.states[k];
                        writeln!(w, "{i},{:.16e},{:.16e},{:.16e}", rec.times[k], s.x, s.y)?;
                    }
                }
                Ok(())
            })?);
        }
        Figure::Density => {
            let states = terminal_states(p, r.initial, &spec)?;
            let xs = Sample::new(states.iter().map(|s| s.x).collect(), "x(T)")?;
            let kde = empirical_density(&xs, None)?;
            files.push(out.write_with("density_x.csv", |w| kde.write_csv(w))?);
            let regime = regime_classify(p).regime;
            if regime == Regime::Extinction {
                // Effectors settle on the tumor-free law once the tumor is gone.
                let law = z_law(p).require()?;
                files.push(out.write_with("density_x_law.csv", |w| write_law(w, &kde.grid, &law))?);
            } else {
                let ys = Sample::new(states.iter().map(|s| s.y).collect(), "y(T)")?;
                let kde_y: DensityCurve = empirical_density(&ys, None)?;
                files.push(out.write_with("density_y.csv", |w| kde_y.write_csv(w))?);
            }
        }
        Figure::JointDensity => {
            let states = terminal_states(p, r.initial, &spec)?;
            let pts: Vec<(f64, f64)> = states.iter().map(|s| (s.x, s.y)).collect();
            let h = histogram2d(&pts, (40, 40), None)?;
            files.push(out.write_with("joint_density.csv", |w| h.write_csv(w))?);
        }
    }
    let manifest = Manifest {
        figure: which,
        preset: r.preset,
        params: *p,
        n_paths: spec.n_paths,
        horizon: spec.horizon,
        seed: spec.master_seed,
        files,
    };
    out.write_json("figures.json", &manifest)?;
    Ok(manifest)
}
