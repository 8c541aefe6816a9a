use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::sample::{quantile_sorted, Sample};

pub const KDE_MIN_SAMPLE: usize = 50;
pub const KDE_GRID_POINTS: usize = 512;

/// Gaussian kernel density estimate evaluated on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityCurve {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(g, d)| 0.5 * (g[1] - g[0]) * (d[0] + d[1]))
            .sum()
    }

    /// Grid point of maximal density.
    pub fn mode(&self) -> f64 {
        let i = self
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.grid[i]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "grid,density")?;
        for (g, d) in self.grid.iter().zip(&self.density) {
            writeln!(w, "{g:.16e},{d:.16e}")?;
        }
        Ok(())
    }
}

/// `0.9 min(sd, IQR/1.34) n^(-1/5)`; falls back to `sd` when the IQR is zero.
pub fn silverman_bandwidth(sample: &Sample) -> Result<f64> {
    let sd = sample.std_dev();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample(format!(
            "zero variance in {} values from {}",
            sample.len(),
            sample.origin
        )));
    }
    let v = sample.sorted();
    let iqr = quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * (sample.len() as f64).powf(-0.2))
}

/// Gaussian KDE on 512 points spanning `[min - 4h, max + 4h]`.
pub fn empirical_density(sample: &Sample, bandwidth: Option<f64>) -> Result<DensityCurve> {
    if sample.len() < KDE_MIN_SAMPLE {
        return Err(Error::InsufficientSample {
            needed: KDE_MIN_SAMPLE,
            got: sample.len(),
        });
    }
    let h = match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => {
            return Err(Error::domain(
                "empirical_density",
                format!("bandwidth must be positive, got {h}"),
            ))
        }
        None => silverman_bandwidth(sample)?,
    };
    let v = sample.sorted();
    let lo = v[0] - 4.0 * h;
    let hi = v[v.len() - 1] + 4.0 * h;
    let step = (hi - lo) / (KDE_GRID_POINTS - 1) as f64;
    let norm = 1.0 / (v.len() as f64 * h * (2.0 * PI).sqrt());
    let grid: Vec<f64> = (0..KDE_GRID_POINTS).map(|i| lo + step * i as f64).collect();
    let density = grid
        .iter()
        .map(|&g| {
            // Only points within 8h contribute above double precision.
            let a = v.partition_point(|&x| x < g - 8.0 * h);
            let b = v.partition_point(|&x| x <= g + 8.0 * h);
            norm * v[a..b]
                .iter()
                .map(|&x| {
                    let u = (g - x) / h;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
        })
        .collect();
    Ok(DensityCurve {
        grid,
        density,
        bandwidth: h,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Count divided by total count and bin width.
    pub density: Vec<f64>,
}

fn range_of(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        })
}

fn bin_index(x: f64, lo: f64, hi: f64, bins: usize) -> Option<usize> {
    if !(x >= lo && x <= hi) {
        return None;
    }
    let i = ((x - lo) / (hi - lo) * bins as f64) as usize;
    Some(i.min(bins - 1))
}

fn edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins)
        .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
        .collect()
}

/// Equal-width histogram over `range` (default: sample range); values
/// outside the range are dropped.
pub fn histogram(values: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if bins == 0 || values.is_empty() {
        return Err(Error::domain(
            "histogram",
            "need at least one bin and one value",
        ));
    }
    let (lo, hi) = range.unwrap_or_else(|| range_of(values));
    if !(hi > lo) {
        return Err(Error::DegenerateSample(format!(
            "histogram range [{lo}, {hi}] is empty"
        )));
    }
    let mut counts = vec![0u64; bins];
    for &x in values {
        if let Some(i) = bin_index(x, lo, hi, bins) {
            counts[i] += 1;
        }
    }
    let width = (hi - lo) / bins as f64;
    let total = values.len() as f64;
    Ok(Histogram {
        edges: edges(lo, hi, bins),
        density: counts.iter().map(|&c| c as f64 / (total * width)).collect(),
        counts,
    })
}

impl Histogram {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "bin_lo,bin_hi,count,density")?;
        for (i, c) in self.counts.iter().enumerate() {
            writeln!(
                w,
                "{:.16e},{:.16e},{c},{:.16e}",
                self.edges[i],
                self.edges[i + 1],
                self.density[i]
            )?;
        }
        Ok(())
    }
}

/// Joint histogram; `counts[i][j]` covers x-bin `i` and y-bin `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2d {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    pub counts: Vec<Vec<u64>>,
    pub total: u64,
}

pub fn histogram2d(
    points: &[(f64, f64)],
    bins: (usize, usize),
    range: Option<((f64, f64), (f64, f64))>,
) -> Result<Histogram2d> {
    let (bx, by) = bins;
    if bx == 0 || by == 0 || points.is_empty() {
        return Err(Error::domain(
            "histogram2d",
            "need at least one bin per axis and one point",
        ));
    }
    let ((xlo, xhi), (ylo, yhi)) = range.unwrap_or_else(|| {
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        (range_of(&xs), range_of(&ys))
    });
    if !(xhi > xlo && yhi > ylo) {
        return Err(Error::DegenerateSample("histogram2d range is empty".into()));
    }
    let mut counts = vec![vec![0u64; by]; bx];
    for &(x, y) in points {
        if let (Some(i), Some(j)) = (bin_index(x, xlo, xhi, bx), bin_index(y, ylo, yhi, by)) {
            counts[i][j] += 1;
        }
    }
    Ok(Histogram2d {
        x_edges: edges(xlo, xhi, bx),
        y_edges: edges(ylo, yhi, by),
        counts,
        total: points.len() as u64,
    })
}

impl Histogram2d {
    pub fn density(&self, i: usize, j: usize) -> f64 {
        let area =
            (self.x_edges[i + 1] - self.x_edges[i]) * (self.y_edges[j + 1] - self.y_edges[j]);
        self.counts[i][j] as f64 / (self.total as f64 * area)
    }

    /// Fraction of points falling in bins that meet `keep(x_lo, x_hi, y_lo, y_hi)`.
    pub fn mass_where(&self, keep: impl Fn(f64, f64, f64, f64) -> bool) -> f64 {
        let mut m = 0u64;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if keep(
                    self.x_edges[i],
                    self.x_edges[i + 1],
                    self.y_edges[j],
                    self.y_edges[j + 1],
                ) {
                    m += c;
                }
            }
        }
        m as f64 / self.total as f64
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x_lo,x_hi,y_lo,y_hi,count,density")?;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{c},{:.16e}",
                    self.x_edges[i],
                    self.x_edges[i + 1],
                    self.y_edges[j],
                    self.y_edges[j + 1],
                    self.density(i, j)
                )?;
            }
        }
        Ok(())
    }
}
