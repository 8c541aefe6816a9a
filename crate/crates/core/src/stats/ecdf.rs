use serde::{Deserialize, Serialize};

use crate::analytic::StationaryLaw;
use crate::error::{Error, Result};

use super::sample::Sample;

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(sample: &Sample) -> Self {
        Self {
            sorted: sample.sorted(),
        }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `#{v <= x} / n`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// `#{v < x} / n`, the left limit at `x`.
    pub fn left_limit(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.len() as f64
    }

    /// Jump points and the function value just after each.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for &v in &self.sorted {
            if out.last().is_some_and(|(x, _)| *x == v) {
                continue;
            }
            out.push((v, self.eval(v)));
        }
        out
    }

    /// `sup_x |F_n(x) - F(x)|` for a continuous `F`, attained at a jump point
    /// on one side or the other.
    pub fn sup_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        self.steps()
            .into_iter()
            .map(|(v, _)| {
                let f = cdf(v);
                (self.eval(v) - f).abs().max((self.left_limit(v) - f).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Two-sided Kolmogorov-Smirnov statistic:
/// `max_i max(i/n - F(v_i), F(v_i) - (i-1)/n)` over the sorted sample.
pub fn ks_statistic(sample: &Sample, cdf: impl Fn(f64) -> f64) -> f64 {
    let v = sample.sorted();
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    pub critical_value: f64,
    pub reject: bool,
    pub level: f64,
    /// Asymptotic Kolmogorov tail probability of the observed statistic.
    pub p_value: f64,
}

/// Asymptotic critical constant `sqrt(-ln(level/2) / 2)`; 1.358 at level 0.05.
pub fn ks_critical_constant(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        s += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

pub const KS_MIN_SAMPLE: usize = 20;

/// One-sample K-S test of `sample` against a stationary law at `level`.
pub fn ks_test(sample: &Sample, law: &StationaryLaw<f64>, level: f64) -> Result<KsResult> {
    ks_test_cdf(sample, |x| law.cdf(x), level)
}

pub fn ks_test_cdf(sample: &Sample, cdf: impl Fn(f64) -> f64, level: f64) -> Result<KsResult> {
    let n = sample.len();
    if n < KS_MIN_SAMPLE {
        return Err(Error::InsufficientSample {
            needed: KS_MIN_SAMPLE,
            got: n,
        });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(
            "ks_test",
            format!("level must lie in (0, 1), got {level}"),
        ));
    }
    let d = ks_statistic(sample, cdf);
    let sn = (n as f64).sqrt();
    let critical_value = ks_critical_constant(level) / sn;
    Ok(KsResult {
        statistic: d,
        n,
        critical_value,
        reject: d > critical_value,
        level,
        p_value: kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d),
    })
}

/// Two-sample K-S test: `D = sup |F_a - F_b|` against
/// `c(level) sqrt((n + m) / (n m))`.
pub fn ks_two_sample(a: &Sample, b: &Sample, level: f64) -> Result<KsResult> {
    for s in [a, b] {
        if s.len() < KS_MIN_SAMPLE {
            return Err(Error::InsufficientSample {
                needed: KS_MIN_SAMPLE,
                got: s.len(),
            });
        }
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(
            "ks_two_sample",
            format!("level must lie in (0, 1), got {level}"),
        ));
    }
    let (fa, fb) = (Ecdf::new(a), Ecdf::new(b));
    let d = a
        .values()
        .iter()
        .chain(b.values())
        .map(|&v| (fa.eval(v) - fb.eval(v)).abs())
        .fold(0.0, f64::max);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let en = (n * m / (n + m)).sqrt();
    let critical_value = ks_critical_constant(level) / en;
    Ok(KsResult {
        statistic: d,
        n: a.len() + b.len(),
        critical_value,
        reject: d > critical_value,
        level,
        p_value: kolmogorov_tail((en + 0.12 + 0.11 / en) * d),
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn inverse_cdf_grid(law: &StationaryLaw<f64>, n: usize) -> Sample {
        let v = (1..=n)
            .map(|i| law.quantile((i as f64 - 0.5) / n as f64).unwrap())
            .collect();
        Sample::new(v, "quantile grid").unwrap()
    }

    #[test]
    fn single_point_step() {
        let e = Ecdf::new(&Sample::new(vec![2.0], "").unwrap());
        assert_eq!(e.eval(1.999), 0.0);
        assert_eq!(e.eval(2.0), 1.0);
        assert_eq!(e.left_limit(2.0), 0.0);
    }

    #[test]
    fn distinct_points_jump_by_one_over_n() {
        let s = Sample::new(vec![3.0, 1.0, 2.0, 5.0, 4.0], "").unwrap();
        let e = Ecdf::new(&s);
        for (i, (x, f)) in e.steps().into_iter().enumerate() {
            assert_eq!(f, (i + 1) as f64 / 5.0);
            assert_eq!((f * 5.0).round() - (e.left_limit(x) * 5.0).round(), 1.0);
        }
    }

    #[test]
    fn critical_constant_at_five_percent() {
        assert_relative_eq!(ks_critical_constant(0.05), 1.3581, max_relative = 1e-4);
    }

    #[test]
    fn quantile_grid_is_within_one_over_n() {
        let law = StationaryLaw::inverse_gamma(19.715, 5.905).unwrap();
        let s = inverse_cdf_grid(&law, 200);
        let r = ks_test(&s, &law, 0.05).unwrap();
        assert!(r.statistic <= 1.0 / 200.0 + 1e-12);
        assert!(!r.reject);
        assert!(Ecdf::new(&s).sup_distance(|x| law.cdf(x)) <= 1.0 / 200.0 + 1e-12);
    }

    #[test]
    fn ecdf_and_direct_statistics_agree_exactly() {
        let law = StationaryLaw::gamma(3.0, 2.0).unwrap();
        let v: Vec<f64> = (1..60)
            .map(|i| ((i * 37) % 61) as f64 / 13.0 + 0.01)
            .collect();
        let s = Sample::new(v, "").unwrap();
        assert_eq!(
            ks_statistic(&s, |x| law.cdf(x)),
            Ecdf::new(&s).sup_distance(|x| law.cdf(x))
        );
    }

    #[test]
    fn small_samples_are_rejected() {
        let law = StationaryLaw::gamma(3.0, 2.0).unwrap();
        let s = Sample::new(vec![1.0; 19], "").unwrap();
        assert!(matches!(
            ks_test(&s, &law, 0.05),
            Err(Error::InsufficientSample {
                needed: 20,
                got: 19
            })
        ));
    }

    #[test]
    fn misspecified_law_is_rejected() {
        let law = StationaryLaw::gamma(19.715, 5.905).unwrap();
        let wrong = StationaryLaw::gamma(10.0, 5.905).unwrap();
        let s = inverse_cdf_grid(&law, 100);
        assert!(ks_test(&s, &wrong, 0.05).unwrap().reject);
    }

    #[test]
    fn two_sample_identical_and_disjoint() {
        let a = Sample::new((1..=50).map(|i| i as f64).collect(), "").unwrap();
        let b = Sample::new((101..=150).map(|i| i as f64).collect(), "").unwrap();
        assert_eq!(ks_two_sample(&a, &a, 0.05).unwrap().statistic, 0.0);
        let r = ks_two_sample(&a, &b, 0.05).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.reject);
    }

    #[test]
    fn kolmogorov_tail_reference_points() {
        assert_relative_eq!(kolmogorov_tail(1.3581), 0.05, max_relative = 1e-3);
        assert_relative_eq!(kolmogorov_tail(1.6276), 0.01, max_relative = 1e-3);
    }
}
