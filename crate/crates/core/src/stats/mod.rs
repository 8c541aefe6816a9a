//! Empirical distributions: samples, the empirical CDF, Kolmogorov-Smirnov
//! tests against the closed-form laws, kernel density estimates and histograms.

mod density;
mod ecdf;
mod sample;

pub use density::{
    empirical_density, histogram, histogram2d, silverman_bandwidth, DensityCurve, Histogram,
    Histogram2d, KDE_GRID_POINTS, KDE_MIN_SAMPLE,
};
pub use ecdf::{
    kolmogorov_tail, ks_critical_constant, ks_statistic, ks_test, ks_test_cdf, ks_two_sample, Ecdf,
    KsResult, KS_MIN_SAMPLE,
};
pub use sample::Sample;
