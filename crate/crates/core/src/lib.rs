//! Stochastic tumor-immune interaction model: integrators, closed-form
//! stationary laws and thresholds, Monte-Carlo estimators and sample
//! statistics.
//!
//! Model, integrator and analytic code is generic over [`Scalar`] (`f32` or
//! `f64`); the aliases below fix the common case. Ensemble estimates and
//! sample statistics are reported in `f64`.

// `!(v > 0)` style guards reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod integrators;
pub mod model;
pub mod montecarlo;
pub mod presets;
pub mod scalar;
pub mod stats;

pub use analytic::{
    lyapunov_constants, regime_classify, stationary_laws, BoundConstants, Regime, RegimeReport,
    StationaryLaw,
};
pub use error::{Error, Result};
pub use integrators::{
    simulate, simulate_coupled, AuxProcess, AuxSet, PathRecord, Scheme, StepPolicy,
};
pub use model::{DimensionalParams, ModelParams, State};
pub use montecarlo::{EnsembleSpec, EstimateWithCI};
pub use presets::Preset;
pub use scalar::Scalar;

pub type ModelParamsF64 = ModelParams<f64>;
pub type ModelParamsF32 = ModelParams<f32>;
pub type StateF64 = State<f64>;
pub type StateF32 = State<f32>;
pub type StepPolicyF64 = StepPolicy<f64>;
pub type StepPolicyF32 = StepPolicy<f32>;
pub type PathRecordF64 = PathRecord<f64>;
pub type PathRecordF32 = PathRecord<f32>;
pub type EnsembleSpecF64 = EnsembleSpec<f64>;
pub type EnsembleSpecF32 = EnsembleSpec<f32>;
pub type StationaryLawF64 = StationaryLaw<f64>;
pub type BoundConstantsF64 = BoundConstants<f64>;
pub type RegimeReportF64 = RegimeReport<f64>;
pub type DimensionalParamsF64 = DimensionalParams<f64>;
