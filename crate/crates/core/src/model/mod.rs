//! The tumor-immune system: parameters, drift and diffusion fields, the
//! effector response function and the generator acting on test functions.

mod dimensional;
mod field;
mod generator;
mod params;

pub use dimensional::DimensionalParams;
pub use field::{diffusion, drift, response_f2, threshold_h};
pub use generator::{
    check_derivatives, generator_apply, FnTestFunction, InversePower, LogBarrier, MixedPower,
    QuadraticLog, TestFunction,
};
pub use params::{ModelParams, State};
