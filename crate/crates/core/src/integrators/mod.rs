//! Time stepping for the system and its comparison processes.
//!
//! All processes carry linear multiplicative noise `b * u * dW`, so one
//! increment formula serves the main system and the auxiliary processes:
//!
//! ```text
//! Milstein:        u + a(u) dt + b u dW + (b^2 u / 2) (dW^2 - dt)
//! Euler-Maruyama:  u + a(u) dt + b u dW
//! ```
//!
//! With unit normals `xi = dW / sqrt(dt)` the Milstein correction reads
//! `(b^2 u / 2)(xi^2 - 1) dt`.

mod driver;
mod noise;
mod order;
mod path;
mod scheme;

pub(crate) use driver::record;
pub use driver::{simulate, simulate_coupled, AuxProcess, AuxSet, Coupled, PathDriver};
pub use noise::{BrownianIncrements, NoiseStreams};
pub use order::{gbm_strong_errors, log_log_slope, StrongError};
pub use path::{PathRecord, Truncation, ZTrack};
pub use scheme::{em_step, milstein_step, Positivity, PositivityViolation, Scheme, StepPolicy};
