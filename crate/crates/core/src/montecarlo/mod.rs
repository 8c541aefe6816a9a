//! Ensemble estimators: moments at fixed times, time averages, decay rates
//! and occupation fractions, each reported with a standard error over paths.

mod ensemble;
mod estimators;
mod reduce;

pub use ensemble::{ensemble_member, Coordinate, EnsembleSpec, EstimateReport, EstimateWithCI};
pub use estimators::{
    decay_rate, decay_rate_of, estimate_moment, estimate_moments_at, mean_trajectory, occupation,
    permanence_occupation, terminal_states, terminal_values, time_average, Functional,
    MeanTrajectory, Region,
};
pub use reduce::{mean_sd, pairwise_sum};
