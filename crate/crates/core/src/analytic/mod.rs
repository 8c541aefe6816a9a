//! Closed-form stationary laws, regime thresholds, Lyapunov bound constants
//! and the recurrence domain of the permanence regime.

mod laws;
mod lyapunov;
mod optimize;
mod recurrence;
mod thresholds;

pub use laws::{
    ergodic_moments, phi_law, psi_law, stationary_laws, z_law, LawKind, LawStatus, StationaryLaw,
    StationaryLaws,
};
pub use lyapunov::{
    check_bound_premises, kappa, l2_coefficients, l3_coefficients, l6_coefficients,
    lyapunov_constants, BoundConstants,
};
pub use optimize::{poly_eval, real_roots, sup_cubic, sup_polynomial, sup_quadratic};
pub use recurrence::{
    default_mixing_c, max_mixing_c, recurrence_domain, zeta, LyapunovU, RecurrenceBox,
};
pub use thresholds::{
    lambda1, lambda2, lambda3, permanence_margin, psi_moment_bound, regime_classify, rho_k,
    Certificate, PsiFate, Regime, RegimeReport,
};
