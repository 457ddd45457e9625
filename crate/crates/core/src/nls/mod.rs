//! Nonlinear energy, the mass-constrained ground state problem and the
//! concentration-compactness diagnostics.

mod diagnostics;
mod functional;
mod minimize;

pub use diagnostics::{
    concentration_function, dichotomy_split, runaway_indicator, Centers, Dichotomy, RunawayReport,
};
pub use functional::{energy, lagrange_frequency, mass, nonlinear_term, stationary_residual};
pub use minimize::{
    core_bump, minimize_ground_state, GroundStateResult, InitialGuess, NlsParams, Status,
};
