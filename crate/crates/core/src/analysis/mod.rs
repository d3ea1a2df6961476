//! Classification, rest points, linearization, bifurcation search and
//! trajectory diagnostics.

mod classify;
mod convergence;
mod linearize;
mod lyapunov;
mod rest;

pub use classify::{
    classify, classify_sampled, eigenvalues_in_tangent, ClassificationReport, MonotonicityClass,
    TangentRule, CLASS_TOL,
};
pub use convergence::{
    convergence_report, convergence_report_window, ConvergenceReport, ConvergenceStatus,
    CONVERGED_AMPLITUDE, CONVERGED_DISTANCE, CYCLE_AMPLITUDE, CYCLE_DRIFT, WINDOW_FRACTION,
};
pub use linearize::{
    abscissa_at, analytic_jacobian, bifurcation_epsilon, dynamics_jacobian, modes,
    numerical_jacobian, tangent_abscissa, BifurcationResult, BifurcationStatus, Mode,
    JACOBIAN_CHECK_TOL, TANGENT_MODE_TOL,
};
pub use lyapunov::{
    composite_lyapunov_trace, dissipation_margin, lyapunov_trace, storage_matrix, LyapunovTrace,
    LyapunovVerdict, MONOTONE_TOL,
};
pub use rest::{
    rest_point, rest_points, RestPointOptions, RestPointResult, RestPointStatus, SolveMethod,
    REST_POINT_TOL,
};
