//! Passivity-based reinforcement learning dynamics for finite games.
//!
//! The crate is organised bottom-up:
//!
//! * [`game`] and [`presets`]: finite games, payoff vectors, tangent spaces
//!   and the built-in example games.
//! * [`choice`]: the Gibbs-entropy soft-max choice map, log-sum-exp and its
//!   Bregman divergence.
//! * [`dynamics`]: first-order and higher-order score dynamics, induced
//!   strategy dynamics, discrete recursions and the RK4 integrator.
//! * [`analysis`]: monotonicity classification, rest points, linearization,
//!   bifurcation search, Lyapunov monitoring and convergence reports.
//! * [`experiment`]: run configurations and the reproduction table used by the
//!   command-line front end.

pub mod analysis;
pub mod choice;
pub mod dynamics;
mod error;
pub mod experiment;
pub mod game;
pub mod linalg;
pub mod presets;

pub use error::{Error, Result};

pub use analysis::{
    bifurcation_epsilon, classify, composite_lyapunov_trace, convergence_report,
    dynamics_jacobian, lyapunov_trace, rest_point, BifurcationResult, ClassificationReport,
    ConvergenceReport, ConvergenceStatus, MonotonicityClass, RestPointOptions, RestPointResult,
};
pub use choice::{bregman_lse, log_sum_exp, softmax, softmax_block, softmax_jacobian, Temperature};
pub use dynamics::{
    expdrl_field, hexpdrl_field, induced_strategy_field, integrate, FeedbackBlock, FirstOrder,
    FirstOrderParams, HigherOrder, HigherOrderState, IntegrationOptions, ScoreSystem, Trajectory,
};
pub use game::{GameSpec, MixedProfile, TangentBasis};
pub use presets::{preset, PresetParams};
