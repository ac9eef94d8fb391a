//! Optimal sampling of an Ornstein-Uhlenbeck signal for remote MMSE
//! estimation through a single-server FCFS queue.
//!
//! The crate computes the error threshold `v(β)` of the MSE-optimal
//! sampler, solves for `β` with bisection, Newton and fixed-point iterations
//! (optionally under a sampling-rate cap), and checks the resulting policies
//! against an event-driven simulation of sampler, queue and estimator.

pub mod cli;
pub mod error;
pub mod expectations;
pub mod metrics;
pub mod policies;
pub mod rng;
pub mod sde;
pub mod sim;
pub mod solvers;
pub mod specfun;

pub use error::{Error, Result};
pub use expectations::{
    threshold_v, Evaluation, McEstimate, McPanel, Objective, SignalAgnostic, SignalAware,
};
pub use metrics::{compute_metrics, ModelMetrics, ServiceDistribution};
pub use rng::SimRng;
pub use sde::OuParams;
pub use sim::{PolicyKind, SimConfig, SimResult};
pub use solvers::{SolveOptions, ThresholdSolution};
