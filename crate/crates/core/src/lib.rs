//! Sparse actuator selection for reachability of linear time-invariant systems.
//!
//! Given `dx/dt = A x + B u` with `B` a zero-one diagonal matrix, the crate
//! chooses few actuated states so that a transfer `x0 -> x1` is feasible (or
//! feasible up to a squared-distance level `eps`), or so that some ball of a
//! finite union is reached. It also builds the hitting-set reductions that
//! make the exact problem intractable and checks them by brute force.

pub mod error;
pub mod hitting;
pub mod netgen;
pub mod numkit;
pub mod reach;
pub mod reductions;
pub mod select;

pub use error::{Error, Result};
pub use hitting::{min_hitting_set, HittingSetInstance, IncidenceMatrix};
pub use numkit::{mat_exp, DenseMatrix, OrthoBasis, Vector};
pub use reach::{
    exactness_threshold, is_controllable, is_feasible, krylov_columns, reachable_subspace,
    residual, transfer_vector, ActuatorSet, FeasibilityReport, LtiSystem, ReachModel,
    TransferSpec, N_BRUTE, TAU_EXACT,
};
pub use select::{
    bisection_exact, brute_force_all_opt, brute_force_opt, greedy_eps, subset_reach, Ball,
    BisectionOutcome, GreedyTrace, SubsetReach,
};
