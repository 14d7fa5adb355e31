//! Homotopy `K_μ = μK + (1−μ)2^{−k}C(n,k)`, the Möbius parametrization
//! `π(w, ξ)`, the projection `Π`, the reduced map `Λ_{ξ,μ}` and a continuation
//! solver, all on the axisymmetric slice of `S^n` with `ξ` on the axis.

mod homotopy;
mod operator;
mod projection;
mod reduced;
mod target;

pub use homotopy::{newton_solve, solve_homotopy, HomotopyConfig, HomotopyReport, HomotopyState, TraceEntry};
pub use operator::{cone_scan, k_mu, linearization_constant, linearize, residual, round_sigma, sigma_field};
pub use projection::{axis_tau, axis_xi, center_of_mass, pi_parametrize, project_pi};
pub use reduced::{lambda_from_kw, solve_reduced, ReducedConfig, ReducedSolution};
pub use target::{axis_criterion, AxisCriterion, AxisCritical, AxisymK};
