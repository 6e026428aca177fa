//! Independent numerical oracles used to falsify the closed forms.

mod dp;
mod fd;
mod interp;
mod ode;
mod quad;
mod report;

pub use dp::{asset_grid, grid_dp, DpSolution};
pub use fd::{fd_derivative, fd_gradient, fd_hessian, FdSteps};
pub use interp::{golden_section_max, Pchip};
pub use ode::{rk4_step, simulate_assets, AssetPath, PathSample};
pub use quad::{
    adaptive_simpson, pdv_utility, pdv_utility_with_depth, perturbation_check, PerturbationReport,
    PerturbedPath,
};
pub use report::{approximation_error_report, ApproxErrorRow};
