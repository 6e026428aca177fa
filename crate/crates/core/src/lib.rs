//! Closed-form consumption functions for the deterministic income-fluctuation
//! problem with a borrowing constraint.
//!
//! A consumer with CRRA utility, discount rate `ρ`, interest rate `r < ρ`,
//! constant income `y` and no borrowing runs initial assets `a` down to zero
//! in finite time `T = h(a; y)` and consumes `y` afterwards. At `r = 0` the
//! depletion time and time-0 consumption are explicit in terms of the `W₋₁`
//! branch of the Lambert W function; for small `r > 0` the same expression
//! gives a global approximation. The [`validation`] module holds the
//! numerical oracles that check every closed form.
//!
//! ```
//! use ifp_core::{consumption_now_r0, jacobian_closed, ModelParams};
//!
//! let p = ModelParams::new(0.08, 0.0, 0.5, 3.0)?;
//! let c = consumption_now_r0(&p, 3.0)?;
//! assert!((c - 5.031).abs() < 1e-3);
//! let (mpc_assets, mpc_income) = jacobian_closed(&p, 3.0)?;
//! assert!(mpc_assets > 0.16 && mpc_income > 0.0);
//! # Ok::<(), ifp_core::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod consumption;
pub mod depletion;
pub mod error;
pub mod figures;
pub mod model;
pub mod special;
pub mod sweep;
pub mod validation;

pub use consumption::{
    consumption_approx_small_r, consumption_now, consumption_now_r0, consumption_path,
    consumption_unconstrained, derivatives, discrete_policy, hessian_closed, jacobian_closed,
    ConsumptionDerivatives, PiecewiseLinearPolicy, Segment,
};
pub use depletion::{
    h_approx_small_r, h_best, h_closed_r0, h_numeric, lambert_argument, lambert_argument_small_r,
    mu, mu_discrete, mu_discrete_budget, mu_prime, DepletionMethod, DepletionTime, Knot,
    KnotSequence,
};
pub use error::{Error, ParamError, Result};
pub use model::{crra_utility, value_upper_bound, DerivedConstants, ModelParams, R_SWITCH};
pub use special::{lambert_w0, lambert_wm1, wm1_branch_offset, BranchPoint, BRANCH_POINT};
