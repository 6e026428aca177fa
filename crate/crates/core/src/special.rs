//! Real branches of the Lambert W function.
//!
//! `W₀` maps `[−1/e, ∞)` onto `[−1, ∞)` and `W₋₁` maps `[−1/e, 0)` onto
//! `(−∞, −1]`. Both are evaluated by Halley iteration on `w·eʷ − x` from
//! branch-specific starting points.
//!
//! The consumption closed forms only ever need `W₋₁` at arguments of the
//! form `−e^{−1−δ}` with `δ ≥ 0`. Forming that argument in floating point
//! throws away most of `δ` near the branch point and underflows for large
//! `δ`, so [`wm1_branch_offset`] solves the equivalent equation
//! `u − ln(1+u) = δ` for `u = −1 − W₋₁` directly.

use std::f64::consts::E;

use crate::error::{domain, Result};

/// The common end point of the two real branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    /// `−1/e`, the smallest real argument.
    pub x_min: f64,
    /// Value of both branches at `x_min`.
    pub w_at_branch: f64,
}

pub const BRANCH_POINT: BranchPoint = BranchPoint {
    x_min: -1.0 / E,
    w_at_branch: -1.0,
};

/// Four units in the last place of `1/e` (which lies in `[1/4, 1/2)`).
pub const EPS_BRANCH: f64 = 4.0 * (f64::EPSILON / 4.0);

const MAX_ITER: usize = 30;
const STEP_TOL: f64 = 1e-15;

/// Below this magnitude `eʷ` for `w ≈ W₋₁(x)` approaches the subnormal range.
const TINY_ARG: f64 = 1e-280;

/// Taylor coefficients of `W` around the branch point in
/// `p = ±√(2(1 + e·x))`, starting at `p⁰`.
const BRANCH_SERIES: [f64; 7] = [
    -1.0,
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
];

fn branch_series(p: f64) -> f64 {
    BRANCH_SERIES.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

/// Lower real branch `W₋₁(x)` for `x ∈ [−1/e, 0)`.
///
/// Arguments up to [`EPS_BRANCH`] below `−1/e` are treated as the branch
/// point itself, since `−1/e` is not representable exactly.
pub fn lambert_wm1(x: f64) -> Result<f64> {
    const DOMAIN: &str = "[-1/e, 0)";
    if !(BRANCH_POINT.x_min - EPS_BRANCH..0.0).contains(&x) {
        return Err(domain("lambert_wm1", x, DOMAIN));
    }
    if x <= BRANCH_POINT.x_min + EPS_BRANCH {
        return Ok(BRANCH_POINT.w_at_branch);
    }
    if -x < TINY_ARG {
        let delta = -(-x).ln() - 1.0;
        return Ok(-1.0 - wm1_branch_offset(delta)?);
    }
    Ok(halley(x, wm1_initial_guess(x), Branch::Lower))
}

/// Principal real branch `W₀(x)` for `x ≥ −1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH_POINT.x_min - EPS_BRANCH || x == f64::INFINITY {
        return Err(domain("lambert_w0", x, "[-1/e, inf)"));
    }
    if x <= BRANCH_POINT.x_min + EPS_BRANCH {
        return Ok(BRANCH_POINT.w_at_branch);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let guess = if x < -0.25 {
        branch_series((2.0 * E.mul_add(x, 1.0).max(0.0)).sqrt())
    } else if x.abs() < 1e-3 {
        x * (1.0 - x)
    } else if x <= 3.0 {
        x.ln_1p()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(x, guess, Branch::Principal))
}

/// Starting point for the `W₋₁` iteration, strictly below −1.
///
/// Near the branch point this is the branch series in
/// `p = −√(2(1 + e·x))`; elsewhere the asymptotic form
/// `L₁ − L₂ + L₂/L₁` with `L₁ = ln(−x)`, `L₂ = ln(−L₁)`.
pub fn wm1_initial_guess(x: f64) -> f64 {
    let guess = if x < -0.25 {
        let q = E.mul_add(x, 1.0).max(0.0);
        branch_series(-(2.0 * q).sqrt())
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    guess.min(-1.0 - f64::EPSILON)
}

#[derive(Clone, Copy, PartialEq)]
enum Branch {
    Principal,
    Lower,
}

fn halley(x: f64, guess: f64, branch: Branch) -> f64 {
    let mut w = guess;
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let fp = ew * wp1;
        if f == 0.0 || fp == 0.0 {
            break;
        }
        let step = f / (fp - (wp1 + 1.0) * f / (2.0 * wp1));
        let mut next = w - step;
        // Stay on the requested side of the branch point.
        let off_branch = match branch {
            Branch::Lower => !(next < -1.0),
            Branch::Principal => !(next > -1.0),
        };
        if off_branch {
            next = 0.5 * (w - 1.0);
        }
        let done = (next - w).abs() <= STEP_TOL * (1.0 + next.abs());
        w = next;
        if done {
            break;
        }
    }
    w
}

/// Offset `u = −1 − W₋₁(−e^{−1−δ})` for `δ ≥ 0`.
///
/// Solves `u − ln(1+u) = δ` by Halley iteration, so the result keeps full
/// relative precision both as `δ → 0` (where `u ≈ √(2δ)`) and for `δ` far
/// beyond the range where `e^{−1−δ}` is representable.
pub fn wm1_branch_offset(delta: f64) -> Result<f64> {
    if !delta.is_finite() || delta < -EPS_BRANCH {
        return Err(domain("wm1_branch_offset", delta, "[0, inf)"));
    }
    if delta <= 0.0 {
        return Ok(0.0);
    }
    let mut u = if delta < 0.5 {
        let p = -(-2.0 * (-delta).exp_m1()).sqrt();
        -1.0 - branch_series(p)
    } else {
        let l = delta.ln_1p();
        delta + l + l / (1.0 + delta)
    };
    if !(u > 0.0) {
        u = (2.0 * delta).sqrt();
    }
    for _ in 0..MAX_ITER {
        let g = excess_over_log1p(u) - delta;
        if g == 0.0 {
            break;
        }
        let opu = 1.0 + u;
        let gp = u / opu;
        let gpp = 1.0 / (opu * opu);
        let step = g / (gp - g * gpp / (2.0 * gp));
        let mut next = u - step;
        if !(next > 0.0) {
            next = 0.5 * u;
        }
        let done = (next - u).abs() <= STEP_TOL * next;
        u = next;
        if done {
            break;
        }
    }
    Ok(u)
}

/// `u − ln(1+u)` without cancellation for small `u`.
pub(crate) fn excess_over_log1p(u: f64) -> f64 {
    if u >= 0.5 {
        return u - u.ln_1p();
    }
    // ln(1+u) = 2·atanh(t), t = u/(2+u), and u − 2t = u²/(2+u).
    let t = u / (2.0 + u);
    let t2 = t * t;
    let mut term = t * t2;
    let mut tail = 0.0_f64;
    let mut k = 3.0;
    while term.abs() > 1e-18 * tail.abs() || tail == 0.0 {
        tail += term / k;
        term *= t2;
        k += 2.0;
        if term == 0.0 || k > 99.0 {
            break;
        }
    }
    u * u / (2.0 + u) - 2.0 * tail
}
