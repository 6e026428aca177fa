//! Consumption functions and their derivatives.
//!
//! Along the optimal path consumption grows at rate `(ρ−r)/γ` until assets
//! run out at `T = h(a; y)` and equals income afterwards. At `r = 0` time-0
//! consumption has the closed form `c*(a; y) = −y·W₋₁(f(a; y))`, and its
//! first and second derivatives in `(a, y)` are closed as well.
//!
//! Internally the closed forms are written in terms of the branch offset
//! `u = −1 − w ≥ 0` with `u − ln(1+u) = ρa/(γy)`, which keeps them accurate
//! both near `a = 0` (where `1 + w → 0`) and for `a ≫ y`.

use crate::depletion::{h_approx_small_r, h_best, mu_discrete_budget};
use crate::error::{domain, Error, Result};
use crate::model::ModelParams;
use crate::special::wm1_branch_offset;

fn check_nonneg(what: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(what, x, "[0, inf)"))
    }
}

fn require_zero_rate(what: &'static str, params: &ModelParams) -> Result<()> {
    if params.r() == 0.0 {
        Ok(())
    } else {
        Err(Error::RequiresZeroRate {
            what,
            r: params.r(),
        })
    }
}

/// Consumption at time `t` along a path that depletes assets at `depletion`.
fn path_value(params: &ModelParams, depletion: f64, t: f64) -> f64 {
    if t <= depletion {
        params.y() * (params.growth() * (depletion - t)).exp()
    } else {
        params.y()
    }
}

/// Optimal consumption at time `t` for initial assets `a`:
/// `y·e^{(ρ−r)(T−t)/γ}` for `t ≤ T` and `y` afterwards.
///
/// `T` is exact at `r = 0` and computed by numerical inversion otherwise.
pub fn consumption_path(params: &ModelParams, a: f64, t: f64) -> Result<f64> {
    check_nonneg("consumption_path time", t)?;
    let depletion = h_best(params, a)?.time;
    Ok(path_value(params, depletion, t))
}

/// Time-0 consumption, `consumption_path(params, a, 0)`.
pub fn consumption_now(params: &ModelParams, a: f64) -> Result<f64> {
    consumption_path(params, a, 0.0)
}

/// Closed-form time-0 consumption at `r = 0`,
/// `c*(a; y) = y·e^{ρh(a;y)/γ} = −y·W₋₁(f(a; y))`.
pub fn consumption_now_r0(params: &ModelParams, a: f64) -> Result<f64> {
    require_zero_rate("consumption_now_r0", params)?;
    check_nonneg("consumption_now_r0", a)?;
    let u = wm1_branch_offset(params.derived().b * a / params.y())?;
    Ok(params.y() * (1.0 + u))
}

/// Consumption at time `t` with the depletion time taken from the small-`r`
/// approximation.
pub fn consumption_approx_small_r(params: &ModelParams, a: f64, t: f64) -> Result<f64> {
    check_nonneg("consumption_approx_small_r time", t)?;
    let depletion = h_approx_small_r(params, a)?.time;
    Ok(path_value(params, depletion, t))
}

/// Level, gradient and Hessian of `c*(a; y)` at `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsumptionDerivatives {
    pub c: f64,
    pub dc_da: f64,
    pub dc_dy: f64,
    pub d2c_da2: f64,
    pub d2c_dady: f64,
    pub d2c_dy2: f64,
}

impl ConsumptionDerivatives {
    pub fn hessian_determinant(&self) -> f64 {
        self.d2c_da2 * self.d2c_dy2 - self.d2c_dady * self.d2c_dady
    }

    /// `|det H| / (H_ay)²`, zero for the rank-one closed form.
    pub fn relative_determinant(&self) -> f64 {
        self.hessian_determinant().abs() / (self.d2c_dady * self.d2c_dady)
    }
}

struct OffsetPoint {
    a: f64,
    y: f64,
    b: f64,
    u: f64,
}

fn offset_point(what: &'static str, params: &ModelParams, a: f64) -> Result<OffsetPoint> {
    require_zero_rate(what, params)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain(what, a, "(0, inf)"));
    }
    let (y, b) = (params.y(), params.derived().b);
    let u = wm1_branch_offset(b * a / y)?;
    Ok(OffsetPoint { a, y, b, u })
}

/// `(∂c/∂a, ∂c/∂y)` at `r = 0`, i.e.
/// `((ρ/γ)·w/(1+w), −w(1 + (ρa/(γy))/(1+w)))` with `w = W₋₁(f(a; y))`.
///
/// Undefined at `a = 0`, where the asset MPC diverges.
pub fn jacobian_closed(params: &ModelParams, a: f64) -> Result<(f64, f64)> {
    let p = offset_point("jacobian_closed", params, a)?;
    Ok(jacobian_from(&p))
}

fn jacobian_from(p: &OffsetPoint) -> (f64, f64) {
    let growth = (1.0 + p.u) / p.u;
    // 1 − δ/u = ln(1+u)/u
    (p.b * growth, growth * p.u.ln_1p())
}

/// `(∂²c/∂a², ∂²c/∂a∂y, ∂²c/∂y²)` at `r = 0`. Every entry is
/// `±(ρ/γ)²·w/(1+w)³` times `1/y`, `a/y²` or `a²/y³`.
pub fn hessian_closed(params: &ModelParams, a: f64) -> Result<(f64, f64, f64)> {
    let p = offset_point("hessian_closed", params, a)?;
    Ok(hessian_from(&p))
}

fn hessian_from(p: &OffsetPoint) -> (f64, f64, f64) {
    let k = p.b * p.b * (1.0 + p.u) / (p.u * p.u * p.u) / p.y;
    let s = p.a / p.y;
    (-k, k * s, -k * s * s)
}

/// Level, Jacobian and Hessian in one pass.
pub fn derivatives(params: &ModelParams, a: f64) -> Result<ConsumptionDerivatives> {
    let p = offset_point("derivatives", params, a)?;
    let (dc_da, dc_dy) = jacobian_from(&p);
    let (d2c_da2, d2c_dady, d2c_dy2) = hessian_from(&p);
    Ok(ConsumptionDerivatives {
        c: p.y * (1.0 + p.u),
        dc_da,
        dc_dy,
        d2c_da2,
        d2c_dady,
        d2c_dy2,
    })
}

/// Linear piece `c = slope·a + intercept` on `(a_lo, a_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a_lo: f64,
    pub a_hi: f64,
    pub slope: f64,
    pub intercept: f64,
}

/// Consumption function of the discrete-time model: linear between the
/// knots `(μ(kΔ), c_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearPolicy {
    delta: f64,
    knot_assets: Vec<f64>,
    knot_consumption: Vec<f64>,
    segments: Vec<Segment>,
}

impl PiecewiseLinearPolicy {
    fn from_knots(delta: f64, knot_assets: Vec<f64>, knot_consumption: Vec<f64>) -> Self {
        let segments = knot_assets
            .windows(2)
            .zip(knot_consumption.windows(2))
            .map(|(a, c)| {
                let slope = (c[1] - c[0]) / (a[1] - a[0]);
                Segment {
                    a_lo: a[0],
                    a_hi: a[1],
                    slope,
                    intercept: c[0] - slope * a[0],
                }
            })
            .collect();
        Self {
            delta,
            knot_assets,
            knot_consumption,
            segments,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Knots `(μ(kΔ), c_k)` for `k = 0, 1, …`.
    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.knot_assets
            .iter()
            .copied()
            .zip(self.knot_consumption.iter().copied())
    }

    pub fn knot_count(&self) -> usize {
        self.knot_assets.len()
    }

    /// Consumption at assets `a ≥ 0`. Knots evaluate to `c_k` exactly;
    /// beyond the last knot the final segment is extended.
    pub fn evaluate(&self, a: f64) -> Result<f64> {
        check_nonneg("PiecewiseLinearPolicy::evaluate", a)?;
        let idx = self.knot_assets.partition_point(|&k| k < a);
        if idx < self.knot_assets.len() && self.knot_assets[idx] == a {
            return Ok(self.knot_consumption[idx]);
        }
        let seg = &self.segments[idx.clamp(1, self.segments.len()) - 1];
        Ok(seg.slope * a + seg.intercept)
    }
}

const MAX_POLICY_KNOTS: usize = 1 << 26;

/// Piecewise-linear policy of the discrete model with step `Δ`, with knots
/// generated until `μ(kΔ) ≥ a_max`.
///
/// Knot assets come from [`mu_discrete_budget`]; knot consumption is
/// `c_k = y·((1+rΔ)/(1+ρΔ))^{−k/γ}`.
pub fn discrete_policy(params: &ModelParams, delta: f64, a_max: f64) -> Result<PiecewiseLinearPolicy> {
    if !(a_max > 0.0 && a_max.is_finite()) {
        return Err(domain("discrete_policy a_max", a_max, "(0, inf)"));
    }
    let mut n = 64;
    let seq = loop {
        let seq = mu_discrete_budget(params, delta, n)?;
        if seq.knots().last().is_some_and(|k| k.assets >= a_max) {
            break seq;
        }
        if n >= MAX_POLICY_KNOTS {
            return Err(Error::InvalidArgument(format!(
                "discrete_policy needs more than {MAX_POLICY_KNOTS} knots to reach a_max = {a_max}"
            )));
        }
        n *= 2;
    };
    let last = seq.knots().iter().position(|k| k.assets >= a_max).unwrap_or(n);
    let lg = (params.r() * delta).ln_1p() - (params.rho() * delta).ln_1p();
    let knot_assets: Vec<f64> = seq.knots()[..=last].iter().map(|k| k.assets).collect();
    let knot_consumption = (0..=last)
        .map(|k| params.y() * (-(k as f64) * lg / params.gamma()).exp())
        .collect();
    Ok(PiecewiseLinearPolicy::from_knots(delta, knot_assets, knot_consumption))
}

/// Unconstrained benchmark `κ(a + y/r)` with `κ = (ρ + r(γ−1))/γ`.
pub fn consumption_unconstrained(params: &ModelParams, a: f64) -> Result<f64> {
    if params.r() == 0.0 {
        return Err(Error::RequiresPositiveRate {
            what: "consumption_unconstrained",
        });
    }
    check_nonneg("consumption_unconstrained", a)?;
    Ok(params.derived().b_r * (a + params.y() / params.r()))
}
