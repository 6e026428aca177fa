//! The asset-depletion map `μ(T)` and its inverse `h(a; y)`.
//!
//! `μ(T)` is the initial wealth that an optimizing consumer runs down to zero
//! in exactly `T` units of time. It is smooth, strictly increasing and
//! strictly convex with `μ(0) = 0`, so the depletion time `h = μ⁻¹` is well
//! defined on `[0, ∞)`. `h` is available in three forms: an exact Lambert-W
//! expression at `r = 0`, a Lambert-W approximation for small `r`, and a
//! safeguarded Newton inversion that works for every admissible `r`.

use crate::error::{domain, Error, Result};
use crate::model::ModelParams;
use crate::special::wm1_branch_offset;

/// How a [`DepletionTime`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DepletionMethod {
    ExactZeroRate,
    ApproxSmallRate,
    Numeric,
}

impl DepletionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DepletionMethod::ExactZeroRate => "exact_r0",
            DepletionMethod::ApproxSmallRate => "approx_small_r",
            DepletionMethod::Numeric => "numeric",
        }
    }
}

/// Time `T ≥ 0` after which initial assets are exhausted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepletionTime {
    pub time: f64,
    pub method: DepletionMethod,
}

/// `μ(T)`.
///
/// For `r > 0` this is
/// `γy/(r(γ−1)+ρ)·e^{(ρ−r)T/γ} − y/r + e^{−rT}(y/r − γy/(r(γ−1)+ρ))`,
/// regrouped around `expm1` so it stays accurate as `r → 0`; at
/// `r ≤` [`R_SWITCH`](crate::model::R_SWITCH) it is `(y/b)e^{bT} − yT − y/b`.
pub fn mu(params: &ModelParams, t: f64) -> Result<f64> {
    check_time("mu", t)?;
    Ok(mu_unchecked(params, t))
}

pub(crate) fn mu_unchecked(params: &ModelParams, t: f64) -> f64 {
    let y = params.y();
    if params.is_zero_rate() {
        let b = params.derived().b;
        (y / b) * (b * t).exp_m1() - y * t
    } else {
        let r = params.r();
        let k = y / params.derived().b_r;
        let g = params.growth();
        k * (-r * t).exp() * ((g + r) * t).exp_m1() + y * (-r * t).exp_m1() / r
    }
}

/// `μ'(T) = y·d_r·(e^{(ρ−r)T/γ} − e^{−rT})`.
pub fn mu_prime(params: &ModelParams, t: f64) -> Result<f64> {
    check_time("mu_prime", t)?;
    Ok(mu_prime_unchecked(params, t))
}

pub(crate) fn mu_prime_unchecked(params: &ModelParams, t: f64) -> f64 {
    let y = params.y();
    if params.is_zero_rate() {
        y * (params.derived().b * t).exp_m1()
    } else {
        let r = params.r();
        let g = params.growth();
        y * params.derived().d_r * (-r * t).exp() * ((g + r) * t).exp_m1()
    }
}

fn check_time(what: &'static str, t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(what, t, "[0, inf)"))
    }
}

fn check_assets(what: &'static str, a: f64) -> Result<()> {
    if a >= 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(domain(what, a, "[0, inf)"))
    }
}

const NEWTON_MAX_ITER: usize = 200;

/// `h(a; y)` by safeguarded Newton iteration on `μ(T) = a`.
///
/// The bracket starts at `[0, 1]` and doubles until it contains the root.
/// Newton steps that leave the bracket, or a vanishing `μ'`, fall back to
/// bisection. Since `μ(T) ≈ y·(ρ−r)/γ·T²/2` near zero, the iteration is
/// seeded at `√(2a/(y(ρ−r)/γ))`.
pub fn h_numeric(params: &ModelParams, a: f64) -> Result<DepletionTime> {
    check_assets("h_numeric", a)?;
    let numeric = |time| DepletionTime {
        time,
        method: DepletionMethod::Numeric,
    };
    if a == 0.0 {
        return Ok(numeric(0.0));
    }
    let y = params.y();
    let tol = 1e-12 * a.max(y);

    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while mu_unchecked(params, hi) < a {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() || hi > 1e12 {
            return Err(Error::Convergence {
                what: "h_numeric bracket",
                iterations: 0,
            });
        }
    }

    let mut t = (2.0 * a / (y * params.growth())).sqrt();
    if !(t > lo && t < hi) {
        t = 0.5 * (lo + hi);
    }
    for _ in 0..NEWTON_MAX_ITER {
        let f = mu_unchecked(params, t) - a;
        if f == 0.0 {
            return Ok(numeric(t));
        }
        if f < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let fp = mu_prime_unchecked(params, t);
        let mut next = t - f / fp;
        if !(fp > 0.0) || !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - t).abs();
        t = next;
        if step <= 1e-14 * t || hi - lo <= 1e-14 * hi {
            if (mu_unchecked(params, t) - a).abs() <= tol {
                return Ok(numeric(t));
            }
            break;
        }
    }
    Err(Error::Convergence {
        what: "h_numeric",
        iterations: NEWTON_MAX_ITER,
    })
}

/// Argument `f(a; y) = −e^{−(b/y)(a + γy/ρ)}` of `W₋₁` in the exact `r = 0`
/// depletion time. It underflows to `−0` once `ρa/(γy)` exceeds ~700.
pub fn lambert_argument(params: &ModelParams, a: f64) -> f64 {
    let d = params.derived();
    -(-(d.b / params.y()) * (a + params.gamma() * params.y() / params.rho())).exp()
}

/// Argument `f_r(a; y) = −e^{−(b_r/y)(a + y/b_r)}` of the small-rate form.
pub fn lambert_argument_small_r(params: &ModelParams, a: f64) -> f64 {
    let d = params.derived();
    -(-(d.b_r / params.y()) * d.c_r(a, params.y())).exp()
}

/// Solves `(y/b_r)·e^{b_r d_r T} = d_r y T + a + y/b_r` for `T`.
///
/// With `w = W₋₁(−e^{−1−b_r a/y})` the root is
/// `T = −(a + y/b_r)/(d_r y) − w/(b_r d_r)`; using `w·eʷ = f` that equals
/// `ln(−w)/(b_r d_r)`, which is what gets evaluated here (no cancellation
/// between the two large terms when `a ≫ y`).
fn lambert_depletion(a: f64, y: f64, b_r: f64, d_r: f64) -> Result<f64> {
    let u = wm1_branch_offset(b_r * a / y)?;
    Ok(u.ln_1p() / (b_r * d_r))
}

/// Exact depletion time at `r = 0`:
/// `h(a; y) = −(a + γy/ρ)/y − (γ/ρ)·W₋₁(f(a; y))`.
pub fn h_closed_r0(params: &ModelParams, a: f64) -> Result<DepletionTime> {
    if params.r() != 0.0 {
        return Err(Error::RequiresZeroRate {
            what: "h_closed_r0",
            r: params.r(),
        });
    }
    check_assets("h_closed_r0", a)?;
    let d = params.derived();
    Ok(DepletionTime {
        time: lambert_depletion(a, params.y(), d.b_r, d.d_r)?,
        method: DepletionMethod::ExactZeroRate,
    })
}

/// Small-`r` closed-form approximation
/// `h(a; y) ≈ −(a + y/b_r)/(d_r y) − W₋₁(f_r(a; y))/(b_r d_r)`.
///
/// Drops the `o(r)` remainder of `e^{−rT}`; coincides with
/// [`h_closed_r0`] when `r = 0`.
pub fn h_approx_small_r(params: &ModelParams, a: f64) -> Result<DepletionTime> {
    check_assets("h_approx_small_r", a)?;
    let d = params.derived();
    Ok(DepletionTime {
        time: lambert_depletion(a, params.y(), d.b_r, d.d_r)?,
        method: DepletionMethod::ApproxSmallRate,
    })
}

/// Best available depletion time: exact at `r = 0`, numeric otherwise.
pub fn h_best(params: &ModelParams, a: f64) -> Result<DepletionTime> {
    if params.r() == 0.0 {
        h_closed_r0(params, a)
    } else {
        h_numeric(params, a)
    }
}

/// One point `(kΔ, μ(kΔ))` of a discrete depletion sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub t: f64,
    pub assets: f64,
}

/// Depletion levels on the lattice `T = kΔ`, `k = 0, 1, …`, starting at
/// `μ(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSequence {
    delta: f64,
    knots: Vec<Knot>,
}

impl KnotSequence {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.knots.windows(2).all(|w| w[1].assets > w[0].assets)
    }

    /// Piecewise-linear interpolation in `T`; `None` beyond the last knot.
    pub fn interpolate(&self, t: f64) -> Option<f64> {
        if !(t >= 0.0) {
            return None;
        }
        let pos = t / self.delta;
        let k = pos.floor() as usize;
        if k + 1 >= self.knots.len() {
            return (k + 1 == self.knots.len() && pos == k as f64).then(|| self.knots[k].assets);
        }
        let frac = pos - k as f64;
        let (lo, hi) = (self.knots[k].assets, self.knots[k + 1].assets);
        Some(lo + frac * (hi - lo))
    }
}

fn check_lattice(delta: f64, n_knots: usize) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain("knot lattice step", delta, "(0, inf)"));
    }
    if n_knots == 0 {
        return Err(Error::InvalidArgument("n_knots must be at least 1".into()));
    }
    Ok(())
}

/// `ln((1+rΔ)/(1+ρΔ))`, negative under impatience.
fn log_gross_ratio(params: &ModelParams, delta: f64) -> f64 {
    (params.r() * delta).ln_1p() - (params.rho() * delta).ln_1p()
}

/// Discrete-time depletion sequence from the implicit recursion
///
/// `μ(T) + (Δy − μ(T−Δ))/(1 + rΔ) = ((1+rΔ)/(1+ρΔ))^{−T/(γΔ)}·Δy`,
///
/// solved forward from `μ(0) = 0` for `k = 0..=n_knots`.
pub fn mu_discrete(params: &ModelParams, delta: f64, n_knots: usize) -> Result<KnotSequence> {
    check_lattice(delta, n_knots)?;
    let dy = delta * params.y();
    let gross = 1.0 + params.r() * delta;
    let lg = log_gross_ratio(params, delta);
    let mut knots = Vec::with_capacity(n_knots + 1);
    knots.push(Knot { t: 0.0, assets: 0.0 });
    let mut prev = 0.0;
    for k in 1..=n_knots {
        let rhs = dy * (-(k as f64) * lg / params.gamma()).exp();
        let next = rhs - (dy - prev) / gross;
        knots.push(Knot {
            t: k as f64 * delta,
            assets: next,
        });
        prev = next;
    }
    Ok(KnotSequence { delta, knots })
}

/// Depletion sequence consistent with the period budget
/// `a' = (1 + rΔ)a + Δ(y − c)` and Euler growth
/// `c_{j+1}/c_j = ((1+rΔ)/(1+ρΔ))^{1/γ}`:
///
/// `μ(kΔ) = (Δy·(((1+rΔ)/(1+ρΔ))^{−k/γ} − 1) + μ((k−1)Δ))/(1 + rΔ)`.
///
/// Identical to [`mu_discrete`] at `r = 0`. For `r > 0` the implicit
/// recursion discounts the consumption term one period less than this
/// budget does, which shifts the knots by `O(rΔ)`.
pub fn mu_discrete_budget(
    params: &ModelParams,
    delta: f64,
    n_knots: usize,
) -> Result<KnotSequence> {
    check_lattice(delta, n_knots)?;
    let dy = delta * params.y();
    let gross = 1.0 + params.r() * delta;
    let lg = log_gross_ratio(params, delta);
    let mut knots = Vec::with_capacity(n_knots + 1);
    knots.push(Knot { t: 0.0, assets: 0.0 });
    let mut prev = 0.0;
    for k in 1..=n_knots {
        let excess = dy * (-(k as f64) * lg / params.gamma()).exp_m1();
        let next = (excess + prev) / gross;
        knots.push(Knot {
            t: k as f64 * delta,
            assets: next,
        });
        prev = next;
    }
    Ok(KnotSequence { delta, knots })
}
