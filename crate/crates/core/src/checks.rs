//! Acceptance suite: every closed form against its numerical oracle.
//!
//! Each [`CheckOutcome`] carries the measured quantity and the bound it is
//! held to, so a run prints one self-explanatory line per check.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::consumption::{
    consumption_now_r0, derivatives, discrete_policy, hessian_closed, jacobian_closed,
};
use crate::depletion::{h_best, h_numeric, lambert_argument, mu, mu_discrete, mu_discrete_budget};
use crate::error::{Error, Result};
use crate::figures::{figure1, figure2, figure2_max_rel_gap, DEFAULT_POINTS, DEFAULT_RANGE};
use crate::model::{value_upper_bound, ModelParams};
use crate::special::{lambert_w0, lambert_wm1, BRANCH_POINT};
use crate::sweep::{Spacing, SweepSpec};
use crate::validation::{
    approximation_error_report, asset_grid, fd_gradient, fd_hessian, grid_dp, pdv_utility,
    perturbation_check, simulate_assets, FdSteps,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(Error::InvalidArgument(format!(
                "unknown level '{other}' (expected quick or full)"
            ))),
        }
    }
}

/// What a measurement is compared with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Below(f64),
    Above(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn holds(&self, x: f64) -> bool {
        match *self {
            Bound::AtMost(b) => x <= b,
            Bound::AtLeast(b) => x >= b,
            Bound::Below(b) => x < b,
            Bound::Above(b) => x > b,
            Bound::Within(lo, hi) => x >= lo && x <= hi,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Bound::AtMost(b) => write!(f, "<= {b:.3e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:.3e}"),
            Bound::Below(b) => write!(f, "< {b:.3e}"),
            Bound::Above(b) => write!(f, "> {b:.3e}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub criterion: u8,
    pub id: String,
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
    pub passed: bool,
    /// Reported but excluded from the overall verdict.
    pub advisory: bool,
    pub note: Option<String>,
}

impl CheckOutcome {
    fn new(criterion: u8, id: &str, name: &str, measured: f64, bound: Bound) -> Self {
        Self {
            criterion,
            id: id.to_string(),
            name: name.to_string(),
            measured,
            bound,
            passed: bound.holds(measured),
            advisory: false,
            note: None,
        }
    }

    fn advisory(mut self, note: &str) -> Self {
        self.advisory = true;
        self.note = Some(note.to_string());
        self
    }

    fn failed(criterion: u8, id: &str, name: &str, err: &Error) -> Self {
        Self {
            criterion,
            id: id.to_string(),
            name: name.to_string(),
            measured: f64::NAN,
            bound: Bound::AtMost(f64::NAN),
            passed: false,
            advisory: false,
            note: Some(err.to_string()),
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.passed, self.advisory) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (advisory)",
        };
        write!(
            f,
            "{status} [{}] {}: measured={:.6e} required {}",
            self.id, self.name, self.measured, self.bound
        )?;
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub level: Level,
    /// Relative residual required of both Lambert W branches.
    pub lambert_residual_tol: f64,
}

impl CheckConfig {
    pub fn new(level: Level) -> Self {
        Self {
            level,
            lambert_residual_tol: 1e-13,
        }
    }
}

/// True when every non-advisory outcome passed.
pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    !outcomes.is_empty() && outcomes.iter().all(|o| o.passed || o.advisory)
}

/// Runs criteria 1 to 9.
pub fn run_all(params: &ModelParams, config: &CheckConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for criterion in 1..=9 {
        out.extend(run_criterion(criterion, params, config));
    }
    out
}

/// Runs a single criterion; an internal error becomes a failed outcome.
pub fn run_criterion(criterion: u8, params: &ModelParams, config: &CheckConfig) -> Vec<CheckOutcome> {
    let result = match criterion {
        1 => lambert_kernel(config),
        2 => closed_vs_numeric(params),
        3 => jacobian(params),
        4 => hessian(params),
        5 => feasibility(params),
        6 => value_bound(params),
        7 => small_rate(params),
        8 => discrete_model(params, config),
        9 => figure_shapes(params),
        _ => Err(Error::InvalidArgument(format!("no criterion {criterion}"))),
    };
    result.unwrap_or_else(|e| vec![CheckOutcome::failed(criterion, &format!("{criterion}"), "criterion", &e)])
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn zero_rate(params: &ModelParams) -> Result<ModelParams> {
    Ok(params.with_rate(0.0)?)
}

fn rel(x: f64, reference: f64) -> f64 {
    ((x - reference) / reference).abs()
}

const LAMBERT_POINTS: usize = 10_000;

fn lambert_kernel(config: &CheckConfig) -> Result<Vec<CheckOutcome>> {
    let start = Instant::now();
    let tol = config.lambert_residual_tol;
    let x_min = BRANCH_POINT.x_min;
    // half the points log-spaced towards 0⁻, half towards the branch point
    let half = LAMBERT_POINTS / 2;
    let mut xs: Vec<f64> = log_grid(1e-12, -x_min * (1.0 - 1e-12), half)
        .into_iter()
        .map(|v| -v)
        .collect();
    xs.extend(log_grid(1e-12, -x_min - 1e-12, half).into_iter().map(|d| x_min + d));
    let mut wm1_res = 0.0_f64;
    for &x in &xs {
        let w = lambert_wm1(x)?;
        wm1_res = wm1_res.max((w * w.exp() - x).abs() / x.abs());
    }
    let mut w0_res = 0.0_f64;
    for i in 0..LAMBERT_POINTS {
        let x = x_min + (10.0 - x_min) * i as f64 / (LAMBERT_POINTS - 1) as f64;
        let w = lambert_w0(x)?;
        w0_res = w0_res.max((w * w.exp() - x).abs() / x.abs().max(1e-300));
    }
    let mut round_trip = 0.0_f64;
    for i in 0..LAMBERT_POINTS {
        let w = -1.0 - 49.0 * i as f64 / (LAMBERT_POINTS - 1) as f64;
        round_trip = round_trip.max((lambert_wm1(w * w.exp())? - w).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(vec![
        CheckOutcome::new(1, "1a", "W-1 relative residual on (-1/e, 0)", wm1_res, Bound::AtMost(tol)),
        CheckOutcome::new(1, "1b", "W0 relative residual on [-1/e, 10]", w0_res, Bound::AtMost(tol)),
        CheckOutcome::new(1, "1c", "W-1 round trip on [-50, -1]", round_trip, Bound::AtMost(1e-12)),
        CheckOutcome::new(1, "1d", "Lambert kernel runtime [s]", elapsed, Bound::Below(1.0)),
    ])
}

fn closed_vs_numeric(params: &ModelParams) -> Result<Vec<CheckOutcome>> {
    let p = zero_rate(params)?;
    let y = p.y();
    let mut gap = 0.0_f64;
    for ay in log_grid(1e-6, 1e6, 200) {
        let a = ay * y;
        let numeric = y * (p.growth() * h_numeric(&p, a)?.time).exp();
        gap = gap.max(rel(consumption_now_r0(&p, a)?, numeric));
    }
    // W₋₁ evaluated on the rounded argument f(a; y) itself, restricted to
    // a/y where f is a normal float. Rounding f costs about eps/|1 + W|
    // relative, which exceeds the tolerance as a/y → 0.
    let (mut identity, mut conditioned) = (0.0_f64, 0.0_f64);
    for ay in log_grid(1e-6, 1e3, 200) {
        let a = ay * y;
        let c = consumption_now_r0(&p, a)?;
        let err = rel(c, -y * lambert_wm1(lambert_argument(&p, a))?);
        identity = identity.max(err);
        let floor = f64::EPSILON * c / (c - y);
        if floor <= 0.1 * IDENTITY_TOL {
            conditioned = conditioned.max(err);
        }
    }
    Ok(vec![
        CheckOutcome::new(2, "2a", "closed form vs numeric inversion, a/y in [1e-6, 1e6]", gap, Bound::AtMost(1e-9)),
        CheckOutcome::new(2, "2b", "c* = -y W-1(f) identity, a/y in [1e-6, 1e3]", identity, Bound::AtMost(IDENTITY_TOL))
            .advisory("rounding of f is amplified by 1/|1+W| near the branch point"),
        CheckOutcome::new(2, "2c", "c* = -y W-1(f) identity where eps/|1+W| <= 1e-14", conditioned, Bound::AtMost(IDENTITY_TOL)),
    ])
}

const IDENTITY_TOL: f64 = 1e-13;

fn consumption_field(p: &ModelParams) -> impl Fn(f64, f64) -> f64 + '_ {
    move |a, y| {
        p.with_income(y)
            .map_err(Error::from)
            .and_then(|q| consumption_now_r0(&q, a))
            .unwrap_or(f64::NAN)
    }
}

fn jacobian(params: &ModelParams) -> Result<Vec<CheckOutcome>> {
    let p = zero_rate(params)?;
    let y = p.y();
    let f = consumption_field(&p);
    let (mut fd_err, mut min_entry, mut euler) = (0.0_f64, f64::INFINITY, 0.0_f64);
    for ay in log_grid(1e-3, 1e3, 121) {
        let a = ay * y;
        let (ca, cy) = jacobian_closed(&p, a)?;
        let (fa, fy) = fd_gradient(&f, (a, y), FdSteps::gradient((a, y)));
        fd_err = fd_err.max(rel(fa, ca)).max(rel(fy, cy));
        min_entry = min_entry.min(ca).min(cy);
        euler = euler.max(rel(a * ca + y * cy, consumption_now_r0(&p, a)?));
    }
    let (ca_far, _) = jacobian_closed(&p, 1e8 * y)?;
    let asym = (ca_far - p.derived().b).abs();
    Ok(vec![
        CheckOutcome::new(3, "3a", "Jacobian vs Richardson FD (relative)", fd_err, Bound::AtMost(1e-6)),
        CheckOutcome::new(3, "3b", "smallest Jacobian entry", min_entry, Bound::Above(0.0)),
        CheckOutcome::new(3, "3c", "Euler identity a c_a + y c_y = c (relative)", euler, Bound::AtMost(1e-10)),
        CheckOutcome::new(3, "3d", "|c_a(1e8 y) - rho/gamma|", asym, Bound::AtMost(1e-4)),
    ])
}

fn hessian(params: &ModelParams) -> Result<Vec<CheckOutcome>> {
    let p = zero_rate(params)?;
    let y = p.y();
    let f = consumption_field(&p);
    let (mut fd_err, mut sign_violations, mut det) = (0.0_f64, 0usize, 0.0_f64);
    for ay in log_grid(1e-3, 1e3, 121) {
        let a = ay * y;
        let (haa, hay, hyy) = hessian_closed(&p, a)?;
        let (faa, fay, fyy) = fd_hessian(&f, (a, y), FdSteps::hessian((a, y)));
        fd_err = fd_err.max(rel(faa, haa)).max(rel(fay, hay)).max(rel(fyy, hyy));
        if !(haa < 0.0 && hay > 0.0 && hyy < 0.0) {
            sign_violations += 1;
        }
        det = det.max(derivatives(&p, a)?.relative_determinant());
    }
    // cross differences on a 50×50 grid of (a, y)
    let mut min_cross = f64::INFINITY;
    for a in log_grid(1e-2, 1e3, 50) {
        for yy in log_grid(0.1, 30.0, 50) {
            let (h, k) = (1e-2 * a, 1e-2 * yy);
            let cross = f(a + h, yy + k) - f(a + h, yy) - f(a, yy + k) + f(a, yy);
            min_cross = min_cross.min(cross / (h * k));
        }
    }
    Ok(vec![
        CheckOutcome::new(4, "4a", "Hessian vs second-order FD (relative)", fd_err, Bound::AtMost(1e-4)),
        CheckOutcome::new(4, "4b", "sign pattern (-, +, -) violations", sign_violations as f64, Bound::AtMost(0.0)),
        CheckOutcome::new(4, "4c", "relative Hessian determinant", det, Bound::AtMost(1e-12)),
        CheckOutcome::new(4, "4d", "min scaled cross-difference on 50x50 (a, y)", min_cross, Bound::Above(0.0)),
    ])
}

fn feasibility(params: &ModelParams) -> Result<Vec<CheckOutcome>> {
    let start = Instant::now();
    let p = zero_rate(params)?;
    let a0 = 3.0;
    let t = h_best(&p, a0)?.time;
    let path = simulate_assets(&p, a0, t / 1e4)?;
    let terminal = path.assets_at_depletion().abs() / a0;
    let observed = path
        .depletion_time_observed
        .map(|obs| rel(obs, t))
        .unwrap_or(f64::INFINITY);
    let mut mid = 0.0_f64;
    for j in 1..=10 {
        let s = path.nearest_sample(j as f64 * t / 11.0);
        mid = mid.max(rel(s.assets, mu(&p, t - s.t)?));
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(vec![
        CheckOutcome::new(5, "5a", "|a(T)| / a0 after RK4", terminal, Bound::AtMost(1e-6)),
        CheckOutcome::new(5, "5b", "observed depletion time vs h(a0) (relative)", observed, Bound::AtMost(1e-5)),
        CheckOutcome::new(5, "5c", "a(t) = mu(T - t) at 10 checkpoints (relative)", mid, Bound::AtMost(1e-6)),
        CheckOutcome::new(5, "5d", "RK4 runtime [s]", elapsed, Bound::Below(1.0)),
    ])
}

fn value_bound(params: &ModelParams) -> Result<Vec<CheckOutcome>> {
    let mut excess = f64::NEG_INFINITY;
    for k in [0.1, 1.0, 3.0, 10.0, 100.0] {
        let a0 = k * params.y();
        excess = excess.max(pdv_utility(params, a0)? - value_upper_bound(params, a0)?);
    }
    let report = perturbation_check(params, 3.0, 0.05, 10, 2024)?;
    Ok(vec![
        CheckOutcome::new(6, "6a", "max pdv_utility - value bound over a0/y in {0.1..100}", excess, Bound::Below(0.0)),
        CheckOutcome::new(6, "6b", "min utility loss of 10 perturbed feasible paths", report.min_margin(), Bound::Above(0.0)),
    ])
}

/// Asset grid of the small-rate report: 0 plus 400 log-spaced points of
/// `a/y ∈ [1e-6, 100]`.
pub fn small_rate_grid(y: f64) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(log_grid(1e-6, 100.0, 400).into_iter().map(|v| v * y))
        .collect()
}

pub const SMALL_RATES: [f64; 3] = [0.02, 0.01, 0.005];

fn small_rate(params: &ModelParams) -> Result<Vec<CheckOutcome>> {
    let grid = small_rate_grid(params.y());
    let zero = approximation_error_report(params, &[0.0], &grid)?;
    let rows = approximation_error_report(params, &SMALL_RATES, &grid)?;
    let at_zero = approximation_error_report(params, &SMALL_RATES, &[0.0])?;
    let mut out = vec![CheckOutcome::new(
        7,
        "7a",
        "r = 0 row max gap",
        zero[0].max_rel_gap,
        Bound::AtMost(0.0),
    )];
    for (i, w) in rows.windows(2).enumerate() {
        out.push(CheckOutcome::new(
            7,
            &format!("7b{}", i + 1),
            &format!(
                "max-gap ratio r={} / r={} ({:.4e} / {:.4e})",
                w[0].r, w[1].r, w[0].max_rel_gap, w[1].max_rel_gap
            ),
            w[0].max_rel_gap / w[1].max_rel_gap,
            Bound::Within(1.5, 3.0),
        ));
    }
    let gap0 = at_zero.iter().map(|r| r.max_rel_gap).fold(0.0, f64::max);
    out.push(CheckOutcome::new(7, "7c", "gap at a = 0 over all r", gap0, Bound::AtMost(0.0)));
    Ok(out)
}

fn discrete_model(params: &ModelParams, config: &CheckConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for (id, name, seq) in [
        ("8a", "implicit-recursion knots", mu_discrete(params, 1.0, 60)?),
        ("8b", "budget-recursion knots", mu_discrete_budget(params, 1.0, 60)?),
    ] {
        let knots = seq.knots();
        let min_step = knots
            .windows(2)
            .map(|w| w[1].assets - w[0].assets)
            .fold(f64::INFINITY, f64::min);
        let measured = if knots[0].assets == 0.0 { min_step } else { f64::NAN };
        out.push(CheckOutcome::new(
            8,
            id,
            &format!("{name} at delta=1: mu(0)=0 and min increment"),
            measured,
            Bound::Above(0.0),
        ));
    }

    let start = Instant::now();
    let nodes = match config.level {
        Level::Quick => 500,
        Level::Full => 2000,
    };
    let a_max = 10.0 * params.y();
    let grid = asset_grid(params.y(), a_max, nodes)?;
    let dp = grid_dp(params, 1.0, &grid)?;
    let elapsed = start.elapsed().as_secs_f64();
    let policy = discrete_policy(params, 1.0, a_max)?;
    let mut sup = 0.0_f64;
    for (a, c) in dp.asset_grid.iter().zip(&dp.policy) {
        sup = sup.max((policy.evaluate(*a)? - c).abs());
    }
    out.push(CheckOutcome::new(
        8,
        "8c",
        &format!("grid DP ({nodes} nodes, delta=1) vs piecewise-linear policy, sup / y"),
        sup / params.y(),
        Bound::AtMost(2e-3),
    ));
    out.push(CheckOutcome::new(8, "8d", "grid DP runtime [s]", elapsed, Bound::Below(120.0)));

    let p0 = zero_rate(params)?;
    let gaps = [0.5, 0.1, 0.02]
        .iter()
        .map(|&delta| {
            let pol = discrete_policy(&p0, delta, a_max)?;
            (0..=600).try_fold(0.0_f64, |acc, i| {
                let a = a_max * i as f64 / 600.0;
                Ok::<f64, Error>(acc.max((pol.evaluate(a)? - consumption_now_r0(&p0, a)?).abs()))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst_ratio = gaps.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    out.push(CheckOutcome::new(
        8,
        "8e",
        &format!(
            "r=0 policy gap for delta 0.5, 0.1, 0.02 ({:.3e}, {:.3e}, {:.3e}): worst ratio",
            gaps[0], gaps[1], gaps[2]
        ),
        worst_ratio,
        Bound::Below(1.0),
    ));
    Ok(out)
}

/// Parameters used for the figure checks: the given ones when `r > 0`,
/// otherwise the same `ρ, γ, y` at `r = 0.01`.
pub fn figure_params(params: &ModelParams) -> Result<ModelParams> {
    if params.r() > 0.0 {
        Ok(*params)
    } else {
        Ok(params.with_rate(0.01)?)
    }
}

pub fn default_figure_spec() -> SweepSpec {
    SweepSpec::new(DEFAULT_RANGE.0, DEFAULT_RANGE.1, DEFAULT_POINTS, Spacing::Linear, true)
        .expect("default figure range is valid")
}

fn figure_shapes(params: &ModelParams) -> Result<Vec<CheckOutcome>> {
    let p = figure_params(params)?;
    let spec = default_figure_spec();
    let f1 = figure1(&p, &spec, 1.0)?;
    let origin = f1
        .rows
        .iter()
        .find(|r| r[0] == 0.0)
        .ok_or_else(|| Error::InvalidArgument("figure 1 has no a = 0 row".into()))?;
    let f2 = figure2(&p, &spec)?;
    let report = approximation_error_report(&p, &[p.r()], &small_rate_grid(p.y()))?;
    Ok(vec![
        CheckOutcome::new(9, "9a", "figure 1 gap at a=0, (unconstrained - constrained) / y", origin[2] - origin[1], Bound::AtLeast(0.1)),
        CheckOutcome::new(9, "9b", "figure 2 max relative gap vs small-rate report", figure2_max_rel_gap(&f2), Bound::AtMost(report[0].max_rel_gap)),
    ])
}
