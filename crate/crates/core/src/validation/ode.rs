//! Fixed-step RK4 integration of the budget equation `ȧ = ra + y − c(t)`.

use crate::depletion::h_best;
use crate::error::{domain, Error, Result};
use crate::model::ModelParams;

/// One classical fourth-order Runge–Kutta step of `ẋ = f(t, x)`.
pub fn rk4_step<F: Fn(f64, f64) -> f64>(f: &F, t: f64, x: f64, dt: f64) -> f64 {
    let k1 = f(t, x);
    let k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1);
    let k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2);
    let k4 = f(t + dt, x + dt * k3);
    x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub assets: f64,
    pub consumption: f64,
}

/// Simulated asset trajectory under the closed-form consumption path.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetPath {
    pub dt: f64,
    pub samples: Vec<PathSample>,
    /// Depletion time the consumption path was built from.
    pub depletion_time: f64,
    /// First time the simulated assets reach the tolerance band around zero,
    /// linearly interpolated between samples.
    pub depletion_time_observed: Option<f64>,
    /// Half-width of the band around zero that counts as depleted.
    pub tol_path: f64,
}

impl AssetPath {
    /// Sample whose time is closest to `t`.
    pub fn nearest_sample(&self, t: f64) -> &PathSample {
        let idx = self.samples.partition_point(|s| s.t < t);
        match idx {
            0 => &self.samples[0],
            i if i >= self.samples.len() => &self.samples[self.samples.len() - 1],
            i => {
                let (lo, hi) = (&self.samples[i - 1], &self.samples[i]);
                if t - lo.t <= hi.t - t {
                    lo
                } else {
                    hi
                }
            }
        }
    }

    /// Assets at the sample placed exactly on the depletion time.
    pub fn assets_at_depletion(&self) -> f64 {
        self.nearest_sample(self.depletion_time).assets
    }

    /// `a(t) ≥ −tol_path` everywhere.
    pub fn is_feasible(&self) -> bool {
        self.samples.iter().all(|s| s.assets >= -self.tol_path)
    }
}

/// Integrates `ȧ = ra + y − c*(t)` from `a(0) = a0` until `T + 1`, with
/// `c*(t) = y·e^{(ρ−r)(T−t)/γ}` up to `T = h(a0)` and `y` afterwards.
///
/// Steps are shortened so that one sample lands exactly on `T`, where the
/// consumption path has a kink. Since `a(t)` touches zero quadratically at
/// `T`, depletion is detected as the first sample with
/// `a ≤ tol_path = 1e-10·max(a0, y)`.
pub fn simulate_assets(params: &ModelParams, a0: f64, dt: f64) -> Result<AssetPath> {
    if !(a0 > 0.0 && a0.is_finite()) {
        return Err(domain("simulate_assets a0", a0, "(0, inf)"));
    }
    let depletion = h_best(params, a0)?.time;
    if !(dt > 0.0 && dt <= depletion / 100.0) {
        return Err(Error::InvalidArgument(format!(
            "simulate_assets needs 0 < dt <= T/100 = {}, got {dt}",
            depletion / 100.0
        )));
    }
    let (r, y, g) = (params.r(), params.y(), params.growth());
    let consumption = |t: f64| {
        if t <= depletion {
            y * (g * (depletion - t)).exp()
        } else {
            y
        }
    };
    let rhs = |t: f64, a: f64| r * a + y - consumption(t);
    let tol_path = 1e-10 * a0.max(y);
    let end = depletion + 1.0;

    let capacity = (end / dt).ceil() as usize + 2;
    let mut samples = Vec::with_capacity(capacity);
    let (mut t, mut a) = (0.0_f64, a0);
    samples.push(PathSample {
        t,
        assets: a,
        consumption: consumption(t),
    });
    let mut observed = None;
    while t < end {
        let target = if t < depletion {
            (t + dt).min(depletion)
        } else {
            (t + dt).min(end)
        };
        // absorb a sliver shorter than 1e-9·dt into the current step
        let target = if depletion - target > 0.0 && depletion - target < 1e-9 * dt {
            depletion
        } else {
            target
        };
        let next = rk4_step(&rhs, t, a, target - t);
        if observed.is_none() && next <= tol_path {
            observed = Some(if a > next {
                t + (target - t) * (a / (a - next)).min(1.0)
            } else {
                target
            });
        }
        t = target;
        a = next;
        samples.push(PathSample {
            t,
            assets: a,
            consumption: consumption(t),
        });
    }
    Ok(AssetPath {
        dt,
        samples,
        depletion_time: depletion,
        depletion_time_observed: observed,
        tol_path,
    })
}
