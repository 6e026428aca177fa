//! Value iteration for the discrete-time consumer problem
//!
//! `V(a) = max_c Δu(c) + V((1+rΔ)a + Δ(y−c))/(1+ρΔ)`, `0 ≤ a' ≤ a_max`.

use rayon::prelude::*;

use super::interp::{golden_section_max, Pchip};
use crate::error::{domain, Error, Result};
use crate::model::{crra_utility, ModelParams};

const MAX_ITER: usize = 100_000;
const VALUE_TOL: f64 = 1e-10;

/// Asset grid on `[0, a_max]`: uniform on `[0, y]`, geometric above, with
/// node density below `y` five times the average density above it.
pub fn asset_grid(y: f64, a_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(y > 0.0 && a_max > y) {
        return Err(domain("asset_grid a_max", a_max, "(y, inf)"));
    }
    if n < 4 {
        return Err(Error::InvalidArgument("asset_grid needs at least 4 nodes".into()));
    }
    let low = 5.0 * y;
    let n_low = ((n as f64 * low / (low + (a_max - y))).round() as usize).clamp(2, n - 2);
    let n_high = n - n_low;
    let mut grid: Vec<f64> = (0..n_low).map(|i| y * i as f64 / n_low as f64).collect();
    let ratio = a_max / y;
    grid.extend((0..=n_high - 1).map(|j| y * ratio.powf(j as f64 / (n_high - 1) as f64)));
    *grid.last_mut().unwrap() = a_max;
    Ok(grid)
}

/// Converged value iteration on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub asset_grid: Vec<f64>,
    pub policy: Vec<f64>,
    pub value: Vec<f64>,
    pub iterations: usize,
    /// Final `max_i |V_{n+1}(a_i) − V_n(a_i)| / (1 + |V_n(a_i)|)`.
    pub sup_norm_residual: f64,
}

impl DpSolution {
    /// Policy at `a`, linear between grid nodes.
    pub fn policy_at(&self, a: f64) -> f64 {
        let g = &self.asset_grid;
        let n = g.len();
        let a = a.clamp(g[0], g[n - 1]);
        let i = g.partition_point(|&v| v <= a).clamp(1, n - 1) - 1;
        let s = (a - g[i]) / (g[i + 1] - g[i]);
        self.policy[i] + s * (self.policy[i + 1] - self.policy[i])
    }

    /// Largest second divided difference of the value function (≤ 0 for a
    /// concave value).
    pub fn max_value_curvature(&self) -> f64 {
        let (g, v) = (&self.asset_grid, &self.value);
        (1..g.len() - 1)
            .map(|i| {
                let l = (v[i] - v[i - 1]) / (g[i] - g[i - 1]);
                let r = (v[i + 1] - v[i]) / (g[i + 1] - g[i]);
                (r - l) / (0.5 * (g[i + 1] - g[i - 1]))
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Solves the Bellman equation on `a_grid` (sorted, starting at 0).
///
/// Each sweep maximizes over consumption by golden-section search on
/// `[max(1e-6·y, ((1+rΔ)a + Δy − a_max)/Δ), ((1+rΔ)a + Δy)/Δ]` with the
/// continuation value interpolated by [`Pchip`], and stops when the
/// relative sup-norm change falls to `1e-10`.
pub fn grid_dp(params: &ModelParams, delta: f64, a_grid: &[f64]) -> Result<DpSolution> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain("grid_dp delta", delta, "(0, inf)"));
    }
    if a_grid.len() < 3 || a_grid[0] != 0.0 || !a_grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidArgument(
            "grid_dp needs a strictly increasing grid of at least 3 nodes starting at 0".into(),
        ));
    }
    let (r, y, gamma) = (params.r(), params.y(), params.gamma());
    let a_max = *a_grid.last().unwrap();
    let beta = 1.0 / (1.0 + params.rho() * delta);
    let gross = 1.0 + r * delta;
    let c_floor = 1e-6 * y;
    let u = |c: f64| crra_utility(c, gamma).unwrap_or(f64::NEG_INFINITY);

    let mut value: Vec<f64> = a_grid
        .iter()
        .map(|&a| delta * u(y + params.rho() * a) / (1.0 - beta))
        .collect();
    let mut policy = vec![y; a_grid.len()];
    for iteration in 1..=MAX_ITER {
        let cont = Pchip::new(a_grid.to_vec(), value.clone())?;
        let updated: Vec<(f64, f64)> = a_grid
            .par_iter()
            .map(|&a| {
                let cash = gross * a + delta * y;
                let hi = cash / delta;
                let lo = c_floor.max((cash - a_max) / delta).min(hi);
                let objective = |c: f64| delta * u(c) + beta * cont.eval(cash - delta * c);
                golden_section_max(objective, lo, hi, 1e-10 * hi)
            })
            .collect();
        let mut residual = 0.0_f64;
        for (i, &(c, v)) in updated.iter().enumerate() {
            residual = residual.max((v - value[i]).abs() / (1.0 + value[i].abs()));
            value[i] = v;
            policy[i] = c;
        }
        if residual <= VALUE_TOL {
            return Ok(DpSolution {
                asset_grid: a_grid.to_vec(),
                policy,
                value,
                iterations: iteration,
                sup_norm_residual: residual,
            });
        }
    }
    Err(Error::Convergence {
        what: "grid_dp",
        iterations: MAX_ITER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = asset_grid(3.0, 30.0, 2000).unwrap();
        assert_eq!(g.len(), 2000);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 30.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let below = g.iter().filter(|&&a| a < 3.0).count() as f64;
        let above = g.len() as f64 - below;
        let density_ratio = (below / 3.0) / (above / 27.0);
        assert!((density_ratio - 5.0).abs() < 0.1, "{density_ratio}");
        assert!(asset_grid(3.0, 2.0, 100).is_err());
    }

    #[test]
    fn small_problem_properties() {
        let p = ModelParams::figure();
        let grid = asset_grid(p.y(), 20.0, 300).unwrap();
        let sol = grid_dp(&p, 1.0, &grid).unwrap();
        assert!((sol.policy[0] - p.y()).abs() < 1e-6 * p.y());
        assert!(sol.policy.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!(sol.value.windows(2).all(|w| w[1] > w[0]));
        assert!(sol.max_value_curvature() <= 1e-9);
        assert!(sol.sup_norm_residual <= 1e-10);
        for (a, c) in sol.asset_grid.iter().zip(&sol.policy) {
            let cash = (1.0 + p.r()) * a + p.y();
            assert!(*c > 0.0 && *c <= cash + 1e-12);
        }
        assert!((sol.policy_at(0.0) - sol.policy[0]).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        let p = ModelParams::figure();
        assert!(grid_dp(&p, 1.0, &[0.0, 1.0]).is_err());
        assert!(grid_dp(&p, 1.0, &[0.5, 1.0, 2.0]).is_err());
        assert!(grid_dp(&p, 0.0, &[0.0, 1.0, 2.0]).is_err());
    }
}
