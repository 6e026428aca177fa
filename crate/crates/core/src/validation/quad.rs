//! Discounted utility of consumption paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::depletion::h_best;
use crate::error::{domain, Error, Result};
use crate::model::ModelParams;

const DEFAULT_DEPTH: u32 = 50;
const PDV_TOL: f64 = 1e-10;

/// Adaptive Simpson quadrature with the usual `(S₂ − S₁)/15` correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64, max_depth: u32) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mid = 0.5 * (lo + hi);
    let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
    let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    simpson_step(f, lo, hi, flo, fmid, fhi, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    flo: f64,
    fmid: f64,
    fhi: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (lo + hi);
    let (lm, rm) = (0.5 * (lo + mid), 0.5 * (mid + hi));
    let (flm, frm) = (f(lm), f(rm));
    let left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    let right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth - 1)
        + simpson_step(f, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth - 1)
}

/// `∫₀^∞ e^{−ρt}u(c*(t))dt` for the optimal path from `a0`: quadrature on
/// `[0, T]` plus the closed-form tail `e^{−ρT}u(y)/ρ`.
pub fn pdv_utility(params: &ModelParams, a0: f64) -> Result<f64> {
    pdv_utility_with_depth(params, a0, DEFAULT_DEPTH)
}

/// [`pdv_utility`] with an explicit recursion limit for the quadrature.
pub fn pdv_utility_with_depth(params: &ModelParams, a0: f64, max_depth: u32) -> Result<f64> {
    if !(a0 >= 0.0 && a0.is_finite()) {
        return Err(domain("pdv_utility", a0, "[0, inf)"));
    }
    let depletion = h_best(params, a0)?.time;
    let (rho, y, g, gamma) = (params.rho(), params.y(), params.growth(), params.gamma());
    let u_y = params.utility(y)?;
    let tail = (-rho * depletion).exp() * u_y / rho;
    if depletion == 0.0 {
        return Ok(tail);
    }
    let integrand = |t: f64| {
        let c = y * (g * (depletion - t)).exp();
        (-rho * t).exp() * crate::model::crra_utility(c, gamma).unwrap_or(f64::NAN)
    };
    let head = adaptive_simpson(&integrand, 0.0, depletion, PDV_TOL, max_depth);
    Ok(head + tail)
}

/// One perturbed consumption path `λ·c*(t)·(1 + ε sin ωt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedPath {
    pub omega: f64,
    /// Scale `λ` that makes the path exactly exhaust the budget.
    pub scale: f64,
    pub pdv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub optimal: f64,
    pub perturbed: Vec<PerturbedPath>,
}

impl PerturbationReport {
    pub fn optimal_dominates(&self) -> bool {
        self.perturbed.iter().all(|p| self.optimal > p.pdv)
    }

    /// Smallest utility loss of any perturbed path.
    pub fn min_margin(&self) -> f64 {
        self.perturbed
            .iter()
            .map(|p| self.optimal - p.pdv)
            .fold(f64::INFINITY, f64::min)
    }
}

const CUMULATIVE_NODES: usize = 40_000;

/// Compares the optimal path from `a0` with `n` random feasible
/// perturbations `λ·c*(t)·(1 + eps·sin ωt)`, `ω` drawn from `[0.5, 5)`.
///
/// `λ = min_t B(t)/P(t)`, where `P(t) = ∫₀ᵗ e^{−rs}c(s)ds` is discounted
/// spending of the unscaled perturbation and `B(t) = a0 + ∫₀ᵗ e^{−rs}y ds`
/// the discounted resources, so the scaled path keeps `a(t) ≥ 0` and
/// touches zero somewhere.
pub fn perturbation_check(
    params: &ModelParams,
    a0: f64,
    eps: f64,
    n: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    if !(a0 > 0.0 && a0.is_finite()) {
        return Err(domain("perturbation_check a0", a0, "(0, inf)"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("perturbation size {eps} not in (0, 1)")));
    }
    let optimal = pdv_utility(params, a0)?;
    let depletion = h_best(params, a0)?.time;
    let (rho, r, y, g, gamma) = (params.rho(), params.r(), params.y(), params.growth(), params.gamma());
    let horizon = depletion + 40.0 / rho;
    let base = move |t: f64| {
        if t <= depletion {
            y * (g * (depletion - t)).exp()
        } else {
            y
        }
    };
    let discounted_income = |t: f64| {
        if params.is_zero_rate() {
            y * t
        } else {
            -y * (-r * t).exp_m1() / r
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omegas: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..5.0)).collect();
    let perturbed = omegas
        .into_iter()
        .map(|omega| {
            let c = |t: f64| base(t) * (1.0 + eps * (omega * t).sin());
            let spend = |t: f64| (-r * t).exp() * c(t);
            // cumulative Simpson on a uniform grid
            let h = horizon / CUMULATIVE_NODES as f64;
            let mut spent = 0.0;
            let mut scale = f64::INFINITY;
            for i in 0..CUMULATIVE_NODES {
                let t0 = i as f64 * h;
                let t1 = t0 + h;
                spent += h / 6.0 * (spend(t0) + 4.0 * spend(t0 + 0.5 * h) + spend(t1));
                scale = scale.min((a0 + discounted_income(t1)) / spent);
            }
            let integrand = |t: f64| {
                (-rho * t).exp()
                    * crate::model::crra_utility(scale * c(t), gamma).unwrap_or(f64::NAN)
            };
            let pieces = horizon.ceil() as usize;
            let width = horizon / pieces as f64;
            let mut pdv: f64 = (0..pieces)
                .map(|k| {
                    let lo = k as f64 * width;
                    let hi = lo + width;
                    if lo < depletion && depletion < hi {
                        adaptive_simpson(&integrand, lo, depletion, PDV_TOL, DEFAULT_DEPTH)
                            + adaptive_simpson(&integrand, depletion, hi, PDV_TOL, DEFAULT_DEPTH)
                    } else {
                        adaptive_simpson(&integrand, lo, hi, PDV_TOL, DEFAULT_DEPTH)
                    }
                })
                .sum();
            pdv += (-rho * horizon).exp() * params.utility(scale * y)? / rho;
            Ok(PerturbedPath { omega, scale, pdv })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PerturbationReport { optimal, perturbed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::value_upper_bound;

    fn r0() -> ModelParams {
        ModelParams::figure().with_rate(0.0).unwrap()
    }

    #[test]
    fn simpson_polynomials_and_transcendentals() {
        let cubic = |x: f64| x * x * x - 2.0 * x;
        assert!((adaptive_simpson(&cubic, 0.0, 2.0, 1e-12, 30) - 0.0).abs() < 1e-13);
        let v = adaptive_simpson(&f64::exp, 0.0, 1.0, 1e-12, 40);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
        let v = adaptive_simpson(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-10, 50);
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
        assert_eq!(adaptive_simpson(&f64::exp, 1.0, 1.0, 1e-10, 10), 0.0);
    }

    #[test]
    fn pdv_at_zero_assets() {
        let p = r0();
        let v = pdv_utility(&p, 0.0).unwrap();
        assert_eq!(v, p.utility(p.y()).unwrap() / p.rho());
        assert!(pdv_utility(&p, -1.0).is_err());
    }

    #[test]
    fn pdv_below_value_bound() {
        for p in [r0(), ModelParams::figure()] {
            for k in [0.1, 1.0, 3.0, 10.0, 100.0] {
                let a0 = k * p.y();
                let v = pdv_utility(&p, a0).unwrap();
                assert!(v < value_upper_bound(&p, a0).unwrap(), "a0={a0}");
                assert!(v > pdv_utility(&p, 0.0).unwrap());
            }
        }
    }

    #[test]
    fn pdv_closed_form_at_zero_rate() {
        // at r = 0 with c(t) = y e^{b(T−t)}: ∫₀^T e^{−ρt}(c^{1−γ}/(1−γ))dt has a closed form
        let p = r0();
        let (rho, g, y, gamma) = (p.rho(), p.growth(), p.y(), p.gamma());
        let t = h_best(&p, 3.0).unwrap().time;
        let k = y.powf(1.0 - gamma) / (1.0 - gamma) * ((1.0 - gamma) * g * t).exp();
        let rate = rho + (1.0 - gamma) * g;
        let head = k * (-(-rate * t).exp_m1()) / rate;
        let tail = (-rho * t).exp() * p.utility(y).unwrap() / rho;
        let v = pdv_utility(&p, 3.0).unwrap();
        assert!((v - (head + tail)).abs() < 1e-9, "{v} {}", head + tail);
    }

    #[test]
    fn pdv_stable_under_depth_doubling() {
        let p = ModelParams::figure();
        let a = pdv_utility_with_depth(&p, 3.0, 12).unwrap();
        let b = pdv_utility_with_depth(&p, 3.0, 24).unwrap();
        assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn optimal_path_beats_perturbations() {
        for p in [r0(), ModelParams::figure()] {
            let report = perturbation_check(&p, 3.0, 0.05, 10, 7).unwrap();
            assert_eq!(report.perturbed.len(), 10);
            assert!(report.optimal_dominates(), "{report:?}");
            assert!(report.min_margin() > 0.0);
            for path in &report.perturbed {
                assert!((0.5..5.0).contains(&path.omega));
                assert!((path.scale - 1.0).abs() < 0.1, "{path:?}");
            }
        }
    }

    #[test]
    fn perturbations_are_deterministic() {
        let p = r0();
        let a = perturbation_check(&p, 1.0, 0.05, 3, 11).unwrap();
        let b = perturbation_check(&p, 1.0, 0.05, 3, 11).unwrap();
        assert_eq!(a, b);
        assert!(perturbation_check(&p, 1.0, 0.0, 3, 11).is_err());
    }
}
