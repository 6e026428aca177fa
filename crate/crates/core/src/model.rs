//! Economic primitives: parameters, CRRA utility and the analytic value bound.

use crate::error::{domain, ParamError, Result};

/// Interest rates at or below this are evaluated with the `r = 0` formulas.
pub const R_SWITCH: f64 = 1e-12;

/// Structural parameters of the consumer problem.
///
/// `rho` is a continuous-time discount rate (not bounded by one), `r` the
/// net interest rate, `gamma` relative risk aversion and `y` the constant
/// income stream. A value of this type always satisfies `rho > r ≥ 0`,
/// `gamma > 0` and `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    rho: f64,
    r: f64,
    gamma: f64,
    y: f64,
}

impl ModelParams {
    /// Validates and builds a parameter set.
    pub fn new(rho: f64, r: f64, gamma: f64, y: f64) -> Result<Self, ParamError> {
        for (name, value) in [("rho", rho), ("r", r), ("gamma", gamma), ("y", y)] {
            if !value.is_finite() {
                return Err(ParamError::NonFinite { name, value });
            }
        }
        if r < 0.0 {
            return Err(ParamError::NegativeRate(r));
        }
        if rho <= r {
            return Err(ParamError::ImpatienceViolated { rho, r });
        }
        if gamma <= 0.0 {
            return Err(ParamError::NonPositiveGamma(gamma));
        }
        if y <= 0.0 {
            return Err(ParamError::NonPositiveIncome(y));
        }
        Ok(Self { rho, r, gamma, y })
    }

    /// The parameter values used for both published figures:
    /// `rho = 0.08`, `r = 0.01`, `gamma = 0.5`, `y = 3`.
    pub fn figure() -> Self {
        Self {
            rho: 0.08,
            r: 0.01,
            gamma: 0.5,
            y: 3.0,
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn with_rate(&self, r: f64) -> Result<Self, ParamError> {
        Self::new(self.rho, r, self.gamma, self.y)
    }

    pub fn with_income(&self, y: f64) -> Result<Self, ParamError> {
        Self::new(self.rho, self.r, self.gamma, y)
    }

    /// True when the `r = 0` formulas apply.
    pub fn is_zero_rate(&self) -> bool {
        self.r <= R_SWITCH
    }

    pub fn derived(&self) -> DerivedConstants {
        let ModelParams { rho, r, gamma, .. } = *self;
        DerivedConstants {
            b: rho / gamma,
            b_r: (r * (gamma - 1.0) + rho) / gamma,
            d_r: (rho - r) / (r * (gamma - 1.0) + rho),
        }
    }

    /// Growth rate of consumption along the unconstrained stretch, `(ρ − r)/γ`.
    pub fn growth(&self) -> f64 {
        (self.rho - self.r) / self.gamma
    }

    pub fn utility(&self, c: f64) -> Result<f64> {
        crra_utility(c, self.gamma)
    }
}

/// Constants shared by the closed forms.
///
/// `b_r → b` and `d_r → 1` as `r → 0`; at `r = 0` they are equal exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// `ρ/γ`
    pub b: f64,
    /// `(r(γ−1) + ρ)/γ`, positive under impatience.
    pub b_r: f64,
    /// `(ρ − r)/(r(γ−1) + ρ)`
    pub d_r: f64,
}

impl DerivedConstants {
    /// `c_r = a + y/b_r`, the constant of the small-rate transcendental equation.
    pub fn c_r(&self, a: f64, y: f64) -> f64 {
        a + y / self.b_r
    }
}

/// CRRA utility `c^{1−γ}/(1−γ)`, with `ln c` at `γ = 1`.
pub fn crra_utility(c: f64, gamma: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(domain("crra_utility", c, "(0, inf)"));
    }
    if gamma == 1.0 {
        Ok(c.ln())
    } else {
        Ok(c.powf(1.0 - gamma) / (1.0 - gamma))
    }
}

/// Upper bound `u(ρa + y)/ρ` on the discounted utility of any feasible plan.
pub fn value_upper_bound(params: &ModelParams, a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(domain("value_upper_bound", a, "[0, inf)"));
    }
    Ok(params.utility(params.rho * a + params.y)? / params.rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModelParams::new(0.08, 0.01, 0.5, 3.0).is_ok());
        assert_eq!(ModelParams::new(0.08, 0.01, 0.5, 3.0).unwrap(), ModelParams::figure());
        assert!(ModelParams::new(0.08, 0.0, 1.0, 1.0).is_ok());
        let err = ModelParams::new(0.08, 0.08, 0.5, 3.0).unwrap_err();
        assert!(matches!(err, ParamError::ImpatienceViolated { .. }));
        assert!(err.to_string().contains("impatience violated"));
        assert!(matches!(
            ModelParams::new(0.08, -0.01, 0.5, 3.0),
            Err(ParamError::NegativeRate(_))
        ));
        assert!(matches!(
            ModelParams::new(0.08, 0.0, 0.0, 3.0),
            Err(ParamError::NonPositiveGamma(_))
        ));
        assert!(matches!(
            ModelParams::new(0.08, 0.0, 0.5, 0.0),
            Err(ParamError::NonPositiveIncome(_))
        ));
        assert!(ModelParams::new(f64::NAN, 0.0, 0.5, 1.0).is_err());
        // rho is a rate, not a factor: values above one are accepted
        assert!(ModelParams::new(2.0, 0.5, 0.5, 1.0).is_ok());
    }

    #[test]
    fn derived_constants_limits() {
        let p = ModelParams::figure().with_rate(0.0).unwrap();
        let d = p.derived();
        assert_eq!(d.b, d.b_r);
        assert_eq!(d.d_r, 1.0);
        assert_eq!(d.b * d.d_r, p.growth());
        let d = ModelParams::figure().derived();
        assert!(d.b_r > 0.0);
        assert!((d.b_r - 0.15).abs() < 1e-15);
        assert!((d.c_r(3.0, 3.0) - 23.0).abs() < 1e-12);
    }

    #[test]
    fn utility_values() {
        assert_eq!(crra_utility(1.0, 2.0).unwrap(), -1.0);
        assert_eq!(crra_utility(1.0, 1.0).unwrap(), 0.0);
        assert!((crra_utility(4.0, 0.5).unwrap() - 4.0).abs() < 1e-15);
        assert!(crra_utility(0.0, 0.5).is_err());
        assert!(crra_utility(-1.0, 2.0).is_err());
    }

    #[test]
    fn marginal_utility_by_central_differences() {
        for &gamma in &[0.5, 1.0, 2.0] {
            for &c in &[0.1, 1.0, 3.0, 50.0] {
                let h = 1e-5 * c;
                let fd = (crra_utility(c + h, gamma).unwrap() - crra_utility(c - h, gamma).unwrap())
                    / (2.0 * h);
                let exact = c.powf(-gamma);
                assert!(((fd - exact) / exact).abs() < 1e-7, "gamma={gamma} c={c}");
            }
        }
    }

    #[test]
    fn utility_increasing_and_concave() {
        for &gamma in &[0.5, 1.0, 2.0, 5.0] {
            let grid: Vec<f64> = (1..200).map(|i| 0.05 * i as f64).collect();
            let u: Vec<f64> = grid.iter().map(|&c| crra_utility(c, gamma).unwrap()).collect();
            for w in u.windows(3) {
                assert!(w[1] > w[0]);
                assert!(w[2] - 2.0 * w[1] + w[0] < 0.0);
            }
        }
    }

    #[test]
    fn value_bound() {
        let p = ModelParams::figure();
        let v0 = value_upper_bound(&p, 0.0).unwrap();
        assert!((v0 - 43.30127018922193).abs() < 1e-12);
        let v3 = value_upper_bound(&p, 3.0).unwrap();
        // u(3.24)/0.08 = (1.8/0.5)/0.08
        assert!((v3 - 45.0).abs() < 1e-12);
        let log = ModelParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(value_upper_bound(&log, 0.0).unwrap(), 0.0);
        let vals: Vec<f64> = (0..50)
            .map(|i| value_upper_bound(&p, i as f64).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        assert!(value_upper_bound(&p, -1.0).is_err());
    }
}
