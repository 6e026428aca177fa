//! Asset-grid sweeps producing tables of consumption, depletion times and
//! derivatives.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::consumption::{consumption_now, derivatives};
use crate::depletion::h_best;
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(Error::InvalidArgument(format!(
                "unknown spacing '{other}' (expected linear or log)"
            ))),
        }
    }
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        })
    }
}

/// Grid of initial assets. With `normalize_by_income`, `a_min` and `a_max`
/// are in units of `y` and so are the asset and consumption columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    a_min: f64,
    a_max: f64,
    n_points: usize,
    spacing: Spacing,
    normalize_by_income: bool,
}

impl SweepSpec {
    pub fn new(
        a_min: f64,
        a_max: f64,
        n_points: usize,
        spacing: Spacing,
        normalize_by_income: bool,
    ) -> Result<Self> {
        if !(a_min >= 0.0 && a_min.is_finite()) {
            return Err(Error::InvalidArgument(format!("a_min must be >= 0, got {a_min}")));
        }
        if !(a_max > a_min && a_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "a_max must exceed a_min ({a_min}), got {a_max}"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidArgument(format!(
                "a sweep needs at least 2 points, got {n_points}"
            )));
        }
        if spacing == Spacing::Log && a_min == 0.0 {
            return Err(Error::InvalidArgument("log spacing needs a_min > 0".into()));
        }
        Ok(Self {
            a_min,
            a_max,
            n_points,
            spacing,
            normalize_by_income,
        })
    }

    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn normalize_by_income(&self) -> bool {
        self.normalize_by_income
    }

    /// Grid points in the units of the spec; the endpoints are exact.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i == 0 {
                    return self.a_min;
                }
                if i == self.n_points - 1 {
                    return self.a_max;
                }
                let s = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.a_min + s * (self.a_max - self.a_min),
                    Spacing::Log => self.a_min * (self.a_max / self.a_min).powf(s),
                }
            })
            .collect()
    }

    /// Multiplier turning spec units into assets.
    pub fn unit(&self, params: &ModelParams) -> f64 {
        if self.normalize_by_income {
            params.y()
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepOutput {
    Consumption,
    DepletionTime,
    Jacobian,
    Hessian,
}

impl FromStr for SweepOutput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c" => Ok(SweepOutput::Consumption),
            "T" | "t" => Ok(SweepOutput::DepletionTime),
            "jacobian" => Ok(SweepOutput::Jacobian),
            "hessian" => Ok(SweepOutput::Hessian),
            other => Err(Error::InvalidArgument(format!(
                "unknown output '{other}' (expected c, T, jacobian or hessian)"
            ))),
        }
    }
}

impl SweepOutput {
    fn columns(&self, normalized: bool) -> &'static [&'static str] {
        match (self, normalized) {
            (SweepOutput::Consumption, true) => &["c_over_y"],
            (SweepOutput::Consumption, false) => &["c"],
            (SweepOutput::DepletionTime, _) => &["T"],
            (SweepOutput::Jacobian, _) => &["dc_da", "dc_dy"],
            (SweepOutput::Hessian, _) => &["d2c_da2", "d2c_dady", "d2c_dy2"],
        }
    }

    fn needs_closed_derivatives(&self) -> bool {
        matches!(self, SweepOutput::Jacobian | SweepOutput::Hessian)
    }
}

/// Header plus numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Evaluates `outputs` at each point of `spec`, in grid order.
pub fn sweep(params: &ModelParams, spec: &SweepSpec, outputs: &[SweepOutput]) -> Result<Table> {
    if outputs.is_empty() {
        return Err(Error::InvalidArgument("no sweep outputs requested".into()));
    }
    if outputs.iter().any(SweepOutput::needs_closed_derivatives) {
        if params.r() != 0.0 {
            return Err(Error::RequiresZeroRate {
                what: "jacobian/hessian sweep outputs",
                r: params.r(),
            });
        }
        if spec.a_min() <= 0.0 {
            return Err(Error::InvalidArgument(
                "jacobian/hessian sweep outputs need a_min > 0".into(),
            ));
        }
    }
    let normalized = spec.normalize_by_income();
    let unit = spec.unit(params);
    let mut header = vec![if normalized { "a_over_y" } else { "a" }.to_string()];
    for o in outputs {
        header.extend(o.columns(normalized).iter().map(|c| c.to_string()));
    }
    let rows = spec
        .points()
        .into_par_iter()
        .map(|x| {
            let a = x * unit;
            let mut row = vec![x];
            for o in outputs {
                match o {
                    SweepOutput::Consumption => row.push(consumption_now(params, a)? / unit),
                    SweepOutput::DepletionTime => row.push(h_best(params, a)?.time),
                    SweepOutput::Jacobian => {
                        let d = derivatives(params, a)?;
                        row.extend([d.dc_da, d.dc_dy]);
                    }
                    SweepOutput::Hessian => {
                        let d = derivatives(params, a)?;
                        row.extend([d.d2c_da2, d.d2c_dady, d.d2c_dy2]);
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { header, rows })
}
