//! Data behind the two consumption-function figures.

use rayon::prelude::*;

use crate::consumption::{
    consumption_approx_small_r, consumption_now, consumption_unconstrained, discrete_policy,
};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::sweep::{SweepSpec, Table};

/// Default asset range of both figures, in units of income.
pub const DEFAULT_RANGE: (f64, f64) = (0.0, 10.0);
pub const DEFAULT_POINTS: usize = 201;

/// Discrete-time policy against the unconstrained benchmark.
///
/// Rows are the sweep points plus every knot of the policy inside the
/// sweep range (`knot_flag = 1`), sorted by assets.
pub fn figure1(params: &ModelParams, spec: &SweepSpec, delta: f64) -> Result<Table> {
    if params.r() == 0.0 {
        return Err(Error::RequiresPositiveRate {
            what: "figure 1 (unconstrained overlay)",
        });
    }
    let unit = spec.unit(params);
    let policy = discrete_policy(params, delta, spec.a_max() * unit)?;
    let mut points: Vec<(f64, bool)> = spec.points().into_iter().map(|x| (x, false)).collect();
    for (a, _) in policy.knots() {
        let x = a / unit;
        if x >= spec.a_min() && x <= spec.a_max() {
            points.push((x, true));
        }
    }
    points.sort_by(|l, r| l.0.total_cmp(&r.0).then(l.1.cmp(&r.1)));
    let rows = points
        .into_iter()
        .map(|(x, knot)| {
            let a = x * unit;
            Ok(vec![
                x,
                policy.evaluate(a)? / unit,
                consumption_unconstrained(params, a)? / unit,
                if knot { 1.0 } else { 0.0 },
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: header(spec_names(spec, &["c_discrete", "c_unconstrained"]), "knot_flag"),
        rows,
    })
}

/// Small-rate closed-form approximation against the numerical solution.
pub fn figure2(params: &ModelParams, spec: &SweepSpec) -> Result<Table> {
    let unit = spec.unit(params);
    let rows = spec
        .points()
        .into_par_iter()
        .map(|x| {
            let a = x * unit;
            Ok(vec![
                x,
                consumption_approx_small_r(params, a, 0.0)? / unit,
                consumption_now(params, a)? / unit,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: spec_names(spec, &["c_closed_approx", "c_numeric"]),
        rows,
    })
}

fn spec_names(spec: &SweepSpec, columns: &[&str]) -> Vec<String> {
    let suffix = if spec.normalize_by_income() { "_over_y" } else { "" };
    std::iter::once(format!("a{suffix}"))
        .chain(columns.iter().map(|c| format!("{c}{suffix}")))
        .collect()
}

fn header(mut names: Vec<String>, extra: &str) -> Vec<String> {
    names.push(extra.to_string());
    names
}

/// Largest relative gap between the two consumption columns of a
/// [`figure2`] table.
pub fn figure2_max_rel_gap(table: &Table) -> f64 {
    table
        .rows
        .iter()
        .map(|r| ((r[1] - r[2]) / r[2]).abs())
        .fold(0.0, f64::max)
}
