//! Accuracy of the small-rate closed form against the exact solution.

use rayon::prelude::*;

use crate::consumption::{consumption_approx_small_r, consumption_now};
use crate::error::Result;
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxErrorRow {
    pub r: f64,
    pub max_rel_gap: f64,
    pub mean_rel_gap: f64,
}

/// For each `r`, the max and mean over `a_grid` of
/// `|c_approx(a) − c(a)| / c(a)` at `t = 0`, where `c` uses the exact
/// depletion time at `r = 0` and numerical inversion otherwise.
pub fn approximation_error_report(
    base: &ModelParams,
    r_list: &[f64],
    a_grid: &[f64],
) -> Result<Vec<ApproxErrorRow>> {
    r_list
        .iter()
        .map(|&r| {
            let params = base.with_rate(r)?;
            let gaps = a_grid
                .par_iter()
                .map(|&a| {
                    let exact = consumption_now(&params, a)?;
                    let approx = consumption_approx_small_r(&params, a, 0.0)?;
                    Ok(((approx - exact) / exact).abs())
                })
                .collect::<Result<Vec<f64>>>()?;
            let max = gaps.iter().copied().fold(0.0, f64::max);
            let mean = if gaps.is_empty() {
                0.0
            } else {
                gaps.iter().sum::<f64>() / gaps.len() as f64
            };
            Ok(ApproxErrorRow {
                r,
                max_rel_gap: max,
                mean_rel_gap: mean,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        let mut g = vec![0.0];
        g.extend((0..400).map(|i| 3.0 * 1e-6 * (1e8f64).powf(i as f64 / 399.0)));
        g
    }

    #[test]
    fn zero_rate_row_vanishes() {
        let rows = approximation_error_report(&ModelParams::figure(), &[0.0], &grid()).unwrap();
        assert_eq!(rows[0].max_rel_gap, 0.0);
        assert_eq!(rows[0].mean_rel_gap, 0.0);
    }

    #[test]
    fn gap_vanishes_at_zero_assets() {
        let rows = approximation_error_report(&ModelParams::figure(), &[0.02, 0.01], &[0.0]).unwrap();
        assert!(rows.iter().all(|r| r.max_rel_gap == 0.0));
    }

    #[test]
    fn first_order_in_r() {
        // max gaps from an independent scipy evaluation on this grid:
        // 0.04929 (r = 0.02), 0.02222 (0.01), 0.01059 (0.005)
        let rows =
            approximation_error_report(&ModelParams::figure(), &[0.02, 0.01, 0.005], &grid()).unwrap();
        let expected = [0.04929, 0.02222, 0.01059];
        for (row, e) in rows.iter().zip(expected) {
            assert!((row.max_rel_gap - e).abs() < 5e-5, "{row:?}");
            assert!(row.mean_rel_gap < row.max_rel_gap);
        }
        for w in rows.windows(2) {
            let ratio = w[0].max_rel_gap / w[1].max_rel_gap;
            assert!((1.5..=3.0).contains(&ratio), "{ratio}");
        }
    }
}
