use super::fit_power_law;
use crate::error::{input, Result};
use crate::trace::CovarianceCurve;

/// Result of a log-log regression of mean squared displacement on time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HurstEstimate {
    pub h: f64,
    pub stderr: f64,
    pub slope: f64,
    /// `A` in `MSD ~ A t^slope`.
    pub prefactor: f64,
    /// Set when the estimate sits at or outside the subdiffusive range
    /// `1/2 < h < 1`.
    pub boundary: bool,
}

/// Slope `b` of `log MSD` against `log t` over `window` (default: all
/// positive lags), reported as `h = 1 - b/2`.
pub fn estimate_hurst_msd(
    msd: &CovarianceCurve,
    window: Option<(f64, f64)>,
) -> Result<HurstEstimate> {
    let (lo, hi) = window.unwrap_or((0.0, f64::INFINITY));
    let (t, y): (Vec<f64>, Vec<f64>) = msd
        .lags
        .iter()
        .zip(&msd.values)
        .filter(|(t, _)| **t > 0.0 && **t >= lo && **t <= hi)
        .map(|(t, y)| (*t, *y))
        .unzip();
    if t.len() < 3 {
        return Err(input("need at least three lags in the regression window"));
    }
    let span = (t[t.len() - 1] / t[0]).log10();
    if span < 1.5 - 1e-9 {
        return Err(input(format!(
            "regression window spans {span:.2} decades, at least 1.5 are required"
        )));
    }
    if y.iter().any(|v| !(*v > 0.0)) {
        return Err(input(
            "mean squared displacement must be positive in the window",
        ));
    }
    let fit = fit_power_law(&t, &y)?;
    let h = 1.0 - 0.5 * fit.slope;
    Ok(HurstEstimate {
        h,
        stderr: 0.5 * fit.slope_stderr,
        slope: fit.slope,
        prefactor: fit.intercept.exp(),
        boundary: h <= 0.5 + 1e-9 || h >= 1.0 - 1e-9,
    })
}
