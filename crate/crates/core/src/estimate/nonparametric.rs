use super::empirics::EmpiricalStats;
use crate::error::{invalid, Result};
use crate::model::TrawlSpec;

/// Share of the (log-spaced) grid, counted from the longest interval, used to
/// estimate the long-run variogram slope.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.25;

/// Non-parametric estimate of `b` and of `d~(-delta)` on the variance grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NonparametricTrawl {
    pub b: f64,
    /// Variogram slope at zero, `sum y^2 alpha_y beta_0`.
    pub s0: f64,
    /// Variogram slope at infinity.
    pub s_inf: f64,
    pub delta: Vec<f64>,
    /// Non-increasing values in `[0, 1]`.
    pub d_tilde: Vec<f64>,
}

impl NonparametricTrawl {
    /// Tabulated trawl through `(-delta_i, d~_i)` and `(0, 1)`.
    pub fn to_trawl_spec(&self) -> Result<TrawlSpec> {
        let mut pts: Vec<(f64, f64)> = self.delta.iter().rev().zip(self.d_tilde.iter().rev()).map(|(&d, &v)| (-d, v)).collect();
        pts.push((0.0, 1.0));
        TrawlSpec::tabulated(self.b, &pts)
    }
}

fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Pool-adjacent-violators fit of a non-increasing sequence (equal weights).
fn decreasing_fit(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            blocks.pop();
            let n = n1 + n2;
            *blocks.last_mut().expect("two blocks") = ((m1 * n1 as f64 + m2 * n2 as f64) / n as f64, n);
        }
    }
    blocks.into_iter().flat_map(|(m, n)| std::iter::repeat_n(m, n)).collect()
}

pub fn nonparametric_trawl(stats: &EmpiricalStats) -> Result<NonparametricTrawl> {
    nonparametric_trawl_with(stats, DEFAULT_TAIL_FRACTION)
}

/// `b = 2 s_inf / (s_0 + s_inf)` and
/// `d~(-delta) = (d sigma^2_delta / d delta - s_inf) / (s_0 - s_inf)`.
///
/// Slopes come from three-point local least squares on the variogram, and
/// `s_inf` from a least-squares line through the last `tail_fraction` of it.
pub fn nonparametric_trawl_with(stats: &EmpiricalStats, tail_fraction: f64) -> Result<NonparametricTrawl> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(invalid(format!("tail fraction must lie in (0, 1], got {tail_fraction}")));
    }
    let delta = stats.deltas();
    let var: Vec<f64> = stats.var_grid.iter().map(|p| p.variance).collect();
    let n = delta.len();
    if n < 4 {
        return Err(invalid("variogram needs at least four points"));
    }
    if delta[n - 1] < 10.0 * delta[0] {
        return Err(invalid("variogram must span at least one decade of sampling intervals"));
    }
    let s0 = stats.quadratic_rate()?;

    let tail = ((n as f64 * tail_fraction).round() as usize).clamp(2, n);
    let s_inf = ols_slope(&delta[n - tail..], &var[n - tail..]);

    if !(s0 > 0.0) || s_inf >= s0 * (1.0 - 1e-9) {
        return Ok(NonparametricTrawl { b: 1.0, s0, s_inf, d_tilde: vec![1.0; n], delta });
    }
    let b = (2.0 * s_inf / (s0 + s_inf)).clamp(f64::MIN_POSITIVE, 1.0);

    let raw: Vec<f64> = (0..n)
        .map(|i| {
            let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
            let slope = ols_slope(&delta[lo..=hi], &var[lo..=hi]);
            (slope - s_inf) / (s0 - s_inf)
        })
        .collect();
    let d_tilde = decreasing_fit(&raw).into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    Ok(NonparametricTrawl { b, s0, s_inf, delta, d_tilde })
}
