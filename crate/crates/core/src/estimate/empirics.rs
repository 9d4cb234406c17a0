use std::collections::BTreeMap;

use log::warn;

use crate::error::{invalid, Error, Result};
use crate::simulate::{realized_pv, return_moments, PricePath};

/// One point of the variogram: sample variance of `delta`-returns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarPoint {
    pub delta: f64,
    pub variance: f64,
    pub count: usize,
}

/// Summary statistics consumed by the estimators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmpiricalStats {
    /// Jump-size frequencies `alpha_y`, summing to one.
    pub alpha: BTreeMap<i64, f64>,
    /// `(r, beta_r)` with `beta_r` the `r`-th power variation per second.
    pub beta: Vec<(f64, f64)>,
    pub var_grid: Vec<VarPoint>,
    pub span: f64,
}

impl EmpiricalStats {
    pub fn beta(&self, r: f64) -> Option<f64> {
        self.beta.iter().find(|(q, _)| *q == r).map(|&(_, v)| v)
    }

    /// `beta_0`, the number of price moves per second.
    pub fn beta0(&self) -> Result<f64> {
        self.beta(0.0).ok_or_else(|| invalid("statistics lack beta_0"))
    }

    /// `s_0 = sum y^2 alpha_y beta_0`, the small-`delta` slope of the variogram.
    pub fn quadratic_rate(&self) -> Result<f64> {
        let beta0 = self.beta0()?;
        Ok(self.alpha.iter().map(|(&y, &a)| (y as f64).powi(2) * a).sum::<f64>() * beta0)
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.var_grid.iter().map(|p| p.delta).collect()
    }
}

/// Jump-size frequencies and power variations per second.
///
/// `beta_0` is always included, whether or not `0` is in `r_list`.
pub fn jump_empirics(path: &PricePath, r_list: &[f64]) -> Result<EmpiricalStats> {
    if path.is_empty() {
        return Err(Error::Data("path has no price moves".into()));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for ev in path.events() {
        *counts.entry(ev.jump).or_default() += 1;
    }
    let n = path.len() as f64;
    let alpha = counts.into_iter().map(|(y, c)| (y, c as f64 / n)).collect();
    let span = path.span();
    let mut rs: Vec<f64> = r_list.to_vec();
    if !rs.contains(&0.0) {
        rs.insert(0, 0.0);
    }
    let beta = rs
        .into_iter()
        .map(|r| Ok((r, realized_pv(path, r)? / span)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalStats { alpha, beta, var_grid: Vec::new(), span })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("empty sampling grid"));
    }
    if grid.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(invalid("sampling intervals must be finite and > 0"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("sampling grid must be strictly increasing"));
    }
    Ok(())
}

fn variance_point(path: &PricePath, delta: f64) -> Result<VarPoint> {
    let (n, sum, sumsq) = return_moments(path, delta)?;
    let nf = n as f64;
    let mean = sum / nf;
    let variance = ((sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok(VarPoint { delta, variance, count: n })
}

/// Sample variance (denominator `n - 1`) of non-overlapping returns.
pub fn variance_grid(path: &PricePath, grid: &[f64]) -> Result<Vec<VarPoint>> {
    check_grid(grid)?;
    let half = 0.5 * path.span();
    if let Some(d) = grid.iter().find(|&&d| d > half) {
        return Err(invalid(format!("sampling interval {d} exceeds half the span {half}")));
    }
    grid.iter().map(|&d| variance_point(path, d)).collect()
}

/// As [`variance_grid`], dropping intervals longer than half the span.
pub fn variance_grid_lenient(path: &PricePath, grid: &[f64]) -> Result<Vec<VarPoint>> {
    check_grid(grid)?;
    let half = 0.5 * path.span();
    let mut out = Vec::with_capacity(grid.len());
    for &d in grid {
        if d > half {
            warn!("dropping sampling interval {d}: longer than half the span {half}");
            continue;
        }
        out.push(variance_point(path, d)?);
    }
    if out.is_empty() {
        return Err(Error::Data(format!("no sampling interval fits in the span {}", path.span())));
    }
    Ok(out)
}

/// `points` values equally spaced in `ln delta` from `min` to `max`.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0) || !(max > min) || !max.is_finite() {
        return Err(invalid(format!("need 0 < min < max, got {min}, {max}")));
    }
    if points < 2 {
        return Err(invalid("log grid needs at least two points"));
    }
    let (lo, hi) = (min.ln(), max.ln());
    let step = (hi - lo) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| (lo + step * i as f64).exp()).collect();
    grid[0] = min;
    grid[points - 1] = max;
    Ok(grid)
}

/// 60 log-spaced intervals from 0.1 s to 60 s.
pub fn default_grid() -> Vec<f64> {
    log_grid(0.1, 60.0, 60).expect("static grid")
}

/// [`jump_empirics`] plus a lenient [`variance_grid`].
pub fn empirical_stats(path: &PricePath, r_list: &[f64], grid: &[f64]) -> Result<EmpiricalStats> {
    let mut stats = jump_empirics(path, r_list)?;
    stats.var_grid = variance_grid_lenient(path, grid)?;
    Ok(stats)
}
