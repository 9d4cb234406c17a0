use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::empirics::EmpiricalStats;
use super::moments::levy_from_moments;
use super::optimize::{latin_hypercube, nelder_mead, SimplexOptions};
use crate::error::{invalid, Error, Result};
use crate::model::{ModelParams, TrawlFamily, TrawlKind, TrawlSpec};

/// Smallest admissible `b`; the permanence level must stay positive for the
/// Lévy-measure estimator.
const B_MIN: f64 = 1e-6;
/// Smallest admissible sup-Gamma `H`; at `H = 1` the trawl has infinite area.
const H_MIN: f64 = 1.0 + 1e-6;
const H_MAX: f64 = 50.0;
const BOUNDARY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub n_starts: usize,
    pub seed: u64,
    pub max_evals: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { n_starts: 20, seed: 0, max_evals: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: ModelParams,
    /// Residual sum of squares of the variance signature.
    pub objective: f64,
    pub grid: Vec<f64>,
    pub converged: bool,
    /// Names of parameters sitting on a box constraint.
    pub boundary_flags: Vec<String>,
    /// Standard errors, when a bootstrap has been run.
    pub se: Option<BTreeMap<String, f64>>,
}

/// Optimisation coordinates for one trawl family. Scale parameters are
/// searched on the log scale.
struct Layout {
    kind: TrawlKind,
    names: Vec<&'static str>,
    log_scale: Vec<bool>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    start_lower: Vec<f64>,
    start_upper: Vec<f64>,
}

impl Layout {
    fn new(kind: TrawlKind, dmin: f64, dmax: f64) -> Result<Self> {
        let ln = f64::ln;
        let l = match kind {
            TrawlKind::Exponential => Layout {
                kind,
                names: vec!["b", "lambda"],
                log_scale: vec![false, true],
                lower: vec![B_MIN, ln(1e-3 / dmax)],
                upper: vec![1.0, ln(1e3 / dmin)],
                start_lower: vec![0.05, ln(0.1 / dmax)],
                start_upper: vec![0.95, ln(10.0 / dmin)],
            },
            TrawlKind::SupGamma => Layout {
                kind,
                names: vec!["b", "alpha", "H"],
                log_scale: vec![false, true, false],
                lower: vec![B_MIN, ln(1e-3 * dmin), H_MIN],
                upper: vec![1.0, ln(1e3 * dmax), H_MAX],
                start_lower: vec![0.05, ln(0.1 * dmin), 1.05],
                start_upper: vec![0.95, ln(10.0 * dmax), 5.0],
            },
            TrawlKind::SupGig => Layout {
                kind,
                names: vec!["b", "gamma", "delta", "nu"],
                log_scale: vec![false, false, true, false],
                lower: vec![B_MIN, 0.0, ln(1e-2 / dmax.sqrt()), -10.0],
                upper: vec![1.0, 10.0 * (2.0 * dmax).sqrt(), ln(1e2 / dmin.sqrt()), 10.0],
                start_lower: vec![0.05, 0.1, ln(0.1 / dmax.sqrt()), -2.0],
                start_upper: vec![0.95, 2.0 * dmax.sqrt(), ln(10.0 / dmin.sqrt()), 2.0],
            },
            TrawlKind::Tabulated => {
                return Err(invalid("tabulated trawls are estimated with nonparametric_trawl, not fitted"))
            }
        };
        Ok(l)
    }

    fn natural(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.log_scale).map(|(v, &lg)| if lg { v.exp() } else { *v }).collect()
    }

    fn spec(&self, x: &[f64]) -> Result<TrawlSpec> {
        let v = self.natural(x);
        let family = match self.kind {
            TrawlKind::Exponential => TrawlFamily::Exponential { lambda: v[1] },
            TrawlKind::SupGamma => TrawlFamily::SupGamma { alpha: v[1], h: v[2] },
            TrawlKind::SupGig => TrawlFamily::SupGig { gamma: v[1], delta: v[2], nu: v[3] },
            TrawlKind::Tabulated => unreachable!("rejected in Layout::new"),
        };
        TrawlSpec::new(v[0], family)
    }
}

/// Model variance signature
/// `(b delta + 2 leb(A_delta \ A)) / ((2 - b) delta) * s_0`.
pub fn signature_model(trawl: &TrawlSpec, delta: f64, s0: f64) -> Result<f64> {
    let b = trawl.b();
    Ok((b * delta + 2.0 * trawl.increment(delta)?) / ((2.0 - b) * delta) * s0)
}

fn objective(trawl: &TrawlSpec, targets: &[(f64, f64)], s0: f64) -> f64 {
    let mut sum = 0.0;
    for &(delta, observed) in targets {
        match signature_model(trawl, delta, s0) {
            Ok(m) if m.is_finite() => sum += (observed - m).powi(2),
            _ => return f64::INFINITY,
        }
    }
    sum
}

pub fn fit_signature(stats: &EmpiricalStats, kind: TrawlKind) -> Result<FitResult> {
    fit_signature_with(stats, kind, &FitOptions::default())
}

/// Least-squares fit of `(b, trawl shape)` to `sigma^2_delta / delta`.
///
/// The Lévy measure of the result is [`levy_from_moments`] at the fitted `b`.
pub fn fit_signature_with(stats: &EmpiricalStats, kind: TrawlKind, opts: &FitOptions) -> Result<FitResult> {
    if stats.var_grid.is_empty() {
        return Err(invalid("variance grid is empty"));
    }
    if opts.n_starts == 0 {
        return Err(invalid("need at least one start"));
    }
    let beta0 = stats.beta0()?;
    let s0 = stats.quadratic_rate()?;
    let targets: Vec<(f64, f64)> = stats.var_grid.iter().map(|p| (p.delta, p.variance / p.delta)).collect();
    let grid = stats.deltas();
    let (dmin, dmax) = (grid[0], grid[grid.len() - 1]);
    let layout = Layout::new(kind, dmin, dmax)?;

    let f = |x: &[f64]| match layout.spec(x) {
        Ok(spec) => objective(&spec, &targets, s0),
        Err(_) => f64::INFINITY,
    };
    let simplex = SimplexOptions { max_evals: opts.max_evals, ..Default::default() };
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let starts = latin_hypercube(opts.n_starts, &layout.start_lower, &layout.start_upper, &mut rng);
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for x0 in starts {
        if !f(&x0).is_finite() {
            continue;
        }
        let res = nelder_mead(f, &x0, &layout.lower, &layout.upper, &simplex);
        if best.as_ref().is_none_or(|(_, fb, _)| res.f < *fb) {
            best = Some((res.x, res.f, res.converged));
        }
    }
    let (x, value, converged) =
        best.ok_or_else(|| Error::Numerical("no start point gave a finite objective".into()))?;
    if !value.is_finite() {
        return Err(Error::Numerical("objective is not finite at the best point".into()));
    }

    let trawl = layout.spec(&x)?;
    let levy = levy_from_moments(&stats.alpha, beta0, trawl.b())?;
    let boundary_flags = layout
        .names
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            let tol = BOUNDARY_TOL * (layout.upper[i] - layout.lower[i]);
            x[i] - layout.lower[i] <= tol || layout.upper[i] - x[i] <= tol
        })
        .map(|(_, name)| name.to_string())
        .collect();
    Ok(FitResult {
        params: ModelParams::new(levy, trawl),
        objective: value,
        grid,
        converged,
        boundary_flags,
        se: None,
    })
}
