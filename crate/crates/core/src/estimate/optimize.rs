//! Box-constrained Nelder-Mead with Latin-hypercube multi-starts.

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    pub max_evals: usize,
    /// Absolute spread of objective values across the simplex.
    pub f_abs_tol: f64,
    /// Relative spread of objective values across the simplex.
    pub f_rel_tol: f64,
    /// Simplex diameter as a fraction of the box width, per coordinate.
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_evals: 4000, f_abs_tol: 1e-30, f_rel_tol: 1e-13, x_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub converged: bool,
    pub evals: usize,
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Objective wrapper mapping NaN to `+inf` so comparisons stay total.
fn eval<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], evals: &mut usize) -> f64 {
    *evals += 1;
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn simplex_run<F>(f: &mut F, x0: &[f64], lower: &[f64], upper: &[f64], opts: &SimplexOptions, evals: &mut usize) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let width: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| u - l).collect();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    project(&mut start, lower, upper);
    pts.push(start.clone());
    for i in 0..n {
        let mut p = start.clone();
        let step = 0.05 * width[i];
        // step toward the interior so the vertex is not clamped onto x0
        p[i] = if p[i] + step <= upper[i] { p[i] + step } else { p[i] - step };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(f, p, evals)).collect();

    let budget_end = *evals + opts.max_evals;
    let mut converged = false;
    while *evals < budget_end {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let (best, worst) = (vals[0], vals[n]);
        let f_spread_ok = worst.is_finite() && (worst - best) <= opts.f_abs_tol + opts.f_rel_tol * best.abs();
        let x_spread_ok = (0..n).all(|j| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in &pts {
                lo = lo.min(p[j]);
                hi = hi.max(p[j]);
            }
            hi - lo <= opts.x_tol * width[j].max(f64::MIN_POSITIVE)
        });
        if f_spread_ok || x_spread_ok {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = (0..n).map(|j| centroid[j] + t * (pts[n][j] - centroid[j])).collect();
            project(&mut x, lower, upper);
            x
        };
        let xr = along(-1.0);
        let fr = eval(f, &xr, evals);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(f, &xe, evals);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let xc = along(-0.5);
                let fc = eval(f, &xc, evals);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = eval(f, &xc, evals);
                (xc, fc)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let mut x: Vec<f64> = (0..n).map(|j| pts[0][j] + 0.5 * (pts[i][j] - pts[0][j])).collect();
                    project(&mut x, lower, upper);
                    vals[i] = eval(f, &x, evals);
                    pts[i] = x;
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    SimplexResult { x: pts[best].clone(), f: vals[best], converged, evals: *evals }
}

/// Nelder-Mead from `x0`, restarted from its own optimum until a restart no
/// longer improves the objective (collapsed simplices are a known failure).
pub(crate) fn nelder_mead<F>(mut f: F, x0: &[f64], lower: &[f64], upper: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let mut evals = 0;
    let mut res = simplex_run(&mut f, x0, lower, upper, opts, &mut evals);
    for _ in 0..4 {
        if !res.converged {
            break;
        }
        let again = simplex_run(&mut f, &res.x, lower, upper, opts, &mut evals);
        let improved = again.f < res.f - opts.f_abs_tol - opts.f_rel_tol * res.f.abs();
        let converged = again.converged;
        if again.f <= res.f {
            res = again;
        }
        res.converged = converged;
        if !improved {
            break;
        }
    }
    res.evals = evals;
    res
}

/// `n` points stratified in every coordinate of the box.
pub(crate) fn latin_hypercube<R: Rng + ?Sized>(n: usize, lower: &[f64], upper: &[f64], rng: &mut R) -> Vec<Vec<f64>> {
    let dim = lower.len();
    let mut pts = vec![vec![0.0; dim]; n];
    for j in 0..dim {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        for (i, s) in strata.into_iter().enumerate() {
            let u: f64 = rng.random();
            pts[i][j] = lower[j] + (s as f64 + u) / n as f64 * (upper[j] - lower[j]);
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::path_rng;

    #[test]
    fn rosenbrock_minimum() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = SimplexOptions { max_evals: 20_000, ..Default::default() };
        let r = nelder_mead(rosen, &[-1.2, 1.0], &[-5.0, -5.0], &[5.0, 5.0], &opts);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{:?}", r.x);
    }

    #[test]
    fn respects_the_box() {
        let f = |x: &[f64]| (x[0] + 3.0).powi(2) + (x[1] - 0.5).powi(2);
        let r = nelder_mead(f, &[0.5, 0.0], &[0.0, 0.0], &[1.0, 1.0], &SimplexOptions::default());
        assert_eq!(r.x[0], 0.0);
        assert!((r.x[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn hypercube_is_stratified() {
        let pts = latin_hypercube(20, &[0.0, -1.0], &[1.0, 1.0], &mut path_rng(5, 0));
        for j in 0..2 {
            let mut cells: Vec<usize> = pts
                .iter()
                .map(|p| {
                    let (lo, hi) = if j == 0 { (0.0, 1.0) } else { (-1.0, 1.0) };
                    ((p[j] - lo) / (hi - lo) * 20.0) as usize
                })
                .collect();
            cells.sort();
            assert_eq!(cells, (0..20).collect::<Vec<_>>());
        }
    }
}
