use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::empirics::empirical_stats;
use super::signature::{fit_signature_with, FitOptions, FitResult};
use crate::error::{invalid, Result};
use crate::model::{ModelParams, TrawlKind};
use crate::simulate::{path_rng, simulate_path};

#[derive(Debug, Clone)]
pub struct BootstrapConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub v0: i64,
    pub n_paths: usize,
    pub kind: TrawlKind,
    pub seed: u64,
    pub grid: Vec<f64>,
    pub fit: FitOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    /// Standard deviation of each parameter across successful refits.
    pub se: BTreeMap<String, f64>,
    pub mean: BTreeMap<String, f64>,
    /// One map per successful refit, in path order.
    pub estimates: Vec<BTreeMap<String, f64>>,
    pub n_paths: usize,
    /// Paths whose fit ended without meeting the simplex tolerance.
    pub n_nonconverged: usize,
    /// Paths that could not be fitted at all (for example, no price moves).
    pub n_failed: usize,
}

/// Flat parameter map: `b`, the trawl parameters by name and `nu[y]` for
/// every jump size.
pub fn parameter_map(params: &ModelParams) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    out.insert("b".to_string(), params.b());
    for (name, v) in params.trawl.family().named_params() {
        out.insert(name.to_string(), v);
    }
    for (y, v) in params.levy.entries() {
        out.insert(format!("nu[{y}]"), *v);
    }
    out
}

/// Model-based bootstrap: simulate at `params`, refit each path and report
/// the spread of the estimates.
///
/// Path `i` uses [`path_rng`]`(seed, i)`, so results do not depend on the
/// number of worker threads.
pub fn bootstrap(params: &ModelParams, config: &BootstrapConfig) -> Result<BootstrapResult> {
    if config.n_paths < 2 {
        return Err(invalid("bootstrap needs at least two paths"));
    }
    let fits: Vec<Option<FitResult>> = (0..config.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(config.seed, i as u64);
            let path = simulate_path(params, config.t_start, config.t_end, config.v0, &mut rng).ok()?;
            let stats = empirical_stats(&path, &[], &config.grid).ok()?;
            fit_signature_with(&stats, config.kind, &config.fit).ok()
        })
        .collect();

    let n_failed = fits.iter().filter(|f| f.is_none()).count();
    let n_nonconverged = fits.iter().flatten().filter(|f| !f.converged).count();
    let mut estimates: Vec<BTreeMap<String, f64>> = fits.iter().flatten().map(|f| parameter_map(&f.params)).collect();
    // a jump size missing from one refit has estimated intensity zero there
    let keys: BTreeSet<String> = estimates.iter().flat_map(|m| m.keys().cloned()).collect();
    for m in &mut estimates {
        for k in &keys {
            m.entry(k.clone()).or_insert(0.0);
        }
    }
    let n = estimates.len() as f64;
    let mut mean = BTreeMap::new();
    let mut se = BTreeMap::new();
    for k in &keys {
        let vals: Vec<f64> = estimates.iter().map(|m| m[k]).collect();
        let m = vals.iter().sum::<f64>() / n;
        let var = if n > 1.0 { vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0) } else { f64::NAN };
        mean.insert(k.clone(), m);
        se.insert(k.clone(), var.sqrt());
    }
    Ok(BootstrapResult { se, mean, estimates, n_paths: config.n_paths, n_nonconverged, n_failed })
}
