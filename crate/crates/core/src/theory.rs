//! Closed-form distributional quantities of the price process.
//!
//! Returns over a window of length `t` decompose into independent arrivals
//! and departures, so every cumulant is the Lévy cumulant scaled by an area:
//! `b t` for odd orders and `b t + 2 leb(A_t \ A)` for even ones.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Result};
use crate::model::{ModelParams, TrawlFamily, TrawlSpec};
use crate::special::poisson_upper_tail;

/// Tail-mass target for automatic IFFT length selection.
pub const PMF_TAIL_TARGET: f64 = 1e-10;

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// `kappa_j(P_t - P_0)`.
pub fn return_cumulant(params: &ModelParams, t: f64, j: u32) -> Result<f64> {
    check_nonneg("t", t)?;
    if j == 0 {
        return Err(invalid("cumulant order must be >= 1"));
    }
    let b = params.b();
    let area = if j % 2 == 1 { b * t } else { b * t + 2.0 * params.trawl.increment(t)? };
    Ok(area * params.levy.cumulant(j))
}

/// `Var(P_t - P_0)`.
pub fn return_variance(params: &ModelParams, t: f64) -> Result<f64> {
    return_cumulant(params, t, 2)
}

/// Log characteristic function of `P_t - P_0` at `theta`.
pub fn return_cf(params: &ModelParams, t: f64, theta: f64) -> Result<Complex64> {
    check_nonneg("t", t)?;
    let inc = params.trawl.increment(t)?;
    Ok(log_cf_with_area(params, params.b() * t, inc, theta))
}

fn log_cf_with_area(params: &ModelParams, bt: f64, inc: f64, theta: f64) -> Complex64 {
    let plus = params.levy.log_cf(theta);
    // C(-theta) is the complex conjugate of C(theta)
    plus * bt + (plus + plus.conj()) * inc
}

/// Probability mass function of an integer return on `[-m, m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfResult {
    /// `m`: the support is `-m..=m`.
    pub half_width: i64,
    /// `probabilities[i]` is `P(Y = i - m)`.
    pub probabilities: Vec<f64>,
    /// Bound on `|1 - sum p_y|` from mass outside the window plus roundoff.
    pub aliasing_bound: f64,
    pub n_points: usize,
}

impl PmfResult {
    pub fn prob(&self, y: i64) -> f64 {
        if y.abs() > self.half_width {
            return 0.0;
        }
        self.probabilities[(y + self.half_width) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(i, &p)| (i as i64 - self.half_width, p))
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(y, p)| y as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(y, p)| (y as f64 - m).powi(2) * p).sum()
    }
}

/// Total Poisson intensity of jump events making up `P_t - P_0`.
fn event_intensity(params: &ModelParams, t: f64) -> Result<f64> {
    Ok((params.b() * t + 2.0 * params.trawl.increment(t)?) * params.levy.total_mass())
}

/// Upper bound on `P(|P_t - P_0| > m)`.
///
/// `|Y|` is at most the largest jump size times a Poisson event count.
pub fn pmf_tail_bound(params: &ModelParams, t: f64, m: u64) -> Result<f64> {
    let mu = event_intensity(params, t)?;
    let ymax = params.levy.max_abs_jump().max(1);
    Ok(poisson_upper_tail(mu, m / ymax + 1))
}

fn roundoff_allowance(n: usize) -> f64 {
    8.0 * f64::EPSILON * n as f64 * ((n as f64).log2() + 1.0)
}

/// Smallest even IFFT length whose tail bound plus roundoff is below
/// [`PMF_TAIL_TARGET`].
pub fn auto_n_points(params: &ModelParams, t: f64) -> Result<usize> {
    let mu = event_intensity(params, t)?;
    let ymax = params.levy.max_abs_jump().max(1);
    let mut k = 1u64;
    loop {
        // m = (k - 1) * ymax keeps floor(m / ymax) + 1 = k
        let m = (k - 1) * ymax;
        let n = (2 * m + 2).max(4) as usize;
        if poisson_upper_tail(mu, k) + roundoff_allowance(n) < PMF_TAIL_TARGET {
            return Ok(n);
        }
        k += 1;
        if k > 50_000_000 {
            return Err(crate::Error::Numerical("PMF support too wide for automatic length".into()));
        }
    }
}

/// PMF of `P_t - P_0` by one inverse DFT of the characteristic function at
/// `theta_k = 2 pi k / n`; entries for `|y| <= n/2 - 1` are read off by
/// index wrapping.
pub fn return_pmf(params: &ModelParams, t: f64, n_points: usize) -> Result<PmfResult> {
    check_nonneg("t", t)?;
    if n_points % 2 != 0 || n_points < 4 {
        return Err(invalid(format!("n_points must be even and >= 4, got {n_points}")));
    }
    let n = n_points;
    let bt = params.b() * t;
    let inc = params.trawl.increment(t)?;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            log_cf_with_area(params, bt, inc, theta).exp()
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let m = (n / 2 - 1) as i64;
    let probabilities: Vec<f64> = (-m..=m)
        .map(|y| {
            let idx = y.rem_euclid(n as i64) as usize;
            (buf[idx].re / n as f64).max(0.0)
        })
        .collect();
    let aliasing_bound = pmf_tail_bound(params, t, m as u64)? + roundoff_allowance(n);
    Ok(PmfResult { half_width: m, probabilities, aliasing_bound, n_points: n })
}

/// [`return_pmf`] with the length chosen by [`auto_n_points`].
pub fn return_pmf_auto(params: &ModelParams, t: f64) -> Result<PmfResult> {
    let n = auto_n_points(params, t)?;
    return_pmf(params, t, n)
}

/// Law of an instantaneous jump given that one occurs:
/// `(nu(y) + nu(-y)(1 - b)) / ((2 - b) ||nu||)`.
pub fn jump_distribution(params: &ModelParams) -> BTreeMap<i64, f64> {
    let b = params.b();
    let levy = &params.levy;
    let norm = (2.0 - b) * levy.total_mass();
    let mut out = BTreeMap::new();
    for &y in levy.entries().keys() {
        for z in [y, -y] {
            let p = (levy.intensity(z) + levy.intensity(-z) * (1.0 - b)) / norm;
            if p > 0.0 {
                out.insert(z, p);
            }
        }
    }
    out
}

/// Autocovariances `gamma_k` and autocorrelations `rho_k`, `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Acf {
    pub delta: f64,
    pub gamma: Vec<f64>,
    pub rho: Vec<f64>,
}

/// `int_{t1}^{t2} d~(-u) du` for `t1 < t2`, evaluated as a ratio of overlaps so
/// that consecutive windows stay ordered in floating point.
fn unit_window_mass(spec: &TrawlSpec, t1: f64, t2: f64) -> f64 {
    if t1 == 0.0 {
        return spec.unit_increment(t2);
    }
    match spec.family() {
        &TrawlFamily::Exponential { lambda } => {
            (-lambda * t1).exp() * -(-lambda * (t2 - t1)).exp_m1() / lambda
        }
        &TrawlFamily::SupGamma { alpha, h } => {
            let head = spec.unit_overlap(t1);
            head * -((1.0 - h) * ((t2 - t1) / (alpha + t1)).ln_1p()).exp_m1()
        }
        TrawlFamily::SupGig { .. } => {
            let r1 = spec.gig_ln_overlap_ratio(t1);
            let r2 = spec.gig_ln_overlap_ratio(t2);
            -spec.unit_overlap(t1) * (r2 - r1).exp_m1()
        }
        TrawlFamily::Tabulated(_) => spec.unit_overlap(t1) - spec.unit_overlap(t2),
    }
}

/// Second difference `leb(A_{(k+1)d} \ A) - 2 leb(A_{kd} \ A) + leb(A_{(k-1)d} \ A)`.
pub(crate) fn increment_second_difference(spec: &TrawlSpec, delta: f64, k: usize) -> f64 {
    let k = k as f64;
    let later = unit_window_mass(spec, k * delta, (k + 1.0) * delta);
    let earlier = unit_window_mass(spec, (k - 1.0) * delta, k * delta);
    (1.0 - spec.b()) * (later - earlier)
}

pub fn acf(params: &ModelParams, delta: f64, k_max: usize) -> Result<Acf> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("sampling interval must be > 0, got {delta}")));
    }
    if k_max == 0 {
        return Err(invalid("k_max must be >= 1"));
    }
    let kappa2 = params.levy.cumulant(2);
    let var = return_variance(params, delta)?;
    let gamma: Vec<f64> = (1..=k_max)
        .map(|k| increment_second_difference(&params.trawl, delta, k) * kappa2)
        .collect();
    let rho = gamma.iter().map(|g| g / var).collect();
    Ok(Acf { delta, gamma, rho })
}

/// `E {P}_t^[r] = (2 - b) t sum |y|^r nu(y)`; free of the trawl shape.
pub fn expected_pv(params: &ModelParams, t: f64, r: f64) -> Result<f64> {
    check_nonneg("t", t)?;
    check_nonneg("r", r)?;
    Ok((2.0 - params.b()) * t * params.levy.abs_moment(r))
}

/// Expected realized variance over `[0, T]` sampled at `n` equal steps.
pub fn expected_rv(params: &ModelParams, horizon: f64, n: usize) -> Result<f64> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(invalid(format!("horizon must be > 0, got {horizon}")));
    }
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    let b = params.b();
    let step = horizon / n as f64;
    let k1 = params.levy.cumulant(1);
    let k2 = params.levy.cumulant(2);
    let inc = params.trawl.increment(step)?;
    Ok((b + 2.0 * inc / step) * horizon * k2 + b * b * horizon * step * k1 * k1)
}

/// Model variance signature `Var(P_delta - P_0) / delta`.
pub fn variance_signature(params: &ModelParams, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(invalid(format!("sampling interval must be > 0, got {delta}")));
    }
    Ok(return_variance(params, delta)? / delta)
}

/// Excess kurtosis `kappa_4 / kappa_2^2` of `P_t - P_0`.
pub fn excess_kurtosis(params: &ModelParams, t: f64) -> Result<f64> {
    let k2 = return_cumulant(params, t, 2)?;
    let k4 = return_cumulant(params, t, 4)?;
    Ok(k4 / (k2 * k2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LevyMeasure, TrawlSpec};

    fn reference() -> ModelParams {
        ModelParams::new(
            LevyMeasure::skellam(0.0138, 0.0131).unwrap(),
            TrawlSpec::exponential(0.396, 0.681).unwrap(),
        )
    }

    fn skellam_b1(rate: f64) -> ModelParams {
        ModelParams::new(
            LevyMeasure::skellam(rate, rate).unwrap(),
            TrawlSpec::exponential(1.0, 1.0).unwrap(),
        )
    }

    #[test]
    fn unit_return_variance() {
        let v = return_cumulant(&reference(), 1.0, 2).unwrap();
        let inc = 0.604 / 0.681 * (1.0 - (-0.681f64).exp());
        assert!((v - (0.396 + 2.0 * inc) * 0.0269).abs() < 1e-15);
        assert!((v - 0.034219).abs() < 5e-6);
        assert_eq!(return_cumulant(&reference(), 0.0, 2).unwrap(), 0.0);
        assert_eq!(return_cumulant(&skellam_b1(0.3), 2.0, 1).unwrap(), 0.0);
        assert!(return_cumulant(&reference(), -1.0, 2).is_err());
    }

    #[test]
    fn log_cf_values() {
        assert_eq!(return_cf(&reference(), 1.0, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        let c = return_cf(&skellam_b1(0.5), 1.0, PI).unwrap();
        assert!((c - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
        let sym = ModelParams::new(
            LevyMeasure::skellam(0.2, 0.2).unwrap(),
            TrawlSpec::exponential(0.4, 1.3).unwrap(),
        );
        for theta in [0.1, 1.0, 2.5] {
            let c = return_cf(&sym, 3.0, theta).unwrap();
            assert!(c.im.abs() < 1e-16);
            assert!(c.re <= 0.0);
        }
    }

    #[test]
    fn pmf_of_pure_skellam() {
        let pmf = return_pmf(&skellam_b1(0.5), 1.0, 60).unwrap();
        assert_eq!(pmf.half_width, 29);
        assert!((pmf.prob(0) - 0.46576).abs() < 1e-5);
        assert!((pmf.prob(1) - 0.20791).abs() < 1e-5);
        assert!((pmf.prob(-1) - pmf.prob(1)).abs() < 1e-15);
        assert!((1.0 - pmf.total()).abs() <= pmf.aliasing_bound);
        assert!(return_pmf(&skellam_b1(0.5), 1.0, 61).is_err());
    }

    #[test]
    fn pmf_collapses_at_zero_horizon() {
        let p = ModelParams::new(LevyMeasure::new([(1, 0.7)]).unwrap(), TrawlSpec::exponential(1.0, 1.0).unwrap());
        let pmf = return_pmf_auto(&p, 1e-12).unwrap();
        assert!((pmf.prob(0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn auto_length_meets_target() {
        for t in [0.1, 1.0, 60.0, 3600.0] {
            let pmf = return_pmf_auto(&reference(), t).unwrap();
            assert!(pmf.aliasing_bound < PMF_TAIL_TARGET);
            assert!((1.0 - pmf.total()).abs() < pmf.aliasing_bound);
        }
    }

    #[test]
    fn jump_law() {
        let law = jump_distribution(&reference());
        assert!((law[&1] - 0.50321).abs() < 1e-5);
        assert!((law[&-1] - 0.49679).abs() < 1e-5);
        assert!((law.values().sum::<f64>() - 1.0).abs() < 1e-15);
        let p = ModelParams::new(
            LevyMeasure::new([(1, 0.3), (-2, 0.1)]).unwrap(),
            TrawlSpec::exponential(1.0, 1.0).unwrap(),
        );
        let law = jump_distribution(&p);
        assert!((law[&1] - 0.75).abs() < 1e-15);
        assert!((law[&-2] - 0.25).abs() < 1e-15);
        assert!(!law.contains_key(&-1));
    }

    #[test]
    fn acf_at_unit_spacing() {
        let a = acf(&reference(), 1.0, 10).unwrap();
        assert!((a.rho[0] + 0.1701).abs() < 1e-4, "{}", a.rho[0]);
        assert!(a.rho.iter().all(|&r| r < 0.0));
        let levy = acf(&skellam_b1(0.3), 1.0, 5).unwrap();
        assert!(levy.rho.iter().all(|&r| r == 0.0));
        for d in [1e-4, 1e4] {
            assert!(acf(&reference(), d, 1).unwrap().rho[0].abs() < 0.01);
        }
    }

    #[test]
    fn power_variation_and_rv() {
        let p = reference();
        assert!((expected_pv(&p, 1.0, 0.0).unwrap() - 1.604 * 0.0269).abs() < 1e-15);
        let other = ModelParams::new(p.levy.clone(), TrawlSpec::sup_gamma(0.396, 0.7, 3.0).unwrap());
        assert_eq!(expected_pv(&p, 7.0, 1.5).unwrap(), expected_pv(&other, 7.0, 1.5).unwrap());
        let rv = expected_rv(&p, 3600.0, 3600).unwrap();
        assert!((rv - 123.19).abs() < 0.01, "{rv}");
        let limit = (2.0 - 0.396) * 3600.0 * 0.0269;
        let dense = expected_rv(&p, 3600.0, 1_000_000).unwrap();
        assert!(((dense - limit) / limit).abs() < 1e-3);
    }
}
