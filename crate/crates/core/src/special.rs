//! Special functions used by the trawl families and the PMF error bound.
//!
//! `bessel_k` follows Temme's method: for `x < 2` the series for `K_mu` and
//! `K_{mu+1}` with `|mu| <= 1/2`, for `x >= 2` Steed's continued fraction.
//! Higher orders come from the (stable) upward recurrence, carried with an
//! explicit log-scale so that `ln K` stays available when `K` itself would
//! overflow or underflow.

use crate::error::{invalid, Error, Result};
use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 20_000;

/// Taylor coefficients of `1 / Gamma(1 + z)` around zero.
const RECIP_GAMMA_1P: [f64; 29] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
];

/// `(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))` for `|mu| <= 1/2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mut plus = 0.0;
    let mut minus = 0.0;
    let mut pow = 1.0;
    for (j, &c) in RECIP_GAMMA_1P.iter().enumerate() {
        let term = c * pow;
        plus += term;
        if j % 2 == 0 {
            minus += term;
            gam2 += term;
        } else {
            minus -= term;
        }
        pow *= mu;
    }
    // odd coefficients: 1/Gamma(1-mu) - 1/Gamma(1+mu) = -2 sum c_j mu^j
    let mut pow = 1.0;
    for &c in RECIP_GAMMA_1P.iter().skip(1).step_by(2) {
        gam1 -= c * pow;
        pow *= mu * mu;
    }
    (gam1, gam2, plus, minus)
}

/// `K_mu(x)` and `K_{mu+1}(x)` for `|mu| <= 1/2`, `0 < x < 2`.
fn temme_series(mu: f64, x: f64) -> (f64, f64) {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - fi * ff);
        sum1 += del1;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / x)
}

/// `e^x K_mu(x)` and `e^x K_{mu+1}(x)` for `|mu| <= 1/2`, `x >= 2`.
fn steed_scaled(mu: f64, x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k_mu = (PI / (2.0 * x)).sqrt() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    (k_mu, k_mu1)
}

const RESCALE: f64 = 1e250;

/// `K_order(x) = mantissa * exp(log_scale)`.
fn bessel_k_parts(order: f64, x: f64) -> (f64, f64) {
    let nu = order.abs();
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (mut k_mu, mut k_mu1, mut log_scale) = if x < 2.0 {
        let (a, b) = temme_series(mu, x);
        (a, b, 0.0)
    } else {
        let (a, b) = steed_scaled(mu, x);
        (a, b, -x)
    };
    let xi2 = 2.0 / x;
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
        if k_mu1 > RESCALE {
            k_mu /= RESCALE;
            k_mu1 /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (k_mu, log_scale)
}

fn check_args(order: f64, x: f64) -> Result<()> {
    if !order.is_finite() {
        return Err(invalid(format!("Bessel order must be finite, got {order}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("Bessel K requires finite x > 0, got {x}")));
    }
    Ok(())
}

/// Modified Bessel function of the second kind `K_order(x)`.
///
/// Symmetric in the sign of `order`. Returns [`Error::Numerical`] when the
/// value overflows (tiny `x`, large order) or underflows (`x` beyond ~700).
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    check_args(order, x)?;
    let (m, s) = bessel_k_parts(order, x);
    let v = m * s.exp();
    if v.is_infinite() || (s > 0.0 && !v.is_finite()) {
        return Err(Error::Numerical(format!("K_{order}({x}) overflows")));
    }
    if v == 0.0 || v < f64::MIN_POSITIVE {
        return Err(Error::Numerical(format!("K_{order}({x}) underflows")));
    }
    Ok(v)
}

/// Natural logarithm of `K_order(x)`; finite wherever the arguments are valid.
pub fn ln_bessel_k(order: f64, x: f64) -> Result<f64> {
    check_args(order, x)?;
    let (m, s) = bessel_k_parts(order, x);
    Ok(m.ln() + s)
}

/// `ln K_order(x)` without argument checks; callers guarantee finite `x > 0`.
pub(crate) fn ln_bessel_k_unchecked(order: f64, x: f64) -> f64 {
    let (m, s) = bessel_k_parts(order, x);
    m.ln() + s
}

/// `e^x K_order(x)`.
pub fn bessel_k_scaled(order: f64, x: f64) -> Result<f64> {
    check_args(order, x)?;
    let (m, s) = bessel_k_parts(order, x);
    let v = m * (s + x).exp();
    if !v.is_finite() {
        return Err(Error::Numerical(format!("scaled K_{order}({x}) overflows")));
    }
    Ok(v)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0` (Lanczos, ~15 significant digits).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `P(K >= k)` for `K ~ Poisson(mean)`.
pub fn poisson_upper_tail(mean: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if mean <= 0.0 {
        return 0.0;
    }
    let ln_pmf = |j: u64| -> f64 { -mean + j as f64 * mean.ln() - ln_gamma(j as f64 + 1.0) };
    if (k as f64) <= mean + 1.0 {
        let mut lower = 0.0;
        for j in 0..k {
            lower += ln_pmf(j).exp();
        }
        return (1.0 - lower).max(0.0);
    }
    // terms decrease monotonically from k onwards
    let mut sum = 0.0;
    let mut j = k;
    loop {
        let term = ln_pmf(j).exp();
        sum += term;
        if term <= sum * 1e-17 || term == 0.0 {
            break;
        }
        j += 1;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn half_integer_closed_forms() {
        for &x in &[1e-3, 0.3, 1.0, 1.9, 2.0, 2.1, 7.5, 40.0, 300.0] {
            let k_half = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!(rel(bessel_k(0.5, x).unwrap(), k_half) < 1e-13, "x={x}");
            assert!(rel(bessel_k(-0.5, x).unwrap(), k_half) < 1e-13);
            let k_3half = k_half * (1.0 + 1.0 / x);
            assert!(rel(bessel_k(1.5, x).unwrap(), k_3half) < 1e-13, "x={x}");
            let k_5half = k_half * (1.0 + 3.0 / x + 3.0 / (x * x));
            assert!(rel(bessel_k(2.5, x).unwrap(), k_5half) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn reference_values_at_one() {
        assert!(rel(bessel_k(0.0, 1.0).unwrap(), 0.421_024_438_240_708_33) < 1e-13);
        assert!(rel(bessel_k(1.0, 1.0).unwrap(), 0.601_907_230_197_234_57) < 1e-13);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_k(0.0, 0.0).is_err());
        assert!(bessel_k(0.0, -1.0).is_err());
        assert!(bessel_k(f64::NAN, 1.0).is_err());
        assert!(matches!(bessel_k(0.0, 800.0), Err(Error::Numerical(_))));
        assert!(matches!(bessel_k(150.0, 1e-6), Err(Error::Numerical(_))));
        // log form survives both
        assert!(ln_bessel_k(0.0, 800.0).unwrap().is_finite());
        assert!(ln_bessel_k(150.0, 1e-6).unwrap().is_finite());
    }

    #[test]
    fn scaled_matches_unscaled() {
        let k = bessel_k(3.3, 5.0).unwrap();
        let ks = bessel_k_scaled(3.3, 5.0).unwrap();
        assert!(rel(ks, k * 5f64.exp()) < 1e-14);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.1) - 2.252_712_651_734_206).abs() < 1e-12);
    }

    #[test]
    fn poisson_tail() {
        assert_eq!(poisson_upper_tail(1.0, 0), 1.0);
        assert!((poisson_upper_tail(1.0, 1) - (1.0 - (-1f64).exp())).abs() < 1e-15);
        // P(K >= 3), mean 0.5
        let m: f64 = 0.5;
        let exact = 1.0 - (-m).exp() * (1.0 + m + m * m / 2.0);
        assert!(rel(poisson_upper_tail(m, 3), exact) < 1e-10);
        assert!(poisson_upper_tail(1.0, 40) < 1e-40);
    }
}
