use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::numeric::{gauss_legendre, increasing_root};

const GIG_PANELS: usize = 30;
use crate::special::{ln_bessel_k_unchecked, ln_gamma};

/// Relative tolerance for the monotone root finds behind the quantiles.
pub const QUANTILE_REL_TOL: f64 = 1e-10;

/// Shape of the non-squashed trawl function `d~`.
///
/// Parametric families are superpositions of exponential decays; `Tabulated`
/// holds a monotone piecewise-linear `d~`.
#[derive(Debug, Clone, PartialEq)]
pub enum TrawlFamily {
    /// `d~(s) = exp(lambda s)`.
    Exponential { lambda: f64 },
    /// `d~(s) = (1 - s/alpha)^(-H)`.
    SupGamma { alpha: f64, h: f64 },
    /// Generalized-inverse-Gaussian mixing; `gamma = 0` is the inverse-gamma limit.
    SupGig { gamma: f64, delta: f64, nu: f64 },
    Tabulated(TabulatedTrawl),
}

impl TrawlFamily {
    pub fn kind(&self) -> TrawlKind {
        match self {
            TrawlFamily::Exponential { .. } => TrawlKind::Exponential,
            TrawlFamily::SupGamma { .. } => TrawlKind::SupGamma,
            TrawlFamily::SupGig { .. } => TrawlKind::SupGig,
            TrawlFamily::Tabulated(_) => TrawlKind::Tabulated,
        }
    }

    /// Named shape parameters, in a fixed order per family.
    pub fn named_params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            TrawlFamily::Exponential { lambda } => vec![("lambda", lambda)],
            TrawlFamily::SupGamma { alpha, h } => vec![("alpha", alpha), ("H", h)],
            TrawlFamily::SupGig { gamma, delta, nu } => {
                vec![("gamma", gamma), ("delta", delta), ("nu", nu)]
            }
            TrawlFamily::Tabulated(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrawlKind {
    Exponential,
    SupGamma,
    SupGig,
    Tabulated,
}

impl TrawlKind {
    pub fn name(self) -> &'static str {
        match self {
            TrawlKind::Exponential => "exponential",
            TrawlKind::SupGamma => "sup-gamma",
            TrawlKind::SupGig => "sup-gig",
            TrawlKind::Tabulated => "tabulated",
        }
    }
}

impl fmt::Display for TrawlKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrawlKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Ok(TrawlKind::Exponential),
            "sup-gamma" | "supgamma" => Ok(TrawlKind::SupGamma),
            "sup-gig" | "supgig" => Ok(TrawlKind::SupGig),
            "tabulated" => Ok(TrawlKind::Tabulated),
            other => Err(invalid(format!("unknown trawl family '{other}'"))),
        }
    }
}

/// Monotone piecewise-linear `d~`, zero to the left of the first knot.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedTrawl {
    /// Lags `u = -s`, ascending from 0.
    lags: Vec<f64>,
    values: Vec<f64>,
    /// `tail[i] = int_{lags[i]}^{lags[last]} d~(-u) du`.
    tail: Vec<f64>,
}

impl TabulatedTrawl {
    /// Builds from `(s, d~(s))` knots sorted by ascending `s <= 0`, ending at `(0, 1)`.
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("tabulated trawl needs at least two knots"));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(invalid("tabulated trawl knots must have strictly increasing s"));
            }
            if w[0].1 > w[1].1 {
                return Err(invalid("tabulated d~ must be non-decreasing in s"));
            }
        }
        let &(s_last, v_last) = points.last().unwrap();
        if s_last != 0.0 || v_last != 1.0 {
            return Err(invalid("tabulated trawl must end at the knot (0, 1)"));
        }
        if points.iter().any(|&(s, v)| !s.is_finite() || !(0.0..=1.0).contains(&v)) {
            return Err(invalid("tabulated knots need finite s and d~ in [0, 1]"));
        }
        let lags: Vec<f64> = points.iter().rev().map(|&(s, _)| -s).collect();
        let values: Vec<f64> = points.iter().rev().map(|&(_, v)| v).collect();
        let n = lags.len();
        let mut tail = vec![0.0; n];
        for i in (0..n - 1).rev() {
            tail[i] = tail[i + 1] + 0.5 * (lags[i + 1] - lags[i]) * (values[i] + values[i + 1]);
        }
        Ok(Self { lags, values, tail })
    }

    /// Knots as `(s, d~(s))`, ascending in `s`.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.lags
            .iter()
            .zip(&self.values)
            .rev()
            .map(|(&u, &v)| (if u == 0.0 { 0.0 } else { -u }, v))
            .collect()
    }

    fn segment(&self, lag: f64) -> Option<usize> {
        if lag > *self.lags.last().unwrap() {
            return None;
        }
        let i = self.lags.partition_point(|&u| u <= lag);
        Some(i.saturating_sub(1).min(self.lags.len() - 2))
    }

    fn value(&self, lag: f64) -> f64 {
        match self.segment(lag) {
            None => 0.0,
            Some(i) => {
                let (u0, u1) = (self.lags[i], self.lags[i + 1]);
                let w = (lag - u0) / (u1 - u0);
                self.values[i] + w * (self.values[i + 1] - self.values[i])
            }
        }
    }

    fn tail_integral(&self, lag: f64) -> f64 {
        match self.segment(lag) {
            None => 0.0,
            Some(i) => {
                let u1 = self.lags[i + 1];
                self.tail[i + 1] + 0.5 * (u1 - lag) * (self.value(lag) + self.values[i + 1])
            }
        }
    }

    fn area(&self) -> f64 {
        self.tail[0]
    }

    /// Smallest lag with `d~(-lag) <= target`.
    fn quantile(&self, target: f64) -> f64 {
        if target >= 1.0 {
            return 0.0;
        }
        for i in 0..self.lags.len() - 1 {
            let (v0, v1) = (self.values[i], self.values[i + 1]);
            if v1 <= target {
                if v0 <= target {
                    return self.lags[i];
                }
                let w = (v0 - target) / (v0 - v1);
                return self.lags[i] + w * (self.lags[i + 1] - self.lags[i]);
            }
        }
        *self.lags.last().unwrap()
    }
}

/// Precomputed constants for the sup-GIG family.
#[derive(Debug, Clone, Copy, PartialEq)]
enum GigConsts {
    /// `gamma > 0`: `ln K_nu(gamma delta)` and `ln K_{nu-1}(gamma delta)`.
    Proper { ln_k: f64, ln_k_minus: f64 },
    /// `gamma = 0`: inverse-gamma mixing with shape `a = -nu`.
    InverseGamma { a: f64, ln_gamma_a: f64 },
}

/// Squashed trawl: permanence level `b` plus the shape of `d~`.
///
/// `d(s) = b + (1 - b) d~(s)` for `s <= 0`. All areas are in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct TrawlSpec {
    b: f64,
    family: TrawlFamily,
    /// `int_0^inf d~(-u) du`.
    unit_area: f64,
    gig: Option<GigConsts>,
}

impl TrawlSpec {
    pub fn new(b: f64, family: TrawlFamily) -> Result<Self> {
        if !(0.0..=1.0).contains(&b) {
            return Err(invalid(format!("permanence b must lie in [0, 1], got {b}")));
        }
        let mut gig = None;
        let unit_area = match &family {
            &TrawlFamily::Exponential { lambda } => {
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return Err(invalid(format!("exponential trawl needs lambda > 0, got {lambda}")));
                }
                1.0 / lambda
            }
            &TrawlFamily::SupGamma { alpha, h } => {
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(invalid(format!("sup-gamma trawl needs alpha > 0, got {alpha}")));
                }
                if !(h > 1.0) || !h.is_finite() {
                    return Err(invalid(format!(
                        "sup-gamma trawl needs H > 1 for a finite trawl area, got {h}"
                    )));
                }
                alpha / (h - 1.0)
            }
            &TrawlFamily::SupGig { gamma, delta, nu } => {
                if !(gamma >= 0.0) || !gamma.is_finite() {
                    return Err(invalid(format!("sup-GIG trawl needs gamma >= 0, got {gamma}")));
                }
                if !(delta > 0.0) || !delta.is_finite() {
                    return Err(invalid(format!("sup-GIG trawl needs delta > 0, got {delta}")));
                }
                if !nu.is_finite() {
                    return Err(invalid("sup-GIG order nu must be finite"));
                }
                if gamma == 0.0 {
                    if !(nu < 0.0) {
                        return Err(invalid(format!(
                            "sup-GIG with gamma = 0 (inverse-gamma limit) needs nu < 0, got {nu}"
                        )));
                    }
                    let a = -nu;
                    gig = Some(GigConsts::InverseGamma { a, ln_gamma_a: ln_gamma(a) });
                    2.0 * a / (delta * delta)
                } else {
                    let x = gamma * delta;
                    let ln_k = ln_bessel_k_unchecked(nu, x);
                    let ln_k_minus = ln_bessel_k_unchecked(nu - 1.0, x);
                    gig = Some(GigConsts::Proper { ln_k, ln_k_minus });
                    gamma / delta * (ln_k_minus - ln_k).exp()
                }
            }
            TrawlFamily::Tabulated(tab) => tab.area(),
        };
        if !(unit_area > 0.0) || !unit_area.is_finite() {
            return Err(Error::Numerical(format!("trawl area is not finite and positive: {unit_area}")));
        }
        Ok(Self { b, family, unit_area, gig })
    }

    pub fn exponential(b: f64, lambda: f64) -> Result<Self> {
        Self::new(b, TrawlFamily::Exponential { lambda })
    }

    pub fn sup_gamma(b: f64, alpha: f64, h: f64) -> Result<Self> {
        Self::new(b, TrawlFamily::SupGamma { alpha, h })
    }

    pub fn sup_gig(b: f64, gamma: f64, delta: f64, nu: f64) -> Result<Self> {
        Self::new(b, TrawlFamily::SupGig { gamma, delta, nu })
    }

    pub fn tabulated(b: f64, points: &[(f64, f64)]) -> Result<Self> {
        Self::new(b, TrawlFamily::Tabulated(TabulatedTrawl::new(points)?))
    }

    /// Permanence parameter.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn family(&self) -> &TrawlFamily {
        &self.family
    }

    pub fn kind(&self) -> TrawlKind {
        self.family.kind()
    }

    /// Same shape, different permanence level.
    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(b, self.family.clone())
    }

    /// `d~(-lag)` for `lag >= 0`.
    pub(crate) fn unit_d(&self, lag: f64) -> f64 {
        match (&self.family, self.gig) {
            (&TrawlFamily::Exponential { lambda }, _) => (-lambda * lag).exp(),
            (&TrawlFamily::SupGamma { alpha, h }, _) => (-h * (lag / alpha).ln_1p()).exp(),
            (&TrawlFamily::SupGig { gamma, delta, nu }, Some(GigConsts::Proper { ln_k, .. })) => {
                if lag == 0.0 {
                    return 1.0;
                }
                let g2 = gamma * gamma;
                let x = delta * (g2 + 2.0 * lag).sqrt();
                (-0.5 * nu * (2.0 * lag / g2).ln_1p() + ln_bessel_k_unchecked(nu, x) - ln_k).exp()
            }
            (&TrawlFamily::SupGig { delta, .. }, Some(GigConsts::InverseGamma { a, ln_gamma_a })) => {
                if lag == 0.0 {
                    return 1.0;
                }
                let z = delta * (2.0 * lag).sqrt();
                ((1.0 - a) * std::f64::consts::LN_2 + a * z.ln() + ln_bessel_k_unchecked(a, z)
                    - ln_gamma_a)
                    .exp()
                    .min(1.0)
            }
            (TrawlFamily::Tabulated(tab), _) => tab.value(lag),
            (TrawlFamily::SupGig { .. }, None) => unreachable!("sup-GIG constants are set in new"),
        }
    }

    /// `ln(overlap(t) / leb(A))` for the sup-GIG family.
    pub(crate) fn gig_ln_overlap_ratio(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match (&self.family, self.gig) {
            (&TrawlFamily::SupGig { gamma, delta, nu }, Some(GigConsts::Proper { ln_k_minus, .. })) => {
                let g2 = gamma * gamma;
                let x = delta * (g2 + 2.0 * t).sqrt();
                0.5 * (1.0 - nu) * (2.0 * t / g2).ln_1p() + ln_bessel_k_unchecked(nu - 1.0, x)
                    - ln_k_minus
            }
            (&TrawlFamily::SupGig { delta, .. }, Some(GigConsts::InverseGamma { a, ln_gamma_a })) => {
                let z = delta * (2.0 * t).sqrt();
                let ln_gamma_a1 = ln_gamma_a + a.ln();
                (-a * std::f64::consts::LN_2 + (a + 1.0) * z.ln() + ln_bessel_k_unchecked(a + 1.0, z)
                    - ln_gamma_a1)
                    .min(0.0)
            }
            _ => unreachable!("only called for sup-GIG"),
        }
    }

    /// `int_t^inf d~(-u) du`.
    pub(crate) fn unit_overlap(&self, t: f64) -> f64 {
        if t == 0.0 {
            return self.unit_area;
        }
        match &self.family {
            &TrawlFamily::Exponential { lambda } => (-lambda * t).exp() / lambda,
            &TrawlFamily::SupGamma { alpha, h } => {
                alpha / (h - 1.0) * ((1.0 - h) * (t / alpha).ln_1p()).exp()
            }
            TrawlFamily::SupGig { .. } => self.unit_area * self.gig_ln_overlap_ratio(t).exp(),
            TrawlFamily::Tabulated(tab) => tab.tail_integral(t),
        }
    }

    /// `int_0^t d~(-u) du`, computed without cancellation at small `t`.
    pub(crate) fn unit_increment(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match &self.family {
            &TrawlFamily::Exponential { lambda } => -(-lambda * t).exp_m1() / lambda,
            &TrawlFamily::SupGamma { alpha, h } => sup_gamma_unit_increment(alpha, h, t),
            TrawlFamily::SupGig { .. } => {
                let ln_ratio = self.gig_ln_overlap_ratio(t);
                if ln_ratio.abs() < 1e-3 {
                    // panels halve toward 0, where d~ is least smooth
                    let mut acc = 0.0;
                    let mut hi = t;
                    for _ in 0..GIG_PANELS {
                        let lo = 0.5 * hi;
                        acc += gauss_legendre(|u| Ok(self.unit_d(u)), lo, hi).unwrap_or(f64::NAN);
                        hi = lo;
                    }
                    acc + gauss_legendre(|u| Ok(self.unit_d(u)), 0.0, hi).unwrap_or(f64::NAN)
                } else {
                    -self.unit_area * ln_ratio.exp_m1()
                }
            }
            TrawlFamily::Tabulated(tab) => tab.area() - tab.tail_integral(t),
        }
    }

    /// Squashed trawl function `d(s)` for `s <= 0`.
    pub fn d(&self, s: f64) -> Result<f64> {
        check_time(s <= 0.0, "trawl function is defined for s <= 0", s)?;
        Ok(self.b + (1.0 - self.b) * self.unit_d(-s))
    }

    /// Non-squashed trawl function `d~(s)` for `s <= 0`.
    pub fn d_tilde(&self, s: f64) -> Result<f64> {
        check_time(s <= 0.0, "trawl function is defined for s <= 0", s)?;
        Ok(self.unit_d(-s))
    }

    /// `leb(A)`.
    pub fn leb_a(&self) -> f64 {
        (1.0 - self.b) * self.unit_area
    }

    /// `leb(A_t ∩ A)`, decreasing and convex in `t`.
    pub fn overlap(&self, t: f64) -> Result<f64> {
        check_time(t >= 0.0, "overlap needs t >= 0", t)?;
        Ok((1.0 - self.b) * self.unit_overlap(t))
    }

    /// `leb(A_t \ A) = leb(A) - leb(A_t ∩ A)`.
    pub fn increment(&self, t: f64) -> Result<f64> {
        check_time(t >= 0.0, "increment needs t >= 0", t)?;
        if t.is_infinite() {
            return Ok(self.leb_a());
        }
        Ok((1.0 - self.b) * self.unit_increment(t))
    }

    /// Lifetime of a fleeting event: the `t` with `d~(-t) = 1 - p`.
    pub fn lifetime_quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(invalid(format!("lifetime quantile needs p in [0, 1), got {p}")));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        let target = 1.0 - p;
        match &self.family {
            &TrawlFamily::Exponential { lambda } => Ok(-(-p).ln_1p() / lambda),
            &TrawlFamily::SupGamma { alpha, h } => Ok(alpha * (-(-p).ln_1p() / h).exp_m1()),
            TrawlFamily::SupGig { .. } => increasing_root(
                |t| Ok(target - self.unit_d(t)),
                self.unit_area,
                QUANTILE_REL_TOL,
            ),
            TrawlFamily::Tabulated(tab) => Ok(tab.quantile(target)),
        }
    }

    /// Residual lifetime of an event alive at time 0: the `t` with
    /// `overlap(t) / leb(A) = 1 - u`.
    pub fn residual_quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(invalid(format!("residual quantile needs u in [0, 1), got {u}")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let target = 1.0 - u;
        match &self.family {
            &TrawlFamily::Exponential { lambda } => Ok(-(-u).ln_1p() / lambda),
            &TrawlFamily::SupGamma { alpha, h } => Ok(alpha * (-(-u).ln_1p() / (h - 1.0)).exp_m1()),
            TrawlFamily::SupGig { .. } => {
                let ln_target = target.ln();
                increasing_root(
                    |t| Ok(ln_target - self.gig_ln_overlap_ratio(t)),
                    self.unit_area,
                    QUANTILE_REL_TOL,
                )
            }
            TrawlFamily::Tabulated(tab) => {
                let area = tab.area();
                increasing_root(|t| Ok(target - tab.tail_integral(t) / area), area, QUANTILE_REL_TOL)
            }
        }
    }
}

/// `alpha (1 - (1 + t/alpha)^(1-H)) / (H - 1)`, continuous through `H = 1`.
pub(crate) fn sup_gamma_unit_increment(alpha: f64, h: f64, t: f64) -> f64 {
    let x = (t / alpha).ln_1p();
    let h1 = h - 1.0;
    let y = h1 * x;
    if y.abs() < 1e-8 {
        alpha * x * (1.0 - 0.5 * y)
    } else {
        -alpha * (-y).exp_m1() / h1
    }
}

fn check_time(ok: bool, msg: &str, value: f64) -> Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(invalid(format!("{msg}, got {value}")))
    }
}

/// `d(s)` for `s <= 0`.
pub fn trawl_d(spec: &TrawlSpec, s: f64) -> Result<f64> {
    spec.d(s)
}

/// `leb(A)`.
pub fn trawl_leb_a(spec: &TrawlSpec) -> f64 {
    spec.leb_a()
}

/// `leb(A_t ∩ A)`.
pub fn trawl_overlap(spec: &TrawlSpec, t: f64) -> Result<f64> {
    spec.overlap(t)
}

/// `leb(A_t \ A)`.
pub fn trawl_increment(spec: &TrawlSpec, t: f64) -> Result<f64> {
    spec.increment(t)
}

/// Fleeting-event lifetime quantile.
pub fn lifetime_quantile(spec: &TrawlSpec, p: f64) -> Result<f64> {
    spec.lifetime_quantile(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_exp() -> TrawlSpec {
        TrawlSpec::exponential(0.396, 0.681).unwrap()
    }

    #[test]
    fn exponential_values() {
        let spec = reference_exp();
        assert_eq!(spec.d(0.0).unwrap(), 1.0);
        let expected = 0.396 + 0.604 * (-0.681f64).exp();
        assert!((spec.d(-1.0).unwrap() - expected).abs() < 1e-15);
        assert!((spec.d(-1.0).unwrap() - 0.70169).abs() < 1e-5);
        assert!((spec.leb_a() - 0.604 / 0.681).abs() < 1e-15);
        assert!((spec.overlap(1.0).unwrap() - 0.44889).abs() < 1e-5);
        assert!((spec.increment(1.0).unwrap() - 0.43804).abs() < 1e-5);
        assert_eq!(spec.increment(0.0).unwrap(), 0.0);
        assert_eq!(spec.overlap(0.0).unwrap(), spec.leb_a());
        assert!((spec.increment(1e6).unwrap() - 0.88693).abs() < 1e-5);
        assert!((spec.lifetime_quantile(0.5).unwrap() - 2f64.ln() / 0.681).abs() < 1e-14);
    }

    #[test]
    fn sup_gamma_values() {
        let spec = TrawlSpec::sup_gamma(0.0, 1.0, 2.0).unwrap();
        assert!((spec.d(-1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((spec.leb_a() - 1.0).abs() < 1e-15);
        assert!((spec.overlap(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((spec.lifetime_quantile(0.5).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn sup_gamma_increment_is_continuous_at_h_one() {
        let at_one = sup_gamma_unit_increment(1.5, 1.0, 3.0);
        assert!((at_one - 1.5 * 3f64.ln()).abs() < 1e-14);
        let near = sup_gamma_unit_increment(1.5, 1.0 + 1e-7, 3.0);
        assert!((near - at_one).abs() < 1e-6);
    }

    #[test]
    fn sup_gig_half_order_area() {
        let spec = TrawlSpec::sup_gig(0.0, 1.0, 1.0, 0.5).unwrap();
        assert!((spec.leb_a() - 1.0).abs() < 1e-13);
        assert_eq!(spec.d(0.0).unwrap(), 1.0);
    }

    #[test]
    fn inverse_gamma_limit_matches_small_gamma() {
        let limit = TrawlSpec::sup_gig(0.2, 0.0, 0.45, -0.6).unwrap();
        let near = TrawlSpec::sup_gig(0.2, 1e-7, 0.45, -0.6).unwrap();
        assert!((limit.leb_a() - near.leb_a()).abs() < 1e-6 * limit.leb_a());
        for &t in &[0.01, 0.3, 2.0, 40.0] {
            let (a, b) = (limit.overlap(t).unwrap(), near.overlap(t).unwrap());
            assert!((a - b).abs() < 1e-6 * a, "t={t}: {a} vs {b}");
            let (a, b) = (limit.d(-t).unwrap(), near.d(-t).unwrap());
            assert!((a - b).abs() < 1e-6, "t={t}: {a} vs {b}");
        }
        assert!(TrawlSpec::sup_gig(0.2, 0.0, 0.45, 0.3).is_err());
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(TrawlSpec::exponential(1.2, 1.0).is_err());
        assert!(TrawlSpec::exponential(0.5, 0.0).is_err());
        assert!(TrawlSpec::sup_gamma(0.5, 1.0, 1.0).is_err());
        assert!(TrawlSpec::sup_gamma(0.5, 1.0, 0.7).is_err());
        assert!(TrawlSpec::sup_gig(0.5, 1.0, 0.0, 1.0).is_err());
        assert!(reference_exp().d(0.1).is_err());
        assert!(reference_exp().overlap(-1.0).is_err());
        assert!(reference_exp().lifetime_quantile(1.0).is_err());
        assert!(reference_exp().lifetime_quantile(-0.1).is_err());
    }

    #[test]
    fn tabulated_geometry() {
        let spec = TrawlSpec::tabulated(0.5, &[(-2.0, 0.0), (-1.0, 0.5), (0.0, 1.0)]).unwrap();
        assert!((spec.d_tilde(-0.5).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(spec.d_tilde(-3.0).unwrap(), 0.0);
        // area of the tent = 0.75 + 0.25
        assert!((spec.leb_a() - 0.5).abs() < 1e-15);
        assert!((spec.overlap(1.0).unwrap() - 0.5 * 0.25).abs() < 1e-15);
        assert!((spec.lifetime_quantile(0.25).unwrap() - 0.5).abs() < 1e-15);
        assert!((spec.lifetime_quantile(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(TrawlSpec::tabulated(0.5, &[(-1.0, 0.6), (0.0, 0.9)]).is_err());
        assert!(TrawlSpec::tabulated(0.5, &[(-1.0, 0.6), (-2.0, 0.4), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn residual_quantile_inverts_overlap() {
        let specs = [
            reference_exp(),
            TrawlSpec::sup_gamma(0.3, 1.1, 2.5).unwrap(),
            TrawlSpec::sup_gig(0.2, 0.8, 0.6, -0.4).unwrap(),
            TrawlSpec::sup_gig(0.2, 0.0, 0.45, -0.6).unwrap(),
            TrawlSpec::tabulated(0.1, &[(-3.0, 0.1), (-1.0, 0.4), (0.0, 1.0)]).unwrap(),
        ];
        for spec in &specs {
            for &u in &[0.01, 0.3, 0.5, 0.9, 0.99] {
                let t = spec.residual_quantile(u).unwrap();
                let ratio = spec.overlap(t).unwrap() / spec.leb_a();
                assert!((ratio - (1.0 - u)).abs() < 1e-8, "{:?} u={u}", spec.kind());
            }
        }
    }
}
