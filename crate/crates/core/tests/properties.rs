use std::collections::BTreeMap;

use fleeting_core::clean::{clean_ticks, CleanConfig, RawTick};
use fleeting_core::estimate::{levy_from_moments, signature_model};
use fleeting_core::model::{LevyMeasure, ModelParams, TrawlSpec};
use fleeting_core::simulate::{path_rng, sample_initial_survivors, simulate_path};
use fleeting_core::theory::{
    acf, jump_distribution, return_cf, return_cumulant, return_pmf_auto, variance_signature,
};
use proptest::prelude::*;

fn exponential() -> impl Strategy<Value = TrawlSpec> {
    (0.01f64..1.0, 0.05f64..5.0).prop_map(|(b, l)| TrawlSpec::exponential(b, l).unwrap())
}

fn sup_gamma() -> impl Strategy<Value = TrawlSpec> {
    (0.01f64..1.0, 0.1f64..10.0, 1.5f64..6.0).prop_map(|(b, a, h)| TrawlSpec::sup_gamma(b, a, h).unwrap())
}

fn sup_gig() -> impl Strategy<Value = TrawlSpec> {
    (0.01f64..1.0, 0.1f64..3.0, 0.05f64..2.0, -2.0f64..2.0)
        .prop_map(|(b, g, d, n)| TrawlSpec::sup_gig(b, g, d, n).unwrap())
}

fn inverse_gamma() -> impl Strategy<Value = TrawlSpec> {
    (0.01f64..1.0, 0.2f64..2.0, -4.0f64..-1.6).prop_map(|(b, d, n)| TrawlSpec::sup_gig(b, 0.0, d, n).unwrap())
}

fn any_trawl() -> impl Strategy<Value = TrawlSpec> {
    prop_oneof![exponential(), sup_gamma(), sup_gig(), inverse_gamma()]
}

fn levy() -> impl Strategy<Value = LevyMeasure> {
    prop::collection::btree_map(
        prop_oneof![-3i64..=-1, 1i64..=3],
        0.001f64..0.5,
        1..5,
    )
    .prop_map(|m| LevyMeasure::new(m).unwrap())
}

fn params() -> impl Strategy<Value = ModelParams> {
    (levy(), prop_oneof![exponential(), sup_gamma(), sup_gig()]).prop_map(|(l, t)| ModelParams::new(l, t))
}

/// Jump-size frequencies on `{-3..3} \ {0}`, normalised to one.
fn alpha() -> impl Strategy<Value = BTreeMap<i64, f64>> {
    prop::collection::btree_map(prop_oneof![-3i64..=-1, 1i64..=3], 0.01f64..1.0, 1..7).prop_map(|m| {
        let total: f64 = m.values().sum();
        m.into_iter().map(|(y, a)| (y, a / total)).collect()
    })
}

/// `(alpha, b)` with `(1 - b) alpha_{-y} <= alpha_y` for every `y`, so the
/// moment estimator never truncates.
fn untruncated_alpha() -> impl Strategy<Value = (BTreeMap<i64, f64>, f64)> {
    (0.01f64..=1.0, prop::collection::vec((0.01f64..1.0, -1.0f64..=1.0), 1..4)).prop_map(|(b, pairs)| {
        let mut m = BTreeMap::new();
        for (i, (w, s)) in pairs.into_iter().enumerate() {
            let r = (1.0 - b).max(1e-300).powf(s);
            let y = i as i64 + 1;
            m.insert(y, w * r / (1.0 + r));
            m.insert(-y, w / (1.0 + r));
        }
        let total: f64 = m.values().sum();
        (m.into_iter().map(|(y, a)| (y, a / total)).collect(), b)
    })
}

/// Adaptive Simpson on `[a, b]`.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
}

/// `int_t^inf (d(-u) - b) du` over geometrically growing panels.
fn overlap_by_quadrature(spec: &TrawlSpec, t: f64) -> f64 {
    // d - b written as (1 - b) d~ so the far tail does not cancel to zero
    let f = |u: f64| (1.0 - spec.b()) * spec.d_tilde(-u).unwrap();
    let scale = 0.05;
    let mut acc = 0.0;
    let mut lo = t;
    for k in 0..200 {
        let hi = t + scale * (2f64.powi(k + 1) - 1.0);
        let piece = simpson(&f, lo, hi, 1e-10 * (acc + f(lo) * (hi - lo)));
        acc += piece;
        lo = hi;
        if k > 8 && piece < 1e-10 * acc {
            break;
        }
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn overlap_matches_quadrature(spec in any_trawl(), t in 0.0f64..5.0) {
        let exact = spec.overlap(t).unwrap();
        let quad = overlap_by_quadrature(&spec, t);
        prop_assert!((exact - quad).abs() <= 1e-6 * exact, "{spec:?} t={t}: {exact} vs {quad}");
    }
}

proptest! {
    #[test]
    fn overlap_is_convex(spec in any_trawl(), t1 in 0.0f64..5.0, g1 in 0.01f64..3.0, g2 in 0.01f64..3.0) {
        let (t2, t3) = (t1 + g1, t1 + g1 + g2);
        let o = |t: f64| spec.overlap(t).unwrap();
        let left = (o(t2) - o(t1)) / g1;
        let right = (o(t3) - o(t2)) / g2;
        prop_assert!(left <= right + 1e-12 * spec.leb_a().max(1.0), "{left} > {right}");
    }

    #[test]
    fn increment_and_overlap_partition_leb_a(spec in any_trawl(), t in 0.0f64..20.0) {
        let sum = spec.increment(t).unwrap() + spec.overlap(t).unwrap();
        prop_assert!((sum - spec.leb_a()).abs() <= 1e-10 * spec.leb_a());
    }

    #[test]
    fn trawl_is_monotone_with_unit_peak(spec in any_trawl(), s in 0.0f64..50.0, gap in 0.0f64..5.0) {
        prop_assert_eq!(spec.d_tilde(0.0).unwrap(), 1.0);
        let near = spec.d_tilde(-s).unwrap();
        let far = spec.d_tilde(-s - gap).unwrap();
        prop_assert!(far <= near && far >= 0.0 && near <= 1.0);
    }

    #[test]
    fn lifetime_quantile_inverts_the_trawl(spec in any_trawl()) {
        for i in 0..=37 {
            let p = 0.999 * i as f64 / 37.0;
            let t = spec.lifetime_quantile(p).unwrap();
            let d = spec.d_tilde(-t).unwrap();
            prop_assert!((d - (1.0 - p)).abs() < 1e-9, "p={p}: d~={d}");
        }
    }

    #[test]
    fn residual_quantile_inverts_the_overlap(spec in any_trawl(), u in 0.0f64..0.999) {
        let t = spec.residual_quantile(u).unwrap();
        let ratio = spec.overlap(t).unwrap() / spec.leb_a();
        prop_assert!((ratio - (1.0 - u)).abs() < 1e-9);
    }

    #[test]
    fn autocorrelations_are_never_positive(p in params(), delta in 0.01f64..20.0) {
        let a = acf(&p, delta, 100).unwrap();
        prop_assert!(a.rho.iter().all(|r| *r <= 0.0));
    }

    #[test]
    fn variogram_reconstructs_autocovariance(p in params(), delta in 0.01f64..20.0, k in 1usize..30) {
        let var = |m: usize| return_cumulant(&p, m as f64 * delta, 2).unwrap();
        let recon = 0.5 * (var(k + 1) - 2.0 * var(k) + var(k - 1));
        let gamma = acf(&p, delta, k).unwrap().gamma[k - 1];
        prop_assert!((recon - gamma).abs() < 1e-12 * var(k + 1).max(1.0));
    }

    #[test]
    fn pmf_moments_match_cumulants(p in params(), t in 0.1f64..50.0) {
        let pmf = return_pmf_auto(&p, t).unwrap();
        let mean = return_cumulant(&p, t, 1).unwrap();
        let var = return_cumulant(&p, t, 2).unwrap();
        let slack = pmf.aliasing_bound + 1e-8;
        let m = pmf.half_width as f64;
        prop_assert!((pmf.total() - 1.0).abs() <= pmf.aliasing_bound);
        prop_assert!((pmf.mean() - mean).abs() <= slack * m.max(1.0));
        prop_assert!((pmf.variance() - var).abs() <= slack * (m * m).max(1.0));
    }

    #[test]
    fn cf_derivatives_give_cumulants(p in params(), t in 0.5f64..20.0) {
        // Richardson-extrapolated central differences of the log-CF
        let c = |th: f64| return_cf(&p, t, th).unwrap();
        let deriv = |j: u32, h: f64| match j {
            1 => (c(h) - c(-h)) / (2.0 * h),
            2 => (c(h) - c(0.0) * 2.0 + c(-h)) / (h * h),
            3 => (c(2.0 * h) - c(h) * 2.0 + c(-h) * 2.0 - c(-2.0 * h)) / (2.0 * h * h * h),
            _ => (c(2.0 * h) - c(h) * 4.0 + c(0.0) * 6.0 - c(-h) * 4.0 + c(-2.0 * h)) / (h * h * h * h),
        };
        let h = 1e-3;
        for j in 1..=4u32 {
            let d = (deriv(j, h / 2.0) * 4.0 - deriv(j, h)) / 3.0;
            // i^j kappa_j
            let kappa = return_cumulant(&p, t, j).unwrap();
            let expected = match j % 4 {
                0 => num_complex::Complex64::new(kappa, 0.0),
                1 => num_complex::Complex64::new(0.0, kappa),
                2 => num_complex::Complex64::new(-kappa, 0.0),
                _ => num_complex::Complex64::new(0.0, -kappa),
            };
            let scale = kappa.abs().max(return_cumulant(&p, t, 2 * j.div_ceil(2)).unwrap().abs() * 1e-3);
            prop_assert!((d - expected).norm() <= 1e-4 * scale, "j={j}: {d} vs {expected}");
        }
    }

    #[test]
    fn b_insensitivity(a in alpha(), beta0 in 0.001f64..2.0, b in 0.001f64..=1.0, r in 0.0f64..4.0) {
        let nu = levy_from_moments(&a, beta0, b).unwrap();
        let lhs = (2.0 - b) * nu.abs_moment(r);
        let rhs: f64 = a.iter().map(|(&y, &v)| (y.unsigned_abs() as f64).powf(r) * v).sum::<f64>() * beta0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn moments_estimator_inverts_jump_distribution((a, b) in untruncated_alpha(), beta0 in 0.001f64..2.0) {
        let nu = levy_from_moments(&a, beta0, b).unwrap();
        let p = ModelParams::new(nu, TrawlSpec::exponential(b, 1.0).unwrap());
        let back = jump_distribution(&p);
        for (y, v) in &a {
            prop_assert!((back.get(y).copied().unwrap_or(0.0) - v).abs() < 1e-12);
        }
        for (y, v) in &back {
            prop_assert!(a.contains_key(y) || *v < 1e-12);
        }
    }

    #[test]
    fn truncation_conserves_pair_moments(a in alpha(), beta0 in 0.001f64..2.0, b in 0.001f64..=1.0) {
        let nu = levy_from_moments(&a, beta0, b).unwrap();
        for y in 1..=3i64 {
            let pair = nu.intensity(y) + nu.intensity(-y);
            let expected = (a.get(&y).unwrap_or(&0.0) + a.get(&-y).unwrap_or(&0.0)) * beta0 / (2.0 - b);
            prop_assert!((pair - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn signature_fit_is_exact_at_truth(p in params()) {
        let s0 = (2.0 - p.b()) * p.levy.cumulant(2);
        let mut sum = 0.0;
        for i in 0..20 {
            let delta = 0.1 * 1.4f64.powi(i);
            let r = variance_signature(&p, delta).unwrap() - signature_model(&p.trawl, delta, s0).unwrap();
            sum += r * r;
        }
        prop_assert!(sum < 1e-18, "objective {sum}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulation_is_reproducible(p in params(), seed in any::<u64>(), idx in 0u64..8) {
        let a = simulate_path(&p, 0.0, 500.0, 100, &mut path_rng(seed, idx)).unwrap();
        let b = simulate_path(&p, 0.0, 500.0, 100, &mut path_rng(seed, idx)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn departures_never_outrun_arrivals(
        rate in 0.01f64..1.0,
        trawl in prop_oneof![exponential(), sup_gamma(), sup_gig()],
        seed in any::<u64>(),
    ) {
        // with only up-moves, every down-move is a departure
        let p = ModelParams::new(LevyMeasure::new([(1, rate)]).unwrap(), trawl);
        let survivors = sample_initial_survivors(&p, &mut path_rng(seed, 0)).unwrap();
        let path = simulate_path(&p, 0.0, 300.0, 0, &mut path_rng(seed, 0)).unwrap();
        let mut alive = survivors.len() as i64;
        let mut survivor_departures = 0;
        for ev in path.events() {
            prop_assert!(ev.jump == 1 || ev.jump == -1);
            alive += ev.jump;
            prop_assert!(alive >= 0);
        }
        for &(residual, size) in &survivors.survivors {
            prop_assert_eq!(size, 1);
            prop_assert!(residual > 0.0 && residual.is_finite());
            if residual <= 300.0 {
                survivor_departures += 1;
            }
        }
        let ups = path.events().iter().filter(|e| e.jump == 1).count() as i64;
        let downs = path.events().iter().filter(|e| e.jump == -1).count() as i64;
        prop_assert!(downs - survivor_departures <= ups);
        prop_assert_eq!(path.final_price(), ups - downs);
    }
}

fn raw_ticks() -> impl Strategy<Value = Vec<RawTick>> {
    prop::collection::vec((0u8..3, 95i64..106), 1..120).prop_map(|steps| {
        let mut t = 0.0;
        steps
            .into_iter()
            .map(|(dt, px)| {
                t += dt as f64 * 0.5;
                RawTick::trade(t, px as f64 * 0.25)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn cleaned_series_alternates(ticks in raw_ticks()) {
        let cfg = CleanConfig { tick_size: 0.25, m_factor: 9.5, apply_step1: false };
        let out = clean_ticks(&ticks, &cfg).unwrap();
        for w in out.series.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
            prop_assert!(w[0].1 != w[1].1);
        }
        prop_assert_eq!(clean_ticks(&ticks, &cfg).unwrap(), out);
    }

    #[test]
    fn cleaning_is_idempotent(ticks in raw_ticks()) {
        let cfg = CleanConfig { tick_size: 0.25, m_factor: 9.5, apply_step1: false };
        let once = clean_ticks(&ticks, &cfg).unwrap();
        let replay: Vec<RawTick> =
            once.series.iter().map(|&(t, px)| RawTick::trade(t, px as f64 * 0.25)).collect();
        let twice = clean_ticks(&replay, &cfg).unwrap();
        prop_assert_eq!(twice.series, once.series);
        prop_assert!(twice.diagnostics.is_empty());
    }
}
