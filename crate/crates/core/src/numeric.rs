//! Small numerical helpers: bracketed root finding for monotone functions and
//! a fixed-order Gauss-Legendre rule.

use crate::error::{Error, Result};

/// Root of an increasing function `g` on `[0, inf)` with `g(0) <= 0`.
///
/// The bracket grows geometrically from `start` until the sign changes, then
/// false position with a bisection fallback narrows it to `rel_tol` relative
/// width.
pub(crate) fn increasing_root<F>(mut g: F, start: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let g0 = g(0.0)?;
    if g0 >= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut glo) = (0.0, g0);
    let mut hi = start.max(f64::MIN_POSITIVE);
    let mut ghi = g(hi)?;
    while ghi < 0.0 {
        lo = hi;
        glo = ghi;
        hi *= 2.0;
        if !hi.is_finite() || hi > 1e300 {
            return Err(Error::Numerical("root bracket diverged".into()));
        }
        ghi = g(hi)?;
    }
    let mut last_width = hi - lo;
    for _ in 0..500 {
        let width = hi - lo;
        if width <= rel_tol * hi.abs() || width <= f64::MIN_POSITIVE {
            break;
        }
        let mut x = if ghi > glo { lo - glo * width / (ghi - glo) } else { f64::NAN };
        // fall back to bisection unless the previous step at least halved the bracket
        if !(x > lo && x < hi) || width > 0.5 * last_width {
            x = 0.5 * (lo + hi);
        }
        last_width = width;
        let gx = g(x)?;
        if gx == 0.0 {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
            glo = gx;
        } else {
            hi = x;
            ghi = gx;
        }
    }
    Ok(0.5 * (lo + hi))
}

const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// 10-point Gauss-Legendre approximation of `int_a^b f`.
pub(crate) fn gauss_legendre<F>(mut f: F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += w * (f(mid - half * x)? + f(mid + half * x)?);
    }
    Ok(acc * half)
}
