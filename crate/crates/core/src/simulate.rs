//! Exact event-level simulation and path functionals.
//!
//! A path over `(t_start, t_end]` is the superposition of three event streams:
//! departures of fleeting events that were alive at `t_start`, permanent
//! arrivals, and fleeting arrivals together with their reversals.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Poisson;

use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;

/// Independent random stream for path `path_index` of a run seeded by `seed`.
///
/// The ChaCha20 key comes from `seed` and the stream id is the path index, so
/// paths never share keystream regardless of how many draws each makes.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub jump: i64,
}

/// Piecewise-constant càdlàg integer price path.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath {
    v0: i64,
    t_start: f64,
    t_end: f64,
    events: Vec<JumpEvent>,
    levels: Vec<i64>,
}

impl PricePath {
    /// Events must be in non-decreasing time order inside `(t_start, t_end]`
    /// with non-zero jumps. Equal times are kept as separate events.
    pub fn new(v0: i64, t_start: f64, t_end: f64, events: Vec<JumpEvent>) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() || !(t_start < t_end) {
            return Err(invalid(format!("need finite t_start < t_end, got {t_start}, {t_end}")));
        }
        let mut levels = Vec::with_capacity(events.len());
        let mut level = v0;
        let mut prev = t_start;
        for (i, ev) in events.iter().enumerate() {
            if ev.jump == 0 {
                return Err(Error::Data(format!("event {i} has zero jump")));
            }
            if !(ev.time > t_start && ev.time <= t_end) {
                return Err(Error::Data(format!(
                    "event {i} at {} lies outside ({t_start}, {t_end}]",
                    ev.time
                )));
            }
            if ev.time < prev {
                return Err(Error::Data(format!("event {i} at {} is out of time order", ev.time)));
            }
            prev = ev.time;
            level = level
                .checked_add(ev.jump)
                .ok_or_else(|| Error::Data("price overflows i64".into()))?;
            levels.push(level);
        }
        Ok(Self { v0, t_start, t_end, events, levels })
    }

    /// Path from a price series: the first entry is the starting point and
    /// every later entry is the price right after a jump.
    pub fn from_prices(t_end: f64, series: &[(f64, i64)]) -> Result<Self> {
        let (&(t_start, v0), rest) =
            series.split_first().ok_or_else(|| Error::Data("empty price series".into()))?;
        let mut events = Vec::with_capacity(rest.len());
        let mut prev = v0;
        for &(time, price) in rest {
            events.push(JumpEvent { time, jump: price - prev });
            prev = price;
        }
        Self::new(v0, t_start, t_end, events)
    }

    pub fn v0(&self) -> i64 {
        self.v0
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn span(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn events(&self) -> &[JumpEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Price right after each event.
    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    pub fn final_price(&self) -> i64 {
        self.levels.last().copied().unwrap_or(self.v0)
    }

    /// `P_t`, including every event at time `<= t`.
    pub fn price(&self, t: f64) -> i64 {
        let n = self.events.partition_point(|e| e.time <= t);
        if n == 0 {
            self.v0
        } else {
            self.levels[n - 1]
        }
    }
}

/// Fleeting events alive at the start of the window, as
/// `(residual_lifetime, size)`; each one's departure moves the price by `-size`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SurvivorSet {
    pub survivors: Vec<(f64, i64)>,
}

impl SurvivorSet {
    pub fn len(&self) -> usize {
        self.survivors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.survivors.is_empty()
    }
}

struct SizeSampler {
    sizes: Vec<i64>,
    index: WeightedIndex<f64>,
}

impl SizeSampler {
    fn new(params: &ModelParams) -> Result<Self> {
        let (sizes, weights): (Vec<i64>, Vec<f64>) =
            params.levy.entries().iter().map(|(&y, &v)| (y, v)).unzip();
        let index = WeightedIndex::new(weights)
            .map_err(|e| invalid(format!("cannot sample jump sizes: {e}")))?;
        Ok(Self { sizes, index })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        self.sizes[self.index.sample(rng)]
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| invalid(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Uniform on the open interval `(0, 1)`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn check_params(params: &ModelParams) -> Result<()> {
    let finite = params.levy.entries().values().all(|v| v.is_finite())
        && params.b().is_finite()
        && params.trawl.leb_a().is_finite();
    if finite {
        Ok(())
    } else {
        Err(invalid("simulation needs finite parameters"))
    }
}

pub fn sample_initial_survivors<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<SurvivorSet> {
    check_params(params)?;
    let sizes = SizeSampler::new(params)?;
    let count = poisson_count(params.levy.total_mass() * params.trawl.leb_a(), rng)?;
    let mut survivors = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let size = sizes.sample(rng);
        let residual = params.trawl.residual_quantile(1.0 - open_unit(rng))?;
        survivors.push((residual, size));
    }
    Ok(SurvivorSet { survivors })
}

/// Simulates `P` on `(t_start, t_end]` started from the stationary law.
///
/// `v0` is the observed price at `t_start`, so it already includes the
/// effect of the initial survivors.
pub fn simulate_path<R: Rng + ?Sized>(
    params: &ModelParams,
    t_start: f64,
    t_end: f64,
    v0: i64,
    rng: &mut R,
) -> Result<PricePath> {
    if !t_start.is_finite() || !t_end.is_finite() || !(t_start < t_end) {
        return Err(invalid(format!("need finite t_start < t_end, got {t_start}, {t_end}")));
    }
    let survivors = sample_initial_survivors(params, rng)?;
    let sizes = SizeSampler::new(params)?;
    let b = params.b();
    let span = t_end - t_start;

    let mut raw: Vec<(f64, u64, i64)> = Vec::new();
    let mut seq = 0u64;
    let mut push = |raw: &mut Vec<(f64, u64, i64)>, time: f64, jump: i64| {
        raw.push((time, seq, jump));
        seq += 1;
    };

    for &(residual, size) in &survivors.survivors {
        let time = t_start + residual;
        if time <= t_end {
            push(&mut raw, time, -size);
        }
    }

    let arrivals = poisson_count(params.levy.total_mass() * span, rng)?;
    let mut times: Vec<f64> = (0..arrivals).map(|_| t_start + span * (1.0 - rng.random::<f64>())).collect();
    times.sort_by(f64::total_cmp);
    for arrival in times {
        let size = sizes.sample(rng);
        let height: f64 = rng.random();
        push(&mut raw, arrival, size);
        if height <= b {
            continue;
        }
        // the event leaves once d~ decays below its relative height
        let relative = (height - b) / (1.0 - b);
        let lifetime = params.trawl.lifetime_quantile(1.0 - relative)?;
        let departure = arrival + lifetime;
        if departure <= t_end {
            push(&mut raw, departure, -size);
        }
    }

    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let events = raw.into_iter().map(|(time, _, jump)| JumpEvent { time, jump }).collect();
    PricePath::new(v0, t_start, t_end, events)
}

/// Number of whole `delta` steps in the path span.
fn step_count(path: &PricePath, delta: f64) -> Result<usize> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("sampling interval must be > 0, got {delta}")));
    }
    let n = (path.span() / delta * (1.0 + 1e-12)).floor();
    if n < 1.0 {
        return Err(invalid(format!("sampling interval {delta} exceeds the path span {}", path.span())));
    }
    Ok(n as usize)
}

/// Index `k` of the return `P_{t_k} - P_{t_{k-1}}` containing an event at
/// `time`, with `t_k = t_start + k delta`.
fn bucket_of(t_start: f64, delta: f64, time: f64) -> usize {
    let mut k = ((time - t_start) / delta).ceil().max(1.0) as usize;
    while k > 1 && time <= t_start + (k - 1) as f64 * delta {
        k -= 1;
    }
    while time > t_start + k as f64 * delta {
        k += 1;
    }
    k
}

/// Non-overlapping returns on the grid `t_start + k delta`, `k = 1..=n`.
pub fn returns_at(path: &PricePath, delta: f64) -> Result<Vec<i64>> {
    let n = step_count(path, delta)?;
    let mut out = vec![0i64; n];
    for ev in path.events() {
        let k = bucket_of(path.t_start, delta, ev.time);
        if k > n {
            break;
        }
        out[k - 1] += ev.jump;
    }
    Ok(out)
}

/// Count, sum and sum of squares of [`returns_at`] without materialising the
/// zero returns.
pub fn return_moments(path: &PricePath, delta: f64) -> Result<(usize, f64, f64)> {
    let n = step_count(path, delta)?;
    let (mut sum, mut sumsq) = (0.0, 0.0);
    let mut current: Option<(usize, i64)> = None;
    for ev in path.events() {
        let k = bucket_of(path.t_start, delta, ev.time);
        if k > n {
            break;
        }
        match current {
            Some((bucket, ref mut acc)) if bucket == k => *acc += ev.jump,
            _ => {
                if let Some((_, acc)) = current {
                    sum += acc as f64;
                    sumsq += (acc as f64).powi(2);
                }
                current = Some((k, ev.jump));
            }
        }
    }
    if let Some((_, acc)) = current {
        sum += acc as f64;
        sumsq += (acc as f64).powi(2);
    }
    Ok((n, sum, sumsq))
}

/// `sum |jump|^r` over all events; `r = 0` is the number of price moves.
pub fn realized_pv(path: &PricePath, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid(format!("power must be finite and >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(path.len() as f64);
    }
    Ok(path.events().iter().map(|e| (e.jump.unsigned_abs() as f64).powf(r)).sum())
}

/// Sample autocorrelations `k = 1..=k_max` with the usual biased
/// normalisation `sum (x_t - m)(x_{t+k} - m) / sum (x_t - m)^2`.
pub fn sample_acf(returns: &[i64], k_max: usize) -> Vec<f64> {
    let n = returns.len();
    let mean = returns.iter().sum::<i64>() as f64 / n.max(1) as f64;
    let centred: Vec<f64> = returns.iter().map(|&x| x as f64 - mean).collect();
    let denom: f64 = centred.iter().map(|x| x * x).sum();
    (1..=k_max)
        .map(|k| {
            if k >= n || denom == 0.0 {
                return 0.0;
            }
            centred[..n - k].iter().zip(&centred[k..]).map(|(a, b)| a * b).sum::<f64>() / denom
        })
        .collect()
}
