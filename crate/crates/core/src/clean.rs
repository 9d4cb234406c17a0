//! Trade-tick cleaning into a jump series with strictly increasing times and
//! no two adjacent equal prices.
//!
//! Rules, applied in order:
//!
//! 1. (optional) drop trades outside `[bid - M tick, ask + M tick]`, with
//!    bid and ask forward-filled;
//! 2. keep only records carrying a trade;
//! 3. give each time tag one price: the trade closest to the previous tag's
//!    price, except that `{prev - 1, prev + 1}` keeps `prev`;
//! 4. drop tags whose price equals the previous kept price.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::simulate::PricePath;

/// One quote/trade record; missing fields are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RawTick {
    /// Seconds since midnight.
    pub log_t: f64,
    pub bid: Option<f64>,
    pub bidsz: Option<f64>,
    pub ask: Option<f64>,
    pub asksz: Option<f64>,
    pub trade: Option<f64>,
    pub tradesz: Option<f64>,
}

impl RawTick {
    pub fn trade(log_t: f64, price: f64) -> Self {
        Self { log_t, trade: Some(price), ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanConfig {
    /// Currency units per tick.
    pub tick_size: f64,
    /// Width of the admissible band around the quotes, in ticks.
    pub m_factor: f64,
    pub apply_step1: bool,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self { tick_size: 1.0, m_factor: 9.5, apply_step1: true }
    }
}

impl CleanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tick_size > 0.0) || !self.tick_size.is_finite() {
            return Err(invalid(format!("tick size must be finite and > 0, got {}", self.tick_size)));
        }
        if !(self.m_factor >= 0.0) || !self.m_factor.is_finite() {
            return Err(invalid(format!("band factor must be finite and >= 0, got {}", self.m_factor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// Trade outside the quote band.
    Band,
    /// Record without a trade.
    NoTrade,
    /// Trade price off the tick grid.
    TickGrid,
    /// Another trade at the same time tag was kept.
    Duplicate,
    /// Up-and-down tick at one time tag; previous price kept.
    Ambiguous,
    /// Same price as the previous kept tag.
    Repeat,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::Band => "step1-band",
            Rule::NoTrade => "step2-no-trade",
            Rule::TickGrid => "tick-grid",
            Rule::Duplicate => "step3-1-duplicate",
            Rule::Ambiguous => "step3-2-ambiguous",
            Rule::Repeat => "step4-repeat",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One dropped or modified input record.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    /// Zero-based position in the input.
    pub record: usize,
    pub log_t: f64,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "record={} log_t={} rule={}", self.record, self.log_t, self.rule)?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanOutput {
    /// `(time, price in ticks)`, times strictly increasing, adjacent prices distinct.
    pub series: Vec<(f64, i64)>,
    pub diagnostics: Vec<Diagnostic>,
}

impl CleanOutput {
    /// Path starting at the first kept tag and ending at the last one.
    pub fn to_path(&self) -> Result<PricePath> {
        let t_end = self.series.last().map(|s| s.0).unwrap_or(0.0);
        PricePath::from_prices(t_end, &self.series)
    }
}

struct Trade {
    record: usize,
    log_t: f64,
    ticks: i64,
}

fn to_ticks(price: f64, tick: f64) -> Option<i64> {
    let x = price / tick;
    let r = x.round();
    if !x.is_finite() || (x - r).abs() > 1e-6 * x.abs().max(1.0) || r.abs() > 9.0e15 {
        None
    } else {
        Some(r as i64)
    }
}

/// Single price for one time tag given the previous tag's price.
fn resolve_tag(group: &[Trade], prev: Option<i64>) -> (i64, bool) {
    let Some(prev) = prev else {
        return (group[0].ticks, false);
    };
    let mut distinct: Vec<i64> = group.iter().map(|t| t.ticks).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct == [prev - 1, prev + 1] {
        return (prev, true);
    }
    let best = distinct.iter().map(|p| (p - prev).abs()).min().expect("non-empty tag");
    // the previous price has distance zero, so it wins whenever present;
    // otherwise the earliest of the equally close records is kept
    let pick = group.iter().find(|t| (t.ticks - prev).abs() == best).expect("closest exists");
    (pick.ticks, false)
}

pub fn clean_ticks(records: &[RawTick], config: &CleanConfig) -> Result<CleanOutput> {
    config.validate()?;
    let mut diagnostics = Vec::new();
    let mut note = |record: usize, log_t: f64, rule: Rule, detail: String| {
        diagnostics.push(Diagnostic { record, log_t, rule, detail });
    };

    let band = config.m_factor * config.tick_size;
    let (mut bid, mut ask) = (None::<f64>, None::<f64>);
    let mut trades: Vec<Trade> = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (i, rec) in records.iter().enumerate() {
        if !rec.log_t.is_finite() || rec.log_t < last_t {
            return Err(Error::Data(format!("record {i}: time {} is not non-decreasing", rec.log_t)));
        }
        last_t = rec.log_t;
        bid = rec.bid.or(bid);
        ask = rec.ask.or(ask);
        let Some(price) = rec.trade else {
            note(i, rec.log_t, Rule::NoTrade, String::new());
            continue;
        };
        if config.apply_step1 {
            let below = bid.is_some_and(|b| price < b - band);
            let above = ask.is_some_and(|a| price > a + band);
            if below || above {
                note(
                    i,
                    rec.log_t,
                    Rule::Band,
                    format!("trade={price} bid={} ask={}", fmt_opt(bid), fmt_opt(ask)),
                );
                continue;
            }
        }
        match to_ticks(price, config.tick_size) {
            Some(ticks) => trades.push(Trade { record: i, log_t: rec.log_t, ticks }),
            None => note(i, rec.log_t, Rule::TickGrid, format!("trade={price} tick={}", config.tick_size)),
        }
    }

    let mut series: Vec<(f64, i64)> = Vec::new();
    let mut prev: Option<i64> = None;
    let mut start = 0;
    while start < trades.len() {
        let t = trades[start].log_t;
        let end = start + trades[start..].iter().take_while(|tr| tr.log_t == t).count();
        let group = &trades[start..end];
        let (price, ambiguous) = resolve_tag(group, prev);
        let mut kept_one = false;
        for tr in group {
            if ambiguous {
                note(tr.record, tr.log_t, Rule::Ambiguous, format!("price={} kept={price}", tr.ticks));
            } else if tr.ticks == price && !kept_one {
                kept_one = true;
            } else {
                note(tr.record, tr.log_t, Rule::Duplicate, format!("price={} kept={price}", tr.ticks));
            }
        }
        if prev == Some(price) {
            if !ambiguous {
                let rec = group.iter().find(|tr| tr.ticks == price).expect("kept record");
                note(rec.record, t, Rule::Repeat, format!("price={price}"));
            }
        } else {
            series.push((t, price));
        }
        prev = Some(price);
        start = end;
    }
    if series.is_empty() {
        return Err(Error::Data("no trades survive cleaning".into()));
    }
    Ok(CleanOutput { series, diagnostics })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into())
}
