//! File formats shared by the library and the command-line tool.
//!
//! - Path CSV `time,price_ticks`, one row per event with the post-jump
//!   price, plus a sidecar `<name>.meta.json` holding `{v0, t_start, t_end, seed}`.
//!   A first row at `t_start` is read as the starting price.
//! - Raw tick CSV `log_t,bid,bidsz,ask,asksz,trade,tradesz`, empty = missing.
//! - PMF CSV `y,probability`, ACF CSV `k,gamma,rho`, signature CSV
//!   `delta,empirical,fitted`.
//! - Fit JSON: the parameter document plus `objective`, `converged`,
//!   `boundary_flags`, `grid` and `se`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::clean::RawTick;
use crate::error::{Error, Result};
use crate::estimate::FitResult;
use crate::model::ModelParams;
use crate::simulate::{JumpEvent, PricePath};
use crate::theory::{Acf, PmfResult};

const FIT_KEYS: [&str; 5] = ["objective", "converged", "boundary_flags", "grid", "se"];

/// Sidecar of a Path CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub v0: i64,
    pub t_start: f64,
    pub t_end: f64,
    pub seed: Option<u64>,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Data(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Deserialize)]
struct PathRow {
    time: f64,
    price_ticks: i64,
}

/// Path CSV bytes. With `include_start` the first row is `(t_start, v0)`.
pub fn path_csv(path: &PricePath, include_start: bool) -> Result<Vec<u8>> {
    let mut series = Vec::with_capacity(path.len() + 1);
    if include_start {
        series.push((path.t_start(), path.v0()));
    }
    series.extend(path.events().iter().zip(path.levels()).map(|(ev, &level)| (ev.time, level)));
    series_csv(&series)
}

/// Path CSV bytes for a bare price series, first row included.
pub fn series_csv(series: &[(f64, i64)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["time", "price_ticks"])?;
    for &(time, price) in series {
        w.write_record([time.to_string(), price.to_string()])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn write_path(csv_path: &Path, path: &PricePath, seed: Option<u64>, include_start: bool) -> Result<()> {
    write_atomic(csv_path, &path_csv(path, include_start)?)?;
    let meta = PathMeta { v0: path.v0(), t_start: path.t_start(), t_end: path.t_end(), seed };
    write_atomic(&sidecar_path(csv_path), &serde_json::to_vec_pretty(&meta)?)
}

fn read_rows<R: Read>(reader: R) -> Result<Vec<(f64, i64)>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["time", "price_ticks"] {
        return Err(Error::Data(format!("expected header time,price_ticks, got {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for row in rdr.deserialize() {
        let row: PathRow = row?;
        rows.push((row.time, row.price_ticks));
    }
    Ok(rows)
}

/// Path from CSV rows; `meta` fixes the start, otherwise the first row does
/// and the last row ends the window.
pub fn path_from_rows(rows: &[(f64, i64)], meta: Option<&PathMeta>) -> Result<PricePath> {
    let Some(meta) = meta else {
        let t_end = rows.last().map(|r| r.0).unwrap_or(0.0);
        return PricePath::from_prices(t_end, rows);
    };
    let mut body = rows;
    if let Some(&(t, p)) = rows.first() {
        if t <= meta.t_start {
            if p != meta.v0 {
                return Err(Error::Data(format!("first row price {p} differs from sidecar v0 {}", meta.v0)));
            }
            body = &rows[1..];
        }
    }
    let mut events = Vec::with_capacity(body.len());
    let mut prev = meta.v0;
    for &(time, price) in body {
        events.push(JumpEvent { time, jump: price - prev });
        prev = price;
    }
    PricePath::new(meta.v0, meta.t_start, meta.t_end, events)
}

/// Reads a Path CSV and its sidecar, if one exists.
pub fn read_path(csv_path: &Path) -> Result<(PricePath, Option<PathMeta>)> {
    let rows = read_rows(fs::File::open(csv_path)?)?;
    let side = sidecar_path(csv_path);
    let meta: Option<PathMeta> = if side.exists() { Some(serde_json::from_slice(&fs::read(&side)?)?) } else { None };
    Ok((path_from_rows(&rows, meta.as_ref())?, meta))
}

pub fn read_raw_ticks<R: Read>(reader: R) -> Result<Vec<RawTick>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let expected = ["log_t", "bid", "bidsz", "ask", "asksz", "trade", "tradesz"];
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != expected {
        return Err(Error::Data(format!("expected header {}", expected.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn pmf_csv(pmf: &PmfResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["y", "probability"])?;
    for (y, p) in pmf.iter() {
        w.write_record([y.to_string(), p.to_string()])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn acf_csv(acf: &Acf) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "gamma", "rho"])?;
    for (k, (g, r)) in acf.gamma.iter().zip(&acf.rho).enumerate() {
        w.write_record([(k + 1).to_string(), g.to_string(), r.to_string()])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Rows `(delta, empirical, fitted)`; a missing fitted value is left empty.
pub fn signature_csv(rows: &[(f64, f64, Option<f64>)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["delta", "empirical", "fitted"])?;
    for (d, e, f) in rows {
        w.write_record([d.to_string(), e.to_string(), f.map(|v| v.to_string()).unwrap_or_default()])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn fit_to_json(fit: &FitResult) -> Result<Value> {
    let Value::Object(mut map) = serde_json::to_value(&fit.params)? else {
        return Err(Error::Data("parameter document is not an object".into()));
    };
    map.insert("objective".into(), serde_json::to_value(fit.objective)?);
    map.insert("converged".into(), Value::Bool(fit.converged));
    map.insert("boundary_flags".into(), serde_json::to_value(&fit.boundary_flags)?);
    map.insert("grid".into(), serde_json::to_value(&fit.grid)?);
    map.insert("se".into(), serde_json::to_value(&fit.se)?);
    Ok(Value::Object(map))
}

/// Parameters from either a plain parameter document or a fit document.
pub fn params_from_json(text: &str) -> Result<ModelParams> {
    let mut value: Value = serde_json::from_str(text)?;
    if let Value::Object(map) = &mut value {
        let stripped: Map<String, Value> = std::mem::take(map).into_iter().filter(|(k, _)| !FIT_KEYS.contains(&k.as_str())).collect();
        *map = stripped;
    }
    Ok(serde_json::from_value(value)?)
}

pub fn read_params(path: &Path) -> Result<ModelParams> {
    params_from_json(&fs::read_to_string(path)?)
}
