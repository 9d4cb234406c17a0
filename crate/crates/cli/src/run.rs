//! `--config` expansion and run manifests.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use serde_json::Value;

const SUBCOMMANDS: [&str; 7] = ["simulate", "clean", "fit", "pmf", "acf", "signature", "bootstrap"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub runtime_seconds: f64,
}

/// `<output>.manifest.json`, next to the output it describes.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write_manifest(manifest: &RunManifest) -> anyhow::Result<()> {
    let bytes = serde_json::to_vec_pretty(manifest)?;
    for out in &manifest.outputs {
        fleeting_core::io::write_atomic(&manifest_path(out), &bytes)?;
    }
    Ok(())
}

fn flag_args(config: &serde_json::Map<String, Value>) -> anyhow::Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (key, value) in config {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => out.push(flag.into()),
            Value::Number(n) => out.push(format!("{flag}={n}").into()),
            Value::String(s) => out.push(format!("{flag}={s}").into()),
            other => bail!("config key '{key}' has unsupported value {other}"),
        }
    }
    Ok(out)
}

/// Rewrites `argv` so that values from `--config` come first and explicit
/// flags override them. The file is either a flat object of flag values,
/// optionally with `command`, or a run manifest.
pub fn expand_config(argv: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config_path = None;
    let mut iter = argv.into_iter();
    let bin = iter.next().unwrap_or_else(|| "fleeting".into());
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy().into_owned();
        if text == "--config" {
            config_path = Some(iter.next().context("--config needs a file")?);
        } else if let Some(p) = text.strip_prefix("--config=") {
            config_path = Some(p.into());
        } else {
            rest.push(arg);
        }
    }
    let Some(config_path) = config_path else {
        let mut out = vec![bin];
        out.extend(rest);
        return Ok(out);
    };
    let text = std::fs::read_to_string(&config_path)
        .with_context(|| format!("reading config {}", Path::new(&config_path).display()))?;
    let value: Value = serde_json::from_str(&text).context("config is not valid JSON")?;
    let Value::Object(mut obj) = value else { bail!("config must be a JSON object") };
    let command = obj.remove("command").and_then(|c| c.as_str().map(str::to_owned));
    let flags = match obj.remove("config") {
        Some(Value::Object(inner)) => inner,
        Some(_) => bail!("manifest 'config' must be an object"),
        None => obj,
    };

    let sub_pos = rest.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let mut out = vec![bin];
    match sub_pos {
        Some(i) => {
            out.extend(rest[..=i].iter().cloned());
            out.extend(flag_args(&flags)?);
            out.extend(rest[i + 1..].iter().cloned());
        }
        None => {
            let command = command.context("config names no command and none was given")?;
            out.push(command.into());
            out.extend(flag_args(&flags)?);
            out.extend(rest);
        }
    }
    Ok(out)
}
