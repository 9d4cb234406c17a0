mod args;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::Parser;
use log::warn;
use serde_json::json;

use args::{AcfArgs, BootstrapArgs, CleanArgs, Cli, Command, FitArgs, GridArgs, PmfArgs, SignatureArgs, SimulateArgs};
use fleeting_core::clean::{clean_ticks, CleanConfig};
use fleeting_core::estimate::{
    bootstrap, empirical_stats, fit_signature_with, log_grid, variance_grid_lenient, BootstrapConfig, FitOptions,
};
use fleeting_core::io;
use fleeting_core::model::TrawlKind;
use fleeting_core::simulate::{path_rng, returns_at, sample_acf, simulate_path};
use fleeting_core::theory::{acf, return_pmf, return_pmf_auto, variance_signature};
use fleeting_core::Error as CoreError;
use run::RunManifest;

enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter(_) => Failure::Usage(e.into()),
            other => Failure::Data(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

/// Successful run; `converged == false` maps to exit code 3.
struct Outcome {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    seed: Option<u64>,
    converged: bool,
}

fn data<T, E: Into<anyhow::Error>>(r: std::result::Result<T, E>, what: impl Fn() -> String) -> Result<T, Failure> {
    r.map_err(|e| Failure::Data(e.into().context(what())))
}

fn read_params(path: &Path) -> Result<fleeting_core::ModelParams, Failure> {
    data(io::read_params(path), || format!("reading parameters from {}", path.display()))
}

fn read_path(path: &Path) -> Result<(fleeting_core::PricePath, Option<io::PathMeta>), Failure> {
    data(io::read_path(path), || format!("reading path from {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    data(io::write_atomic(path, bytes), || format!("writing {}", path.display()))
}

fn grid(g: &GridArgs) -> Result<Vec<f64>, Failure> {
    Ok(log_grid(g.grid_min, g.grid_max, g.grid_points)?)
}

fn kind(name: &str) -> Result<TrawlKind, Failure> {
    Ok(name.parse()?)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Outcome, Failure> {
    let params = read_params(&a.params)?;
    let mut rng = path_rng(a.seed, a.path_index);
    let path = simulate_path(&params, a.t0, a.t1, a.v0, &mut rng)?;
    data(io::write_path(&a.output, &path, Some(a.seed), false), || format!("writing {}", a.output.display()))?;
    Ok(Outcome {
        inputs: vec![a.params.clone()],
        outputs: vec![a.output.clone(), io::sidecar_path(&a.output)],
        seed: Some(a.seed),
        converged: true,
    })
}

fn cmd_clean(a: &CleanArgs) -> Result<Outcome, Failure> {
    let file = data(fs::File::open(&a.input), || format!("opening {}", a.input.display()))?;
    let records = data(io::read_raw_ticks(file), || format!("reading {}", a.input.display()))?;
    let config = CleanConfig { tick_size: a.tick_size, m_factor: a.m_factor, apply_step1: !a.no_step1 };
    config.validate()?;
    let out = clean_ticks(&records, &config)?;
    let mut lines = String::new();
    for d in &out.diagnostics {
        lines.push_str(&d.to_string());
        lines.push('\n');
    }
    let mut outputs = vec![a.output.clone(), io::sidecar_path(&a.output)];
    match &a.diagnostics {
        Some(p) => {
            write(p, lines.as_bytes())?;
            outputs.push(p.clone());
        }
        None => eprint!("{lines}"),
    }
    write(&a.output, &io::series_csv(&out.series)?)?;
    let (t_start, v0) = out.series[0];
    let t_end = out.series[out.series.len() - 1].0;
    let meta = io::PathMeta { v0, t_start, t_end, seed: None };
    write(&io::sidecar_path(&a.output), &serde_json::to_vec_pretty(&meta).map_err(anyhow::Error::from)?)?;
    Ok(Outcome { inputs: vec![a.input.clone()], outputs, seed: None, converged: true })
}

fn signature_rows(
    stats: &fleeting_core::estimate::EmpiricalStats,
    params: Option<&fleeting_core::ModelParams>,
) -> Result<Vec<(f64, f64, Option<f64>)>, Failure> {
    stats
        .var_grid
        .iter()
        .map(|p| {
            let fitted = params.map(|m| variance_signature(m, p.delta)).transpose()?;
            Ok((p.delta, p.variance / p.delta, fitted))
        })
        .collect()
}

fn cmd_fit(a: &FitArgs) -> Result<Outcome, Failure> {
    let (path, _) = read_path(&a.input)?;
    let grid = grid(&a.grid)?;
    let family = kind(&a.trawl)?;
    let stats = empirical_stats(&path, &[], &grid)?;
    let opts = FitOptions { n_starts: a.starts, seed: a.seed, ..Default::default() };
    let mut fit = fit_signature_with(&stats, family, &opts)?;
    let mut converged = fit.converged;
    if a.bootstrap_paths > 0 {
        let config = BootstrapConfig {
            t_start: path.t_start(),
            t_end: path.t_end(),
            v0: path.v0(),
            n_paths: a.bootstrap_paths,
            kind: family,
            seed: a.seed,
            grid: grid.clone(),
            fit: opts.clone(),
        };
        let boot = bootstrap(&fit.params, &config)?;
        converged &= boot.n_failed == 0 && boot.n_nonconverged == 0;
        fit.se = Some(boot.se);
    }
    let sig_out = a.signature_output.clone().unwrap_or_else(|| a.output.with_extension("signature.csv"));
    let doc = io::fit_to_json(&fit)?;
    write(&a.output, &serde_json::to_vec_pretty(&doc).map_err(anyhow::Error::from)?)?;
    write(&sig_out, &io::signature_csv(&signature_rows(&stats, Some(&fit.params))?)?)?;
    if !converged {
        warn!("fit did not meet its convergence tolerance; best iterate written");
    }
    Ok(Outcome { inputs: vec![a.input.clone()], outputs: vec![a.output.clone(), sig_out], seed: Some(a.seed), converged })
}

fn cmd_pmf(a: &PmfArgs) -> Result<Outcome, Failure> {
    let params = read_params(&a.params)?;
    let pmf = match a.n_points {
        Some(n) => return_pmf(&params, a.t, n)?,
        None => return_pmf_auto(&params, a.t)?,
    };
    write(&a.output, &io::pmf_csv(&pmf)?)?;
    Ok(Outcome { inputs: vec![a.params.clone()], outputs: vec![a.output.clone()], seed: None, converged: true })
}

fn cmd_acf(a: &AcfArgs) -> Result<Outcome, Failure> {
    let (path, _) = read_path(&a.input)?;
    let returns = returns_at(&path, a.delta)?;
    let empirical = sample_acf(&returns, a.k_max);
    let mut inputs = vec![a.input.clone()];
    let model = match &a.params {
        Some(p) => {
            inputs.push(p.clone());
            Some(acf(&read_params(p)?, a.delta, a.k_max)?)
        }
        None => None,
    };
    let band = 2.0 / (path.span() / a.delta).sqrt();
    let mut text = String::from("k,empirical,gamma,rho,band\n");
    for (i, e) in empirical.iter().enumerate() {
        let (g, r) = match &model {
            Some(m) => (m.gamma[i].to_string(), m.rho[i].to_string()),
            None => (String::new(), String::new()),
        };
        text.push_str(&format!("{},{e},{g},{r},{band}\n", i + 1));
    }
    write(&a.output, text.as_bytes())?;
    Ok(Outcome { inputs, outputs: vec![a.output.clone()], seed: None, converged: true })
}

fn cmd_signature(a: &SignatureArgs) -> Result<Outcome, Failure> {
    let (path, _) = read_path(&a.input)?;
    let mut stats = fleeting_core::estimate::EmpiricalStats::default();
    stats.var_grid = variance_grid_lenient(&path, &grid(&a.grid)?)?;
    let mut inputs = vec![a.input.clone()];
    let params = match &a.params {
        Some(p) => {
            inputs.push(p.clone());
            Some(read_params(p)?)
        }
        None => None,
    };
    write(&a.output, &io::signature_csv(&signature_rows(&stats, params.as_ref())?)?)?;
    Ok(Outcome { inputs, outputs: vec![a.output.clone()], seed: None, converged: true })
}

fn cmd_bootstrap(a: &BootstrapArgs) -> Result<Outcome, Failure> {
    if let Some(n) = a.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(anyhow::anyhow!("cannot start {n} worker threads: {e}")))?;
    }
    let params = read_params(&a.params)?;
    let config = BootstrapConfig {
        t_start: a.t0,
        t_end: a.t1,
        v0: a.v0,
        n_paths: a.n_paths,
        kind: kind(&a.trawl)?,
        seed: a.seed,
        grid: grid(&a.grid)?,
        fit: FitOptions { n_starts: a.starts, seed: a.seed, ..Default::default() },
    };
    let boot = bootstrap(&params, &config)?;
    let doc = json!({
        "trawl": a.trawl,
        "n_paths": boot.n_paths,
        "n_failed": boot.n_failed,
        "n_nonconverged": boot.n_nonconverged,
        "se": boot.se,
        "mean": boot.mean,
    });
    write(&a.output, &serde_json::to_vec_pretty(&doc).map_err(anyhow::Error::from)?)?;
    Ok(Outcome {
        inputs: vec![a.params.clone()],
        outputs: vec![a.output.clone()],
        seed: Some(a.seed),
        converged: boot.n_failed == 0 && boot.n_nonconverged == 0,
    })
}

fn dispatch(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Clean(a) => cmd_clean(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Pmf(a) => cmd_pmf(a),
        Command::Acf(a) => cmd_acf(a),
        Command::Signature(a) => cmd_signature(a),
        Command::Bootstrap(a) => cmd_bootstrap(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let argv = match run::expand_config(std::env::args_os().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let started = Instant::now();
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        config: serde_json::to_value(&cli.command).unwrap_or_default(),
        seed: outcome.seed,
        inputs: outcome.inputs,
        outputs: outcome.outputs,
        version: env!("CARGO_PKG_VERSION").to_string(),
        runtime_seconds: started.elapsed().as_secs_f64(),
    };
    if let Err(e) = run::write_manifest(&manifest).context("writing run manifest") {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if outcome.converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("warning: estimation did not converge everywhere; partial results written");
        ExitCode::from(3)
    }
}
