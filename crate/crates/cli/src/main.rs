use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::Parser;
use hstsim::engine::{check_sweep, mobility_summary, Scenario};
use hstsim::report::{mobility_csv, svg_plot, sweep_csv, RunManifest};
use hstsim::{parse_config, ConfigError, ScenarioConfig};

/// Downlink throughput of a high-speed train under different serving schemes.
#[derive(Debug, Parser)]
#[command(name = "hstsim", version)]
struct Args {
    /// Scenario file with `key=value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `all` or a comma list of baseline, coordination, cooperation, relay.
    #[arg(long)]
    scheme: Option<String>,
    /// Train-center positions relative to the anchor site: `START:STEP:STOP` or a comma list.
    #[arg(long)]
    positions: Option<String>,
    #[arg(long)]
    drops: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    ttis: Option<String>,
    #[arg(long = "penetration-db", allow_hyphen_values = true)]
    penetration_db: Option<String>,
    /// `expected` or `sampled`.
    #[arg(long = "interference-mode")]
    interference_mode: Option<String>,
    /// Sweep CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Handover summary CSV path.
    #[arg(long = "mobility-out")]
    mobility_out: Option<PathBuf>,
    /// SVG plot of throughput versus position.
    #[arg(long)]
    plot: Option<PathBuf>,
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

fn load_config(args: &Args) -> anyhow::Result<ScenarioConfig> {
    let mut cfg = match &args.config {
        Some(path) => parse_config(path)?,
        None => ScenarioConfig::default(),
    };
    let overrides = [
        ("scheme", "scheme", &args.scheme),
        ("positions", "positions_m", &args.positions),
        ("drops", "drops_per_point", &args.drops),
        ("seed", "master_seed", &args.seed),
        ("ttis", "ttis_per_drop", &args.ttis),
        ("penetration-db", "penetration_db", &args.penetration_db),
        ("interference-mode", "interference_mode", &args.interference_mode),
    ];
    for (flag, key, value) in overrides {
        if let Some(v) = value {
            cfg.apply(key, v, 0).map_err(|e| match e {
                ConfigError::Malformed { reason, .. } | ConfigError::OutOfRange { reason, .. } => {
                    anyhow!("--{flag} {v}: {reason}")
                }
                other => other.into(),
            })?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    out.with_file_name(name)
}

fn run(args: &Args) -> Result<(), Failure> {
    let cfg = load_config(args).map_err(Failure::Config)?;
    check_sweep(&cfg).map_err(|e| Failure::Config(e.into()))?;
    let scenario = Scenario::new(&cfg).map_err(|e| Failure::Config(e.into()))?;
    log::info!(
        "{} schemes x {} positions x {} drops, {} TTIs each",
        cfg.schemes.len(),
        cfg.positions_m.len(),
        cfg.drops_per_point,
        cfg.ttis_per_drop
    );
    let result = scenario.sweep().map_err(|e| Failure::Runtime(e.into()))?;
    let csv = sweep_csv(&result);

    let mut outputs = Vec::new();
    match &args.out {
        Some(path) => {
            write(path, &csv).map_err(Failure::Runtime)?;
            outputs.push(path.display().to_string());
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &args.mobility_out {
        let rows = mobility_summary(&cfg).map_err(|e| Failure::Runtime(e.into()))?;
        write(path, &mobility_csv(&rows)).map_err(Failure::Runtime)?;
        outputs.push(path.display().to_string());
    }
    if let Some(path) = &args.plot {
        write(path, &svg_plot(&result)).map_err(Failure::Runtime)?;
        outputs.push(path.display().to_string());
    }
    if let Some(path) = &args.out {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            master_seed: cfg.master_seed,
            outputs,
            config: cfg.clone(),
        };
        write(&manifest_path(path), &manifest.to_text()).map_err(Failure::Runtime)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
