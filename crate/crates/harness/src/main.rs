use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use dscm_core::mgpd::run_obtb_calibration;
use dscm_harness::config::parse_assignment;
use dscm_harness::output::{to_json_string, CsvSink};
use dscm_harness::presets::describe;
use dscm_harness::{build_preset, run_scenario_with, Format, RunOptions, ScenarioConfig, PRESET_NAMES};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "dscm", version, about = "Run DSCM link simulation sweeps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Source {
    /// Scenario JSON; with --preset its fields override the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Override a field, e.g. impairments.osnr_db=26 or rsop_rad_s=1e6.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario sweep and write the result table.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output file; defaults to the config's `outputs`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// List the named presets.
    ListPresets,
    /// Run the MGPD back-to-back calibration and print the skew report.
    Calibrate {
        #[command(flatten)]
        source: Source,
    },
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn load(src: &Source) -> anyhow::Result<ScenarioConfig> {
    let mut value = match &src.preset {
        Some(name) => build_preset(name)?.to_value(),
        None => ScenarioConfig::default().to_value(),
    };
    match &src.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let over: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            merge(&mut value, over);
        }
        None if src.preset.is_none() => bail!("one of --config or --preset is required"),
        None => {}
    }
    let cfg = ScenarioConfig::from_value(value)?;
    let sets = src.sets.iter().map(|s| parse_assignment(s)).collect::<Result<Vec<_>, _>>()?;
    let cfg = cfg.with_overrides(&sets)?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(src: &Source, out: Option<PathBuf>, format: Option<String>, jobs: usize) -> anyhow::Result<()> {
    let cfg = load(src)?;
    let out = out.or_else(|| cfg.outputs.as_ref().map(PathBuf::from));
    let format = match (format, &out) {
        (Some(f), _) => f.parse()?,
        (None, Some(p)) => Format::from_path(p),
        (None, None) => Format::Csv,
    };
    let writer: Box<dyn Write> = match &out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    };
    let opts = RunOptions { jobs };
    match format {
        Format::Csv => {
            let mut sink = CsvSink::new(writer)?;
            run_scenario_with(&cfg, opts, |r| sink.push(r))?;
            sink.into_inner()?.flush()?;
        }
        Format::Json => {
            let rows = run_scenario_with(&cfg, opts, |_| Ok(()))?;
            let mut w = writer;
            writeln!(w, "{}", to_json_string(&rows)?)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn calibrate(src: &Source) -> anyhow::Result<()> {
    let cfg = load(src)?;
    let est = run_obtb_calibration::<f64>(
        &cfg.impairments.frontend,
        &cfg.calibration.rotation,
        cfg.calibration.f1,
        cfg.calibration_duration(),
        cfg.impairments.link.osnr_db,
        cfg.dscm.sample_rate(),
        cfg.seeds[0],
    )?;
    println!("{}", est.to_json());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run { source, out, format, jobs } => run(&source, out, format, jobs),
        Cmd::ListPresets => {
            for name in PRESET_NAMES {
                println!("{name:8} {}", describe(name).unwrap_or_default());
            }
            Ok(())
        }
        Cmd::Calibrate { source } => calibrate(&source),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
