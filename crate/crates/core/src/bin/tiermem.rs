use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tiermem::experiment::{
    report, run_experiment, run_sweep, sweep_to_csv, to_csv, to_json, ExperimentConfig, PolicySpec, ReportFormat,
    RunOutput,
};
use tiermem::profilers::ProfilerKind;
use tiermem::trace::write_trace;
use tiermem::{Error, Result};

#[derive(Parser)]
#[command(name = "tiermem", version, about = "Tiered-memory simulator with sketch-based hot-page profiling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the configured workload and write it as a trace.
    GenTrace {
        #[command(flatten)]
        common: Common,
    },
    /// Run one experiment and write its per-epoch report.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
    /// Run once per value of one parameter and write a comparison table.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary, e.g. migration_interval, m_quota, W.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
    /// Re-render a JSON run output.
    Report {
        /// JSON file written by `run --format json`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    profiler: Option<ProfilerKind>,
    /// dynamic, fixed:<θ> or none.
    #[arg(long)]
    policy: Option<PolicySpec>,
    /// Override any config field: `--set intervals.clear_interval_ms=1000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        for item in &self.overrides {
            let (key, value) =
                item.split_once('=').ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got `{item}`")))?;
            cfg.set(key.trim(), value.trim())?;
        }
        if let Some(seed) = self.seed {
            cfg.sim.rng_seed = seed;
        }
        if let Some(p) = self.profiler {
            cfg.profiler = p;
        }
        if let Some(p) = self.policy {
            cfg.policy = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(text: String, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn render(out: &RunOutput, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => to_csv(out),
        ReportFormat::Json => to_json(out),
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::GenTrace { common } => {
            let cfg = common.config()?;
            let out = common.out.as_ref().ok_or_else(|| Error::Config("gen-trace needs --out".into()))?;
            let events = cfg.workload.events(cfg.seed())?;
            write_trace(&events, out)?;
            eprintln!("wrote {} events to {}", events.len(), out.display());
        }
        Command::Run { common, format } => {
            let cfg = common.config()?;
            let output = run_experiment(&cfg)?;
            match &common.out {
                Some(path) => report(&output, format, path)?,
                None => print!("{}", render(&output, format)),
            }
            let s = &output.summary;
            eprintln!(
                "{} epochs, slow fraction {:.4}, {:.2} ns/access, {} promotions, {} demotions",
                s.epochs, s.slow_fraction, s.latency_per_access_ns, s.promotions, s.demotions
            );
        }
        Command::Sweep { common, axis, values, format } => {
            let cfg = common.config()?;
            let rows = run_sweep(&cfg, &axis, &values)?;
            let text = match format {
                ReportFormat::Csv => sweep_to_csv(&axis, &cfg, &rows),
                ReportFormat::Json => serde_json::to_string_pretty(&rows)?,
            };
            emit(text, common.out.as_ref())?;
        }
        Command::Report { input, format, out } => {
            let text = std::fs::read_to_string(&input)?;
            let output: RunOutput = serde_json::from_str(&text)?;
            report(&output, format, out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
