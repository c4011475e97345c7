use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hydroqubo_experiments::sweep::{self, anneal_seed, instance_seed};
use hydroqubo_experiments::{make_instance, run_pipeline, CliError, ExperimentConfig, ResultRow};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hydroqubo", version, about = "Permeability inversion experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML file with experiment settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; overrides the config. Standard output when unset.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write one instance (field, heads, QUBO) as JSON.
    Generate(Common),
    /// Run every configured pipeline on one instance and print JSON rows.
    Solve(Common),
    /// Accuracy against contrast on a line.
    #[command(name = "sweep-dk-1d")]
    SweepDk1d(Common),
    /// Accuracy against contrast on a square grid.
    #[command(name = "sweep-dk-2d")]
    SweepDk2d(Common),
    /// Accuracy and stage timings against grid size.
    SweepGrid(Common),
    /// Observation-noise sweep.
    SweepNoise(Common),
    /// Sorted coefficient magnitudes of one QUBO.
    Spectrum(Common),
}

fn load(c: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.output = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}_summary.csv"))
}

fn emit_rows(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<(), CliError> {
    sweep::write_rows(rows, sink(cfg.output.as_deref())?)?;
    if let Some(out) = &cfg.output {
        sweep::write_summary(&sweep::summarize(rows), File::create(summary_path(out))?)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(c) => {
            let cfg = load(&c)?;
            let inst = make_instance(cfg.dims, cfg.size(), cfg.k_low, cfg.delta_k[0], cfg.sigma[0], instance_seed(&cfg, 0))?;
            let doc = json!({ "field": inst.field, "heads": inst.heads, "qubo": inst.qubo });
            let mut w = sink(cfg.output.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
        Command::Solve(c) => {
            let cfg = load(&c)?;
            let inst = make_instance(cfg.dims, cfg.size(), cfg.k_low, cfg.delta_k[0], cfg.sigma[0], instance_seed(&cfg, 0))?;
            let mut rows = Vec::new();
            for &p in &cfg.pipelines {
                rows.extend(run_pipeline(&cfg, &inst, p, 0, anneal_seed(&cfg, p, 0))?);
            }
            let mut w = sink(cfg.output.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &rows)?;
            writeln!(w)?;
        }
        Command::SweepDk1d(c) => {
            let cfg = load(&c)?;
            emit_rows(&cfg, &sweep::sweep_delta_k_1d(&cfg)?)?;
        }
        Command::SweepDk2d(c) => {
            let cfg = load(&c)?;
            emit_rows(&cfg, &sweep::sweep_delta_k_2d(&cfg)?)?;
        }
        Command::SweepGrid(c) => {
            let cfg = load(&c)?;
            emit_rows(&cfg, &sweep::sweep_grid_scaling(&cfg)?)?;
        }
        Command::SweepNoise(c) => {
            let cfg = load(&c)?;
            emit_rows(&cfg, &sweep::sweep_noise(&cfg)?)?;
        }
        Command::Spectrum(c) => {
            let cfg = load(&c)?;
            let report = sweep::emit_spectrum(&cfg)?;
            sink(cfg.output.as_deref())?.write_all(report.to_csv().as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
