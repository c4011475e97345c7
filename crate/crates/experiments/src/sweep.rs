use std::io::Write;

use hydroqubo::qubo::{build_qubo_1d, build_qubo_residual, chain_exact_min, coefficient_spectrum, SpectrumReport};
use hydroqubo::darcy::{head_differences, sample_permeability, solve_heads, SolveOptions};
use hydroqubo::seed;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::pipeline::{make_instance, run_pipeline, shape_for, Instance, Pipeline, ResultRow};
use crate::stats;

const INSTANCE_STREAM: u64 = 10;
const ANNEAL_STREAM: u64 = 20;

/// Seed of the synthetic aquifer for repetition `run`.
pub fn instance_seed(cfg: &ExperimentConfig, run: usize) -> u64 {
    seed::derive(cfg.seed, INSTANCE_STREAM, run as u64)
}

/// Seed of the annealer for repetition `run` under `pipeline`.
pub fn anneal_seed(cfg: &ExperimentConfig, pipeline: Pipeline, run: usize) -> u64 {
    let idx = Pipeline::ALL.iter().position(|p| *p == pipeline).unwrap() as u64;
    seed::derive(cfg.seed, ANNEAL_STREAM + idx, run as u64)
}

fn pipelines_on(cfg: &ExperimentConfig, inst: &Instance, run: usize, out: &mut Vec<ResultRow>) -> Result<(), CliError> {
    for &p in &cfg.pipelines {
        out.extend(run_pipeline(cfg, inst, p, run, anneal_seed(cfg, p, run))?);
    }
    Ok(())
}

/// Cells are `(size, delta_k, sigma)` triples; every cell is repeated
/// `cfg.repetitions` times and each repetition runs every pipeline.
fn sweep_cells(
    cfg: &ExperimentConfig,
    dims: usize,
    cells: &[(usize, f64, f64)],
    mut body: impl FnMut(&Instance, usize, &mut Vec<ResultRow>) -> Result<(), CliError>,
) -> Result<Vec<ResultRow>, CliError> {
    if cfg.warmup {
        if let Some(&(size, dk, sigma)) = cells.first() {
            let inst = make_instance(dims, size, cfg.k_low, dk, sigma, instance_seed(cfg, 0))?;
            body(&inst, 0, &mut Vec::new())?;
        }
    }
    let mut rows = Vec::new();
    for &(size, dk, sigma) in cells {
        for run in 0..cfg.repetitions {
            let inst = make_instance(dims, size, cfg.k_low, dk, sigma, instance_seed(cfg, run))?;
            body(&inst, run, &mut rows)?;
        }
    }
    Ok(rows)
}

fn contrast_cells(cfg: &ExperimentConfig, size: usize) -> Vec<(usize, f64, f64)> {
    let sigma = cfg.sigma[0];
    cfg.delta_k.iter().map(|&dk| (size, dk, sigma)).collect()
}

/// Accuracy against contrast on a line of `cfg.n` cells.
pub fn sweep_delta_k_1d(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    sweep_cells(cfg, 1, &contrast_cells(cfg, cfg.n), |inst, run, out| pipelines_on(cfg, inst, run, out))
}

/// Accuracy against contrast on an `N x N` grid, `N = cfg.grid[0]`.
pub fn sweep_delta_k_2d(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    sweep_cells(cfg, 2, &contrast_cells(cfg, cfg.grid[0]), |inst, run, out| pipelines_on(cfg, inst, run, out))
}

/// Accuracy and stage timings against grid size.
pub fn sweep_grid_scaling(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    let sigma = cfg.sigma[0];
    let cells: Vec<_> = cfg.grid.iter().flat_map(|&n| cfg.delta_k.iter().map(move |&dk| (n, dk, sigma))).collect();
    sweep_cells(cfg, 2, &cells, |inst, run, out| pipelines_on(cfg, inst, run, out))
}

/// Exact ground state of a noisy line, scored as pipeline `exact`, with
/// `ratio = H(k_true) / H(k_min)`. Both energies are on the same noisy QUBO,
/// whose constant is dropped, so the ratio is 1 when the truth is still a
/// ground state and falls as noise pulls the ground state away from it.
pub fn exact_row(cfg: &ExperimentConfig, inst: &Instance, run: usize) -> Result<ResultRow, CliError> {
    let mut row = ResultRow::new(&cfg.experiment, run, inst, "exact");
    let start = std::time::Instant::now();
    let (x, _) = chain_exact_min(&inst.qubo)?;
    row.t_solve = start.elapsed().as_secs_f64();
    row.best_energy = inst.qubo.energy(&x)?;
    row.accuracy = hydroqubo::qubo::accuracy(&hydroqubo::qubo::decode_permeability(&x, &inst.field)?, &inst.field)?;
    row.ratio = (row.best_energy != 0.0).then(|| row.true_energy / row.best_energy);
    Ok(row)
}

/// Observation noise. Lines get exact ground states; grids run the
/// configured pipelines.
pub fn sweep_noise(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    let size = cfg.size();
    let cells: Vec<_> =
        cfg.delta_k.iter().flat_map(|&dk| cfg.sigma.iter().map(move |&s| (size, dk, s))).collect();
    if cfg.dims == 1 {
        sweep_cells(cfg, 1, &cells, |inst, run, out| {
            out.push(exact_row(cfg, inst, run)?);
            Ok(())
        })
    } else {
        sweep_cells(cfg, 2, &cells, |inst, run, out| pipelines_on(cfg, inst, run, out))
    }
}

/// Coefficient magnitudes of the noiseless QUBO for the first contrast.
pub fn emit_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumReport, CliError> {
    let dk = cfg.delta_k[0];
    let shape = shape_for(cfg.dims, cfg.size());
    let field = sample_permeability(shape, cfg.k_low, cfg.k_low + dk, instance_seed(cfg, 0))?;
    let heads = solve_heads(&field, &SolveOptions::default())?;
    let q = if cfg.dims == 1 {
        build_qubo_1d(&head_differences(&heads), cfg.k_low, dk)?
    } else {
        build_qubo_residual(&heads, cfg.k_low, dk, Default::default())?
    };
    Ok(coefficient_spectrum(&q)?)
}

pub fn write_rows<W: Write>(rows: &[ResultRow], w: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(w);
    if rows.is_empty() {
        w.write_record(crate::pipeline::COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean and spread of the rows sharing a sweep point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub dims: usize,
    pub size: usize,
    pub delta_k: f64,
    pub sigma: f64,
    pub pipeline: String,
    pub samples: usize,
    pub runs: usize,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub mean_fixed_fraction: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub mean_t_solve: f64,
    pub mean_t_fv: f64,
    pub mean_t_po: f64,
    pub mean_t_mqc: f64,
}

/// Groups rows by sweep point, in order of first appearance. Rows for
/// different repetitions of an MQC pipeline share a point only if they used
/// the same sample count.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    type Key = (String, usize, usize, u64, u64, String, usize);
    let key = |r: &ResultRow| -> Key {
        (r.experiment.clone(), r.dims, r.size, r.delta_k.to_bits(), r.sigma.to_bits(), r.pipeline.clone(), r.samples)
    };
    let mut order: Vec<Key> = Vec::new();
    let mut groups: std::collections::HashMap<Key, Vec<&ResultRow>> = Default::default();
    for r in rows {
        let k = key(r);
        if !groups.contains_key(&k) {
            order.push(k.clone());
        }
        groups.entry(k).or_default().push(r);
    }
    order
        .into_iter()
        .map(|k| {
            let g = &groups[&k];
            let col = |f: &dyn Fn(&ResultRow) -> f64| g.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let opt = |f: &dyn Fn(&ResultRow) -> Option<f64>| {
                let v: Vec<f64> = g.iter().filter_map(|r| f(r)).collect();
                (!v.is_empty()).then(|| stats::mean(&v))
            };
            let acc = col(&|r| r.accuracy);
            let r0 = g[0];
            SummaryRow {
                experiment: r0.experiment.clone(),
                dims: r0.dims,
                size: r0.size,
                delta_k: r0.delta_k,
                sigma: r0.sigma,
                pipeline: r0.pipeline.clone(),
                samples: r0.samples,
                runs: g.len(),
                mean_accuracy: stats::mean(&acc),
                sd_accuracy: stats::sd(&acc),
                mean_fixed_fraction: opt(&|r| r.fixed_fraction),
                mean_ratio: opt(&|r| r.ratio),
                mean_t_solve: stats::mean(&col(&|r| r.t_solve)),
                mean_t_fv: stats::mean(&col(&|r| r.t_fv)),
                mean_t_po: stats::mean(&col(&|r| r.t_po)),
                mean_t_mqc: stats::mean(&col(&|r| r.t_mqc)),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], w: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(w);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
