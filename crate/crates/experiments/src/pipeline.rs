use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use hydroqubo::anneal::{
    anneal, build_chimera, embed_1d_chain, embed_2d_unit_cells, embed_qubo, unembed, AnnealParams, ChainStrength,
    ChimeraTopology, Embedding, HardwareNoise,
};
use hydroqubo::darcy::{add_observation_noise, head_differences, sample_permeability, solve_heads, Shape, SolveOptions};
use hydroqubo::postprocess::{decompose_low_treewidth, mqc, optimize_local};
use hydroqubo::qubo::{accuracy, build_qubo_1d, build_qubo_residual, decode_permeability};
use hydroqubo::roof::{apply_fixes, fix_variables};
use hydroqubo::{seed, Field64, HeadField64, Qubo64};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Chip side length in unit cells.
pub const CHIP_CELLS: usize = 16;

const FIELD_STREAM: u64 = 1;
const OBSERVATION_STREAM: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Pipeline {
    Plain,
    Fv,
    Po,
    FvPo,
    Mqc,
    FvPoMqc,
}

impl Pipeline {
    pub const ALL: [Pipeline; 6] =
        [Pipeline::Plain, Pipeline::Fv, Pipeline::Po, Pipeline::FvPo, Pipeline::Mqc, Pipeline::FvPoMqc];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Plain => "plain",
            Pipeline::Fv => "fv",
            Pipeline::Po => "po",
            Pipeline::FvPo => "fv+po",
            Pipeline::Mqc => "mqc",
            Pipeline::FvPoMqc => "fv+po+mqc",
        }
    }

    pub fn fv(self) -> bool {
        matches!(self, Pipeline::Fv | Pipeline::FvPo | Pipeline::FvPoMqc)
    }

    pub fn po(self) -> bool {
        matches!(self, Pipeline::Po | Pipeline::FvPo | Pipeline::FvPoMqc)
    }

    pub fn mqc(self) -> bool {
        matches!(self, Pipeline::Mqc | Pipeline::FvPoMqc)
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pipeline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Pipeline::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown pipeline {s:?}"))
    }
}

impl TryFrom<String> for Pipeline {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Pipeline> for String {
    fn from(p: Pipeline) -> String {
        p.name().into()
    }
}

/// A synthetic aquifer and the QUBO built from its (possibly noisy) heads.
#[derive(Clone, Debug)]
pub struct Instance {
    pub dims: usize,
    pub size: usize,
    pub delta_k: f64,
    pub sigma: f64,
    pub field: Field64,
    pub heads: HeadField64,
    pub qubo: Qubo64,
    pub t_generate: f64,
}

pub fn shape_for(dims: usize, size: usize) -> Shape {
    if dims == 1 {
        Shape::Line(size)
    } else {
        Shape::square(size)
    }
}

/// The field depends only on `seed`, so one seed gives the same layout of
/// high and low cells at every contrast and noise level.
pub fn make_instance(
    dims: usize,
    size: usize,
    k_low: f64,
    delta_k: f64,
    sigma: f64,
    seed: u64,
) -> Result<Instance, CliError> {
    let start = Instant::now();
    let shape = shape_for(dims, size);
    let field = sample_permeability(shape, k_low, k_low + delta_k, seed::derive(seed, FIELD_STREAM, 0))?;
    let clean = solve_heads(&field, &SolveOptions::default())?;
    let heads = add_observation_noise(&clean, sigma, seed::derive(seed, OBSERVATION_STREAM, 0))?;
    let qubo = if dims == 1 {
        build_qubo_1d(&head_differences(&heads), k_low, delta_k)?
    } else {
        build_qubo_residual(&heads, k_low, delta_k, Default::default())?
    };
    let t_generate = start.elapsed().as_secs_f64();
    Ok(Instance { dims, size, delta_k, sigma, field, heads, qubo, t_generate })
}

/// One line of sweep output. Timings are wall-clock seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub run: usize,
    pub dims: usize,
    pub size: usize,
    pub delta_k: f64,
    pub sigma: f64,
    pub pipeline: String,
    pub samples: usize,
    pub accuracy: f64,
    pub fixed_fraction: Option<f64>,
    pub best_energy: f64,
    pub true_energy: f64,
    pub ratio: Option<f64>,
    pub t_generate: f64,
    pub t_solve: f64,
    pub t_fv: f64,
    pub t_po: f64,
    pub t_mqc: f64,
}

pub const COLUMNS: [&str; 18] = [
    "experiment",
    "run",
    "dims",
    "size",
    "delta_k",
    "sigma",
    "pipeline",
    "samples",
    "accuracy",
    "fixed_fraction",
    "best_energy",
    "true_energy",
    "ratio",
    "t_generate",
    "t_solve",
    "t_fv",
    "t_po",
    "t_mqc",
];

impl ResultRow {
    pub fn new(experiment: &str, run: usize, inst: &Instance, pipeline: &str) -> Self {
        let true_energy = inst.qubo.energy(&inst.field.q).expect("field matches its QUBO");
        Self {
            experiment: experiment.into(),
            run,
            dims: inst.dims,
            size: inst.size,
            delta_k: inst.delta_k,
            sigma: inst.sigma,
            pipeline: pipeline.into(),
            samples: 0,
            accuracy: 0.0,
            fixed_fraction: None,
            best_energy: f64::NAN,
            true_energy,
            ratio: None,
            t_generate: inst.t_generate,
            t_solve: 0.0,
            t_fv: 0.0,
            t_po: 0.0,
            t_mqc: 0.0,
        }
    }

    fn score(&mut self, x: &[u8], inst: &Instance) -> Result<(), CliError> {
        self.best_energy = inst.qubo.energy(x)?;
        self.accuracy = accuracy(&decode_permeability(x, &inst.field)?, &inst.field)?;
        Ok(())
    }
}

fn topology() -> ChimeraTopology {
    build_chimera(CHIP_CELLS, CHIP_CELLS).expect("chip size is positive")
}

/// Chains for the variables in `free`, taken from the full embedding of the
/// instance's shape.
fn embedding_for(inst: &Instance, free: &[usize], chain_strength: f64) -> Result<Embedding, CliError> {
    let topo = topology();
    let strength = ChainStrength::Relative(chain_strength);
    if inst.dims == 1 {
        Ok(embed_1d_chain(free.len(), &topo)?.with_chain_strength(strength))
    } else {
        let full = embed_2d_unit_cells(inst.size, &topo)?;
        let chains = free.iter().map(|&i| full.chains[i].clone()).collect();
        Ok(Embedding::new(topo, chains, strength)?)
    }
}

fn best_of(q: &Qubo64, xs: &[Vec<u8>]) -> Vec<u8> {
    let mut best = &xs[0];
    let mut e = q.energy(best).expect("sample size");
    for x in &xs[1..] {
        let ex = q.energy(x).expect("sample size");
        if ex < e {
            best = x;
            e = ex;
        }
    }
    best.clone()
}

/// Runs one pipeline on one instance.
///
/// Stages run in order: FV, embedding and annealing, unembedding, PO, then
/// MQC or lowest-energy selection. A pipeline with MQC draws as many reads
/// as the largest sample count and reports one row per count, fusing the
/// first `m` reads for count `m`. Every other pipeline draws `num_reads`
/// reads and reports one row. When FV leaves nothing free the annealer is
/// not called and there is a single row with `samples` 0.
pub fn run_pipeline(
    cfg: &ExperimentConfig,
    inst: &Instance,
    pipeline: Pipeline,
    run: usize,
    anneal_seed: u64,
) -> Result<Vec<ResultRow>, CliError> {
    let q = &inst.qubo;
    let mut row = ResultRow::new(&cfg.experiment, run, inst, pipeline.name());

    let start = Instant::now();
    let red = if pipeline.fv() {
        let report = fix_variables(q, cfg.persistency);
        row.fixed_fraction = Some(report.fixed_fraction);
        report.reduction
    } else {
        apply_fixes(q, &[])?
    };
    row.t_fv = start.elapsed().as_secs_f64();
    let reduced = &red.qubo;

    let reads = if pipeline.mqc() { *cfg.samples.iter().max().unwrap() } else { cfg.num_reads };
    let start = Instant::now();
    let mut xs: Vec<Vec<u8>> = if red.free.is_empty() {
        vec![Vec::new()]
    } else {
        let emb = embedding_for(inst, &red.free, cfg.chain_strength)?;
        let phys = embed_qubo(reduced, &emb)?;
        let params = AnnealParams {
            num_reads: reads,
            sweeps: cfg.sweeps,
            seed: anneal_seed,
            noise: HardwareNoise::new(cfg.sigma_hw, cfg.noise_scope),
        };
        let set = unembed(&anneal(&phys, &params)?, &emb, reduced)?;
        row.samples = reads;
        set.samples.into_iter().map(|s| s.x).collect()
    };
    row.t_solve = start.elapsed().as_secs_f64();

    if pipeline.po() && !red.free.is_empty() {
        let start = Instant::now();
        let d = decompose_low_treewidth(reduced, cfg.po_width)?;
        if pipeline.mqc() || cfg.po_each {
            for x in xs.iter_mut() {
                *x = optimize_local(reduced, x, &d)?;
            }
        } else {
            let best = best_of(reduced, &xs);
            xs = vec![optimize_local(reduced, &best, &d)?];
        }
        row.t_po = start.elapsed().as_secs_f64();
    }

    if !pipeline.mqc() || red.free.is_empty() {
        let x = red.expand(&best_of(reduced, &xs));
        row.score(&x, inst)?;
        return Ok(vec![row]);
    }
    let mut counts = cfg.samples.clone();
    counts.sort_unstable();
    counts.dedup();
    let mut rows = Vec::with_capacity(counts.len());
    for m in counts {
        let mut r = row.clone();
        let start = Instant::now();
        let x = mqc(reduced, &xs[..m.min(xs.len())])?;
        r.t_mqc = start.elapsed().as_secs_f64();
        r.samples = m;
        r.score(&red.expand(&x), inst)?;
        rows.push(r);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pipeline_names_round_trip() {
        for p in Pipeline::ALL {
            assert_eq!(p.name().parse::<Pipeline>().unwrap(), p);
        }
        assert!("fv+mqc".parse::<Pipeline>().is_err());
    }

    #[test]
    fn columns_match_serialization() {
        let inst = make_instance(1, 8, 1.0, 2.0, 0.0, 1).unwrap();
        let row = ResultRow::new("x", 0, &inst, "plain");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(&row).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
    }
}
