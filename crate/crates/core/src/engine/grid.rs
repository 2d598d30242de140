use rayon::prelude::*;
use serde::Serialize;

use crate::engine::config::{simulate, Metric, RunOutput, SimulationConfig};
use crate::error::{Error, Result};

/// One configuration to be run once per seed.
#[derive(Debug, Clone, PartialEq)]
pub struct GridJob {
    pub id: String,
    pub config: SimulationConfig,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub metric: Metric,
    pub mean: Vec<f64>,
    /// Population standard deviation across seeds.
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub id: String,
    /// Per-seed outcome, in the job's seed order.
    pub runs: Vec<(u64, Result<RunOutput>)>,
    /// Summary over the seeds that succeeded; empty if none did.
    pub summary: Vec<SeriesSummary>,
}

impl GridResult {
    pub fn errors(&self) -> impl Iterator<Item = (u64, &Error)> {
        self.runs.iter().filter_map(|(s, r)| r.as_ref().err().map(|e| (*s, e)))
    }
}

/// Runs every `(job, seed)` pair on a pool of `parallelism` threads. Each run
/// is sequential and a pure function of its inputs, so the result does not
/// depend on `parallelism`; it comes back in job order.
pub fn grid_run(jobs: &[GridJob], parallelism: usize) -> Result<Vec<GridResult>> {
    if parallelism == 0 {
        return Err(Error::InvalidParameter { name: "parallelism", reason: "must be positive".into() });
    }
    let tasks: Vec<(usize, u64)> =
        jobs.iter().enumerate().flat_map(|(j, job)| job.seeds.iter().map(move |&s| (j, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::InvalidParameter { name: "parallelism", reason: e.to_string() })?;
    let outputs: Vec<Result<RunOutput>> =
        pool.install(|| tasks.par_iter().map(|&(j, seed)| simulate(&jobs[j].config, Some(seed))).collect());

    let mut outputs = outputs.into_iter();
    Ok(jobs
        .iter()
        .map(|job| {
            let runs: Vec<(u64, Result<RunOutput>)> =
                job.seeds.iter().map(|&s| (s, outputs.next().expect("one output per task"))).collect();
            let summary = summarize(runs.iter().filter_map(|(_, r)| r.as_ref().ok()));
            GridResult { id: job.id.clone(), runs, summary }
        })
        .collect())
}

fn summarize<'a>(runs: impl Iterator<Item = &'a RunOutput>) -> Vec<SeriesSummary> {
    let runs: Vec<&RunOutput> = runs.collect();
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let k = runs.len() as f64;
    first
        .series
        .iter()
        .map(|s| {
            let len = s.values.len();
            let mut mean = vec![0.0; len];
            for r in &runs {
                for (m, v) in mean.iter_mut().zip(r.get(s.metric).unwrap_or(&[])) {
                    *m += v / k;
                }
            }
            let mut std = vec![0.0; len];
            for r in &runs {
                for ((sd, v), m) in std.iter_mut().zip(r.get(s.metric).unwrap_or(&[])).zip(&mean) {
                    *sd += (v - m) * (v - m) / k;
                }
            }
            std.iter_mut().for_each(|v| *v = v.sqrt());
            SeriesSummary { metric: s.metric, mean, std }
        })
        .collect()
}
