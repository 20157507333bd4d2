//! Batch experiment harness: repeated independent solver runs with
//! consecutive seeds, aggregated into a per-run record table. The feasible
//! initial timetable is constructed once per batch and shared across runs;
//! runs may execute in parallel, and aggregation is ordered by seed so the
//! output is independent of scheduling.

use rayon::prelude::*;
use thiserror::Error;

use crate::evaluator::{penalty_allocation, PenaltyAllocation};
use crate::instance::{Instance, Timetable};
use crate::jfi::solve_jfi_with_clock;
use crate::mmf::{solve_mmf_with_clock, Clock, SAParams, WallClock};
use crate::neighborhood::{build_initial, NeighborhoodError};
use crate::report::format_allocation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchMode {
    Mmf,
    Jfi,
}

impl std::fmt::Display for BatchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BatchMode::Mmf => "mmf",
            BatchMode::Jfi => "jfi",
        })
    }
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("failed to build an initial timetable: {0}")]
    Construction(#[from] NeighborhoodError),
    #[error("batch CSV: {0}")]
    Csv(String),
    #[error("unknown batch column '{0}' (expected worst, total_penalty or wall_s)")]
    UnknownColumn(String),
}

/// Outcome of one solver run. For the bi-objective mode the record holds the
/// archive entry with the lowest total penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub allocation: PenaltyAllocation,
    pub total_penalty: u32,
    pub wall_s: f64,
}

impl RunRecord {
    /// Largest per-curriculum penalty; the default comparison column.
    pub fn worst(&self) -> u32 {
        self.allocation.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    pub instance: String,
    pub mode: BatchMode,
    pub params: SAParams,
    pub records: Vec<RunRecord>,
    /// Runs that errored, as (seed, message); recorded, not fatal.
    pub failures: Vec<(u64, String)>,
}

/// Executes `runs` independent solver runs with seeds `params.seed`,
/// `params.seed + 1`, ... on up to `jobs` threads. The shared initial
/// timetable is built from `params.seed`.
pub fn run_batch(
    inst: &Instance,
    params: &SAParams,
    runs: usize,
    mode: BatchMode,
    jobs: usize,
) -> Result<BatchResult, BatchError> {
    run_batch_with_clock(inst, params, runs, mode, jobs, |_| WallClock::start())
}

/// As [`run_batch`] with one injected time source per run, keyed by the run
/// seed. With a deterministic clock the whole batch is reproducible except
/// for the measured wall seconds.
pub fn run_batch_with_clock<C, F>(
    inst: &Instance,
    params: &SAParams,
    runs: usize,
    mode: BatchMode,
    jobs: usize,
    clock_factory: F,
) -> Result<BatchResult, BatchError>
where
    C: Clock,
    F: Fn(u64) -> C + Sync,
{
    let start = build_initial(inst, params.seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool construction");

    let outcomes: Vec<(u64, Result<RunRecord, String>)> = pool.install(|| {
        (0..runs as u64)
            .into_par_iter()
            .map(|i| {
                let seed = params.seed + i;
                let run_params = SAParams {
                    seed,
                    ..params.clone()
                };
                (
                    seed,
                    run_one(inst, &start, &run_params, mode, clock_factory(seed)),
                )
            })
            .collect()
    });

    let mut records = Vec::with_capacity(runs);
    let mut failures = Vec::new();
    for (seed, outcome) in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(msg) => failures.push((seed, msg)),
        }
    }
    Ok(BatchResult {
        instance: inst.name().to_string(),
        mode,
        params: params.clone(),
        records,
        failures,
    })
}

fn run_one(
    inst: &Instance,
    start: &Timetable,
    params: &SAParams,
    mode: BatchMode,
    clock: impl Clock,
) -> Result<RunRecord, String> {
    let wall = std::time::Instant::now();
    let (timetable, penalty) = match mode {
        BatchMode::Mmf => {
            let (best, _) =
                solve_mmf_with_clock(inst, start, params, clock).map_err(|e| e.to_string())?;
            let penalty = crate::evaluator::total_penalty(inst, &best)
                .expect("solver results are feasible");
            (best, penalty)
        }
        BatchMode::Jfi => {
            let archive =
                solve_jfi_with_clock(inst, start, params, clock).map_err(|e| e.to_string())?;
            let best = archive
                .entries()
                .iter()
                .min_by(|a, b| {
                    a.objective
                        .penalty
                        .cmp(&b.objective.penalty)
                        .then(a.objective.unfairness.partial_cmp(&b.objective.unfairness).unwrap())
                })
                .expect("archive holds at least the seed");
            (best.timetable.clone(), best.objective.penalty)
        }
    };
    let allocation = penalty_allocation(inst, &timetable).expect("solver results are feasible");
    Ok(RunRecord {
        seed: params.seed,
        allocation,
        total_penalty: penalty,
        wall_s: wall.elapsed().as_secs_f64(),
    })
}

/// Batch table as CSV with columns
/// `seed,allocation,worst,total_penalty,wall_s`.
pub fn batch_csv(result: &BatchResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "allocation", "worst", "total_penalty", "wall_s"])
        .unwrap();
    for r in &result.records {
        w.write_record([
            r.seed.to_string(),
            format_allocation(&r.allocation),
            r.worst().to_string(),
            r.total_penalty.to_string(),
            format!("{:.3}", r.wall_s),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Extracts one numeric column from a batch CSV, for statistical
/// comparison.
pub fn read_batch_column(csv_text: &str, column: &str) -> Result<Vec<f64>, BatchError> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| BatchError::Csv(e.to_string()))?
        .clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| BatchError::UnknownColumn(column.to_string()))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| BatchError::Csv(e.to_string()))?;
        let field = record
            .get(idx)
            .ok_or_else(|| BatchError::Csv("short record".to_string()))?;
        out.push(
            field
                .parse::<f64>()
                .map_err(|e| BatchError::Csv(format!("bad number '{field}': {e}")))?,
        );
    }
    Ok(out)
}
