//! Simulated annealing over feasible timetables optimizing max-min fairness
//! of the per-curriculum penalty allocation.
//!
//! Candidates that are at least as good as the current solution under the
//! max-min order are always accepted; strictly worse candidates are accepted
//! with probability `exp(-dE / theta)` where `dE` is the configured energy
//! difference and `theta` follows a geometric cooling schedule over elapsed
//! wall-clock time.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::evaluator::{HardViolation, PenaltyAllocation};
use crate::fairness::{
    energy_difference_sorted, mm_compare, mm_compare_sorted, sorted_desc, EnergyKind, MMOrder,
};
use crate::instance::{Instance, Timetable};
use crate::search::SearchState;

/// Annealer configuration. The defaults mirror the benchmark setup: cooling
/// from 5 to 0.01 over a 192 s timeout with the component-wise energy
/// difference at offset 1e-3 (the fairness-tradeoff solver raises the start
/// temperature to 20).
#[derive(Debug, Clone, PartialEq)]
pub struct SAParams {
    pub theta_max: f64,
    pub theta_min: f64,
    pub timeout_s: f64,
    pub delta: f64,
    pub energy: EnergyKind,
    pub seed: u64,
}

impl SAParams {
    pub fn mmf_defaults() -> Self {
        SAParams {
            theta_max: 5.0,
            theta_min: 0.01,
            timeout_s: 192.0,
            delta: 1e-3,
            energy: EnergyKind::Cw,
            seed: 0,
        }
    }

    pub fn jfi_defaults() -> Self {
        SAParams {
            theta_max: 20.0,
            ..SAParams::mmf_defaults()
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.theta_min) || !positive(self.theta_max) || self.theta_min >= self.theta_max
        {
            return Err(SolveError::InvalidParams(
                "temperatures must satisfy 0 < theta_min < theta_max".into(),
            ));
        }
        if !positive(self.timeout_s) {
            return Err(SolveError::InvalidParams("timeout must be positive".into()));
        }
        if !positive(self.delta) {
            return Err(SolveError::InvalidParams("delta must be positive".into()));
        }
        Ok(())
    }
}

impl Default for SAParams {
    fn default() -> Self {
        SAParams::mmf_defaults()
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("initial timetable is infeasible ({} hard violations)", .0.len())]
    InfeasibleStart(Vec<HardViolation>),
    #[error("no feasible neighbor found; the instance neighborhood is degenerate")]
    NoNeighborFound,
}

/// Monotone time source driving cooling and the timeout. Production code
/// uses [`WallClock`]; tests may substitute a deterministic clock to make
/// whole runs reproducible bit for bit.
pub trait Clock {
    /// Seconds elapsed since the run started; must never decrease.
    fn elapsed_s(&mut self) -> f64;
}

pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn elapsed_s(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Deterministic clock advancing a fixed step per query.
pub struct TickClock {
    step: f64,
    now: f64,
}

impl TickClock {
    pub fn new(step: f64) -> Self {
        TickClock { step, now: 0.0 }
    }
}

impl Clock for TickClock {
    fn elapsed_s(&mut self) -> f64 {
        let t = self.now;
        self.now += self.step;
        t
    }
}

/// Geometric cooling over elapsed time: the rate is derived from the
/// endpoints so that the schedule starts at `theta_max` and reaches
/// `theta_min` exactly at the timeout, independent of the timeout chosen.
pub fn temperature_at(p: &SAParams, elapsed_s: f64) -> f64 {
    let ratio = p.theta_min / p.theta_max;
    p.theta_max * (elapsed_s / p.timeout_s * ratio.ln()).exp()
}

/// Metropolis-style acceptance: 1 when the candidate allocation is at least
/// as good under the max-min order, otherwise `exp(-dE/theta)`.
pub fn acceptance_probability(
    current: &[u32],
    candidate: &[u32],
    theta: f64,
    energy: EnergyKind,
    delta: f64,
) -> f64 {
    match mm_compare(candidate, current).expect("allocations stem from one instance") {
        MMOrder::Better | MMOrder::Equal => 1.0,
        MMOrder::Worse => {
            let xs = sorted_desc(current);
            let ys = sorted_desc(candidate);
            let de = energy_difference_sorted(energy, &xs, &ys, delta);
            (-de / theta).exp()
        }
    }
}

/// One best-so-far snapshot of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub elapsed_s: f64,
    pub allocation: PenaltyAllocation,
    pub total_penalty: u32,
}

/// Strictly improving best-so-far snapshots, in chronological order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
}

/// Runs the max-min-fair annealer against the wall clock.
pub fn solve_mmf(
    inst: &Instance,
    start: &Timetable,
    params: &SAParams,
) -> Result<(Timetable, RunTrace), SolveError> {
    solve_mmf_with_clock(inst, start, params, WallClock::start())
}

/// As [`solve_mmf`] with an injected time source.
pub fn solve_mmf_with_clock(
    inst: &Instance,
    start: &Timetable,
    params: &SAParams,
    mut clock: impl Clock,
) -> Result<(Timetable, RunTrace), SolveError> {
    params.validate()?;
    let mut state = SearchState::new(inst, start).map_err(SolveError::InfeasibleStart)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let cooling = (params.theta_min / params.theta_max).ln() / params.timeout_s;

    let mut cur_sorted = sorted_desc(state.allocation());
    let mut best = start.clone();
    let mut best_sorted = cur_sorted.clone();
    let mut trace = RunTrace::default();
    trace.records.push(TraceRecord {
        elapsed_s: 0.0,
        allocation: PenaltyAllocation(state.allocation().to_vec()),
        total_penalty: state.total_penalty(),
    });

    loop {
        let elapsed = clock.elapsed_s();
        if elapsed >= params.timeout_s {
            break;
        }
        let theta = params.theta_max * (elapsed * cooling).exp();

        let Some(mv) = state.propose(&mut rng) else {
            return Err(SolveError::NoNeighborFound);
        };
        let undo = state.apply(&mv);
        let cand_sorted = sorted_desc(state.allocation());
        let p_accept = match mm_compare_sorted(&cand_sorted, &cur_sorted) {
            MMOrder::Better | MMOrder::Equal => 1.0,
            MMOrder::Worse => {
                let de = energy_difference_sorted(params.energy, &cur_sorted, &cand_sorted, params.delta);
                (-de / theta).exp()
            }
        };
        if p_accept >= rng.random::<f64>() {
            cur_sorted = cand_sorted;
        } else {
            state.apply(&undo);
        }

        // Non-strict best update, so an equally good current solution also
        // becomes the new incumbent.
        match mm_compare_sorted(&cur_sorted, &best_sorted) {
            MMOrder::Better => {
                best = state.to_timetable();
                best_sorted.clone_from(&cur_sorted);
                trace.records.push(TraceRecord {
                    elapsed_s: elapsed,
                    allocation: PenaltyAllocation(state.allocation().to_vec()),
                    total_penalty: state.total_penalty(),
                });
            }
            MMOrder::Equal => {
                best = state.to_timetable();
            }
            MMOrder::Worse => {}
        }
    }

    Ok((best, trace))
}
