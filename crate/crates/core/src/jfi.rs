//! Bi-objective optimization of (total penalty, unfairness) via an
//! archive-based simulated annealer.
//!
//! The second coordinate is `1 - J(A')` where `J` is the fairness index of
//! the shifted allocation, so a timetable whose penalty is spread perfectly
//! evenly scores zero unfairness. The annealer keeps a bounded archive of
//! mutually non-dominated solutions; acceptance depends on domination
//! against the current solution and the archive, with dominated candidates
//! accepted with a probability that shrinks with the average domination
//! amount.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::evaluator::{penalty_allocation, total_penalty, EvalError};
use crate::fairness::{jain_index, FairnessError};
use crate::instance::{Instance, Timetable};
use crate::mmf::{Clock, SAParams, SolveError, WallClock};
use crate::search::SearchState;

pub const ARCHIVE_SOFT_LIMIT: usize = 50;
pub const ARCHIVE_HARD_LIMIT: usize = 100;

const PENALTY_RANGE_FLOOR: f64 = 1.0;
const UNFAIRNESS_RANGE_FLOOR: f64 = 1e-6;

/// A point in objective space: total soft penalty and unfairness
/// `1 - J(A')`, both minimized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectivePair {
    pub penalty: u32,
    pub unfairness: f64,
}

impl ObjectivePair {
    pub fn jain(&self) -> f64 {
        1.0 - self.unfairness
    }
}

/// Strict Pareto dominance: no worse in both coordinates, better in at
/// least one.
pub fn dominates(a: &ObjectivePair, b: &ObjectivePair) -> bool {
    (a.penalty <= b.penalty && a.unfairness <= b.unfairness)
        && (a.penalty < b.penalty || a.unfairness < b.unfairness)
}

/// Evaluates both objectives. The penalty coordinate is the plain total
/// (each course counted once); the unfairness coordinate is computed from
/// the per-curriculum allocation, where shared courses count per
/// curriculum. An all-zero shifted allocation (every curriculum equally
/// penalized, including not at all) counts as perfectly fair.
pub fn objective(inst: &Instance, t: &Timetable) -> Result<ObjectivePair, EvalError> {
    let penalty = total_penalty(inst, t)?;
    let alloc = penalty_allocation(inst, t)?;
    Ok(ObjectivePair {
        penalty,
        unfairness: unfairness_of_allocation(&alloc),
    })
}

pub(crate) fn unfairness_of_allocation(alloc: &crate::evaluator::PenaltyAllocation) -> f64 {
    unfairness_of_values(alloc)
}

fn unfairness_of_values(values: &[u32]) -> f64 {
    let max = values.iter().copied().max().unwrap_or(0);
    let shifted: Vec<f64> = values.iter().map(|&v| (max - v) as f64).collect();
    match jain_index(&shifted) {
        Ok(j) => 1.0 - j,
        Err(FairnessError::AllZero) => 0.0,
        Err(e) => unreachable!("jain index on nonnegative input: {e}"),
    }
}

#[derive(Debug, Clone)]
pub struct ArchiveEntry {
    pub timetable: Timetable,
    pub objective: ObjectivePair,
}

/// Bounded set of mutually non-dominated solutions. When an insertion grows
/// the archive past its soft limit, the closest entries in normalized
/// objective space are merged (keeping medoids) until the limit is met; the
/// hard limit is never exceeded.
#[derive(Debug, Clone)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
    soft_limit: usize,
    hard_limit: usize,
}

impl ParetoArchive {
    pub fn new(soft_limit: usize, hard_limit: usize) -> Self {
        assert!(soft_limit >= 1 && soft_limit <= hard_limit);
        ParetoArchive {
            entries: Vec::new(),
            soft_limit,
            hard_limit,
        }
    }

    pub fn with_default_limits() -> Self {
        ParetoArchive::new(ARCHIVE_SOFT_LIMIT, ARCHIVE_HARD_LIMIT)
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn objectives(&self) -> impl Iterator<Item = ObjectivePair> + '_ {
        self.entries.iter().map(|e| e.objective)
    }

    /// True when some entry strictly dominates the point.
    pub fn any_dominates(&self, obj: &ObjectivePair) -> bool {
        self.entries.iter().any(|e| dominates(&e.objective, obj))
    }

    /// Whether [`insert`](Self::insert) would keep the point: not dominated
    /// by and not equal to any current entry.
    pub fn would_accept(&self, obj: &ObjectivePair) -> bool {
        !self
            .entries
            .iter()
            .any(|e| dominates(&e.objective, obj) || e.objective == *obj)
    }

    /// Inserts a solution, dropping it if dominated (or already represented
    /// at the same objective point) and evicting every entry it dominates.
    /// Returns whether the solution entered the archive.
    pub fn insert(&mut self, timetable: Timetable, objective: ObjectivePair) -> bool {
        if !self.would_accept(&objective) {
            return false;
        }
        self.entries
            .retain(|e| !dominates(&objective, &e.objective));
        self.entries.push(ArchiveEntry {
            timetable,
            objective,
        });
        if self.entries.len() > self.soft_limit {
            self.reduce_to(self.soft_limit);
        }
        debug_assert!(self.entries.len() <= self.hard_limit);
        #[cfg(debug_assertions)]
        self.assert_non_dominated();
        true
    }

    /// Merges archives, re-filtering domination; used to combine concurrent
    /// runs.
    pub fn merge(&mut self, other: ParetoArchive) {
        for e in other.entries {
            self.insert(e.timetable, e.objective);
        }
    }

    fn normalized(&self, obj: &ObjectivePair, ranges: &(f64, f64, f64, f64)) -> (f64, f64) {
        let (pmin, prange, umin, urange) = *ranges;
        (
            (obj.penalty as f64 - pmin) / prange,
            (obj.unfairness - umin) / urange,
        )
    }

    fn ranges(&self) -> (f64, f64, f64, f64) {
        let pmin = self.objectives().map(|o| o.penalty).min().unwrap_or(0) as f64;
        let pmax = self.objectives().map(|o| o.penalty).max().unwrap_or(0) as f64;
        let umin = self
            .objectives()
            .map(|o| o.unfairness)
            .fold(f64::INFINITY, f64::min);
        let umax = self
            .objectives()
            .map(|o| o.unfairness)
            .fold(f64::NEG_INFINITY, f64::max);
        (
            pmin,
            (pmax - pmin).max(PENALTY_RANGE_FLOOR),
            umin,
            (umax - umin).max(UNFAIRNESS_RANGE_FLOOR),
        )
    }

    /// Single-linkage clustering on normalized objective distance down to
    /// `target` clusters, keeping each cluster's medoid.
    fn reduce_to(&mut self, target: usize) {
        let n = self.entries.len();
        if n <= target {
            return;
        }
        let ranges = self.ranges();
        let points: Vec<(f64, f64)> = self
            .entries
            .iter()
            .map(|e| self.normalized(&e.objective, &ranges))
            .collect();
        let dist = |i: usize, j: usize| -> f64 {
            let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
            (dx * dx + dy * dy).sqrt()
        };

        let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        while clusters.len() > target {
            let mut best = (0, 1, f64::INFINITY);
            for i in 0..clusters.len() {
                for j in (i + 1)..clusters.len() {
                    let d = clusters[i]
                        .iter()
                        .flat_map(|&a| clusters[j].iter().map(move |&b| dist(a, b)))
                        .fold(f64::INFINITY, f64::min);
                    if d < best.2 {
                        best = (i, j, d);
                    }
                }
            }
            // best.0 < best.1, so the swap_remove cannot displace it.
            let merged = clusters.swap_remove(best.1);
            clusters[best.0].extend(merged);
        }

        let mut keep: Vec<usize> = clusters
            .iter()
            .map(|cluster| {
                *cluster
                    .iter()
                    .min_by(|&&a, &&b| {
                        let cost = |x: usize| -> f64 {
                            cluster.iter().map(|&y| dist(x, y)).sum()
                        };
                        cost(a).partial_cmp(&cost(b)).unwrap().then(a.cmp(&b))
                    })
                    .unwrap()
            })
            .collect();
        keep.sort_unstable();
        let mut idx = 0;
        let mut keep_iter = keep.into_iter().peekable();
        self.entries.retain(|_| {
            let keep_this = keep_iter.peek() == Some(&idx);
            if keep_this {
                keep_iter.next();
            }
            idx += 1;
            keep_this
        });
    }

    #[cfg(debug_assertions)]
    fn assert_non_dominated(&self) {
        for (i, a) in self.entries.iter().enumerate() {
            for (j, b) in self.entries.iter().enumerate() {
                if i != j {
                    debug_assert!(
                        !dominates(&a.objective, &b.objective),
                        "archive holds a dominated entry"
                    );
                }
            }
        }
    }
}

/// Runs the archive-based bi-objective annealer against the wall clock,
/// warm-started from (and seeded with) `start`.
pub fn solve_jfi(
    inst: &Instance,
    start: &Timetable,
    params: &SAParams,
) -> Result<ParetoArchive, SolveError> {
    solve_jfi_with_clock(inst, start, params, WallClock::start())
}

/// As [`solve_jfi`] with an injected time source.
pub fn solve_jfi_with_clock(
    inst: &Instance,
    start: &Timetable,
    params: &SAParams,
    mut clock: impl Clock,
) -> Result<ParetoArchive, SolveError> {
    params.validate()?;
    let mut state = SearchState::new(inst, start).map_err(SolveError::InfeasibleStart)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let cooling = (params.theta_min / params.theta_max).ln() / params.timeout_s;

    let mut archive = ParetoArchive::with_default_limits();
    let mut cur = ObjectivePair {
        penalty: state.total_penalty(),
        unfairness: unfairness_of_values(state.allocation()),
    };
    archive.insert(start.clone(), cur);

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
        let cand = ObjectivePair {
            penalty: state.total_penalty(),
            unfairness: unfairness_of_values(state.allocation()),
        };

        // Accept outright when the candidate dominates the current solution,
        // or is mutually non-dominated with it and survives the archive.
        let accept = if dominates(&cand, &cur)
            || (!dominates(&cur, &cand) && !archive.any_dominates(&cand))
        {
            true
        } else {
            // Candidate is dominated by the current solution or the archive:
            // accept with probability 1 / (1 + exp(avg domination / theta)).
            let ranges = archive.ranges();
            let (_, prange, _, urange) = ranges;
            let mut dom_sum = 0.0;
            let mut dom_count = 0u32;
            let mut add = |point: &ObjectivePair| {
                if dominates(point, &cand) {
                    let dp = (cand.penalty as f64 - point.penalty as f64) / prange;
                    let du = (cand.unfairness - point.unfairness) / urange;
                    dom_sum += dp * du;
                    dom_count += 1;
                }
            };
            add(&cur);
            for e in archive.entries() {
                add(&e.objective);
            }
            debug_assert!(dom_count > 0);
            let avg = dom_sum / dom_count.max(1) as f64;
            1.0 / (1.0 + (avg / theta).exp()) >= rng.random::<f64>()
        };

        if accept {
            cur = cand;
            if archive.would_accept(&cand) {
                archive.insert(state.to_timetable(), cand);
            }
        } else {
            state.apply(&undo);
        }
    }

    Ok(archive)
}
