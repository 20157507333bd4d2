//! Fairness-aware curriculum-based course timetabling.
//!
//! This crate parses ITC2007 track-3 instances, evaluates the standard hard
//! and soft constraints with per-curriculum penalty attribution, and solves
//! two fairness-oriented problem variants on top of the same Kempe-chain
//! neighborhood:
//!
//! * a max-min-fair simulated annealer that lexicographically improves the
//!   sorted per-curriculum penalty vector, with three interchangeable
//!   energy-difference measures, and
//! * an archive-based bi-objective annealer trading total penalty against
//!   the unfairness `1 - J(A')` of the shifted allocation under Jain's
//!   index.
//!
//! A batch harness runs seeded experiment campaigns and compares them with
//! a one-sided Wilcoxon rank-sum test.

pub mod batch;
pub mod evaluator;
pub mod fairness;
pub mod instance;
pub mod io;
pub mod jfi;
pub mod mmf;
pub mod neighborhood;
pub mod report;
mod search;
pub mod stats;

pub use batch::{
    batch_csv, read_batch_column, run_batch, run_batch_with_clock, BatchError, BatchMode,
    BatchResult, RunRecord,
};
pub use evaluator::{
    check_hard, course_soft_penalties, curriculum_compactness_penalty, curriculum_penalty,
    penalty_allocation, shifted_allocation, total_penalty, EvalError, HardKind, HardViolation,
    PenaltyAllocation, PenaltyBreakdown,
};
pub use fairness::{
    delta_e_cw, delta_e_lex, delta_e_ps, energy_difference, jain_index, mm_compare, EnergyKind,
    FairnessError, MMOrder,
};
pub use instance::{Course, Curriculum, Instance, InstanceError, Period, Room, Timetable};
pub use io::{parse_instance, parse_solution, serialize_instance, serialize_solution, ParseError,
    SolutionError};
pub use jfi::{
    dominates, objective, solve_jfi, solve_jfi_with_clock, ArchiveEntry, ObjectivePair,
    ParetoArchive,
};
pub use mmf::{
    acceptance_probability, solve_mmf, solve_mmf_with_clock, temperature_at, Clock, RunTrace,
    SAParams, SolveError, TickClock, TraceRecord, WallClock,
};
pub use neighborhood::{
    apply_move, build_initial, kempe_chain, random_neighbor, KempeMove, NeighborhoodError,
};
pub use report::{
    archive_index_csv, below_tradeoff_line, format_allocation, parse_allocation, pareto_report,
    pareto_report_points, read_archive_points, trace_csv, ReportError,
};
pub use search::{PlannedMove, SearchState};
pub use stats::{wilcoxon_one_sided, Direction, RankSumReport, StatsError};
