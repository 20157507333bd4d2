//! `fairtt`: validate, evaluate and solve curriculum-based course
//! timetabling instances with fairness-aware annealers, run seeded batch
//! experiments, and compare batches statistically.
//!
//! Exit codes: 0 success, 1 infeasible input or validation failure, 2 usage
//! error, 3 runtime error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairtt_core::{
    archive_index_csv, batch_csv, build_initial, check_hard, jain_index, objective,
    parse_instance, parse_solution, pareto_report_points, penalty_allocation, read_archive_points,
    read_batch_column, run_batch, serialize_solution, shifted_allocation, solve_jfi, solve_mmf,
    trace_csv, wilcoxon_one_sided, BatchMode, Direction, EnergyKind, FairnessError, Instance,
    ObjectivePair, SAParams, Timetable,
};

/// Significance level for batch comparisons.
const ALPHA: f64 = 0.01;

#[derive(Parser)]
#[command(
    name = "fairtt",
    version,
    about = "Fairness-aware curriculum-based course timetabling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnergyArg {
    Lex,
    Cw,
    Ps,
}

impl From<EnergyArg> for EnergyKind {
    fn from(e: EnergyArg) -> Self {
        match e {
            EnergyArg::Lex => EnergyKind::Lex,
            EnergyArg::Cw => EnergyKind::Cw,
            EnergyArg::Ps => EnergyKind::Ps,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Mmf,
    Jfi,
}

#[derive(Args, Clone)]
struct SaArgs {
    /// Initial temperature (defaults: 5 for max-min runs, 20 for tradeoff runs)
    #[arg(long)]
    theta_max: Option<f64>,
    /// Final temperature
    #[arg(long, default_value_t = 0.01)]
    theta_min: f64,
    /// Wall-clock budget per run, in seconds
    #[arg(long, default_value_t = 192.0)]
    timeout_s: f64,
    /// Offset guarding the energy-difference ratios
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    /// Energy-difference measure
    #[arg(long, value_enum, default_value_t = EnergyArg::Cw)]
    energy: EnergyArg,
    /// Base random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SaArgs {
    fn to_params(&self, default_theta_max: f64) -> SAParams {
        SAParams {
            theta_max: self.theta_max.unwrap_or(default_theta_max),
            theta_min: self.theta_min,
            timeout_s: self.timeout_s,
            delta: self.delta,
            energy: self.energy.into(),
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance (and optionally a solution) and report problems
    Validate {
        instance: PathBuf,
        solution: Option<PathBuf>,
    },
    /// Print total penalty, per-curriculum allocation and fairness index
    Evaluate { instance: PathBuf, solution: PathBuf },
    /// Anneal towards a max-min-fair penalty distribution
    SolveMmf {
        instance: PathBuf,
        /// Warm-start solution file (otherwise a greedy construction)
        #[arg(long)]
        init: Option<PathBuf>,
        #[command(flatten)]
        sa: SaArgs,
        /// Write the best solution here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the best-so-far trace as CSV
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Anneal the penalty/fairness tradeoff and export the archive
    SolveJfi {
        instance: PathBuf,
        /// Warm-start solution file, typically a known-best timetable
        #[arg(long)]
        init: Option<PathBuf>,
        #[command(flatten)]
        sa: SaArgs,
        /// Directory for solution files, archive.csv and pareto.csv
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run repeated independent solves with consecutive seeds
    Batch {
        instance: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 50)]
        runs: usize,
        #[command(flatten)]
        sa: SaArgs,
        /// Worker threads (also honors FAIRTT_JOBS)
        #[arg(long, env = "FAIRTT_JOBS", default_value_t = 1)]
        jobs: usize,
        /// Write the batch table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-sided Wilcoxon rank-sum test between two batch tables
    Compare {
        batch_a: PathBuf,
        batch_b: PathBuf,
        /// Column to compare: worst, total_penalty or wall_s
        #[arg(long, default_value = "worst")]
        column: String,
    },
    /// Rebuild a tradeoff report from an exported archive index
    Pareto {
        archive: PathBuf,
        /// Anchor point as `jain,penalty` (default: the lowest-penalty row)
        #[arg(long)]
        seed_point: Option<String>,
    },
}

enum CliError {
    /// Parse errors, infeasible timetables, failed validation.
    Validation(String),
    /// Bad flag combinations not caught by the parser.
    Usage(String),
    /// IO and solver failures.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read_file(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn load_solution(path: &Path, inst: &Instance) -> Result<Timetable, CliError> {
    parse_solution(&read_file(path)?, inst)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn require_feasible(inst: &Instance, t: &Timetable, what: &str) -> Result<(), CliError> {
    let violations = check_hard(inst, t);
    if violations.is_empty() {
        return Ok(());
    }
    let mut msg = format!("{what} violates {} hard constraint(s):", violations.len());
    for v in &violations {
        let _ = write!(msg, "\n  {v}");
    }
    Err(CliError::Validation(msg))
}

fn initial_timetable(
    inst: &Instance,
    init: &Option<PathBuf>,
    seed: u64,
) -> Result<Timetable, CliError> {
    match init {
        Some(path) => {
            let t = load_solution(path, inst)?;
            require_feasible(inst, &t, "warm-start solution")?;
            Ok(t)
        }
        None => build_initial(inst, seed)
            .map_err(|e| CliError::Runtime(format!("initial construction failed: {e}"))),
    }
}

fn jain_text(inst: &Instance, t: &Timetable) -> Result<String, CliError> {
    let alloc = penalty_allocation(inst, t)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let shifted: Vec<f64> = shifted_allocation(&alloc).iter().map(|&v| v as f64).collect();
    Ok(match jain_index(&shifted) {
        Ok(j) => format!("{j:.4}"),
        Err(FairnessError::AllZero) => "-".to_string(),
        Err(e) => return Err(CliError::Runtime(e.to_string())),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { instance, solution } => {
            let inst = load_instance(&instance)?;
            println!(
                "instance: {} ({} courses, {} rooms, {} curricula, {} days x {} slots)",
                inst.name(),
                inst.courses().len(),
                inst.rooms().len(),
                inst.curricula().len(),
                inst.days(),
                inst.periods_per_day()
            );
            if let Some(sol_path) = solution {
                let t = load_solution(&sol_path, &inst)?;
                require_feasible(&inst, &t, "solution")?;
                println!("solution: feasible");
            }
            println!("ok");
            Ok(())
        }

        Command::Evaluate { instance, solution } => {
            let inst = load_instance(&instance)?;
            let t = load_solution(&solution, &inst)?;
            require_feasible(&inst, &t, "solution")?;
            let alloc = penalty_allocation(&inst, &t)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            println!("instance: {}", inst.name());
            println!("curricula: {}", alloc.len());
            println!(
                "total_penalty: {}",
                fairtt_core::total_penalty(&inst, &t)
                    .map_err(|e| CliError::Validation(e.to_string()))?
            );
            println!("allocation: {}", fairtt_core::format_allocation(&alloc));
            println!("jain_shifted: {}", jain_text(&inst, &t)?);
            Ok(())
        }

        Command::SolveMmf {
            instance,
            init,
            sa,
            out,
            trace,
        } => {
            let inst = load_instance(&instance)?;
            let params = sa.to_params(5.0);
            let start = initial_timetable(&inst, &init, params.seed)?;
            let (best, run_trace) = solve_mmf(&inst, &start, &params)
                .map_err(|e| CliError::Runtime(e.to_string()))?;

            let alloc = penalty_allocation(&inst, &best).expect("solver output is feasible");
            eprintln!("instance: {}", inst.name());
            eprintln!("energy: {}", params.energy);
            eprintln!("best_allocation: {}", fairtt_core::format_allocation(&alloc));
            eprintln!(
                "total_penalty: {}",
                fairtt_core::total_penalty(&inst, &best).unwrap()
            );
            eprintln!("jain_shifted: {}", jain_text(&inst, &best)?);

            let solution_text = serialize_solution(&best, &inst);
            match out {
                Some(path) => write_file(&path, &solution_text)?,
                None => print!("{solution_text}"),
            }
            if let Some(path) = trace {
                write_file(&path, &trace_csv(&run_trace))?;
            }
            Ok(())
        }

        Command::SolveJfi {
            instance,
            init,
            sa,
            out_dir,
        } => {
            let inst = load_instance(&instance)?;
            let params = sa.to_params(20.0);
            let start = initial_timetable(&inst, &init, params.seed)?;
            let seed_obj = objective(&inst, &start)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let archive = solve_jfi(&inst, &start, &params)
                .map_err(|e| CliError::Runtime(e.to_string()))?;

            std::fs::create_dir_all(&out_dir).map_err(|e| {
                CliError::Runtime(format!("cannot create {}: {e}", out_dir.display()))
            })?;
            let mut rows: Vec<(f64, u32, String)> = Vec::new();
            let mut entries: Vec<_> = archive.entries().to_vec();
            entries.sort_by_key(|e| e.objective.penalty);
            for (i, entry) in entries.iter().enumerate() {
                let file = format!("solution_{i:03}.sol");
                write_file(
                    &out_dir.join(&file),
                    &serialize_solution(&entry.timetable, &inst),
                )?;
                rows.push((entry.objective.jain(), entry.objective.penalty, file));
            }
            write_file(&out_dir.join("archive.csv"), &archive_index_csv(&rows))?;
            let points: Vec<ObjectivePair> = archive.objectives().collect();
            write_file(
                &out_dir.join("pareto.csv"),
                &pareto_report_points(&points, seed_obj),
            )?;

            println!("instance: {}", inst.name());
            println!(
                "seed_point: jain {:.6}, penalty {}",
                seed_obj.jain(),
                seed_obj.penalty
            );
            println!("archive_size: {}", archive.len());
            println!("out_dir: {}", out_dir.display());
            Ok(())
        }

        Command::Batch {
            instance,
            mode,
            runs,
            sa,
            jobs,
            out,
        } => {
            if runs == 0 {
                return Err(CliError::Usage("--runs must be at least 1".to_string()));
            }
            let inst = load_instance(&instance)?;
            let (params, mode) = match mode {
                ModeArg::Mmf => (sa.to_params(5.0), BatchMode::Mmf),
                ModeArg::Jfi => (sa.to_params(20.0), BatchMode::Jfi),
            };
            let result = run_batch(&inst, &params, runs, mode, jobs)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            for (seed, msg) in &result.failures {
                eprintln!("run with seed {seed} failed: {msg}");
            }
            let csv = batch_csv(&result);
            match out {
                Some(path) => {
                    write_file(&path, &csv)?;
                    println!(
                        "{} runs of {} on {} -> {}",
                        result.records.len(),
                        result.mode,
                        result.instance,
                        path.display()
                    );
                }
                None => print!("{csv}"),
            }
            Ok(())
        }

        Command::Compare {
            batch_a,
            batch_b,
            column,
        } => {
            let a = read_batch_column(&read_file(&batch_a)?, &column)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let b = read_batch_column(&read_file(&batch_b)?, &column)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let report = wilcoxon_one_sided(&a, &b)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            println!("column: {column}");
            println!("rank_sum_a: {}", report.statistic);
            println!("p_value: {:.6}", report.p_value);
            println!(
                "direction: {}",
                match report.direction {
                    Direction::ABetter => "A_better",
                    Direction::BBetter => "B_better",
                }
            );
            println!(
                "significant_at_{ALPHA}: {}",
                report.p_value < ALPHA && report.direction == Direction::ABetter
            );
            Ok(())
        }

        Command::Pareto { archive, seed_point } => {
            let text = read_file(&archive)?;
            let points =
                read_archive_points(&text).map_err(|e| CliError::Validation(e.to_string()))?;
            if points.is_empty() {
                return Err(CliError::Validation("archive holds no rows".to_string()));
            }
            let seed = match seed_point {
                Some(text) => {
                    let (jain, penalty) = text.split_once(',').ok_or_else(|| {
                        CliError::Usage("--seed-point expects `jain,penalty`".to_string())
                    })?;
                    ObjectivePair {
                        penalty: penalty.trim().parse().map_err(|_| {
                            CliError::Usage("--seed-point penalty must be an integer".to_string())
                        })?,
                        unfairness: 1.0
                            - jain.trim().parse::<f64>().map_err(|_| {
                                CliError::Usage("--seed-point jain must be a number".to_string())
                            })?,
                    }
                }
                None => *points
                    .iter()
                    .min_by(|a, b| {
                        a.penalty
                            .cmp(&b.penalty)
                            .then(a.unfairness.partial_cmp(&b.unfairness).unwrap())
                    })
                    .unwrap(),
            };
            print!("{}", pareto_report_points(&points, seed));
            Ok(())
        }
    }
}
