//! Allocation-vector mathematics: the max-min order on penalty vectors,
//! Jain's fairness index, and the three energy-difference measures that let
//! simulated annealing quantify how much worse one allocation is than
//! another.
//!
//! All functions work on raw nonnegative penalty vectors; smaller is better.
//! Sorting is by value only, so none of the measures discriminates between
//! stakeholders, only between the amounts assigned to them.

use thiserror::Error;

/// Result of comparing allocation `x` against allocation `y` under the
/// max-min order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MMOrder {
    /// `x` is strictly preferred over `y`.
    Better,
    /// The sorted vectors are identical.
    Equal,
    /// `y` is strictly preferred over `x`.
    Worse,
}

/// Which energy-difference measure drives the annealer's acceptance
/// probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyKind {
    /// Position of the first differing entry of the sorted vectors.
    Lex,
    /// Largest component-wise ratio of the offset sorted vectors.
    #[default]
    Cw,
    /// Largest ratio of offset partial sums of the sorted vectors.
    Ps,
}

impl std::fmt::Display for EnergyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnergyKind::Lex => "lex",
            EnergyKind::Cw => "cw",
            EnergyKind::Ps => "ps",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FairnessError {
    #[error("allocation vectors have different lengths ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("fairness index is undefined for an all-zero vector")]
    AllZero,
    #[error("energy difference requires the candidate to be strictly worse")]
    NotWorse,
}

/// Entries in nonincreasing order.
pub fn sorted_desc(v: &[u32]) -> Vec<u32> {
    let mut out = v.to_vec();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Max-min comparison of two same-length penalty vectors: both are sorted in
/// nonincreasing order and compared lexicographically. `Better` means `x` is
/// strictly preferred (its worst-off entries are smaller).
pub fn mm_compare(x: &[u32], y: &[u32]) -> Result<MMOrder, FairnessError> {
    if x.len() != y.len() {
        return Err(FairnessError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    Ok(mm_compare_sorted(&sorted_desc(x), &sorted_desc(y)))
}

/// As [`mm_compare`], on vectors already sorted in nonincreasing order.
pub fn mm_compare_sorted(x: &[u32], y: &[u32]) -> MMOrder {
    debug_assert_eq!(x.len(), y.len());
    for (a, b) in x.iter().zip(y) {
        if a < b {
            return MMOrder::Better;
        }
        if a > b {
            return MMOrder::Worse;
        }
    }
    MMOrder::Equal
}

/// Jain's fairness index `(sum v)^2 / (n * sum v^2)`, in `[1/n, 1]` for any
/// nonzero nonnegative vector. `1` means a perfectly even allocation, `1/n`
/// means everything sits on a single stakeholder. Undefined (error) when all
/// entries are zero.
pub fn jain_index(v: &[f64]) -> Result<f64, FairnessError> {
    let sum: f64 = v.iter().sum();
    let sum_sq: f64 = v.iter().map(|x| x * x).sum();
    if sum_sq == 0.0 {
        return Err(FairnessError::AllZero);
    }
    Ok(sum * sum / (v.len() as f64 * sum_sq))
}

fn require_worse(x: &[u32], y: &[u32]) -> Result<(Vec<u32>, Vec<u32>), FairnessError> {
    if x.len() != y.len() {
        return Err(FairnessError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let xs = sorted_desc(x);
    let ys = sorted_desc(y);
    if mm_compare_sorted(&xs, &ys) != MMOrder::Better {
        return Err(FairnessError::NotWorse);
    }
    Ok((xs, ys))
}

/// Lexicographic energy difference: with both vectors sorted nonincreasing
/// and `i*` the first (1-based) index where the worse vector `y` exceeds
/// `x`, the difference is `1 - (i* - 1)/n`. Differences at the most
/// significant positions score 1; a difference only at the last position
/// scores `1/n`.
///
/// Requires `mm_compare(x, y) == Better`.
pub fn delta_e_lex(x: &[u32], y: &[u32]) -> Result<f64, FairnessError> {
    let (xs, ys) = require_worse(x, y)?;
    Ok(delta_e_lex_sorted(&xs, &ys))
}

pub(crate) fn delta_e_lex_sorted(xs: &[u32], ys: &[u32]) -> f64 {
    let n = xs.len();
    let first = xs
        .iter()
        .zip(ys)
        .position(|(a, b)| b > a)
        .expect("precondition: y is strictly worse than x");
    1.0 - first as f64 / n as f64
}

/// Component-wise energy difference: with `m` the smallest entry of either
/// vector and both vectors sorted nondecreasing, the difference is
/// `max_i (delta - m + y_i) / (delta - m + x_i) - 1`. The offset `delta > 0`
/// guards the ratios against division by zero; small offsets make unfair
/// candidates expensive.
///
/// Requires `mm_compare(x, y) == Better`.
pub fn delta_e_cw(x: &[u32], y: &[u32], delta: f64) -> Result<f64, FairnessError> {
    let (xs, ys) = require_worse(x, y)?;
    Ok(delta_e_cw_sorted(&xs, &ys, delta))
}

pub(crate) fn delta_e_cw_sorted(xs: &[u32], ys: &[u32], delta: f64) -> f64 {
    debug_assert!(delta > 0.0);
    let m = min_entry(xs, ys);
    let mut max_ratio = f64::NEG_INFINITY;
    // Ascending order is the reverse of the stored nonincreasing order.
    for (a, b) in xs.iter().rev().zip(ys.iter().rev()) {
        let ratio = (delta - m + *b as f64) / (delta - m + *a as f64);
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    max_ratio - 1.0
}

/// Partial-sum energy difference: with `m` as in [`delta_e_cw`], both
/// vectors sorted nonincreasing and prefix sums taken over them, the
/// difference is `max_i (i*(delta - m) + sum_i y) / (i*(delta - m) + sum_i x) - 1`.
/// Summing from the most penalized entries down gives the worst-off
/// stakeholders the most influence.
///
/// Requires `mm_compare(x, y) == Better`.
pub fn delta_e_ps(x: &[u32], y: &[u32], delta: f64) -> Result<f64, FairnessError> {
    let (xs, ys) = require_worse(x, y)?;
    Ok(delta_e_ps_sorted(&xs, &ys, delta))
}

pub(crate) fn delta_e_ps_sorted(xs: &[u32], ys: &[u32], delta: f64) -> f64 {
    debug_assert!(delta > 0.0);
    let m = min_entry(xs, ys);
    let mut px = 0.0;
    let mut py = 0.0;
    let mut max_ratio = f64::NEG_INFINITY;
    for (i, (a, b)) in xs.iter().zip(ys).enumerate() {
        px += *a as f64;
        py += *b as f64;
        let offset = (i + 1) as f64 * (delta - m);
        let ratio = (offset + py) / (offset + px);
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    max_ratio - 1.0
}

fn min_entry(xs: &[u32], ys: &[u32]) -> f64 {
    // Inputs are sorted nonincreasing, so the minima sit at the ends.
    let mx = xs.last().copied().unwrap_or(0);
    let my = ys.last().copied().unwrap_or(0);
    mx.min(my) as f64
}

/// Dispatches to the configured energy-difference measure.
pub fn energy_difference(
    kind: EnergyKind,
    x: &[u32],
    y: &[u32],
    delta: f64,
) -> Result<f64, FairnessError> {
    match kind {
        EnergyKind::Lex => delta_e_lex(x, y),
        EnergyKind::Cw => delta_e_cw(x, y, delta),
        EnergyKind::Ps => delta_e_ps(x, y, delta),
    }
}

pub(crate) fn energy_difference_sorted(
    kind: EnergyKind,
    xs: &[u32],
    ys: &[u32],
    delta: f64,
) -> f64 {
    match kind {
        EnergyKind::Lex => delta_e_lex_sorted(xs, ys),
        EnergyKind::Cw => delta_e_cw_sorted(xs, ys, delta),
        EnergyKind::Ps => delta_e_ps_sorted(xs, ys, delta),
    }
}
