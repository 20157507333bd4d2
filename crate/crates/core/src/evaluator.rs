//! Hard-constraint checking and soft-penalty evaluation.
//!
//! Hard constraints: every lecture scheduled with no two lectures of one
//! course in the same period (H1), no two lectures on the same room-period
//! resource (H2), no two courses sharing a curriculum or teacher in the same
//! period (H3), and no lecture in a period marked unavailable for its course
//! (H4).
//!
//! Soft constraints use the standard track-3 weights: 1 point per student
//! over room capacity (S1), 5 points per missing working day (S2), 2 points
//! per isolated curriculum lecture (S3), 1 point per extra room a course
//! uses (S4). The per-curriculum objective charges a course's S1/S2/S4 in
//! full to every curriculum containing it and S3 to the curriculum itself.

use thiserror::Error;

use crate::instance::{Instance, Period, Timetable};

pub const W_ROOM_CAPACITY: u32 = 1;
pub const W_MIN_WORKING_DAYS: u32 = 5;
pub const W_ISOLATED_LECTURE: u32 = 2;
pub const W_ROOM_STABILITY: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HardKind {
    H1,
    H2,
    H3,
    H4,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConflictReason {
    SharedCurriculum(String),
    SharedTeacher(String),
}

/// One diagnosed hard-constraint violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HardViolation {
    /// Two lectures of the same course share a period.
    CourseClash { course: String, period: Period },
    /// Two lectures share a (period, room) resource.
    RoomClash {
        room: String,
        period: Period,
        courses: (String, String),
    },
    /// Two conflicting courses share a period.
    ConflictClash {
        courses: (String, String),
        period: Period,
        reason: ConflictReason,
    },
    /// A lecture sits in a period that is unavailable for its course.
    Unavailable { course: String, period: Period },
}

impl HardViolation {
    pub fn kind(&self) -> HardKind {
        match self {
            HardViolation::CourseClash { .. } => HardKind::H1,
            HardViolation::RoomClash { .. } => HardKind::H2,
            HardViolation::ConflictClash { .. } => HardKind::H3,
            HardViolation::Unavailable { .. } => HardKind::H4,
        }
    }
}

impl std::fmt::Display for HardViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HardViolation::CourseClash { course, period } => {
                write!(f, "H1: course '{course}' has two lectures in {period}")
            }
            HardViolation::RoomClash {
                room,
                period,
                courses,
            } => write!(
                f,
                "H2: room '{room}' hosts '{}' and '{}' in {period}",
                courses.0, courses.1
            ),
            HardViolation::ConflictClash {
                courses,
                period,
                reason,
            } => {
                let why = match reason {
                    ConflictReason::SharedCurriculum(q) => format!("curriculum '{q}'"),
                    ConflictReason::SharedTeacher(t) => format!("teacher '{t}'"),
                };
                write!(
                    f,
                    "H3: courses '{}' and '{}' share {why} in {period}",
                    courses.0, courses.1
                )
            }
            HardViolation::Unavailable { course, period } => {
                write!(f, "H4: course '{course}' is unavailable in {period}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unknown course '{0}'")]
    UnknownCourse(String),
    #[error("unknown curriculum '{0}'")]
    UnknownCurriculum(String),
    #[error("timetable is infeasible ({} hard violations)", .0.len())]
    Infeasible(Vec<HardViolation>),
}

/// Soft-penalty points of a single course (or, for [`PenaltyBreakdown::total`],
/// any aggregate of the four categories).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PenaltyBreakdown {
    pub room_capacity: u32,
    pub min_working_days: u32,
    pub isolated_lectures: u32,
    pub room_stability: u32,
}

impl PenaltyBreakdown {
    pub fn total(&self) -> u32 {
        self.room_capacity + self.min_working_days + self.isolated_lectures + self.room_stability
    }
}

/// Per-curriculum penalty vector in instance curriculum order. Entries are
/// raw nonnegative penalty points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PenaltyAllocation(pub Vec<u32>);

impl PenaltyAllocation {
    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries sorted in nonincreasing order.
    pub fn sorted_desc(&self) -> Vec<u32> {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

impl std::ops::Deref for PenaltyAllocation {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

/// Shifts every entry to `max - entry`, so penalty-free stakeholders score
/// highest. Used as the input of the fairness index.
pub fn shifted_allocation(a: &PenaltyAllocation) -> Vec<u32> {
    let max = a.iter().copied().max().unwrap_or(0);
    a.iter().map(|&v| max - v).collect()
}

/// Diagnoses all hard-constraint violations. An empty result means the
/// timetable is feasible.
pub fn check_hard(inst: &Instance, t: &Timetable) -> Vec<HardViolation> {
    let mut out = Vec::new();
    let num_periods = inst.num_periods();

    // H1: same course twice in one period.
    for (ci, course) in inst.courses().iter().enumerate() {
        let mut count = vec![0u32; num_periods];
        for &(p, _) in t.placements(ci) {
            count[inst.period_index(p)] += 1;
        }
        for (pi, &n) in count.iter().enumerate() {
            for _ in 1..n.max(1) {
                out.push(HardViolation::CourseClash {
                    course: course.id.clone(),
                    period: inst.period_at(pi),
                });
            }
        }
    }

    // H2: room double booking.
    let num_rooms = inst.rooms().len();
    let mut cell: Vec<Vec<usize>> = vec![Vec::new(); num_periods * num_rooms];
    for (ci, p, r) in t.iter_lectures() {
        cell[inst.period_index(p) * num_rooms + r].push(ci);
    }
    for (slot, courses) in cell.iter().enumerate() {
        for i in 0..courses.len() {
            for j in (i + 1)..courses.len() {
                let pi = slot / num_rooms;
                out.push(HardViolation::RoomClash {
                    room: inst.rooms()[slot % num_rooms].id.clone(),
                    period: inst.period_at(pi),
                    courses: (
                        inst.courses()[courses[i]].id.clone(),
                        inst.courses()[courses[j]].id.clone(),
                    ),
                });
            }
        }
    }

    // H3: conflicting courses in one period (each distinct pair once).
    let mut by_period: Vec<Vec<usize>> = vec![Vec::new(); num_periods];
    for (ci, p, _) in t.iter_lectures() {
        let list = &mut by_period[inst.period_index(p)];
        if !list.contains(&ci) {
            list.push(ci);
        }
    }
    for (pi, courses) in by_period.iter().enumerate() {
        for i in 0..courses.len() {
            for j in (i + 1)..courses.len() {
                let (a, b) = (courses[i], courses[j]);
                let shared_curriculum = inst
                    .curricula_of(a)
                    .iter()
                    .find(|q| inst.curricula_of(b).contains(q));
                let reason = if let Some(&q) = shared_curriculum {
                    ConflictReason::SharedCurriculum(inst.curricula()[q].id.clone())
                } else if inst.teacher_of(a) == inst.teacher_of(b) {
                    ConflictReason::SharedTeacher(inst.courses()[a].teacher.clone())
                } else {
                    continue;
                };
                out.push(HardViolation::ConflictClash {
                    courses: (
                        inst.courses()[a].id.clone(),
                        inst.courses()[b].id.clone(),
                    ),
                    period: inst.period_at(pi),
                    reason,
                });
            }
        }
    }

    // H4: unavailable periods.
    for (ci, p, _) in t.iter_lectures() {
        if inst.is_unavailable(ci, p) {
            out.push(HardViolation::Unavailable {
                course: inst.courses()[ci].id.clone(),
                period: p,
            });
        }
    }

    out
}

pub(crate) fn course_soft_by_idx(inst: &Instance, t: &Timetable, ci: usize) -> PenaltyBreakdown {
    let course = &inst.courses()[ci];
    let mut excess = 0u32;
    let mut days = vec![false; inst.days()];
    let mut rooms = vec![false; inst.rooms().len()];
    for &(p, r) in t.placements(ci) {
        excess += inst.courses()[ci]
            .students
            .saturating_sub(inst.rooms()[r].capacity) as u32;
        days[p.day] = true;
        rooms[r] = true;
    }
    let days_used = days.iter().filter(|&&d| d).count();
    let rooms_used = rooms.iter().filter(|&&r| r).count();
    PenaltyBreakdown {
        room_capacity: excess * W_ROOM_CAPACITY,
        min_working_days: course.min_working_days.saturating_sub(days_used) as u32
            * W_MIN_WORKING_DAYS,
        isolated_lectures: 0,
        room_stability: rooms_used.saturating_sub(1) as u32 * W_ROOM_STABILITY,
    }
}

/// Room-capacity, min-working-days and room-stability penalties of one
/// course. The isolated-lectures field is always zero here; compactness is a
/// curriculum-level penalty.
pub fn course_soft_penalties(
    inst: &Instance,
    t: &Timetable,
    course_id: &str,
) -> Result<PenaltyBreakdown, EvalError> {
    let ci = inst
        .course_idx(course_id)
        .ok_or_else(|| EvalError::UnknownCourse(course_id.to_string()))?;
    Ok(course_soft_by_idx(inst, t, ci))
}

pub(crate) fn compactness_by_idx(inst: &Instance, t: &Timetable, qi: usize) -> u32 {
    let mut count = vec![0u32; inst.num_periods()];
    for &ci in inst.curriculum_courses(qi) {
        for &(p, _) in t.placements(ci) {
            count[inst.period_index(p)] += 1;
        }
    }
    isolated_points(&count, inst.days(), inst.periods_per_day())
}

/// Isolated-lecture points for one curriculum given its per-period lecture
/// counts. A lecture is isolated when no lecture of the same curriculum
/// occupies an adjacent timeslot of the same day; day boundaries are never
/// adjacent.
pub(crate) fn isolated_points(count: &[u32], days: usize, periods_per_day: usize) -> u32 {
    let mut points = 0u32;
    for day in 0..days {
        let base = day * periods_per_day;
        for slot in 0..periods_per_day {
            let here = count[base + slot];
            if here == 0 {
                continue;
            }
            let before = slot > 0 && count[base + slot - 1] > 0;
            let after = slot + 1 < periods_per_day && count[base + slot + 1] > 0;
            if !before && !after {
                points += here * W_ISOLATED_LECTURE;
            }
        }
    }
    points
}

/// Isolated-lecture penalty of one curriculum.
pub fn curriculum_compactness_penalty(
    inst: &Instance,
    t: &Timetable,
    curriculum_id: &str,
) -> Result<u32, EvalError> {
    let qi = inst
        .curriculum_idx(curriculum_id)
        .ok_or_else(|| EvalError::UnknownCurriculum(curriculum_id.to_string()))?;
    Ok(compactness_by_idx(inst, t, qi))
}

/// The overall objective: every course's S1+S2+S4 counted once plus every
/// curriculum's S3. Errors if the timetable violates a hard constraint.
pub fn total_penalty(inst: &Instance, t: &Timetable) -> Result<u32, EvalError> {
    let violations = check_hard(inst, t);
    if !violations.is_empty() {
        return Err(EvalError::Infeasible(violations));
    }
    let course_part: u32 = (0..inst.courses().len())
        .map(|ci| course_soft_by_idx(inst, t, ci).total())
        .sum();
    let compact_part: u32 = (0..inst.curricula().len())
        .map(|qi| compactness_by_idx(inst, t, qi))
        .sum();
    Ok(course_part + compact_part)
}

pub(crate) fn curriculum_penalty_by_idx(inst: &Instance, t: &Timetable, qi: usize) -> u32 {
    let course_part: u32 = inst
        .curriculum_courses(qi)
        .iter()
        .map(|&ci| course_soft_by_idx(inst, t, ci).total())
        .sum();
    course_part + compactness_by_idx(inst, t, qi)
}

/// The objective restricted to one curriculum: S1/S2/S4 of its courses plus
/// its own S3. A course belonging to several curricula is charged in full to
/// each of them.
pub fn curriculum_penalty(
    inst: &Instance,
    t: &Timetable,
    curriculum_id: &str,
) -> Result<u32, EvalError> {
    let qi = inst
        .curriculum_idx(curriculum_id)
        .ok_or_else(|| EvalError::UnknownCurriculum(curriculum_id.to_string()))?;
    Ok(curriculum_penalty_by_idx(inst, t, qi))
}

/// The per-curriculum penalty vector in instance order. Errors if the
/// timetable is infeasible.
pub fn penalty_allocation(inst: &Instance, t: &Timetable) -> Result<PenaltyAllocation, EvalError> {
    let violations = check_hard(inst, t);
    if !violations.is_empty() {
        return Err(EvalError::Infeasible(violations));
    }
    Ok(PenaltyAllocation(
        (0..inst.curricula().len())
            .map(|qi| curriculum_penalty_by_idx(inst, t, qi))
            .collect(),
    ))
}
