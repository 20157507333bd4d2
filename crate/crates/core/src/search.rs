//! Incremental solver state: room/period occupancy plus penalty bookkeeping
//! that can apply and undo a Kempe move in time proportional to the entities
//! it touches, instead of re-evaluating the whole timetable.
//!
//! One solver run owns one `SearchState`; independent runs may hold their
//! own states concurrently.

use rand::Rng;

use crate::evaluator::{
    check_hard, HardViolation, W_MIN_WORKING_DAYS, W_ROOM_CAPACITY, W_ROOM_STABILITY,
};
use crate::instance::{Instance, Timetable};
use crate::neighborhood::{plan_kempe, NEIGHBOR_ATTEMPTS};

/// Relocation of a single lecture, in period-index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LectureMove {
    pub course: usize,
    pub from_period: usize,
    pub from_room: usize,
    pub to_period: usize,
    pub to_room: usize,
}

/// A fully room-planned Kempe move, ready to apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedMove {
    pub(crate) moves: Vec<LectureMove>,
}

impl PlannedMove {
    /// The mirrored move that restores the previous assignment.
    pub fn inverse(&self) -> PlannedMove {
        PlannedMove {
            moves: self
                .moves
                .iter()
                .map(|m| LectureMove {
                    course: m.course,
                    from_period: m.to_period,
                    from_room: m.to_room,
                    to_period: m.from_period,
                    to_room: m.from_room,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

/// Which course occupies which (period, room) cell, with reverse lookups.
#[derive(Debug, Clone)]
pub(crate) struct Occupancy {
    num_rooms: usize,
    /// period * num_rooms + room -> occupying course
    grid: Vec<Option<usize>>,
    /// period -> courses present (unordered)
    period_courses: Vec<Vec<usize>>,
    /// course * num_periods + period -> room, for feasible states where a
    /// course holds at most one lecture per period
    room_of: Vec<Option<usize>>,
    /// course -> (period index, room) per lecture
    placed: Vec<Vec<(usize, usize)>>,
    num_periods: usize,
}

impl Occupancy {
    pub(crate) fn from_timetable(inst: &Instance, t: &Timetable) -> Self {
        let num_periods = inst.num_periods();
        let num_rooms = inst.rooms().len();
        let mut occ = Occupancy {
            num_rooms,
            grid: vec![None; num_periods * num_rooms],
            period_courses: vec![Vec::new(); num_periods],
            room_of: vec![None; inst.courses().len() * num_periods],
            placed: vec![Vec::new(); inst.courses().len()],
            num_periods,
        };
        for (ci, p, r) in t.iter_lectures() {
            occ.insert(ci, inst.period_index(p), r);
        }
        occ
    }

    pub(crate) fn insert(&mut self, course: usize, period: usize, room: usize) {
        debug_assert!(self.grid[period * self.num_rooms + room].is_none());
        self.grid[period * self.num_rooms + room] = Some(course);
        self.period_courses[period].push(course);
        self.room_of[course * self.num_periods + period] = Some(room);
        self.placed[course].push((period, room));
    }

    pub(crate) fn remove(&mut self, course: usize, period: usize, room: usize) {
        debug_assert_eq!(self.grid[period * self.num_rooms + room], Some(course));
        self.grid[period * self.num_rooms + room] = None;
        let list = &mut self.period_courses[period];
        let pos = list.iter().position(|&c| c == course).unwrap();
        list.swap_remove(pos);
        self.room_of[course * self.num_periods + period] = None;
        let placed = &mut self.placed[course];
        let pos = placed
            .iter()
            .position(|&(p, r)| p == period && r == room)
            .unwrap();
        placed.swap_remove(pos);
    }

    pub(crate) fn courses_in(&self, period: usize) -> &[usize] {
        &self.period_courses[period]
    }

    pub(crate) fn room_of(&self, course: usize, period: usize) -> Option<usize> {
        self.room_of[course * self.num_periods + period]
    }

    pub(crate) fn placements(&self, course: usize) -> &[(usize, usize)] {
        &self.placed[course]
    }

    pub(crate) fn to_timetable(&self, inst: &Instance) -> Timetable {
        let placements = self
            .placed
            .iter()
            .map(|ps| {
                ps.iter()
                    .map(|&(p, r)| (inst.period_at(p), r))
                    .collect::<Vec<_>>()
            })
            .collect();
        Timetable::new(inst, placements).expect("occupancy always holds a well-formed timetable")
    }
}

/// Incremental evaluator over a feasible timetable. Maintains per-period
/// curriculum/teacher occupancy and all soft-penalty aggregates so that
/// applying a move updates only the affected courses, curricula and days.
pub struct SearchState<'i> {
    inst: &'i Instance,
    occ: Occupancy,
    /// curriculum * num_periods + period -> lectures of that curriculum there
    curr_count: Vec<u32>,
    /// course * days + day -> lectures of that course that day
    course_day: Vec<u32>,
    days_used: Vec<u32>,
    /// course * num_rooms + room -> lectures of that course in that room
    course_room: Vec<u32>,
    rooms_used: Vec<u32>,
    /// course -> total students over room capacity, raw head count
    excess: Vec<u32>,
    /// course -> S1 + S2 + S4 points
    s124: Vec<u32>,
    /// curriculum * days + day -> isolated-lecture points that day
    s3_day: Vec<u32>,
    s3: Vec<u32>,
    alloc: Vec<u32>,
    total: u32,
    /// flat lecture index -> (course, lecture slot), for uniform sampling
    lecture_index: Vec<(usize, usize)>,
}

impl<'i> SearchState<'i> {
    /// Builds the state from a timetable, rejecting infeasible input.
    pub fn new(inst: &'i Instance, t: &Timetable) -> Result<Self, Vec<HardViolation>> {
        let violations = check_hard(inst, t);
        if !violations.is_empty() {
            return Err(violations);
        }

        let num_periods = inst.num_periods();
        let num_rooms = inst.rooms().len();
        let num_courses = inst.courses().len();
        let num_curricula = inst.curricula().len();
        let days = inst.days();

        let mut state = SearchState {
            inst,
            occ: Occupancy::from_timetable(inst, t),
            curr_count: vec![0; num_curricula * num_periods],
            course_day: vec![0; num_courses * days],
            days_used: vec![0; num_courses],
            course_room: vec![0; num_courses * num_rooms],
            rooms_used: vec![0; num_courses],
            excess: vec![0; num_courses],
            s124: vec![0; num_courses],
            s3_day: vec![0; num_curricula * days],
            s3: vec![0; num_curricula],
            alloc: vec![0; num_curricula],
            total: 0,
            lecture_index: inst
                .courses()
                .iter()
                .enumerate()
                .flat_map(|(ci, c)| (0..c.lectures).map(move |slot| (ci, slot)))
                .collect(),
        };

        for (ci, p, r) in t.iter_lectures() {
            state.count_lecture(ci, inst.period_index(p), r, 1);
        }
        for ci in 0..num_courses {
            state.s124[ci] = state.course_penalty_points(ci);
            for &q in inst.curricula_of(ci) {
                state.alloc[q] += state.s124[ci];
            }
            state.total += state.s124[ci];
        }
        for q in 0..num_curricula {
            for day in 0..days {
                let pts = state.day_isolation_points(q, day);
                state.s3_day[q * days + day] = pts;
                state.s3[q] += pts;
            }
            state.alloc[q] += state.s3[q];
            state.total += state.s3[q];
        }
        Ok(state)
    }

    pub fn instance(&self) -> &'i Instance {
        self.inst
    }

    /// Per-curriculum penalty vector of the current timetable.
    pub fn allocation(&self) -> &[u32] {
        &self.alloc
    }

    pub fn total_penalty(&self) -> u32 {
        self.total
    }

    pub fn to_timetable(&self) -> Timetable {
        self.occ.to_timetable(self.inst)
    }

    /// Samples a feasible Kempe move: a uniformly drawn lecture fixes the
    /// first period, a uniformly drawn distinct period is the exchange
    /// partner. Moves that would break availability or exceed the room count
    /// are resampled, up to the shared attempt budget.
    pub fn propose(&self, rng: &mut impl Rng) -> Option<PlannedMove> {
        let num_periods = self.inst.num_periods();
        if num_periods < 2 || self.lecture_index.is_empty() {
            return None;
        }
        for _ in 0..NEIGHBOR_ATTEMPTS {
            let (course, slot) = self.lecture_index[rng.random_range(0..self.lecture_index.len())];
            let (period_a, _) = self.occ.placements(course)[slot];
            let mut period_b = rng.random_range(0..num_periods - 1);
            if period_b >= period_a {
                period_b += 1;
            }
            if let Ok(mv) = plan_kempe(self.inst, &self.occ, period_a, period_b, course) {
                return Some(mv);
            }
        }
        None
    }

    /// Applies a planned move and returns its inverse. Undo by applying the
    /// inverse: the state returns to the exact previous configuration, so
    /// all incrementally maintained values are restored too.
    pub fn apply(&mut self, mv: &PlannedMove) -> PlannedMove {
        for m in &mv.moves {
            self.occ.remove(m.course, m.from_period, m.from_room);
            self.count_lecture(m.course, m.from_period, m.from_room, -1);
        }
        for m in &mv.moves {
            self.occ.insert(m.course, m.to_period, m.to_room);
            self.count_lecture(m.course, m.to_period, m.to_room, 1);
        }

        // Refresh course-level penalties once per touched course.
        for (i, m) in mv.moves.iter().enumerate() {
            if mv.moves[..i].iter().any(|e| e.course == m.course) {
                continue;
            }
            let new = self.course_penalty_points(m.course);
            let old = self.s124[m.course];
            if new != old {
                let delta = new as i64 - old as i64;
                for &q in self.inst.curricula_of(m.course) {
                    self.alloc[q] = (self.alloc[q] as i64 + delta) as u32;
                }
                self.total = (self.total as i64 + delta) as u32;
                self.s124[m.course] = new;
            }
        }

        // Refresh compactness for every affected (curriculum, day) pair.
        let pp = self.inst.periods_per_day();
        let days = self.inst.days();
        let mut seen: Vec<(usize, usize)> = Vec::new();
        for m in &mv.moves {
            for &q in self.inst.curricula_of(m.course) {
                for day in [m.from_period / pp, m.to_period / pp] {
                    if seen.contains(&(q, day)) {
                        continue;
                    }
                    seen.push((q, day));
                    let new = self.day_isolation_points(q, day);
                    let old = self.s3_day[q * days + day];
                    if new != old {
                        let delta = new as i64 - old as i64;
                        self.s3[q] = (self.s3[q] as i64 + delta) as u32;
                        self.alloc[q] = (self.alloc[q] as i64 + delta) as u32;
                        self.total = (self.total as i64 + delta) as u32;
                        self.s3_day[q * days + day] = new;
                    }
                }
            }
        }

        mv.inverse()
    }

    fn count_lecture(&mut self, course: usize, period: usize, room: usize, sign: i32) {
        let num_periods = self.inst.num_periods();
        let num_rooms = self.inst.rooms().len();
        let days = self.inst.days();
        let day = period / self.inst.periods_per_day();

        for &q in self.inst.curricula_of(course) {
            let cell = &mut self.curr_count[q * num_periods + period];
            *cell = (*cell as i32 + sign) as u32;
        }
        let cell = &mut self.course_day[course * days + day];
        let before = *cell;
        *cell = (before as i32 + sign) as u32;
        if before == 0 && sign > 0 {
            self.days_used[course] += 1;
        } else if *cell == 0 && sign < 0 {
            self.days_used[course] -= 1;
        }
        let cell = &mut self.course_room[course * num_rooms + room];
        let before = *cell;
        *cell = (before as i32 + sign) as u32;
        if before == 0 && sign > 0 {
            self.rooms_used[course] += 1;
        } else if *cell == 0 && sign < 0 {
            self.rooms_used[course] -= 1;
        }
        let over = self.inst.courses()[course]
            .students
            .saturating_sub(self.inst.rooms()[room].capacity) as u32;
        self.excess[course] = (self.excess[course] as i64 + sign as i64 * over as i64) as u32;
    }

    fn course_penalty_points(&self, course: usize) -> u32 {
        let c = &self.inst.courses()[course];
        self.excess[course] * W_ROOM_CAPACITY
            + (c.min_working_days as u32).saturating_sub(self.days_used[course])
                * W_MIN_WORKING_DAYS
            + self.rooms_used[course].saturating_sub(1) * W_ROOM_STABILITY
    }

    fn day_isolation_points(&self, curriculum: usize, day: usize) -> u32 {
        let pp = self.inst.periods_per_day();
        let num_periods = self.inst.num_periods();
        let base = curriculum * num_periods + day * pp;
        let mut pts = 0;
        for slot in 0..pp {
            let here = self.curr_count[base + slot];
            if here == 0 {
                continue;
            }
            let before = slot > 0 && self.curr_count[base + slot - 1] > 0;
            let after = slot + 1 < pp && self.curr_count[base + slot + 1] > 0;
            if !before && !after {
                pts += here * crate::evaluator::W_ISOLATED_LECTURE;
            }
        }
        pts
    }
}
