//! Shared test support: fixture loading, exhaustive enumeration of feasible
//! timetables, and brute-force re-implementations of the scoring and
//! fairness formulas. Everything here is written from the definitions,
//! independent of the library's evaluation paths, so tests can compare two
//! routes.

#![allow(dead_code)]

use fairtt_core::{parse_instance, Instance, Period, Timetable};

pub fn toy_mmf() -> Instance {
    parse_instance(include_str!("../fixtures/toy_mmf.ctt")).unwrap()
}

pub fn toy_jfi() -> Instance {
    parse_instance(include_str!("../fixtures/toy_jfi.ctt")).unwrap()
}

// ---------------------------------------------------------------------------
// Brute-force scoring from the constraint definitions.

/// S1 + S2 + S4 of one course, recounted definitionally.
pub fn brute_course_points(inst: &Instance, t: &Timetable, ci: usize) -> u32 {
    let course = &inst.courses()[ci];
    let mut points = 0u32;
    for &(_, r) in t.placements(ci) {
        if course.students > inst.rooms()[r].capacity {
            points += (course.students - inst.rooms()[r].capacity) as u32;
        }
    }
    let mut days: Vec<usize> = t.placements(ci).iter().map(|&(p, _)| p.day).collect();
    days.sort_unstable();
    days.dedup();
    if days.len() < course.min_working_days {
        points += 5 * (course.min_working_days - days.len()) as u32;
    }
    let mut rooms: Vec<usize> = t.placements(ci).iter().map(|&(_, r)| r).collect();
    rooms.sort_unstable();
    rooms.dedup();
    points += (rooms.len() as u32).saturating_sub(1);
    points
}

/// S3 of one curriculum: 2 points per lecture with no same-curriculum
/// lecture in an adjacent timeslot of the same day.
pub fn brute_compactness(inst: &Instance, t: &Timetable, qi: usize) -> u32 {
    let lectures: Vec<Period> = inst
        .curriculum_courses(qi)
        .iter()
        .flat_map(|&ci| t.placements(ci).iter().map(|&(p, _)| p))
        .collect();
    let mut points = 0u32;
    for &p in &lectures {
        let has_neighbor = lectures.iter().any(|&q| {
            q.day == p.day
                && (q.timeslot + 1 == p.timeslot || p.timeslot + 1 == q.timeslot)
        });
        if !has_neighbor {
            points += 2;
        }
    }
    points
}

pub fn brute_curriculum_penalty(inst: &Instance, t: &Timetable, qi: usize) -> u32 {
    let course_part: u32 = inst
        .curriculum_courses(qi)
        .iter()
        .map(|&ci| brute_course_points(inst, t, ci))
        .sum();
    course_part + brute_compactness(inst, t, qi)
}

pub fn brute_allocation(inst: &Instance, t: &Timetable) -> Vec<u32> {
    (0..inst.curricula().len())
        .map(|qi| brute_curriculum_penalty(inst, t, qi))
        .collect()
}

pub fn brute_total(inst: &Instance, t: &Timetable) -> u32 {
    let course_part: u32 = (0..inst.courses().len())
        .map(|ci| brute_course_points(inst, t, ci))
        .sum();
    let compact_part: u32 = (0..inst.curricula().len())
        .map(|qi| brute_compactness(inst, t, qi))
        .sum();
    course_part + compact_part
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration of feasible timetables (toy instances only).

struct Enumerator<'i> {
    inst: &'i Instance,
    num_rooms: usize,
    room_used: Vec<bool>,
    period_courses: Vec<Vec<usize>>,
    placements: Vec<Vec<(Period, usize)>>,
    out: Vec<Timetable>,
}

impl<'i> Enumerator<'i> {
    fn place_course(&mut self, ci: usize, lecture: usize, min_slot: usize) {
        if ci == self.inst.courses().len() {
            self.out
                .push(Timetable::new(self.inst, self.placements.clone()).unwrap());
            return;
        }
        if lecture == self.inst.courses()[ci].lectures {
            self.place_course(ci + 1, 0, 0);
            return;
        }
        let total_slots = self.inst.num_periods() * self.num_rooms;
        for slot in min_slot..total_slots {
            if self.room_used[slot] {
                continue;
            }
            let pi = slot / self.num_rooms;
            let room = slot % self.num_rooms;
            let period = self.inst.period_at(pi);
            if self.inst.is_unavailable(ci, period) {
                continue;
            }
            if self.placements[ci].iter().any(|&(p, _)| p == period) {
                continue;
            }
            if self.period_courses[pi]
                .iter()
                .any(|&d| self.inst.conflicts(ci, d))
            {
                continue;
            }
            self.room_used[slot] = true;
            self.period_courses[pi].push(ci);
            self.placements[ci].push((period, room));
            self.place_course(ci, lecture + 1, slot + 1);
            self.placements[ci].pop();
            self.period_courses[pi].pop();
            self.room_used[slot] = false;
        }
    }
}

/// All feasible timetables of a (small) instance, one per distinct
/// assignment of lectures to (period, room) slots.
pub fn enumerate_feasible(inst: &Instance) -> Vec<Timetable> {
    let num_rooms = inst.rooms().len();
    let mut e = Enumerator {
        inst,
        num_rooms,
        room_used: vec![false; inst.num_periods() * num_rooms],
        period_courses: vec![Vec::new(); inst.num_periods()],
        placements: vec![Vec::new(); inst.courses().len()],
        out: Vec::new(),
    };
    e.place_course(0, 0, 0);
    e.out
}

// ---------------------------------------------------------------------------
// Brute-force fairness formulas.

pub fn desc(v: &[u32]) -> Vec<u32> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.reverse();
    s
}

pub fn asc(v: &[u32]) -> Vec<u32> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

pub fn brute_jain(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &x in v {
        sum += x;
        sum_sq += x * x;
    }
    (sum * sum) / (n * sum_sq)
}

/// First 1-based position where the sorted worse vector exceeds the sorted
/// better one, mapped to 1 - (i - 1)/n.
pub fn oracle_lex(x: &[u32], y: &[u32]) -> f64 {
    let xs = desc(x);
    let ys = desc(y);
    let n = x.len();
    for i in 1..=n {
        if ys[i - 1] > xs[i - 1] {
            return 1.0 - (i as f64 - 1.0) / n as f64;
        }
    }
    panic!("oracle_lex requires a strictly worse candidate");
}

pub fn oracle_cw(x: &[u32], y: &[u32], delta: f64) -> f64 {
    let m = *x.iter().chain(y).min().unwrap() as f64;
    let xs = asc(x);
    let ys = asc(y);
    let mut best = f64::NEG_INFINITY;
    for i in 0..xs.len() {
        let ratio = (delta - m + ys[i] as f64) / (delta - m + xs[i] as f64);
        best = best.max(ratio);
    }
    best - 1.0
}

pub fn oracle_ps(x: &[u32], y: &[u32], delta: f64) -> f64 {
    let m = *x.iter().chain(y).min().unwrap() as f64;
    let xs = desc(x);
    let ys = desc(y);
    let mut best = f64::NEG_INFINITY;
    for i in 1..=xs.len() {
        let sx: f64 = xs[..i].iter().map(|&v| v as f64).sum();
        let sy: f64 = ys[..i].iter().map(|&v| v as f64).sum();
        let offset = i as f64 * (delta - m);
        best = best.max((offset + sy) / (offset + sx));
    }
    best - 1.0
}
