//! Problem description for curriculum-based course timetabling (ITC2007
//! track 3): courses, rooms, curricula, the period grid, unavailability
//! constraints, and the timetable type that assigns every lecture to a
//! (period, room) pair.

use std::collections::HashMap;

use thiserror::Error;

/// A (day, timeslot) pair. Together with a room it identifies one schedulable
/// resource.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Period {
    pub day: usize,
    pub timeslot: usize,
}

impl Period {
    pub fn new(day: usize, timeslot: usize) -> Self {
        Period { day, timeslot }
    }
}

impl std::fmt::Display for Period {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(day {}, slot {})", self.day, self.timeslot)
    }
}

/// A course: a fixed number of lectures taught by one teacher to a known
/// head count of students.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Course {
    pub id: String,
    pub teacher: String,
    /// Number of lectures to schedule, at least 1.
    pub lectures: usize,
    /// The lectures should be spread over at least this many distinct days.
    pub min_working_days: usize,
    pub students: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Room {
    pub id: String,
    pub capacity: usize,
}

/// A set of courses whose lectures must not overlap in time. Curricula are
/// the stakeholders of the fairness measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curriculum {
    pub id: String,
    pub course_ids: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("days and periods_per_day must both be at least 1")]
    InvalidDimensions,
    #[error("duplicate {kind} id '{id}'")]
    DuplicateId { kind: &'static str, id: String },
    #[error("course '{id}': {reason}")]
    InvalidCourse { id: String, reason: &'static str },
    #[error("curriculum '{id}' lists no courses")]
    EmptyCurriculum { id: String },
    #[error("{referrer} references unknown course '{course}'")]
    DanglingReference { referrer: String, course: String },
    #[error("course '{course}': period (day {day}, slot {timeslot}) is out of range")]
    InvalidPeriod {
        course: String,
        day: usize,
        timeslot: usize,
    },
    #[error("{lectures} lectures cannot fit into {slots} room-period slots")]
    TooManyLectures { lectures: usize, slots: usize },
}

/// An immutable timetabling problem. Construction validates all structural
/// invariants and precomputes the lookup tables the evaluator and the
/// neighborhood need (conflict matrix, per-course curricula, unavailability
/// grid).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    days: usize,
    periods_per_day: usize,
    courses: Vec<Course>,
    rooms: Vec<Room>,
    curricula: Vec<Curriculum>,
    /// Sorted, deduplicated (course index, period) pairs.
    unavailability: Vec<(usize, Period)>,

    // Derived lookups, computed once at construction.
    course_index: HashMap<String, usize>,
    room_index: HashMap<String, usize>,
    curriculum_index: HashMap<String, usize>,
    teachers: Vec<String>,
    teacher_of_course: Vec<usize>,
    curricula_of_course: Vec<Vec<usize>>,
    courses_of_curriculum: Vec<Vec<usize>>,
    /// Flattened course-by-course matrix: true when the two courses share a
    /// curriculum or a teacher. The diagonal is true (a course conflicts with
    /// itself across lectures).
    conflict: Vec<bool>,
    /// Flattened course-by-period matrix of forbidden periods.
    unavailable: Vec<bool>,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        days: usize,
        periods_per_day: usize,
        courses: Vec<Course>,
        rooms: Vec<Room>,
        curricula: Vec<Curriculum>,
        unavailability: Vec<(String, Period)>,
    ) -> Result<Self, InstanceError> {
        if days == 0 || periods_per_day == 0 {
            return Err(InstanceError::InvalidDimensions);
        }

        let mut course_index = HashMap::new();
        for (i, c) in courses.iter().enumerate() {
            if course_index.insert(c.id.clone(), i).is_some() {
                return Err(InstanceError::DuplicateId {
                    kind: "course",
                    id: c.id.clone(),
                });
            }
            if c.lectures == 0 {
                return Err(InstanceError::InvalidCourse {
                    id: c.id.clone(),
                    reason: "lecture count must be at least 1",
                });
            }
            if c.min_working_days == 0 {
                return Err(InstanceError::InvalidCourse {
                    id: c.id.clone(),
                    reason: "min working days must be at least 1",
                });
            }
        }

        let mut room_index = HashMap::new();
        for (i, r) in rooms.iter().enumerate() {
            if room_index.insert(r.id.clone(), i).is_some() {
                return Err(InstanceError::DuplicateId {
                    kind: "room",
                    id: r.id.clone(),
                });
            }
        }

        let mut curriculum_index = HashMap::new();
        let mut courses_of_curriculum = Vec::with_capacity(curricula.len());
        let mut curricula_of_course = vec![Vec::new(); courses.len()];
        for (qi, q) in curricula.iter().enumerate() {
            if curriculum_index.insert(q.id.clone(), qi).is_some() {
                return Err(InstanceError::DuplicateId {
                    kind: "curriculum",
                    id: q.id.clone(),
                });
            }
            if q.course_ids.is_empty() {
                return Err(InstanceError::EmptyCurriculum { id: q.id.clone() });
            }
            let mut members = Vec::with_capacity(q.course_ids.len());
            for cid in &q.course_ids {
                let ci = *course_index.get(cid).ok_or_else(|| {
                    InstanceError::DanglingReference {
                        referrer: format!("curriculum '{}'", q.id),
                        course: cid.clone(),
                    }
                })?;
                if members.contains(&ci) {
                    return Err(InstanceError::DuplicateId {
                        kind: "curriculum member",
                        id: cid.clone(),
                    });
                }
                members.push(ci);
                curricula_of_course[ci].push(qi);
            }
            courses_of_curriculum.push(members);
        }

        let total_lectures: usize = courses.iter().map(|c| c.lectures).sum();
        let slots = rooms.len() * days * periods_per_day;
        if total_lectures > slots {
            return Err(InstanceError::TooManyLectures {
                lectures: total_lectures,
                slots,
            });
        }

        let num_periods = days * periods_per_day;
        let mut unavailable = vec![false; courses.len() * num_periods];
        let mut resolved_unavail = Vec::with_capacity(unavailability.len());
        for (cid, p) in &unavailability {
            let ci = *course_index.get(cid).ok_or_else(|| {
                InstanceError::DanglingReference {
                    referrer: "unavailability constraint".to_string(),
                    course: cid.clone(),
                }
            })?;
            if p.day >= days || p.timeslot >= periods_per_day {
                return Err(InstanceError::InvalidPeriod {
                    course: cid.clone(),
                    day: p.day,
                    timeslot: p.timeslot,
                });
            }
            let pi = p.day * periods_per_day + p.timeslot;
            if !unavailable[ci * num_periods + pi] {
                unavailable[ci * num_periods + pi] = true;
                resolved_unavail.push((ci, *p));
            }
        }
        resolved_unavail.sort_unstable();

        // Intern teachers and build the conflict matrix.
        let mut teachers: Vec<String> = Vec::new();
        let mut teacher_of_course = Vec::with_capacity(courses.len());
        for c in &courses {
            let ti = match teachers.iter().position(|t| *t == c.teacher) {
                Some(i) => i,
                None => {
                    teachers.push(c.teacher.clone());
                    teachers.len() - 1
                }
            };
            teacher_of_course.push(ti);
        }

        let n = courses.len();
        let mut conflict = vec![false; n * n];
        for i in 0..n {
            conflict[i * n + i] = true;
            for j in (i + 1)..n {
                let clash = teacher_of_course[i] == teacher_of_course[j]
                    || curricula_of_course[i]
                        .iter()
                        .any(|q| curricula_of_course[j].contains(q));
                conflict[i * n + j] = clash;
                conflict[j * n + i] = clash;
            }
        }

        Ok(Instance {
            name: name.into(),
            days,
            periods_per_day,
            courses,
            rooms,
            curricula,
            unavailability: resolved_unavail,
            course_index,
            room_index,
            curriculum_index,
            teachers,
            teacher_of_course,
            curricula_of_course,
            courses_of_curriculum,
            conflict,
            unavailable,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn days(&self) -> usize {
        self.days
    }

    pub fn periods_per_day(&self) -> usize {
        self.periods_per_day
    }

    pub fn num_periods(&self) -> usize {
        self.days * self.periods_per_day
    }

    pub fn courses(&self) -> &[Course] {
        &self.courses
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn curricula(&self) -> &[Curriculum] {
        &self.curricula
    }

    /// Unavailability constraints as sorted (course index, period) pairs.
    pub fn unavailability(&self) -> &[(usize, Period)] {
        &self.unavailability
    }

    pub fn course_idx(&self, id: &str) -> Option<usize> {
        self.course_index.get(id).copied()
    }

    pub fn room_idx(&self, id: &str) -> Option<usize> {
        self.room_index.get(id).copied()
    }

    pub fn curriculum_idx(&self, id: &str) -> Option<usize> {
        self.curriculum_index.get(id).copied()
    }

    pub fn teacher_of(&self, course: usize) -> usize {
        self.teacher_of_course[course]
    }

    pub fn num_teachers(&self) -> usize {
        self.teachers.len()
    }

    /// Curricula (by index) that contain the given course.
    pub fn curricula_of(&self, course: usize) -> &[usize] {
        &self.curricula_of_course[course]
    }

    /// Courses (by index) of the given curriculum.
    pub fn curriculum_courses(&self, curriculum: usize) -> &[usize] {
        &self.courses_of_curriculum[curriculum]
    }

    /// Two courses conflict when they share a curriculum or a teacher; a
    /// course also conflicts with itself.
    pub fn conflicts(&self, a: usize, b: usize) -> bool {
        self.conflict[a * self.courses.len() + b]
    }

    /// Number of courses conflicting with `course` (excluding itself).
    pub fn conflict_degree(&self, course: usize) -> usize {
        let n = self.courses.len();
        (0..n)
            .filter(|&other| other != course && self.conflicts(course, other))
            .count()
    }

    pub fn is_unavailable(&self, course: usize, p: Period) -> bool {
        self.unavailable[course * self.num_periods() + self.period_index(p)]
    }

    pub fn period_index(&self, p: Period) -> usize {
        p.day * self.periods_per_day + p.timeslot
    }

    pub fn period_at(&self, index: usize) -> Period {
        Period {
            day: index / self.periods_per_day,
            timeslot: index % self.periods_per_day,
        }
    }

    pub fn periods(&self) -> impl Iterator<Item = Period> + '_ {
        (0..self.num_periods()).map(|i| self.period_at(i))
    }

    pub fn total_lectures(&self) -> usize {
        self.courses.iter().map(|c| c.lectures).sum()
    }

    /// Re-runs the construction-time validation. Structurally constructed
    /// instances always pass; this exists so parser fuzzing can assert that
    /// any accepted instance satisfies every invariant.
    pub fn check_invariants(&self) -> Result<(), InstanceError> {
        Instance::new(
            self.name.clone(),
            self.days,
            self.periods_per_day,
            self.courses.clone(),
            self.rooms.clone(),
            self.curricula.clone(),
            self.unavailability
                .iter()
                .map(|&(ci, p)| (self.courses[ci].id.clone(), p))
                .collect(),
        )
        .map(|_| ())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TimetableError {
    #[error("expected one placement list per course ({expected}), got {found}")]
    CourseCountMismatch { expected: usize, found: usize },
    #[error("course '{course}': expected {expected} placements, got {found}")]
    PlacementCountMismatch {
        course: String,
        expected: usize,
        found: usize,
    },
    #[error("course '{course}': placement period (day {day}, slot {timeslot}) out of range")]
    InvalidPeriod {
        course: String,
        day: usize,
        timeslot: usize,
    },
    #[error("course '{course}': room index {room} out of range")]
    InvalidRoom { course: String, room: usize },
}

/// An assignment of every lecture to a (period, room index) pair. Placements
/// are stored per course, sorted by (day, timeslot, room), so two timetables
/// with the same assignments compare equal regardless of input order.
///
/// A `Timetable` is structurally well formed (right lecture counts, valid
/// periods and rooms) but not necessarily feasible; hard-constraint checking
/// is the evaluator's job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timetable {
    placements: Vec<Vec<(Period, usize)>>,
}

impl Timetable {
    pub fn new(
        inst: &Instance,
        mut placements: Vec<Vec<(Period, usize)>>,
    ) -> Result<Self, TimetableError> {
        if placements.len() != inst.courses().len() {
            return Err(TimetableError::CourseCountMismatch {
                expected: inst.courses().len(),
                found: placements.len(),
            });
        }
        for (ci, course) in inst.courses().iter().enumerate() {
            let got = &mut placements[ci];
            if got.len() != course.lectures {
                return Err(TimetableError::PlacementCountMismatch {
                    course: course.id.clone(),
                    expected: course.lectures,
                    found: got.len(),
                });
            }
            for &(p, r) in got.iter() {
                if p.day >= inst.days() || p.timeslot >= inst.periods_per_day() {
                    return Err(TimetableError::InvalidPeriod {
                        course: course.id.clone(),
                        day: p.day,
                        timeslot: p.timeslot,
                    });
                }
                if r >= inst.rooms().len() {
                    return Err(TimetableError::InvalidRoom {
                        course: course.id.clone(),
                        room: r,
                    });
                }
            }
            got.sort_unstable();
        }
        Ok(Timetable { placements })
    }

    /// Placements of one course, sorted by (day, timeslot, room).
    pub fn placements(&self, course: usize) -> &[(Period, usize)] {
        &self.placements[course]
    }

    pub fn num_courses(&self) -> usize {
        self.placements.len()
    }

    /// Iterates over (course index, period, room index) for every lecture.
    pub fn iter_lectures(&self) -> impl Iterator<Item = (usize, Period, usize)> + '_ {
        self.placements
            .iter()
            .enumerate()
            .flat_map(|(ci, ps)| ps.iter().map(move |&(p, r)| (ci, p, r)))
    }
}
