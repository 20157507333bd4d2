//! Feasibility-preserving search moves and construction of feasible initial
//! timetables.
//!
//! The move operator exchanges a Kempe chain between two periods: the
//! connected component of the seed lecture in the bipartite conflict graph
//! on the lectures of the two periods. Because the chain is closed under
//! conflict edges, the exchange can never introduce a curriculum or teacher
//! clash; moves that would overbook rooms or violate an availability
//! constraint are rejected rather than repaired.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::instance::{Instance, Period, Timetable};
use crate::search::{LectureMove, Occupancy, PlannedMove};

/// Resample budget for [`random_neighbor`] and the solver-internal proposal
/// loop.
pub const NEIGHBOR_ATTEMPTS: usize = 100;

/// Restart budget for the randomized greedy construction.
pub const CONSTRUCTION_RESTARTS: usize = 1000;

#[derive(Debug, Error)]
pub enum NeighborhoodError {
    #[error("no feasible initial timetable found after {attempts} randomized restarts")]
    ConstructionFailed { attempts: usize },
    #[error("course '{course}' has no lecture in {period}")]
    NoLectureInPeriod { course: String, period: Period },
    #[error("unknown course '{0}'")]
    UnknownCourse(String),
    #[error("the two periods of a move must differ")]
    SamePeriod,
    #[error("move would exceed the room count in {period}")]
    RoomOverflow { period: Period },
    #[error("move would place course '{course}' into unavailable {period}")]
    UnavailabilityViolated { course: String, period: Period },
    #[error("no feasible neighbor found after {attempts} attempts")]
    NoNeighborFound { attempts: usize },
}

/// Why an attempted move was rejected; internal to the proposal loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum MoveReject {
    Overflow,
    Unavailable,
}

/// A Kempe chain between two periods together with the room assignment of
/// the moved lectures. `chain` lists every lecture that switches periods as
/// (course id, source period).
#[derive(Debug, Clone)]
pub struct KempeMove {
    pub period_a: Period,
    pub period_b: Period,
    pub seed_course: String,
    pub chain: Vec<(String, Period)>,
    pub(crate) plan: Result<PlannedMove, Period>,
}

/// Both endpoints of the chain: courses moving out of `pa` and courses
/// moving out of `pb`.
pub(crate) fn chain_sides(
    inst: &Instance,
    occ: &Occupancy,
    pa: usize,
    pb: usize,
    seed: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut in_a = vec![seed];
    let mut in_b: Vec<usize> = Vec::new();
    let mut queue = vec![(seed, true)];
    while let Some((course, on_a)) = queue.pop() {
        let (opposite, side) = if on_a {
            (occ.courses_in(pb), &mut in_b)
        } else {
            (occ.courses_in(pa), &mut in_a)
        };
        for &other in opposite {
            if !side.contains(&other) && inst.conflicts(course, other) {
                side.push(other);
                queue.push((other, !on_a));
            }
        }
    }
    (in_a, in_b)
}

/// Assigns rooms in `dest` to the incoming chain lectures: lectures keep
/// their previous room when it is still free, the rest are matched by
/// descending student count against the free rooms by descending capacity.
/// Returns `None` when the period would hold more lectures than rooms.
pub(crate) fn plan_rooms(
    inst: &Instance,
    occ: &Occupancy,
    dest: usize,
    incoming: &[(usize, usize)],
    outgoing: &[usize],
) -> Option<Vec<(usize, usize)>> {
    let num_rooms = inst.rooms().len();
    let mut free = vec![true; num_rooms];
    let mut staying = 0;
    for &c in occ.courses_in(dest) {
        if !outgoing.contains(&c) {
            free[occ.room_of(c, dest).expect("course listed in period")] = false;
            staying += 1;
        }
    }
    if staying + incoming.len() > num_rooms {
        return None;
    }

    let mut order: Vec<usize> = (0..incoming.len()).collect();
    order.sort_unstable_by(|&i, &j| {
        let (ci, _) = incoming[i];
        let (cj, _) = incoming[j];
        inst.courses()[cj]
            .students
            .cmp(&inst.courses()[ci].students)
            .then(ci.cmp(&cj))
    });

    let mut assigned: Vec<Option<usize>> = vec![None; incoming.len()];
    for &i in &order {
        let (_, src_room) = incoming[i];
        if free[src_room] {
            free[src_room] = false;
            assigned[i] = Some(src_room);
        }
    }
    let mut rooms_by_capacity: Vec<usize> = (0..num_rooms).filter(|&r| free[r]).collect();
    rooms_by_capacity.sort_unstable_by(|&a, &b| {
        inst.rooms()[b]
            .capacity
            .cmp(&inst.rooms()[a].capacity)
            .then(a.cmp(&b))
    });
    let mut next = 0;
    for &i in &order {
        if assigned[i].is_none() {
            assigned[i] = Some(rooms_by_capacity[next]);
            next += 1;
        }
    }
    Some(
        incoming
            .iter()
            .zip(&assigned)
            .map(|(&(c, _), room)| (c, room.unwrap()))
            .collect(),
    )
}

/// Builds and fully room-plans the Kempe move seeded at `seed` between the
/// two periods, rejecting it when rooms would overflow or a chain lecture
/// would land in an unavailable period.
pub(crate) fn plan_kempe(
    inst: &Instance,
    occ: &Occupancy,
    pa: usize,
    pb: usize,
    seed: usize,
) -> Result<PlannedMove, MoveReject> {
    let (in_a, in_b) = chain_sides(inst, occ, pa, pb, seed);
    let period_a = inst.period_at(pa);
    let period_b = inst.period_at(pb);
    for &c in &in_a {
        if inst.is_unavailable(c, period_b) {
            return Err(MoveReject::Unavailable);
        }
    }
    for &c in &in_b {
        if inst.is_unavailable(c, period_a) {
            return Err(MoveReject::Unavailable);
        }
    }

    let incoming_b: Vec<(usize, usize)> = in_a
        .iter()
        .map(|&c| (c, occ.room_of(c, pa).expect("chain course sits in period a")))
        .collect();
    let incoming_a: Vec<(usize, usize)> = in_b
        .iter()
        .map(|&c| (c, occ.room_of(c, pb).expect("chain course sits in period b")))
        .collect();
    let rooms_b = plan_rooms(inst, occ, pb, &incoming_b, &in_b).ok_or(MoveReject::Overflow)?;
    let rooms_a = plan_rooms(inst, occ, pa, &incoming_a, &in_a).ok_or(MoveReject::Overflow)?;

    let mut moves = Vec::with_capacity(in_a.len() + in_b.len());
    for (&(course, src_room), &(_, dest_room)) in incoming_b.iter().zip(&rooms_b) {
        moves.push(LectureMove {
            course,
            from_period: pa,
            from_room: src_room,
            to_period: pb,
            to_room: dest_room,
        });
    }
    for (&(course, src_room), &(_, dest_room)) in incoming_a.iter().zip(&rooms_a) {
        moves.push(LectureMove {
            course,
            from_period: pb,
            from_room: src_room,
            to_period: pa,
            to_room: dest_room,
        });
    }
    Ok(PlannedMove { moves })
}

/// Computes the Kempe chain seeded at `seed_course`'s lecture in `period_a`
/// against `period_b`, including a tentative room plan. Availability is not
/// checked here; [`apply_move`] reports it.
pub fn kempe_chain(
    inst: &Instance,
    t: &Timetable,
    period_a: Period,
    period_b: Period,
    seed_course: &str,
) -> Result<KempeMove, NeighborhoodError> {
    if period_a == period_b {
        return Err(NeighborhoodError::SamePeriod);
    }
    let seed = inst
        .course_idx(seed_course)
        .ok_or_else(|| NeighborhoodError::UnknownCourse(seed_course.to_string()))?;
    let occ = Occupancy::from_timetable(inst, t);
    let pa = inst.period_index(period_a);
    let pb = inst.period_index(period_b);
    if occ.room_of(seed, pa).is_none() {
        return Err(NeighborhoodError::NoLectureInPeriod {
            course: seed_course.to_string(),
            period: period_a,
        });
    }

    let (in_a, in_b) = chain_sides(inst, &occ, pa, pb, seed);
    let mut chain: Vec<(String, Period)> = in_a
        .iter()
        .map(|&c| (inst.courses()[c].id.clone(), period_a))
        .chain(in_b.iter().map(|&c| (inst.courses()[c].id.clone(), period_b)))
        .collect();
    chain.sort();

    let incoming_b: Vec<(usize, usize)> = in_a
        .iter()
        .map(|&c| (c, occ.room_of(c, pa).unwrap()))
        .collect();
    let incoming_a: Vec<(usize, usize)> = in_b
        .iter()
        .map(|&c| (c, occ.room_of(c, pb).unwrap()))
        .collect();
    let plan = match (
        plan_rooms(inst, &occ, pb, &incoming_b, &in_b),
        plan_rooms(inst, &occ, pa, &incoming_a, &in_a),
    ) {
        (Some(rooms_b), Some(rooms_a)) => {
            let mut moves = Vec::with_capacity(in_a.len() + in_b.len());
            for (&(course, src_room), &(_, dest_room)) in incoming_b.iter().zip(&rooms_b) {
                moves.push(LectureMove {
                    course,
                    from_period: pa,
                    from_room: src_room,
                    to_period: pb,
                    to_room: dest_room,
                });
            }
            for (&(course, src_room), &(_, dest_room)) in incoming_a.iter().zip(&rooms_a) {
                moves.push(LectureMove {
                    course,
                    from_period: pb,
                    from_room: src_room,
                    to_period: pa,
                    to_room: dest_room,
                });
            }
            Ok(PlannedMove { moves })
        }
        (None, _) => Err(period_b),
        (_, None) => Err(period_a),
    };

    Ok(KempeMove {
        period_a,
        period_b,
        seed_course: seed_course.to_string(),
        chain,
        plan,
    })
}

/// Applies a Kempe move to a timetable, erroring when the move has no valid
/// room plan or pushes a lecture into an unavailable period. The result
/// passes the hard-constraint check whenever the input did.
pub fn apply_move(
    inst: &Instance,
    t: &Timetable,
    m: &KempeMove,
) -> Result<Timetable, NeighborhoodError> {
    let planned = match &m.plan {
        Ok(p) => p,
        Err(period) => {
            return Err(NeighborhoodError::RoomOverflow { period: *period });
        }
    };
    for lm in &planned.moves {
        let dest = inst.period_at(lm.to_period);
        if inst.is_unavailable(lm.course, dest) {
            return Err(NeighborhoodError::UnavailabilityViolated {
                course: inst.courses()[lm.course].id.clone(),
                period: dest,
            });
        }
    }

    let mut placements: Vec<Vec<(Period, usize)>> = (0..inst.courses().len())
        .map(|c| t.placements(c).to_vec())
        .collect();
    // Two phases so a course swapping its own lectures between the periods
    // cannot have a freshly written entry matched as a source.
    for lm in &planned.moves {
        let from = (inst.period_at(lm.from_period), lm.from_room);
        let list = &mut placements[lm.course];
        let pos = list
            .iter()
            .position(|&e| e == from)
            .expect("move source exists in timetable");
        list.swap_remove(pos);
    }
    for lm in &planned.moves {
        placements[lm.course].push((inst.period_at(lm.to_period), lm.to_room));
    }
    Ok(Timetable::new(inst, placements).expect("move preserves timetable shape"))
}

/// Draws uniformly random feasible Kempe neighbors until one survives the
/// availability and room-count checks.
pub fn random_neighbor(
    inst: &Instance,
    t: &Timetable,
    rng: &mut impl Rng,
) -> Result<Timetable, NeighborhoodError> {
    let occ = Occupancy::from_timetable(inst, t);
    let lectures: Vec<(usize, usize)> = inst
        .courses()
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| (0..c.lectures).map(move |slot| (ci, slot)))
        .collect();
    let num_periods = inst.num_periods();
    if lectures.is_empty() || num_periods < 2 {
        return Err(NeighborhoodError::NoNeighborFound {
            attempts: NEIGHBOR_ATTEMPTS,
        });
    }
    for _ in 0..NEIGHBOR_ATTEMPTS {
        let (course, slot) = lectures[rng.random_range(0..lectures.len())];
        let (pa, _) = occ.placements(course)[slot];
        let mut pb = rng.random_range(0..num_periods - 1);
        if pb >= pa {
            pb += 1;
        }
        if let Ok(planned) = plan_kempe(inst, &occ, pa, pb, course) {
            let mut placements: Vec<Vec<(Period, usize)>> = (0..inst.courses().len())
                .map(|c| t.placements(c).to_vec())
                .collect();
            for lm in &planned.moves {
                let from = (inst.period_at(lm.from_period), lm.from_room);
                let list = &mut placements[lm.course];
                let pos = list.iter().position(|&e| e == from).unwrap();
                list.swap_remove(pos);
            }
            for lm in &planned.moves {
                placements[lm.course].push((inst.period_at(lm.to_period), lm.to_room));
            }
            return Ok(Timetable::new(inst, placements).unwrap());
        }
    }
    Err(NeighborhoodError::NoNeighborFound {
        attempts: NEIGHBOR_ATTEMPTS,
    })
}

/// Builds a feasible timetable with a saturation-degree greedy: repeatedly
/// place a lecture of the course with the fewest feasible periods left,
/// breaking ties by conflict degree and then randomly, restarting on dead
/// ends. Soft constraints are ignored at this stage.
pub fn build_initial(inst: &Instance, seed: u64) -> Result<Timetable, NeighborhoodError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_periods = inst.num_periods();
    let num_rooms = inst.rooms().len();
    let num_courses = inst.courses().len();
    let num_curricula = inst.curricula().len();

    'restart: for _ in 0..CONSTRUCTION_RESTARTS {
        let mut room_used = vec![false; num_periods * num_rooms];
        let mut free_count = vec![num_rooms; num_periods];
        let mut curr_busy = vec![false; num_curricula * num_periods];
        let mut teacher_busy = vec![false; inst.num_teachers() * num_periods];
        let mut own_busy = vec![false; num_courses * num_periods];
        let mut remaining: Vec<usize> = inst.courses().iter().map(|c| c.lectures).collect();
        let mut placements: Vec<Vec<(Period, usize)>> = vec![Vec::new(); num_courses];
        let mut left: usize = remaining.iter().sum();

        while left > 0 {
            // Most constrained course first.
            let mut candidates: Vec<(usize, Vec<usize>)> = Vec::new();
            let mut min_avail = usize::MAX;
            for ci in 0..num_courses {
                if remaining[ci] == 0 {
                    continue;
                }
                let avail: Vec<usize> = (0..num_periods)
                    .filter(|&p| {
                        !own_busy[ci * num_periods + p]
                            && free_count[p] > 0
                            && !inst.is_unavailable(ci, inst.period_at(p))
                            && !teacher_busy[inst.teacher_of(ci) * num_periods + p]
                            && inst
                                .curricula_of(ci)
                                .iter()
                                .all(|&q| !curr_busy[q * num_periods + p])
                    })
                    .collect();
                if avail.len() < min_avail {
                    min_avail = avail.len();
                    candidates.clear();
                }
                if avail.len() == min_avail {
                    candidates.push((ci, avail));
                }
            }
            if min_avail == 0 {
                continue 'restart;
            }
            let max_degree = candidates
                .iter()
                .map(|&(ci, _)| inst.conflict_degree(ci))
                .max()
                .unwrap();
            let tied: Vec<usize> = candidates
                .iter()
                .enumerate()
                .filter(|(_, &(ci, _))| inst.conflict_degree(ci) == max_degree)
                .map(|(i, _)| i)
                .collect();
            let pick = tied[rng.random_range(0..tied.len())];
            let (course, avail) = &candidates[pick];
            let course = *course;
            let p = avail[rng.random_range(0..avail.len())];

            // Prefer the tightest sufficient room, otherwise the largest.
            let students = inst.courses()[course].students;
            let mut best: Option<usize> = None;
            for r in 0..num_rooms {
                if room_used[p * num_rooms + r] {
                    continue;
                }
                let cap = inst.rooms()[r].capacity;
                best = match best {
                    None => Some(r),
                    Some(b) => {
                        let bcap = inst.rooms()[b].capacity;
                        let better = match (cap >= students, bcap >= students) {
                            (true, false) => true,
                            (false, true) => false,
                            (true, true) => cap < bcap,
                            (false, false) => cap > bcap,
                        };
                        Some(if better { r } else { b })
                    }
                };
            }
            let room = best.expect("free_count > 0 guarantees a free room");

            room_used[p * num_rooms + room] = true;
            free_count[p] -= 1;
            own_busy[course * num_periods + p] = true;
            teacher_busy[inst.teacher_of(course) * num_periods + p] = true;
            for &q in inst.curricula_of(course) {
                curr_busy[q * num_periods + p] = true;
            }
            placements[course].push((inst.period_at(p), room));
            remaining[course] -= 1;
            left -= 1;
        }

        let t = Timetable::new(inst, placements).expect("construction respects lecture counts");
        debug_assert!(crate::evaluator::check_hard(inst, &t).is_empty());
        return Ok(t);
    }
    Err(NeighborhoodError::ConstructionFailed {
        attempts: CONSTRUCTION_RESTARTS,
    })
}
