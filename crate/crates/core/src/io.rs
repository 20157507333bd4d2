//! Reading and writing the ITC2007 track-3 exchange formats.
//!
//! Instance files consist of seven header lines (`Name:`, `Courses:`,
//! `Rooms:`, `Days:`, `Periods_per_day:`, `Curricula:`, `Constraints:`),
//! the sections `COURSES:`, `ROOMS:`, `CURRICULA:` and
//! `UNAVAILABILITY_CONSTRAINTS:` in that order, and a final `END.` line.
//! Fields are separated by any run of blanks or tabs; blank lines are
//! ignored. Solution files hold one `course room day timeslot` line per
//! lecture.

use thiserror::Error;

use crate::instance::{
    Course, Curriculum, Instance, InstanceError, Period, Room, Timetable, TimetableError,
};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: expected header '{expected}', found '{found}'")]
    MalformedHeader {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: {detail}")]
    MalformedLine { line: usize, detail: String },
    #[error("section {section}: declared {declared} entries, found {found}")]
    CountMismatch {
        section: String,
        declared: usize,
        found: usize,
    },
    #[error("unexpected end of file, expected {expected}")]
    UnexpectedEof { expected: &'static str },
    #[error("line {line}: unexpected content after END.")]
    TrailingContent { line: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Error)]
pub enum SolutionError {
    #[error("line {line}: expected 'course room day timeslot', got '{content}'")]
    MalformedLine { line: usize, content: String },
    #[error("line {line}: unknown course '{id}'")]
    UnknownCourse { line: usize, id: String },
    #[error("line {line}: unknown room '{id}'")]
    UnknownRoom { line: usize, id: String },
    #[error("line {line}: period (day {day}, slot {timeslot}) out of range")]
    InvalidPeriod {
        line: usize,
        day: usize,
        timeslot: usize,
    },
    #[error("course '{course}': expected {expected} lectures, found {found}")]
    LectureCountMismatch {
        course: String,
        expected: usize,
        found: usize,
    },
}

const SECTION_HEADERS: [&str; 5] = [
    "COURSES:",
    "ROOMS:",
    "CURRICULA:",
    "UNAVAILABILITY_CONSTRAINTS:",
    "END.",
];

struct Cursor<'a> {
    /// Non-blank lines as (1-based line number, tokens).
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let tokens: Vec<&str> = l.split_whitespace().collect();
                if tokens.is_empty() {
                    None
                } else {
                    Some((i + 1, tokens))
                }
            })
            .collect();
        Cursor { lines, pos: 0 }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.lines.get(self.pos)
    }

    fn next(&mut self) -> Option<&(usize, Vec<&'a str>)> {
        let item = self.lines.get(self.pos);
        if item.is_some() {
            self.pos += 1;
        }
        item
    }
}

fn parse_count(tok: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| ParseError::MalformedLine {
        line,
        detail: format!("cannot parse {what} from '{tok}'"),
    })
}

fn expect_header<'a>(cur: &mut Cursor<'a>, key: &'static str) -> Result<(usize, Vec<&'a str>), ParseError> {
    let (line, tokens) = cur
        .next()
        .ok_or(ParseError::UnexpectedEof { expected: key })?
        .clone();
    if tokens[0] != key {
        return Err(ParseError::MalformedHeader {
            line,
            expected: key,
            found: tokens[0].to_string(),
        });
    }
    Ok((line, tokens))
}

fn header_value<'a>(cur: &mut Cursor<'a>, key: &'static str) -> Result<(usize, String), ParseError> {
    let (line, tokens) = expect_header(cur, key)?;
    if tokens.len() != 2 {
        return Err(ParseError::MalformedHeader {
            line,
            expected: key,
            found: tokens.join(" "),
        });
    }
    Ok((line, tokens[1].to_string()))
}

/// Reads `declared` entry lines for a section, stopping early (with a
/// `CountMismatch`) if another section header shows up first.
fn section_entries<'a>(
    cur: &mut Cursor<'a>,
    section: &str,
    declared: usize,
) -> Result<Vec<(usize, Vec<&'a str>)>, ParseError> {
    let mut entries = Vec::with_capacity(declared);
    for found in 0..declared {
        match cur.peek() {
            None => {
                return Err(ParseError::CountMismatch {
                    section: section.to_string(),
                    declared,
                    found,
                })
            }
            Some((_, tokens)) if SECTION_HEADERS.contains(&tokens[0]) => {
                return Err(ParseError::CountMismatch {
                    section: section.to_string(),
                    declared,
                    found,
                })
            }
            Some(_) => entries.push(cur.next().unwrap().clone()),
        }
    }
    // Any further entry-shaped lines mean the declared count was too small.
    let mut extra = 0;
    while let Some((_, tokens)) = cur.peek() {
        if SECTION_HEADERS.contains(&tokens[0]) {
            break;
        }
        extra += 1;
        cur.next();
    }
    if extra > 0 {
        return Err(ParseError::CountMismatch {
            section: section.to_string(),
            declared,
            found: declared + extra,
        });
    }
    Ok(entries)
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut cur = Cursor::new(text);

    let (_, name) = header_value(&mut cur, "Name:")?;
    let (l, v) = header_value(&mut cur, "Courses:")?;
    let n_courses = parse_count(&v, l, "course count")?;
    let (l, v) = header_value(&mut cur, "Rooms:")?;
    let n_rooms = parse_count(&v, l, "room count")?;
    let (l, v) = header_value(&mut cur, "Days:")?;
    let days = parse_count(&v, l, "day count")?;
    let (l, v) = header_value(&mut cur, "Periods_per_day:")?;
    let periods_per_day = parse_count(&v, l, "periods per day")?;
    let (l, v) = header_value(&mut cur, "Curricula:")?;
    let n_curricula = parse_count(&v, l, "curriculum count")?;
    let (l, v) = header_value(&mut cur, "Constraints:")?;
    let n_constraints = parse_count(&v, l, "constraint count")?;

    expect_header(&mut cur, "COURSES:")?;
    let mut courses = Vec::with_capacity(n_courses);
    for (line, tokens) in section_entries(&mut cur, "COURSES", n_courses)? {
        if tokens.len() != 5 {
            return Err(ParseError::MalformedLine {
                line,
                detail: format!(
                    "expected 'id teacher lectures min_working_days students', got '{}'",
                    tokens.join(" ")
                ),
            });
        }
        courses.push(Course {
            id: tokens[0].to_string(),
            teacher: tokens[1].to_string(),
            lectures: parse_count(tokens[2], line, "lecture count")?,
            min_working_days: parse_count(tokens[3], line, "min working days")?,
            students: parse_count(tokens[4], line, "student count")?,
        });
    }

    expect_header(&mut cur, "ROOMS:")?;
    let mut rooms = Vec::with_capacity(n_rooms);
    for (line, tokens) in section_entries(&mut cur, "ROOMS", n_rooms)? {
        if tokens.len() != 2 {
            return Err(ParseError::MalformedLine {
                line,
                detail: format!("expected 'id capacity', got '{}'", tokens.join(" ")),
            });
        }
        rooms.push(Room {
            id: tokens[0].to_string(),
            capacity: parse_count(tokens[1], line, "room capacity")?,
        });
    }

    expect_header(&mut cur, "CURRICULA:")?;
    let mut curricula = Vec::with_capacity(n_curricula);
    for (line, tokens) in section_entries(&mut cur, "CURRICULA", n_curricula)? {
        if tokens.len() < 2 {
            return Err(ParseError::MalformedLine {
                line,
                detail: format!("expected 'id count course...', got '{}'", tokens.join(" ")),
            });
        }
        let declared = parse_count(tokens[1], line, "curriculum course count")?;
        let members: Vec<String> = tokens[2..].iter().map(|s| s.to_string()).collect();
        if members.len() != declared {
            return Err(ParseError::CountMismatch {
                section: format!("curriculum '{}'", tokens[0]),
                declared,
                found: members.len(),
            });
        }
        curricula.push(Curriculum {
            id: tokens[0].to_string(),
            course_ids: members,
        });
    }

    expect_header(&mut cur, "UNAVAILABILITY_CONSTRAINTS:")?;
    let mut unavailability = Vec::with_capacity(n_constraints);
    for (line, tokens) in section_entries(&mut cur, "UNAVAILABILITY_CONSTRAINTS", n_constraints)? {
        if tokens.len() != 3 {
            return Err(ParseError::MalformedLine {
                line,
                detail: format!("expected 'course day timeslot', got '{}'", tokens.join(" ")),
            });
        }
        unavailability.push((
            tokens[0].to_string(),
            Period::new(
                parse_count(tokens[1], line, "day")?,
                parse_count(tokens[2], line, "timeslot")?,
            ),
        ));
    }

    expect_header(&mut cur, "END.")?;
    if let Some((line, _)) = cur.peek() {
        return Err(ParseError::TrailingContent { line: *line });
    }

    Ok(Instance::new(
        name,
        days,
        periods_per_day,
        courses,
        rooms,
        curricula,
        unavailability,
    )?)
}

/// Writes an instance back out in the canonical exchange format.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("Name: {}\n", inst.name()));
    out.push_str(&format!("Courses: {}\n", inst.courses().len()));
    out.push_str(&format!("Rooms: {}\n", inst.rooms().len()));
    out.push_str(&format!("Days: {}\n", inst.days()));
    out.push_str(&format!("Periods_per_day: {}\n", inst.periods_per_day()));
    out.push_str(&format!("Curricula: {}\n", inst.curricula().len()));
    out.push_str(&format!("Constraints: {}\n", inst.unavailability().len()));

    out.push_str("\nCOURSES:\n");
    for c in inst.courses() {
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            c.id, c.teacher, c.lectures, c.min_working_days, c.students
        ));
    }
    out.push_str("\nROOMS:\n");
    for r in inst.rooms() {
        out.push_str(&format!("{} {}\n", r.id, r.capacity));
    }
    out.push_str("\nCURRICULA:\n");
    for q in inst.curricula() {
        out.push_str(&format!(
            "{} {} {}\n",
            q.id,
            q.course_ids.len(),
            q.course_ids.join(" ")
        ));
    }
    out.push_str("\nUNAVAILABILITY_CONSTRAINTS:\n");
    for &(ci, p) in inst.unavailability() {
        out.push_str(&format!(
            "{} {} {}\n",
            inst.courses()[ci].id, p.day, p.timeslot
        ));
    }
    out.push_str("\nEND.\n");
    out
}

pub fn parse_solution(text: &str, inst: &Instance) -> Result<Timetable, SolutionError> {
    let mut placements: Vec<Vec<(Period, usize)>> = vec![Vec::new(); inst.courses().len()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 4 {
            return Err(SolutionError::MalformedLine {
                line,
                content: raw.trim().to_string(),
            });
        }
        let course = inst
            .course_idx(tokens[0])
            .ok_or_else(|| SolutionError::UnknownCourse {
                line,
                id: tokens[0].to_string(),
            })?;
        let room = inst
            .room_idx(tokens[1])
            .ok_or_else(|| SolutionError::UnknownRoom {
                line,
                id: tokens[1].to_string(),
            })?;
        let day: usize = tokens[2].parse().map_err(|_| SolutionError::MalformedLine {
            line,
            content: raw.trim().to_string(),
        })?;
        let timeslot: usize = tokens[3].parse().map_err(|_| SolutionError::MalformedLine {
            line,
            content: raw.trim().to_string(),
        })?;
        if day >= inst.days() || timeslot >= inst.periods_per_day() {
            return Err(SolutionError::InvalidPeriod {
                line,
                day,
                timeslot,
            });
        }
        placements[course].push((Period::new(day, timeslot), room));
    }

    Timetable::new(inst, placements).map_err(|e| match e {
        TimetableError::PlacementCountMismatch {
            course,
            expected,
            found,
        } => SolutionError::LectureCountMismatch {
            course,
            expected,
            found,
        },
        // Ranges and vector shape were validated above.
        other => unreachable!("solution placements already validated: {other}"),
    })
}

/// One `course room day timeslot` line per lecture, courses in instance
/// order, placements sorted by (day, timeslot, room). Output is
/// byte-identical for equal timetables.
pub fn serialize_solution(t: &Timetable, inst: &Instance) -> String {
    let mut out = String::new();
    for (ci, course) in inst.courses().iter().enumerate() {
        for &(p, r) in t.placements(ci) {
            out.push_str(&format!(
                "{} {} {} {}\n",
                course.id,
                inst.rooms()[r].id,
                p.day,
                p.timeslot
            ));
        }
    }
    out
}
