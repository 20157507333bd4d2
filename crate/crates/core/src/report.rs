//! Text and CSV reports: exponent-notation allocation vectors, run traces,
//! Pareto-front tables with the proportional tradeoff line, and the archive
//! index.

use thiserror::Error;

use crate::jfi::{ObjectivePair, ParetoArchive};
use crate::mmf::RunTrace;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("cannot parse allocation token '{0}'")]
    InvalidToken(String),
    #[error("archive index: {0}")]
    BadArchiveIndex(String),
}

/// Formats an allocation as its nonincreasing run-length encoding, e.g.
/// `(0, 5, 5, 0)` becomes `5^2,0^2` and a single occurrence omits the
/// exponent: `(4, 2, 2)` becomes `4,2^2`.
pub fn format_allocation(values: &[u32]) -> String {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let count = j - i;
        if count == 1 {
            parts.push(format!("{}", sorted[i]));
        } else {
            parts.push(format!("{}^{}", sorted[i], count));
        }
        i = j;
    }
    parts.join(",")
}

/// Inverse of [`format_allocation`]: expands `5^2,0^12` into the listed
/// values. The empty string parses to an empty vector.
pub fn parse_allocation(text: &str) -> Result<Vec<u32>, ReportError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        let (value, count) = match token.split_once('^') {
            Some((v, c)) => (
                v.trim()
                    .parse::<u32>()
                    .map_err(|_| ReportError::InvalidToken(token.to_string()))?,
                c.trim()
                    .parse::<usize>()
                    .map_err(|_| ReportError::InvalidToken(token.to_string()))?,
            ),
            None => (
                token
                    .parse::<u32>()
                    .map_err(|_| ReportError::InvalidToken(token.to_string()))?,
                1,
            ),
        };
        out.extend(std::iter::repeat_n(value, count));
    }
    Ok(out)
}

/// Serializes a run trace as CSV with columns
/// `elapsed_s,best_allocation,total_penalty`.
pub fn trace_csv(trace: &RunTrace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["elapsed_s", "best_allocation", "total_penalty"])
        .unwrap();
    for r in &trace.records {
        w.write_record([
            format!("{:.3}", r.elapsed_s),
            format_allocation(&r.allocation),
            r.total_penalty.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Pareto-front report anchored at a seed point: one row per archive entry,
/// sorted by fairness index, flagging entries strictly below the
/// proportional tradeoff line through the seed (an x% fairness gain paid
/// with less than an x% penalty increase).
pub fn pareto_report(archive: &ParetoArchive, seed: ObjectivePair) -> String {
    let points: Vec<ObjectivePair> = archive.objectives().collect();
    pareto_report_points(&points, seed)
}

/// As [`pareto_report`] over bare objective points, for reports rebuilt from
/// an exported archive index.
pub fn pareto_report_points(points: &[ObjectivePair], seed: ObjectivePair) -> String {
    let mut points = points.to_vec();
    points.sort_by(|a, b| {
        a.jain()
            .partial_cmp(&b.jain())
            .unwrap()
            .then(a.penalty.cmp(&b.penalty))
    });

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["jain_index", "penalty", "below_tradeoff_line"])
        .unwrap();
    for p in points {
        w.write_record([
            format!("{:.6}", p.jain()),
            p.penalty.to_string(),
            below_tradeoff_line(&p, &seed).to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// The tradeoff line through the seed scales penalty proportionally with the
/// fairness index; a point strictly below it buys fairness at a discount.
/// Points on the line (the seed itself included) are not below it.
pub fn below_tradeoff_line(point: &ObjectivePair, seed: &ObjectivePair) -> bool {
    // Line through (seed.jain, seed.penalty) and the origin:
    // allowed penalty at fairness j is seed.penalty * j / seed.jain.
    (point.penalty as f64) * seed.jain() < (seed.penalty as f64) * point.jain()
}

/// Archive index CSV: `jain_index,total_penalty,solution_file`.
pub fn archive_index_csv(rows: &[(f64, u32, String)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["jain_index", "total_penalty", "solution_file"])
        .unwrap();
    for (jain, penalty, path) in rows {
        w.write_record([format!("{jain:.6}"), penalty.to_string(), path.clone()])
            .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Reads the objective points back out of an archive index CSV.
pub fn read_archive_points(text: &str) -> Result<Vec<ObjectivePair>, ReportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| ReportError::BadArchiveIndex(e.to_string()))?;
        let jain: f64 = record
            .get(0)
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| ReportError::BadArchiveIndex("bad jain_index field".to_string()))?;
        let penalty: u32 = record
            .get(1)
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| ReportError::BadArchiveIndex("bad total_penalty field".to_string()))?;
        points.push(ObjectivePair {
            penalty,
            unfairness: 1.0 - jain,
        });
    }
    Ok(points)
}
