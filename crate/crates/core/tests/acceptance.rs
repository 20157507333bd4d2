//! Acceptance suite: every release criterion as one test, each printing a
//! pass line. Reference figures come from the published ITC2007 track-3
//! benchmark record (known-best solutions and max-min-fair solver results);
//! everything else is checked against brute-force oracles computed in-test.

mod common;

use fairtt_core::{
    acceptance_probability, delta_e_cw, delta_e_lex, delta_e_ps, jain_index, mm_compare,
    parse_allocation, penalty_allocation, shifted_allocation, solve_jfi, solve_mmf,
    temperature_at, total_penalty, wilcoxon_one_sided, EnergyKind, FairnessError, Instance,
    MMOrder, SAParams, SearchState, Timetable,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

// ---------------------------------------------------------------------------
// Known-best solution fairness figures: (instance, curricula, jain index of
// the shifted allocation, allocation in exponent notation). Rows whose
// published vectors are elided are checked in the ordering suite instead.

const KNOWN_BEST_JAIN: &[(&str, usize, f64, &str)] = &[
    ("comp01", 14, 0.8571, "5^2,0^12"),
    ("comp02", 70, 0.9515, "4,2^10,0^59"),
    ("comp03", 68, 0.9114, "13,10^3,9,7^2,6^4,5^13,4,2^6,0^37"),
    ("comp04", 57, 0.8964, "7,6^3,5^4,4^2,2,0^46"),
    ("comp06", 70, 0.9657, "12,7^2,5^4,2^3,0^60"),
    ("comp07", 77, 0.9870, "6,0^76"),
    ("comp08", 61, 0.9020, "7,6^3,5^4,4^2,2^2,0^49"),
    ("comp09", 75, 0.8047, "10^5,9,7^10,6^6,5^10,4,2,0^41"),
    ("comp10", 67, 0.9701, "2^2,0^65"),
    ("comp13", 66, 0.8830, "8,7,6^5,5^7,4^2,2^3,0^47"),
    ("comp14", 60, 0.9023, "8^4,7,5^2,2^6,0^47"),
    ("comp15", 68, 0.8495, "10^3,9^3,7,6^4,5^13,4,2^7,0^36"),
    ("comp16", 71, 0.9176, "7^2,5^7,4,0^61"),
    ("comp17", 70, 0.9248, "10^2,6^3,5^9,2^4,0^52"),
    ("comp18", 52, 0.9009, "17,15,14,13,11,10,9^2,5^19,2^2,0^23"),
    ("comp19", 66, 0.9612, "13,7,6^4,5^2,4,2^7,0^50"),
    ("comp20", 78, 0.9744, "2^2,0^76"),
    ("comp21", 78, 0.8838, "12,11,10^4,9,7^4,6^4,5^12,4,2^3,1^2,0^45"),
];

#[test]
fn criterion_1_known_best_jain_indices() {
    for &(name, k, expected, alloc_text) in KNOWN_BEST_JAIN {
        let alloc = parse_allocation(alloc_text).unwrap();
        assert_eq!(alloc.len(), k, "{name}: exponent counts must sum to k");
        let shifted: Vec<f64> =
            shifted_allocation(&fairtt_core::PenaltyAllocation(alloc.clone()))
                .iter()
                .map(|&v| v as f64)
                .collect();
        let jain = jain_index(&shifted).unwrap();
        assert!(
            (jain - expected).abs() < 5e-5,
            "{name}: jain {jain:.6} vs published {expected}"
        );
    }
    // comp11 carries no penalty at all: the index is undefined.
    let alloc = parse_allocation("0^13").unwrap();
    let shifted: Vec<f64> = shifted_allocation(&fairtt_core::PenaltyAllocation(alloc))
        .iter()
        .map(|&v| v as f64)
        .collect();
    assert_eq!(jain_index(&shifted), Err(FairnessError::AllZero));
    println!("criterion 1 (known-best fairness indices, 18 rows + comp11 undefined): PASS");
}

// ---------------------------------------------------------------------------
// Max-min ordering of the reported solver allocations against the known
// best solutions. Two vectors are published truncated; the comparison is
// decided at the first sorted position, so zero-filling the hidden tail
// cannot change the outcome.

struct OrderingRow {
    name: &'static str,
    curricula: usize,
    known_best: &'static str,
    maxmin: &'static str,
    elided: bool,
    expected: MMOrder,
}

const ORDERING_ROWS: &[OrderingRow] = &[
    row("comp01", 14, "5^2,0^12", "5^2,0^12", false, MMOrder::Equal),
    row("comp02", 70, "4,2^10,0^59", "4^2,2^31,1^7,0^30", false, MMOrder::Worse),
    row(
        "comp03",
        68,
        "13,10^3,9,7^2,6^4,5^13,4,2^6,0^37",
        "6^4,4^11,2^22,1^3,0^28",
        false,
        MMOrder::Better,
    ),
    row(
        "comp04",
        57,
        "7,6^3,5^4,4^2,2,0^46",
        "6^4,4^2,2^4,1,0^46",
        false,
        MMOrder::Better,
    ),
    row(
        "comp05",
        139,
        "41^2,36^7,35^5,32^5,31^6,30^9,28,27^7,26^2,25^14",
        "19^2,18^3,17^3,16^5,15^2,14^15,13^5",
        true,
        MMOrder::Better,
    ),
    row(
        "comp06",
        70,
        "12,7^2,5^4,2^3,0^60",
        "12,4^2,2^30,1^13,0^24",
        false,
        MMOrder::Better,
    ),
    row("comp07", 77, "6,0^76", "6,2^23,1^24,0^29", false, MMOrder::Worse),
    row(
        "comp08",
        61,
        "7,6^3,5^4,4^2,2^2,0^49",
        "6^4,4^2,2^7,1^5,0^43",
        false,
        MMOrder::Better,
    ),
    row(
        "comp09",
        75,
        "10^5,9,7^10,6^6,5^10,4,2,0^41",
        "6^9,4^14,2^17,0^35",
        false,
        MMOrder::Better,
    ),
    row("comp10", 67, "2^2,0^65", "2^19,1^6,0^42", false, MMOrder::Worse),
    row("comp11", 13, "0^13", "0^13", false, MMOrder::Equal),
    row(
        "comp12",
        150,
        "45,30^14,28,27^2,26^5,25^19,22^4,21^6,20^8,19",
        "10^3,9^6,8^31,7^7,6^43,5^2,4^36,3^2,2^16,1,0^3",
        true,
        MMOrder::Better,
    ),
    row(
        "comp13",
        66,
        "8,7,6^5,5^7,4^2,2^3,0^47",
        "6^6,4^4,2^13,1^6,0^37",
        false,
        MMOrder::Better,
    ),
    row(
        "comp14",
        60,
        "8^4,7,5^2,2^6,0^47",
        "8^4,4^2,3,2^18,0^35",
        false,
        MMOrder::Better,
    ),
    row(
        "comp15",
        68,
        "10^3,9^3,7,6^4,5^13,4,2^7,0^36",
        "6^4,4^11,2^23,1^2,0^28",
        false,
        MMOrder::Better,
    ),
    row("comp16", 71, "7^2,5^7,4,0^61", "4^5,2^16,1^4,0^46", false, MMOrder::Better),
    row(
        "comp17",
        70,
        "10^2,6^3,5^9,2^4,0^52",
        "10^2,6^2,4^7,3,2^25,1^7,0^26",
        false,
        MMOrder::Better,
    ),
    row(
        "comp18",
        52,
        "17,15,14,13,11,10,9^2,5^19,2^2,0^23",
        "4^20,2^11,1^5,0^16",
        false,
        MMOrder::Better,
    ),
    row(
        "comp19",
        66,
        "13,7,6^4,5^2,4,2^7,0^50",
        "6^4,4^6,2^15,1^14,0^27",
        false,
        MMOrder::Better,
    ),
    row("comp20", 78, "2^2,0^76", "4^5,3^3,2^31,1^7,0^32", false, MMOrder::Worse),
    row(
        "comp21",
        78,
        "12,11,10^4,9,7^4,6^4,5^12,4,2^3,1^2,0^45",
        "10,6^4,5,4^15,3,2^36,1^3,0^17",
        false,
        MMOrder::Better,
    ),
];

const fn row(
    name: &'static str,
    curricula: usize,
    known_best: &'static str,
    maxmin: &'static str,
    elided: bool,
    expected: MMOrder,
) -> OrderingRow {
    OrderingRow {
        name,
        curricula,
        known_best,
        maxmin,
        elided,
        expected,
    }
}

#[test]
fn criterion_2_maxmin_orderings() {
    let mut better = 0;
    for r in ORDERING_ROWS {
        let expand = |text: &str| -> Vec<u32> {
            let mut v = parse_allocation(text).unwrap();
            if r.elided {
                assert!(v.len() <= r.curricula, "{}: truncated vector too long", r.name);
                v.resize(r.curricula, 0);
            } else {
                assert_eq!(v.len(), r.curricula, "{}: counts must sum to k", r.name);
            }
            v
        };
        let kb = expand(r.known_best);
        let mm = expand(r.maxmin);
        if r.elided {
            // The zero fill must be provably irrelevant: the comparison is
            // decided at the very first sorted entry.
            let kb_head = kb.iter().max().unwrap();
            let mm_head = mm.iter().max().unwrap();
            assert_ne!(kb_head, mm_head, "{}: fill would be examined", r.name);
        }
        assert_eq!(
            mm_compare(&mm, &kb).unwrap(),
            r.expected,
            "{}: unexpected ordering",
            r.name
        );
        if r.expected == MMOrder::Better {
            better += 1;
        }
    }
    assert_eq!(better, 15, "the solver improves 15 of 21 instances");
    println!("criterion 2 (max-min ordering vs known best, 21 rows): PASS");
}

// ---------------------------------------------------------------------------
// Fairness-math property suite over random vectors, plus the worked examples
// recomputed by the brute-force formula evaluators in `common`.

const PROPERTY_PAIRS: usize = 10_000;

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<u32> {
    (0..len).map(|_| rng.random_range(0..=20)).collect()
}

#[test]
fn criterion_3_fairness_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFA17);

    // Permutation invariance and antisymmetry.
    for _ in 0..PROPERTY_PAIRS {
        let n = rng.random_range(1..=8);
        let x = random_vec(&mut rng, n);
        let y = random_vec(&mut rng, n);
        let mut xp = x.clone();
        let mut yp = y.clone();
        xp.shuffle(&mut rng);
        yp.shuffle(&mut rng);

        let order = mm_compare(&x, &y).unwrap();
        assert_eq!(order, mm_compare(&xp, &yp).unwrap());
        let swapped = mm_compare(&y, &x).unwrap();
        match order {
            MMOrder::Better => assert_eq!(swapped, MMOrder::Worse),
            MMOrder::Equal => assert_eq!(swapped, MMOrder::Equal),
            MMOrder::Worse => assert_eq!(swapped, MMOrder::Better),
        }

        let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let xpf: Vec<f64> = xp.iter().map(|&v| v as f64).collect();
        assert_eq!(jain_index(&xf).ok(), jain_index(&xpf).ok());

        if order == MMOrder::Better {
            let d = 1e-3;
            assert_eq!(delta_e_lex(&x, &y).unwrap(), delta_e_lex(&xp, &yp).unwrap());
            assert_eq!(
                delta_e_cw(&x, &y, d).unwrap(),
                delta_e_cw(&xp, &yp, d).unwrap()
            );
            assert_eq!(
                delta_e_ps(&x, &y, d).unwrap(),
                delta_e_ps(&xp, &yp, d).unwrap()
            );
        }
    }

    // Pareto consistency: worsening some entries can never help, and the
    // energy differences of a strictly worse candidate are positive with
    // delta_e_lex confined to {1/n, ..., 1}.
    for _ in 0..PROPERTY_PAIRS {
        let n = rng.random_range(1..=8);
        let x = random_vec(&mut rng, n);
        let mut worse: Vec<u32> = {
            let mut s = x.clone();
            s.sort_unstable_by(|a, b| b.cmp(a));
            s
        };
        for v in worse.iter_mut() {
            *v += rng.random_range(0..=3);
        }
        let bump = rng.random_range(0..n);
        worse[bump] += rng.random_range(1..=3);
        worse.shuffle(&mut rng);

        assert_eq!(mm_compare(&x, &worse).unwrap(), MMOrder::Better);

        let d = 1e-3;
        assert!(delta_e_cw(&x, &worse, d).unwrap() > 0.0);
        assert!(delta_e_ps(&x, &worse, d).unwrap() > 0.0);
        let lex = delta_e_lex(&x, &worse).unwrap();
        assert!(lex >= 1.0 / n as f64 - 1e-12 && lex <= 1.0 + 1e-12);
        let scaled = lex * n as f64;
        assert!((scaled - scaled.round()).abs() < 1e-9, "lex value off-grid");

        // Agreement with the brute-force formula evaluators.
        assert!((lex - common::oracle_lex(&x, &worse)).abs() < 1e-12);
        assert!(
            (delta_e_cw(&x, &worse, d).unwrap() - common::oracle_cw(&x, &worse, d)).abs()
                < 1e-9 * common::oracle_cw(&x, &worse, d).max(1.0)
        );
        assert!(
            (delta_e_ps(&x, &worse, d).unwrap() - common::oracle_ps(&x, &worse, d)).abs()
                < 1e-9 * common::oracle_ps(&x, &worse, d).max(1.0)
        );
    }

    // Jain range and scale invariance.
    for _ in 0..PROPERTY_PAIRS {
        let n = rng.random_range(1..=8);
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(0..=20) as f64).collect();
        if v.iter().all(|&x| x == 0.0) {
            v[rng.random_range(0..n)] = rng.random_range(1..=20) as f64;
        }
        let j = jain_index(&v).unwrap();
        assert!(j >= 1.0 / n as f64 - 1e-12 && j <= 1.0 + 1e-12);
        assert!((j - common::brute_jain(&v)).abs() < 1e-12);
        let c = rng.random_range(1..=1000) as f64 / 100.0;
        let scaled: Vec<f64> = v.iter().map(|&x| c * x).collect();
        assert!((jain_index(&scaled).unwrap() - j).abs() < 1e-9);
    }

    // Worked examples, frozen from the brute-force evaluators.
    let d = 1e-3;
    let cases_lex: &[(&[u32], &[u32], f64)] = &[
        (&[5, 0], &[7, 0], 1.0),
        (&[5, 3, 0, 0], &[5, 4, 0, 0], 0.75),
        (&[5, 0], &[5, 2], 0.5),
    ];
    for &(x, y, expected) in cases_lex {
        let got = delta_e_lex(x, y).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - common::oracle_lex(x, y)).abs() < 1e-12);
    }
    let cases_cw: &[(&[u32], &[u32], f64)] = &[
        (&[0, 5], &[0, 7], 0.399_920_015_996_800_6),
        (&[0, 5], &[2, 5], 2000.0),
        (&[5, 3], &[5, 4], 1000.0),
    ];
    for &(x, y, expected) in cases_cw {
        let got = delta_e_cw(x, y, d).unwrap();
        assert!((got - expected).abs() < 1e-6 * expected.max(1.0));
        assert!((got - common::oracle_cw(x, y, d)).abs() < 1e-12 * expected.max(1.0));
    }
    let cases_ps: &[(&[u32], &[u32], f64)] = &[
        (&[5, 0], &[7, 0], 0.399_920_015_996_800_6),
        (&[5, 3], &[5, 4], 0.499_500_499_500_499_6),
        (&[5, 2, 0], &[5, 3, 0], 0.142_816_338_189_088_83),
    ];
    for &(x, y, expected) in cases_ps {
        let got = delta_e_ps(x, y, d).unwrap();
        assert!((got - expected).abs() < 1e-9, "ps({x:?},{y:?}) = {got}");
        assert!((got - common::oracle_ps(x, y, d)).abs() < 1e-12);
    }

    println!(
        "criterion 3 (fairness properties over {PROPERTY_PAIRS} pairs per law + worked values): PASS"
    );
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_4_cooling_contract() {
    for (tmax, tmin, timeout) in [(5.0, 0.01, 192.0), (20.0, 0.01, 192.0), (7.5, 0.3, 11.0)] {
        let p = SAParams {
            theta_max: tmax,
            theta_min: tmin,
            timeout_s: timeout,
            ..SAParams::mmf_defaults()
        };
        let rel = |got: f64, want: f64| (got - want).abs() / want;
        assert!(rel(temperature_at(&p, 0.0), tmax) < 1e-9);
        assert!(rel(temperature_at(&p, timeout), tmin) < 1e-9);
        assert!(rel(temperature_at(&p, timeout / 2.0), (tmax * tmin).sqrt()) < 1e-9);
    }
    println!("criterion 4 (cooling endpoints and geometric midpoint): PASS");
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_5_evaluator_oracle_equivalence() {
    let inst = common::toy_mmf();
    let all = common::enumerate_feasible(&inst);
    assert!(
        all.len() > 500 && all.len() < 10_000,
        "fixture should stay exhaustively enumerable, got {}",
        all.len()
    );
    for t in &all {
        let total = total_penalty(&inst, t).expect("enumerated timetables are feasible");
        assert_eq!(total, common::brute_total(&inst, t));
        let alloc = penalty_allocation(&inst, t).unwrap();
        assert_eq!(alloc.values(), &common::brute_allocation(&inst, t)[..]);
        let alloc_sum: u32 = alloc.iter().sum();
        assert!(alloc_sum >= total, "allocation sum is bounded below by the total");
    }

    // Incremental bookkeeping equals full re-evaluation across 1000 moves.
    let start = fairtt_core::build_initial(&inst, 0).unwrap();
    let mut state = SearchState::new(&inst, &start).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..1000 {
        let mv = state
            .propose(&mut rng)
            .expect("toy fixture always offers a neighbor");
        state.apply(&mv);
        let t = state.to_timetable();
        let alloc = penalty_allocation(&inst, &t)
            .unwrap_or_else(|e| panic!("move {i} broke feasibility: {e}"));
        assert_eq!(state.allocation(), alloc.values(), "move {i}");
        assert_eq!(state.total_penalty(), total_penalty(&inst, &t).unwrap());
    }

    println!(
        "criterion 5 (evaluator vs exhaustive recount on {} timetables + 1000 move deltas): PASS",
        all.len()
    );
}

// ---------------------------------------------------------------------------

fn maxmin_oracle_optimum(inst: &Instance, all: &[Timetable]) -> Vec<u32> {
    let mut best: Option<Vec<u32>> = None;
    for t in all {
        let mut alloc = common::brute_allocation(inst, t);
        alloc.sort_unstable_by(|a, b| b.cmp(a));
        best = Some(match best {
            None => alloc,
            Some(b) => {
                if alloc < b {
                    alloc
                } else {
                    b
                }
            }
        });
    }
    best.expect("fixture admits feasible timetables")
}

#[test]
fn criterion_6_mmf_solver_oracle() {
    let inst = common::toy_mmf();
    let all = common::enumerate_feasible(&inst);
    let oracle = maxmin_oracle_optimum(&inst, &all);

    let start = fairtt_core::build_initial(&inst, 0).unwrap();
    let runs: Vec<(Vec<u32>, bool)> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let params = SAParams {
                timeout_s: 10.0,
                seed,
                energy: EnergyKind::Cw,
                delta: 1e-3,
                ..SAParams::mmf_defaults()
            };
            let (best, trace) = solve_mmf(&inst, &start, &params).unwrap();
            let alloc = penalty_allocation(&inst, &best).expect("solver output is feasible");
            let monotone = trace.records.windows(2).all(|w| {
                mm_compare(&w[1].allocation, &w[0].allocation).unwrap() != MMOrder::Worse
            });
            (alloc.sorted_desc(), monotone)
        })
        .collect();

    let hits = runs.iter().filter(|(sorted, _)| *sorted == oracle).count();
    let monotone_all = runs.iter().all(|(_, m)| *m);
    assert!(monotone_all, "every trace must be non-worsening");
    assert!(
        hits >= 16,
        "oracle optimum {oracle:?} reached in only {hits}/20 runs"
    );
    println!(
        "criterion 6 (max-min solver hits oracle optimum {oracle:?} in {hits}/20 runs, all traces monotone): PASS"
    );
}

// ---------------------------------------------------------------------------

fn jfi_oracle_front(inst: &Instance, all: &[Timetable]) -> Vec<(u32, f64)> {
    let mut points: Vec<(u32, f64)> = Vec::new();
    for t in all {
        let alloc = common::brute_allocation(inst, t);
        let total = common::brute_total(inst, t);
        let max = *alloc.iter().max().unwrap();
        let shifted: Vec<f64> = alloc.iter().map(|&v| (max - v) as f64).collect();
        let unfairness = if shifted.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            1.0 - common::brute_jain(&shifted)
        };
        points.push((total, unfairness));
    }
    let mut front: Vec<(u32, f64)> = Vec::new();
    for &(p, u) in &points {
        let dominated = points
            .iter()
            .any(|&(p2, u2)| (p2 <= p && u2 <= u) && (p2 < p || u2 < u));
        if !dominated && !front.iter().any(|&(fp, fu)| fp == p && (fu - u).abs() < 1e-12) {
            front.push((p, u));
        }
    }
    front.sort_by_key(|&(p, _)| p);
    front
}

#[test]
fn criterion_7_jfi_solver_oracle() {
    let inst = common::toy_jfi();
    let all = common::enumerate_feasible(&inst);
    let front = jfi_oracle_front(&inst, &all);
    assert!(
        (2..=3).contains(&front.len()),
        "fixture front must have 2-3 points, got {front:?}"
    );

    let start = fairtt_core::build_initial(&inst, 0).unwrap();
    let hits: usize = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let params = SAParams {
                timeout_s: 10.0,
                seed,
                ..SAParams::jfi_defaults()
            };
            let archive = solve_jfi(&inst, &start, &params).unwrap();
            // Entries are feasible and mutually non-dominated.
            for e in archive.entries() {
                assert!(fairtt_core::check_hard(&inst, &e.timetable).is_empty());
            }
            for a in archive.entries() {
                for b in archive.entries() {
                    assert!(
                        a.objective == b.objective
                            || !fairtt_core::dominates(&a.objective, &b.objective)
                    );
                }
            }
            let mut got: Vec<(u32, f64)> = archive
                .objectives()
                .map(|o| (o.penalty, o.unfairness))
                .collect();
            got.sort_by_key(|&(p, _)| p);
            let matches = got.len() == front.len()
                && got
                    .iter()
                    .zip(&front)
                    .all(|(g, f)| g.0 == f.0 && (g.1 - f.1).abs() < 1e-9);
            usize::from(matches)
        })
        .sum();

    assert!(
        hits >= 16,
        "full front {front:?} recovered in only {hits}/20 runs"
    );
    println!(
        "criterion 7 (bi-objective solver recovers the {}-point front in {hits}/20 runs): PASS",
        front.len()
    );
}

// ---------------------------------------------------------------------------
// Wilcoxon exactness: an independent recursive enumeration oracle.

fn oracle_midranks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .chain(b)
        .copied()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut ranks = vec![0.0; pooled.len()];
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for k in i..j {
            ranks[pooled[k].1] = avg;
        }
        i = j;
    }
    ranks
}

fn oracle_exact_p(a: &[f64], b: &[f64]) -> f64 {
    let ranks = oracle_midranks(a, b);
    let m = a.len();
    let observed: f64 = ranks[..m].iter().sum();
    let total = ranks.len();

    fn choose_sums(ranks: &[f64], start: usize, left: usize, acc: f64, out: &mut Vec<f64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        if start + left > ranks.len() {
            return;
        }
        choose_sums(ranks, start + 1, left - 1, acc + ranks[start], out);
        choose_sums(ranks, start + 1, left, acc, out);
    }
    let mut sums = Vec::new();
    choose_sums(&ranks[..total], 0, m, 0.0, &mut sums);
    let le = sums.iter().filter(|&&s| s <= observed + 1e-9).count();
    le as f64 / sums.len() as f64
}

#[test]
fn criterion_8_wilcoxon_exactness() {
    // The canonical fully separated case is exact.
    let r = wilcoxon_one_sided(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
    assert_eq!(r.p_value, 0.05);

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for m in 1..=9usize {
        for n in 1..=9usize {
            if m + n > 10 {
                continue;
            }
            for _ in 0..40 {
                // Small integer draws force plenty of ties.
                let a: Vec<f64> = (0..m).map(|_| rng.random_range(0..5) as f64).collect();
                let b: Vec<f64> = (0..n).map(|_| rng.random_range(0..5) as f64).collect();
                if a.iter().chain(&b).all(|&v| v == a[0]) {
                    continue;
                }
                let got = wilcoxon_one_sided(&a, &b).unwrap().p_value;
                let want = oracle_exact_p(&a, &b);
                assert!(
                    (got - want).abs() < 1e-12,
                    "m={m} n={n} a={a:?} b={b:?}: {got} vs {want}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
    println!("criterion 8 (wilcoxon exact enumeration agreement, {checked} sampled cases): PASS");
}

// ---------------------------------------------------------------------------
// Glue sanity: the acceptance-probability contract at the API level.

#[test]
fn acceptance_probability_contract() {
    let p = acceptance_probability(&[2, 2], &[2, 2], 1.0, EnergyKind::Lex, 1e-3);
    assert_eq!(p, 1.0);
    let p = acceptance_probability(&[2, 2], &[1, 2], 1.0, EnergyKind::Lex, 1e-3);
    assert_eq!(p, 1.0, "better candidates are always accepted");
    let p = acceptance_probability(&[2, 2], &[3, 2], 1.0, EnergyKind::Lex, 1e-3);
    assert!(p > 0.0 && p < 1.0);
}
