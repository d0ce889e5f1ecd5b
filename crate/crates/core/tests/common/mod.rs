//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's feature, statistics or discovery code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use rand::Rng;
use revmine::ingest::{Key, KeystrokeEvent, SubmissionEntry};
use revmine::sessionizer::Session;

/// Naive walk over raw events producing the six feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveFeatures {
    pub num_revisions: u64,
    pub num_edits: u64,
    pub time_revising_s: f64,
    pub di_ratio: Option<f64>,
    pub efficiency: Option<f64>,
    pub pause_mean_s: Option<f64>,
}

pub fn naive_features(draft: &SubmissionEntry, revisions: &[SubmissionEntry]) -> NaiveFeatures {
    let mut rev_ins = 0u64;
    let mut rev_del = 0u64;
    let mut rev_time = 0u64;
    let mut gap_total = 0u64;
    let mut gap_n = 0u64;
    for entry in revisions {
        let mut prev: Option<u64> = None;
        for e in &entry.keystrokes {
            match &e.key {
                Key::Character(_) => rev_ins += 1,
                Key::Backspace => rev_del += 1,
                Key::Delete => rev_del += 1,
                Key::Other(_) => {}
            }
            if let Some(p) = prev {
                gap_total += e.time_ms - p;
                gap_n += 1;
            }
            prev = Some(e.time_ms);
        }
        if entry.keystrokes.len() >= 2 {
            rev_time +=
                entry.keystrokes[entry.keystrokes.len() - 1].time_ms - entry.keystrokes[0].time_ms;
        }
    }
    let mut all_ins = rev_ins;
    let mut all_time = rev_time;
    for e in &draft.keystrokes {
        if let Key::Character(_) = e.key {
            all_ins += 1;
        }
    }
    if draft.keystrokes.len() >= 2 {
        all_time +=
            draft.keystrokes[draft.keystrokes.len() - 1].time_ms - draft.keystrokes[0].time_ms;
    }
    NaiveFeatures {
        num_revisions: revisions.len() as u64,
        num_edits: rev_ins + rev_del,
        time_revising_s: rev_time as f64 / 1000.0,
        di_ratio: if rev_ins == 0 {
            None
        } else {
            Some(rev_del as f64 / rev_ins as f64)
        },
        efficiency: if all_time == 0 {
            None
        } else {
            Some(all_ins as f64 * 1000.0 / all_time as f64)
        },
        pause_mean_s: if gap_n == 0 {
            None
        } else {
            Some(gap_total as f64 / 1000.0 / gap_n as f64)
        },
    }
}

pub fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())),
        _ => false,
    }
}

pub fn random_entry<R: Rng>(rng: &mut R, minute: u32) -> SubmissionEntry {
    let n = rng.gen_range(0..60);
    let mut t = rng.gen_range(0..5000u64);
    let mut keystrokes = Vec::with_capacity(n);
    for _ in 0..n {
        t += rng.gen_range(0..2000);
        let key = match rng.gen_range(0..10) {
            0..=5 => Key::Character(rng.gen_range(b'a'..=b'z') as char),
            6 => Key::Character(' '),
            7 => Key::Backspace,
            8 => Key::Delete,
            _ => Key::Other("Shift".into()),
        };
        keystrokes.push(KeystrokeEvent::new(t, key));
    }
    SubmissionEntry {
        user_id: "r".into(),
        submitted_at: NaiveDate::from_ymd_opt(2023, 1, 1)
            .unwrap()
            .and_hms_opt(0, minute, 0)
            .unwrap(),
        keystrokes,
        text: String::new(),
    }
}

pub fn random_session<R: Rng>(rng: &mut R) -> Session {
    let n_rev = rng.gen_range(0..6);
    Session {
        user_id: "r".into(),
        recipe_ordinal: 1,
        draft_index: 0,
        draft: random_entry(rng, 0),
        revisions: (0..n_rev).map(|i| random_entry(rng, i + 1)).collect(),
    }
}

/// Adjacent-pair multiset and node set by brute force.
pub fn brute_pairs<A: Ord + Clone>(traces: &[Vec<A>]) -> (BTreeSet<A>, BTreeMap<(A, A), u64>) {
    let mut nodes = BTreeSet::new();
    let mut pairs = BTreeMap::new();
    for t in traces {
        for i in 0..t.len() {
            nodes.insert(t[i].clone());
            if i + 1 < t.len() {
                *pairs.entry((t[i].clone(), t[i + 1].clone())).or_insert(0) += 1;
            }
        }
    }
    (nodes, pairs)
}

/// All sequences of length 0..=max_len over `alphabet`.
pub fn all_traces<A: Clone>(alphabet: &[A], max_len: usize) -> Vec<Vec<A>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &frontier {
            for a in alphabet {
                let mut t: Vec<A> = prefix.clone();
                t.push(a.clone());
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Welch reference values (t, df, p) from a standard statistics library,
/// computed once and frozen.
/// Sample a, sample b, t, df, p.
pub type WelchCase = (&'static [f64], &'static [f64], f64, f64, f64);

pub const WELCH_REFERENCE: [WelchCase; 10] = [
    (
        &[1.0, 2.0, 3.0, 4.0, 5.0],
        &[2.0, 4.0, 6.0, 8.0, 10.0],
        -1.8973665961010275,
        5.882352941176471,
        0.10753119493062718,
    ),
    (
        &[1.5, 2.5, 3.5, 2.0],
        &[4.0, 5.5, 6.0, 5.0, 7.25],
        -4.619963966197505,
        6.948512600766245,
        0.002473381498283154,
    ),
    (
        &[0.2, 0.9, 1.4, 0.3, 0.8, 1.1],
        &[0.5, 0.7],
        0.8584324154740791,
        5.882905873994774,
        0.4242428726467301,
    ),
    (
        &[10.0, 12.0, 9.0, 11.0, 10.0, 13.0, 8.0],
        &[20.0, 5.0, 30.0, 2.0, 15.0],
        -0.7746748583731058,
        4.130809035907096,
        0.48048909277006274,
    ),
    (
        &[3.1, 3.1, 3.2],
        &[3.0, 2.9, 3.3, 3.1],
        0.6363636363636391,
        3.849855377333685,
        0.5604003905156918,
    ),
    (
        &[100.0, 250.0, 75.0, 300.0, 180.0],
        &[90.0, 95.0, 110.0, 105.0],
        1.87974334942019,
        4.090589822892865,
        0.1317376613009472,
    ),
    (
        &[1.0, 1.0, 1.0, 1.0, 2.0],
        &[1.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0],
        -2.6736956911078438,
        7.773808115461967,
        0.02892915075051429,
    ),
    (
        &[-5.5, -3.2, -4.1, -6.0],
        &[-1.0, 2.0, 0.5, -0.5, 1.5],
        -6.058537971568815,
        6.54648419065597,
        0.0006610988284887703,
    ),
    (
        &[0.001, 0.002, 0.0015],
        &[0.0021, 0.0025, 0.0030, 0.0019],
        -2.3196278794815197,
        4.37211837957568,
        0.07558349664337644,
    ),
    (
        &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
        &[
            1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5, 9.5, 10.5, 11.5, 30.0,
        ],
        -1.2517938635829577,
        15.035412470809781,
        0.22976984503930103,
    ),
];
