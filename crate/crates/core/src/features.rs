//! Per-(user, recipe) self-regulated-learning feature variables.
//!
//! Edit counts, time spent revising, the deletion/insertion ratio and the
//! pause time describe the revision entries of a session only. Efficiency
//! describes general writing speed, so it uses every entry of the session.

use std::io::{self, Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{Corpus, Gender, Group, Key, KeystrokeEvent, SubmissionEntry};
use crate::sessionizer::{Session, UserSessions};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("features table: {0}")]
    Csv(#[from] csv::Error),
    #[error("features table line {line}: {message}")]
    Field { line: usize, message: String },
    #[error("features table: expected header `{expected}`")]
    Header { expected: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EditCounts {
    pub insertions: u64,
    pub deletions: u64,
}

impl EditCounts {
    pub fn total(&self) -> u64 {
        self.insertions + self.deletions
    }
}

impl std::ops::Add for EditCounts {
    type Output = EditCounts;

    fn add(self, rhs: EditCounts) -> EditCounts {
        EditCounts {
            insertions: self.insertions + rhs.insertions,
            deletions: self.deletions + rhs.deletions,
        }
    }
}

/// Characters (whitespace included) are insertions; Backspace and Delete are
/// deletions; anything else is ignored.
pub fn count_edits(keystrokes: &[KeystrokeEvent]) -> EditCounts {
    keystrokes.iter().fold(EditCounts::default(), |mut acc, e| {
        match e.key {
            Key::Character(_) => acc.insertions += 1,
            Key::Backspace | Key::Delete => acc.deletions += 1,
            Key::Other(_) => {}
        }
        acc
    })
}

/// Last minus first keystroke time, in milliseconds. Zero below two events.
pub fn active_time_ms(keystrokes: &[KeystrokeEvent]) -> u64 {
    match (keystrokes.first(), keystrokes.last()) {
        (Some(first), Some(last)) => last.time_ms.saturating_sub(first.time_ms),
        _ => 0,
    }
}

fn gaps_ms(keystrokes: &[KeystrokeEvent]) -> impl Iterator<Item = u64> + '_ {
    keystrokes
        .windows(2)
        .map(|w| w[1].time_ms.saturating_sub(w[0].time_ms))
}

/// Mean inter-key interval in seconds; `None` for fewer than two events.
pub fn pause_mean(keystrokes: &[KeystrokeEvent]) -> Option<f64> {
    pooled_pause_mean(std::iter::once(keystrokes))
}

/// Mean over the gaps of several streams, never bridging two streams.
pub fn pooled_pause_mean<'a>(
    streams: impl IntoIterator<Item = &'a [KeystrokeEvent]>,
) -> Option<f64> {
    let (sum, count) = streams
        .into_iter()
        .flat_map(gaps_ms)
        .fold((0u64, 0u64), |(s, c), g| (s + g, c + 1));
    (count > 0).then(|| sum as f64 / count as f64 / 1000.0)
}

/// The six feature variables of one session. `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRecord {
    pub user_id: String,
    pub recipe_ordinal: usize,
    pub num_revisions: u64,
    pub num_edits: u64,
    pub time_revising_s: f64,
    pub di_ratio: Option<f64>,
    pub efficiency_ins_per_s: Option<f64>,
    pub pause_mean_s: Option<f64>,
}

pub fn session_features(session: &Session) -> FeatureRecord {
    let revisions: Vec<&[KeystrokeEvent]> = session
        .revisions
        .iter()
        .map(|e| e.keystrokes.as_slice())
        .collect();

    let rev_edits = revisions
        .iter()
        .map(|k| count_edits(k))
        .fold(EditCounts::default(), |a, b| a + b);
    let rev_time_ms: u64 = revisions.iter().map(|k| active_time_ms(k)).sum();

    let all_insertions: u64 = session
        .entries()
        .map(|e| count_edits(&e.keystrokes).insertions)
        .sum();
    let all_time_ms: u64 = session
        .entries()
        .map(|e| active_time_ms(&e.keystrokes))
        .sum();

    FeatureRecord {
        user_id: session.user_id.clone(),
        recipe_ordinal: session.recipe_ordinal,
        num_revisions: session.revisions.len() as u64,
        num_edits: rev_edits.total(),
        time_revising_s: rev_time_ms as f64 / 1000.0,
        di_ratio: (rev_edits.insertions > 0)
            .then(|| rev_edits.deletions as f64 / rev_edits.insertions as f64),
        efficiency_ins_per_s: (all_time_ms > 0)
            .then(|| all_insertions as f64 / (all_time_ms as f64 / 1000.0)),
        pause_mean_s: pooled_pause_mean(revisions.iter().copied()),
    }
}

/// A feature record joined with the participant's profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRow {
    pub group: Option<Group>,
    pub gender: Gender,
    #[serde(flatten)]
    pub record: FeatureRecord,
}

pub fn extract_all(corpus: &Corpus, users: &[UserSessions]) -> Vec<FeatureRow> {
    let mut rows: Vec<FeatureRow> = users
        .iter()
        .flat_map(|u| &u.sessions)
        .map(|s| {
            let profile = corpus.profiles.get(&s.user_id);
            FeatureRow {
                group: profile.map(|p| p.group),
                gender: profile.map(|p| p.gender).unwrap_or_default(),
                record: session_features(s),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        (&a.record.user_id, a.record.recipe_ordinal)
            .cmp(&(&b.record.user_id, b.record.recipe_ordinal))
    });
    rows
}

/// Edit count of every revision entry of a session, in order.
pub fn revision_edit_counts(revisions: &[SubmissionEntry]) -> Vec<u64> {
    revisions
        .iter()
        .map(|e| count_edits(&e.keystrokes).total())
        .collect()
}

pub const CSV_HEADER: [&str; 10] = [
    "user_id",
    "group",
    "gender",
    "recipe",
    "num_revisions",
    "num_edits",
    "time_revising_s",
    "di_ratio",
    "efficiency",
    "pause_mean_s",
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the feature table; undefined values are empty fields.
pub fn write_features_csv<W: Write>(rows: &[FeatureRow], out: W) -> Result<(), FeatureError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let r = &row.record;
        w.write_record([
            r.user_id.clone(),
            row.group.map(|g| g.to_string()).unwrap_or_default(),
            row.gender.to_string(),
            r.recipe_ordinal.to_string(),
            r.num_revisions.to_string(),
            r.num_edits.to_string(),
            r.time_revising_s.to_string(),
            fmt_opt(r.di_ratio),
            fmt_opt(r.efficiency_ins_per_s),
            fmt_opt(r.pause_mean_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features_csv<R: Read>(input: R) -> Result<Vec<FeatureRow>, FeatureError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(FeatureError::Header {
            expected: CSV_HEADER.join(","),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let fail = |message: String| FeatureError::Field { line, message };
        let num = |i: usize| -> Result<u64, FeatureError> {
            record[i].parse::<u64>().map_err(|_| {
                fail(format!(
                    "{}: invalid integer `{}`",
                    CSV_HEADER[i], &record[i]
                ))
            })
        };
        let real = |i: usize| -> Result<Option<f64>, FeatureError> {
            if record[i].is_empty() {
                return Ok(None);
            }
            record[i].parse::<f64>().map(Some).map_err(|_| {
                fail(format!(
                    "{}: invalid number `{}`",
                    CSV_HEADER[i], &record[i]
                ))
            })
        };
        let group = match &record[1] {
            "" => None,
            g => Some(g.parse::<Group>().map_err(fail)?),
        };
        rows.push(FeatureRow {
            group,
            gender: record[2].parse::<Gender>().map_err(fail)?,
            record: FeatureRecord {
                user_id: record[0].to_string(),
                recipe_ordinal: num(3)? as usize,
                num_revisions: num(4)?,
                num_edits: num(5)?,
                time_revising_s: real(6)?.ok_or_else(|| fail("time_revising_s: missing".into()))?,
                di_ratio: real(7)?,
                efficiency_ins_per_s: real(8)?,
                pause_mean_s: real(9)?,
            },
        });
    }
    Ok(rows)
}
