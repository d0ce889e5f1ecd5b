//! Splits each user's chronological submissions into per-recipe sessions.
//!
//! A new session starts at the first entry whose text embedding has cosine
//! similarity below the threshold with the current session's first entry
//! (the anchor). Detected boundaries can then be corrected by hand through
//! an override table.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{cosine_similarity, embed, TextVector, VectorStore};
use crate::ingest::{Corpus, SubmissionEntry};

pub const DEFAULT_THRESHOLD: f64 = 0.995;
pub const DEFAULT_MAX_RECIPES: usize = 3;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
    #[error("override for user `{user}`: index {index} out of range (user has {count} entries)")]
    IndexOutOfRange {
        user: String,
        index: usize,
        count: usize,
    },
    #[error("override for user `{user}`: index 0 always starts a session and cannot be removed")]
    RemoveFirst { user: String },
    #[error("override for unknown user `{0}`")]
    UnknownUser(String),
    #[error("override file line {line}: {message}")]
    OverrideFormat { line: usize, message: String },
    #[error("session manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Entry indices (into one user's chronological list) that start a new
/// recipe. Index 0 is implicit and never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySet(Vec<usize>);

impl BoundarySet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sorts and deduplicates; drops index 0.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = indices.into_iter().filter(|&i| i > 0).collect();
        Self(set.into_iter().collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }
}

/// Result of scanning one user's entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Segmentation {
    pub boundaries: BoundarySet,
    /// Entries whose similarity to the anchor was undefined (zero embedding);
    /// they never start a session and are left for manual review.
    pub undefined: Vec<usize>,
}

/// Boundary scan over precomputed text vectors.
pub fn find_boundaries_in(
    vectors: &[TextVector],
    threshold: f64,
) -> Result<Segmentation, SessionError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(SessionError::InvalidThreshold(threshold));
    }
    let mut seg = Segmentation::default();
    let mut boundaries = Vec::new();
    let mut anchor = 0usize;
    for n in 1..vectors.len() {
        match cosine_similarity(&vectors[anchor], &vectors[n])
            .expect("vectors share the store dimension")
        {
            Some(sim) if sim < threshold => {
                boundaries.push(n);
                anchor = n;
            }
            Some(_) => {}
            None => seg.undefined.push(n),
        }
    }
    seg.boundaries = BoundarySet(boundaries);
    Ok(seg)
}

pub fn find_boundaries(
    entries: &[SubmissionEntry],
    store: &VectorStore,
    threshold: f64,
) -> Result<Segmentation, SessionError> {
    let vectors: Vec<TextVector> = entries.iter().map(|e| embed(&e.text, store)).collect();
    find_boundaries_in(&vectors, threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverrideOp {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Override {
    pub user_id: String,
    pub op: OverrideOp,
    pub index: usize,
}

/// Reads `user_id,op,index` rows. A header row starting with `user_id` is
/// skipped.
pub fn parse_overrides<R: Read>(input: R) -> Result<Vec<Override>, SessionError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| SessionError::OverrideFormat {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if out.is_empty() && record.get(0) == Some("user_id") {
            continue;
        }
        let fail = |message: String| SessionError::OverrideFormat { line, message };
        if record.len() != 3 {
            return Err(fail(format!("expected 3 fields, found {}", record.len())));
        }
        let op = match &record[1] {
            "add" => OverrideOp::Add,
            "remove" => OverrideOp::Remove,
            other => {
                return Err(fail(format!(
                    "unknown op `{other}` (expected add or remove)"
                )))
            }
        };
        let index = record[2]
            .parse::<usize>()
            .map_err(|_| fail(format!("invalid index `{}`", &record[2])))?;
        out.push(Override {
            user_id: record[0].to_string(),
            op,
            index,
        });
    }
    Ok(out)
}

/// Applies the overrides that concern `user_id` to its boundary set.
pub fn apply_overrides(
    user_id: &str,
    entry_count: usize,
    boundaries: &BoundarySet,
    overrides: &[Override],
) -> Result<BoundarySet, SessionError> {
    let mut set: BTreeSet<usize> = boundaries.0.iter().copied().collect();
    for o in overrides.iter().filter(|o| o.user_id == user_id) {
        if o.index >= entry_count {
            return Err(SessionError::IndexOutOfRange {
                user: user_id.to_string(),
                index: o.index,
                count: entry_count,
            });
        }
        match o.op {
            OverrideOp::Add => {
                if o.index > 0 {
                    set.insert(o.index);
                }
            }
            OverrideOp::Remove => {
                if o.index == 0 {
                    return Err(SessionError::RemoveFirst {
                        user: user_id.to_string(),
                    });
                }
                set.remove(&o.index);
            }
        }
    }
    Ok(BoundarySet(set.into_iter().collect()))
}

/// One recipe: the first submission and its re-submissions.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub user_id: String,
    /// 1-based.
    pub recipe_ordinal: usize,
    /// Index of the draft in the user's entry list.
    pub draft_index: usize,
    pub draft: SubmissionEntry,
    pub revisions: Vec<SubmissionEntry>,
}

impl Session {
    pub fn revision_indices(&self) -> Vec<usize> {
        (1..=self.revisions.len())
            .map(|k| self.draft_index + k)
            .collect()
    }

    /// Draft followed by revisions.
    pub fn entries(&self) -> impl Iterator<Item = &SubmissionEntry> {
        std::iter::once(&self.draft).chain(&self.revisions)
    }
}

pub fn build_sessions(entries: &[SubmissionEntry], boundaries: &BoundarySet) -> Vec<Session> {
    if entries.is_empty() {
        return Vec::new();
    }
    let mut starts = vec![0];
    starts.extend(boundaries.0.iter().copied().filter(|&b| b < entries.len()));
    let mut ends: Vec<usize> = starts[1..].to_vec();
    ends.push(entries.len());
    starts
        .iter()
        .zip(&ends)
        .enumerate()
        .map(|(i, (&start, &end))| Session {
            user_id: entries[start].user_id.clone(),
            recipe_ordinal: i + 1,
            draft_index: start,
            draft: entries[start].clone(),
            revisions: entries[start + 1..end].to_vec(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionizeOptions {
    pub threshold: f64,
    pub max_recipes: usize,
}

impl Default for SessionizeOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            max_recipes: DEFAULT_MAX_RECIPES,
        }
    }
}

/// Sessions of one user plus review flags.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSessions {
    pub user_id: String,
    pub boundaries: BoundarySet,
    pub undefined: Vec<usize>,
    pub sessions: Vec<Session>,
}

impl UserSessions {
    pub fn exceeds(&self, max_recipes: usize) -> bool {
        self.sessions.len() > max_recipes
    }
}

/// Sessionizes every user of the corpus, in user-id order.
pub fn sessionize_corpus(
    corpus: &Corpus,
    store: &VectorStore,
    overrides: &[Override],
    options: SessionizeOptions,
) -> Result<Vec<UserSessions>, SessionError> {
    for o in overrides {
        if !corpus.entries.contains_key(&o.user_id) {
            return Err(SessionError::UnknownUser(o.user_id.clone()));
        }
    }
    let mut out = Vec::with_capacity(corpus.entries.len());
    for (user, entries) in &corpus.entries {
        let seg = find_boundaries(entries, store, options.threshold)?;
        let boundaries = apply_overrides(user, entries.len(), &seg.boundaries, overrides)?;
        let sessions = build_sessions(entries, &boundaries);
        out.push(UserSessions {
            user_id: user.clone(),
            boundaries,
            undefined: seg.undefined,
            sessions,
        });
    }
    Ok(out)
}

/// One JSON-lines row of the session manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub user: String,
    pub recipe_ordinal: usize,
    pub draft_index: usize,
    pub revision_indices: Vec<usize>,
    pub flags: Vec<String>,
}

pub fn manifest_rows(users: &[UserSessions], max_recipes: usize) -> Vec<ManifestRow> {
    let mut rows = Vec::new();
    for u in users {
        for s in &u.sessions {
            let span = s.draft_index..s.draft_index + 1 + s.revisions.len();
            let mut flags: Vec<String> = u
                .undefined
                .iter()
                .filter(|i| span.contains(i))
                .map(|i| format!("undefined_similarity:{i}"))
                .collect();
            if s.recipe_ordinal > max_recipes {
                flags.push(format!("exceeds_max_recipes:{max_recipes}"));
            }
            rows.push(ManifestRow {
                user: u.user_id.clone(),
                recipe_ordinal: s.recipe_ordinal,
                draft_index: s.draft_index,
                revision_indices: s.revision_indices(),
                flags,
            });
        }
    }
    rows
}

pub fn write_manifest<W: Write>(rows: &[ManifestRow], mut out: W) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_manifest<R: BufRead>(input: R) -> Result<Vec<ManifestRow>, SessionError> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| SessionError::Manifest {
            line: i + 1,
            message: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

/// Rebuilds per-user sessions from a manifest and the corpus it was made from.
pub fn sessions_from_manifest(
    corpus: &Corpus,
    rows: &[ManifestRow],
) -> Result<Vec<UserSessions>, SessionError> {
    let mut per_user: BTreeMap<&str, (BTreeSet<usize>, Vec<usize>)> = BTreeMap::new();
    for row in rows {
        let entry = per_user.entry(row.user.as_str()).or_default();
        entry.0.insert(row.draft_index);
        for f in &row.flags {
            if let Some(idx) = f
                .strip_prefix("undefined_similarity:")
                .and_then(|s| s.parse().ok())
            {
                entry.1.push(idx);
            }
        }
    }
    let mut out = Vec::new();
    for (user, (drafts, undefined)) in per_user {
        let entries = corpus
            .entries
            .get(user)
            .ok_or_else(|| SessionError::UnknownUser(user.to_string()))?;
        if let Some(&bad) = drafts.iter().find(|&&d| d >= entries.len()) {
            return Err(SessionError::IndexOutOfRange {
                user: user.to_string(),
                index: bad,
                count: entries.len(),
            });
        }
        let boundaries = BoundarySet::from_indices(drafts);
        let sessions = build_sessions(entries, &boundaries);
        out.push(UserSessions {
            user_id: user.to_string(),
            boundaries,
            undefined,
            sessions,
        });
    }
    Ok(out)
}
