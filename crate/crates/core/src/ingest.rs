//! Parsing of raw experiment logs and participant profiles into a [`Corpus`].
//!
//! Two log layouts are accepted, one submission per line:
//!
//! * a comma-separated row `timestamp,user_id,[keystrokes...],"text"` where the
//!   keystroke field is a JSON array (it may contain commas) and the text is a
//!   JSON string literal;
//! * a JSON-lines record `{"ts": ..., "user": ..., "keys": [...], "text": ...}`.
//!
//! The layout is picked from the first non-blank byte of the source (`{` means
//! JSON lines). Malformed rows never abort a parse: they are skipped and
//! recorded as [`Diagnostic`]s.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

const CACHE_MAGIC: &[u8; 4] = b"RVMC";
const CACHE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("profile table: {0}")]
    ProfileHeader(String),
    #[error("corpus cache {path}: {reason}")]
    Cache { path: String, reason: String },
}

/// A keystroke array that could not be parsed. `offset` is a byte offset into
/// the raw array text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("keystroke parse error at byte {offset}: {message}")]
pub struct KeystrokeParseError {
    pub offset: usize,
    pub message: String,
}

/// Unit of the `time` field in raw keystroke records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeUnit {
    #[default]
    Millis,
    Seconds,
}

impl std::str::FromStr for TimeUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ms" | "millis" | "milliseconds" => Ok(TimeUnit::Millis),
            "s" | "sec" | "seconds" => Ok(TimeUnit::Seconds),
            other => Err(format!("unknown time unit `{other}` (expected ms or s)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Key {
    Character(char),
    Backspace,
    Delete,
    Other(String),
}

impl Key {
    /// Maps a raw key name. Single scalars are characters (whitespace
    /// included), `Backspace`/`Delete` are the deletion keys, and any other
    /// name is kept as [`Key::Other`].
    pub fn from_name(name: &str) -> Key {
        let mut chars = name.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Key::Character(c),
            _ => match name {
                "Backspace" => Key::Backspace,
                "Delete" => Key::Delete,
                other => Key::Other(other.to_string()),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            Key::Character(c) => c.to_string(),
            Key::Backspace => "Backspace".to_string(),
            Key::Delete => "Delete".to_string(),
            Key::Other(label) => label.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeystrokeEvent {
    /// Milliseconds since the start of the entry.
    pub time_ms: u64,
    pub key: Key,
}

impl KeystrokeEvent {
    pub fn new(time_ms: u64, key: Key) -> Self {
        Self { time_ms, key }
    }
}

/// Parsed keystroke stream plus whether it had to be re-sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedKeystrokes {
    pub events: Vec<KeystrokeEvent>,
    pub reordered: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmissionEntry {
    pub user_id: String,
    pub submitted_at: NaiveDateTime,
    pub keystrokes: Vec<KeystrokeEvent>,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    /// With adaptive feedback.
    G1,
    /// Without adaptive feedback.
    G2,
}

impl Group {
    pub const ALL: [Group; 2] = [Group::G1, Group::G2];

    pub fn as_str(&self) -> &'static str {
        match self {
            Group::G1 => "G1",
            Group::G2 => "G2",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "G1" => Ok(Group::G1),
            "G2" => Ok(Group::G2),
            other => Err(format!("unknown group `{other}` (expected G1 or G2)")),
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
    Other,
    #[default]
    Unknown,
}

impl Gender {
    pub fn as_str(&self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
            Gender::Other => "other",
            Gender::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "female" | "f" => Ok(Gender::Female),
            "male" | "m" => Ok(Gender::Male),
            "other" => Ok(Gender::Other),
            "unknown" | "" => Ok(Gender::Unknown),
            other => Err(format!("unknown gender `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    pub group: Group,
    pub gender: Gender,
    pub age: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceKind {
    Logs,
    Profiles,
}

/// A row that was skipped (or kept with a warning), with its 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub source: SourceKind,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let src = match self.source {
            SourceKind::Logs => "logs",
            SourceKind::Profiles => "profiles",
        };
        write!(f, "{src}:{}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    /// Entries per user, each list sorted by `submitted_at` (stable).
    pub entries: BTreeMap<String, Vec<SubmissionEntry>>,
    pub profiles: BTreeMap<String, UserProfile>,
    /// Number of non-blank log rows read.
    pub log_rows: usize,
    /// Skipped rows.
    pub diagnostics: Vec<Diagnostic>,
    /// Rows that were kept but needed fixing (e.g. unsorted keystrokes).
    pub warnings: Vec<Diagnostic>,
}

impl Corpus {
    pub fn user_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Users with log entries but no profile.
    pub fn unassigned(&self) -> Vec<&str> {
        self.entries
            .keys()
            .filter(|u| !self.profiles.contains_key(*u))
            .map(String::as_str)
            .collect()
    }

    pub fn group_of(&self, user_id: &str) -> Option<Group> {
        self.profiles.get(user_id).map(|p| p.group)
    }

    pub fn log_diagnostic_count(&self) -> usize {
        self.diagnostics
            .iter()
            .filter(|d| d.source == SourceKind::Logs)
            .count()
    }

    /// Writes the internal binary cache (magic, version, payload).
    pub fn save_cache(&self, path: &Path) -> Result<(), IngestError> {
        let io_err = |source| IngestError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut file = io::BufWriter::new(File::create(path).map_err(io_err)?);
        file.write_all(CACHE_MAGIC).map_err(io_err)?;
        file.write_all(&CACHE_VERSION.to_le_bytes())
            .map_err(io_err)?;
        bincode::serialize_into(&mut file, self).map_err(|e| IngestError::Cache {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        file.flush().map_err(io_err)
    }

    pub fn load_cache(path: &Path) -> Result<Corpus, IngestError> {
        let cache_err = |reason: String| IngestError::Cache {
            path: path.display().to_string(),
            reason,
        };
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|source| IngestError::Io {
                path: path.display().to_string(),
                source,
            })?;
        if bytes.len() < 8 || &bytes[..4] != CACHE_MAGIC {
            return Err(cache_err("not a corpus cache".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if version != CACHE_VERSION {
            return Err(cache_err(format!(
                "unsupported cache version {version} (expected {CACHE_VERSION})"
            )));
        }
        bincode::deserialize(&bytes[8..]).map_err(|e| cache_err(e.to_string()))
    }
}

#[derive(Deserialize)]
struct RawKeystroke {
    time: serde_json::Number,
    #[serde(alias = "character")]
    key: String,
}

fn convert_time(time: &serde_json::Number, unit: TimeUnit) -> Result<u64, String> {
    match unit {
        TimeUnit::Millis => time
            .as_u64()
            .ok_or_else(|| format!("time `{time}` is not a non-negative integer")),
        TimeUnit::Seconds => {
            let secs = time
                .as_f64()
                .filter(|s| s.is_finite() && *s >= 0.0)
                .ok_or_else(|| format!("time `{time}` is not a non-negative number"))?;
            Ok((secs * 1000.0).round() as u64)
        }
    }
}

fn byte_offset(raw: &str, line: usize, column: usize) -> usize {
    let line_start: usize = raw
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(raw.len())
}

/// Parses a serialized keystroke array with millisecond times.
pub fn parse_keystrokes(raw: &str) -> Result<ParsedKeystrokes, KeystrokeParseError> {
    parse_keystrokes_with_unit(raw, TimeUnit::Millis)
}

pub fn parse_keystrokes_with_unit(
    raw: &str,
    unit: TimeUnit,
) -> Result<ParsedKeystrokes, KeystrokeParseError> {
    let records: Vec<RawKeystroke> =
        serde_json::from_str(raw).map_err(|e| KeystrokeParseError {
            offset: byte_offset(raw, e.line(), e.column()),
            message: e.to_string(),
        })?;

    let mut events = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let time_ms = convert_time(&rec.time, unit).map_err(|message| KeystrokeParseError {
            offset: nth_record_offset(raw, i),
            message,
        })?;
        if rec.key.is_empty() {
            return Err(KeystrokeParseError {
                offset: nth_record_offset(raw, i),
                message: "empty key name".into(),
            });
        }
        events.push(KeystrokeEvent::new(time_ms, Key::from_name(&rec.key)));
    }

    let reordered = events.windows(2).any(|w| w[0].time_ms > w[1].time_ms);
    if reordered {
        events.sort_by_key(|e| e.time_ms);
    }
    Ok(ParsedKeystrokes { events, reordered })
}

/// Byte offset of the `n`th top-level object in a JSON array, best effort.
fn nth_record_offset(raw: &str, n: usize) -> usize {
    let mut depth = 0usize;
    let mut seen = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (i, b) in raw.bytes().enumerate() {
        if in_str {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_str = true,
            b'[' | b'{' => {
                if depth == 1 && b == b'{' {
                    if seen == n {
                        return i;
                    }
                    seen += 1;
                }
                depth += 1;
            }
            b']' | b'}' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    0
}

/// Returns the end (exclusive) of the bracketed JSON array starting at
/// `s[0] == '['`, honoring string literals.
fn json_array_end(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (i, b) in s.bytes().enumerate() {
        if in_str {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_str = true,
            b'[' | b'{' => depth += 1,
            b']' | b'}' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// Parses an ISO-8601 timestamp at second resolution. Offsets are converted
/// to UTC; fractional seconds are truncated.
pub fn parse_timestamp(s: &str) -> Result<NaiveDateTime, String> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(truncate_seconds(dt.naive_utc()));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(truncate_seconds(dt));
        }
    }
    Err(format!("invalid timestamp `{s}`"))
}

fn truncate_seconds(dt: NaiveDateTime) -> NaiveDateTime {
    use chrono::Timelike;
    dt.with_nanosecond(0).expect("zero nanoseconds is valid")
}

pub fn format_timestamp(dt: &NaiveDateTime) -> String {
    dt.format("%Y-%m-%dT%H:%M:%S").to_string()
}

/// Row parse result: the entry and whether its keystrokes were re-sorted.
type RowResult = Result<(SubmissionEntry, bool), String>;

fn parse_csv_row(line: &str, unit: TimeUnit) -> RowResult {
    let (ts, rest) = line.split_once(',').ok_or("missing user_id field")?;
    let (user, rest) = rest.split_once(',').ok_or("missing keystroke field")?;
    let rest = rest.trim_start();
    if !rest.starts_with('[') {
        return Err("keystroke field must be a JSON array".into());
    }
    let end = json_array_end(rest).ok_or("unterminated keystroke array")?;
    let (keys_raw, rest) = rest.split_at(end);
    let rest = rest.trim_start();
    let text_raw = match rest.strip_prefix(',') {
        Some(t) => t.trim(),
        None if rest.is_empty() => "",
        None => return Err("expected `,` after keystroke array".into()),
    };
    let text = if text_raw.starts_with('"') {
        serde_json::from_str::<String>(text_raw).map_err(|e| format!("invalid text field: {e}"))?
    } else {
        text_raw.to_string()
    };
    build_entry(ts, user, keys_raw, text, unit)
}

fn parse_json_row(line: &str, unit: TimeUnit) -> RowResult {
    let value: Value =
        serde_json::from_str(line).map_err(|e| format!("invalid JSON record: {e}"))?;
    let obj = value.as_object().ok_or("record is not a JSON object")?;
    let ts = obj
        .get("ts")
        .and_then(Value::as_str)
        .ok_or("missing string field `ts`")?;
    let user = obj
        .get("user")
        .and_then(Value::as_str)
        .ok_or("missing string field `user`")?;
    let keys_raw = match obj.get("keys") {
        Some(Value::String(s)) => s.clone(),
        Some(v @ Value::Array(_)) => v.to_string(),
        Some(_) => return Err("field `keys` must be an array".into()),
        None => return Err("missing field `keys`".into()),
    };
    let text = match obj.get("text") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Null) | None => String::new(),
        Some(_) => return Err("field `text` must be a string".into()),
    };
    build_entry(ts, user, &keys_raw, text, unit)
}

fn build_entry(ts: &str, user: &str, keys_raw: &str, text: String, unit: TimeUnit) -> RowResult {
    let submitted_at = parse_timestamp(ts)?;
    let user_id = user.trim();
    if user_id.is_empty() {
        return Err("empty user_id".into());
    }
    let parsed = parse_keystrokes_with_unit(keys_raw, unit).map_err(|e| e.to_string())?;
    Ok((
        SubmissionEntry {
            user_id: user_id.to_string(),
            submitted_at,
            keystrokes: parsed.events,
            text,
        },
        parsed.reordered,
    ))
}

/// Parses a log stream and a profile table into a [`Corpus`].
pub fn parse_corpus<L: BufRead, P: Read>(
    logs: L,
    profiles: P,
    unit: TimeUnit,
) -> Result<Corpus, IngestError> {
    let mut corpus = Corpus::default();
    parse_logs_into(&mut corpus, logs, unit)?;
    parse_profiles_into(&mut corpus, profiles)?;
    Ok(corpus)
}

pub fn parse_corpus_files(
    logs: &Path,
    profiles: &Path,
    unit: TimeUnit,
) -> Result<Corpus, IngestError> {
    let open = |p: &Path| {
        File::open(p).map_err(|source| IngestError::Io {
            path: p.display().to_string(),
            source,
        })
    };
    let logs_file = BufReader::new(open(logs)?);
    let profiles_file = open(profiles)?;
    parse_corpus(logs_file, profiles_file, unit)
}

fn parse_logs_into<L: BufRead>(
    corpus: &mut Corpus,
    logs: L,
    unit: TimeUnit,
) -> Result<(), IngestError> {
    let mut json_lines: Option<bool> = None;
    for (idx, line) in logs.lines().enumerate() {
        let line = line.map_err(|source| IngestError::Io {
            path: "<logs>".into(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        corpus.log_rows += 1;
        let is_json = *json_lines.get_or_insert_with(|| trimmed.starts_with('{'));
        let parsed = if is_json {
            parse_json_row(trimmed, unit)
        } else {
            parse_csv_row(trimmed, unit)
        };
        match parsed {
            Ok((entry, reordered)) => {
                if reordered {
                    corpus.warnings.push(Diagnostic {
                        source: SourceKind::Logs,
                        line: line_no,
                        message: "keystrokes out of time order; stable-sorted".into(),
                    });
                }
                corpus
                    .entries
                    .entry(entry.user_id.clone())
                    .or_default()
                    .push(entry);
            }
            Err(message) => corpus.diagnostics.push(Diagnostic {
                source: SourceKind::Logs,
                line: line_no,
                message,
            }),
        }
    }
    for entries in corpus.entries.values_mut() {
        entries.sort_by_key(|e| e.submitted_at);
    }
    Ok(())
}

fn parse_profiles_into<P: Read>(corpus: &mut Corpus, profiles: P) -> Result<(), IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(profiles);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::ProfileHeader(e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Ok(());
    }
    let expected = ["user_id", "group", "gender", "age"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(IngestError::ProfileHeader(format!(
            "expected header `user_id,group,gender,age`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                corpus.diagnostics.push(Diagnostic {
                    source: SourceKind::Profiles,
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        match parse_profile_record(&record) {
            Ok(profile) => {
                if corpus.profiles.contains_key(&profile.user_id) {
                    corpus.diagnostics.push(Diagnostic {
                        source: SourceKind::Profiles,
                        line,
                        message: format!("duplicate profile for `{}`; first kept", profile.user_id),
                    });
                } else {
                    corpus.profiles.insert(profile.user_id.clone(), profile);
                }
            }
            Err(message) => corpus.diagnostics.push(Diagnostic {
                source: SourceKind::Profiles,
                line,
                message,
            }),
        }
    }
    Ok(())
}

fn parse_profile_record(record: &csv::StringRecord) -> Result<UserProfile, String> {
    if record.len() != 4 {
        return Err(format!("expected 4 fields, found {}", record.len()));
    }
    let user_id = record[0].to_string();
    if user_id.is_empty() {
        return Err("empty user_id".into());
    }
    let group = record[1].parse::<Group>()?;
    let gender = record[2].parse::<Gender>()?;
    let age = match &record[3] {
        "" => None,
        raw => match raw.parse::<u32>() {
            Ok(a) if a > 0 => Some(a),
            _ => return Err(format!("invalid age `{raw}`")),
        },
    };
    Ok(UserProfile {
        user_id,
        group,
        gender,
        age,
    })
}

fn keystrokes_json(events: &[KeystrokeEvent]) -> String {
    let items: Vec<Value> = events
        .iter()
        .map(|e| serde_json::json!({ "time": e.time_ms, "key": e.key.name() }))
        .collect();
    Value::Array(items).to_string()
}

/// Writes entries in the comma-separated log layout, users in order.
pub fn write_log_rows<W: Write>(corpus: &Corpus, mut out: W) -> io::Result<()> {
    for entry in corpus.entries.values().flatten() {
        writeln!(
            out,
            "{},{},{},{}",
            format_timestamp(&entry.submitted_at),
            entry.user_id,
            keystrokes_json(&entry.keystrokes),
            serde_json::to_string(&entry.text).expect("string serializes")
        )?;
    }
    Ok(())
}

/// Writes one JSON-lines record.
pub fn write_jsonl_entry<W: Write>(entry: &SubmissionEntry, mut out: W) -> io::Result<()> {
    let keys: Value =
        serde_json::from_str(&keystrokes_json(&entry.keystrokes)).expect("valid JSON");
    let record = serde_json::json!({
        "ts": format_timestamp(&entry.submitted_at),
        "user": entry.user_id,
        "keys": keys,
        "text": entry.text,
    });
    writeln!(out, "{record}")
}

pub fn write_log_jsonl<W: Write>(corpus: &Corpus, mut out: W) -> io::Result<()> {
    for entry in corpus.entries.values().flatten() {
        write_jsonl_entry(entry, &mut out)?;
    }
    Ok(())
}

pub fn write_profiles<'a, W: Write>(
    profiles: impl IntoIterator<Item = &'a UserProfile>,
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["user_id", "group", "gender", "age"])?;
    for p in profiles {
        let age = p.age.map(|a| a.to_string()).unwrap_or_default();
        w.write_record([
            p.user_id.as_str(),
            p.group.as_str(),
            p.gender.as_str(),
            age.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROFILES: &str = "user_id,group,gender,age\nuser1,G1,female,22\n";

    fn corpus_from(logs: &str, profiles: &str) -> Corpus {
        parse_corpus(logs.as_bytes(), profiles.as_bytes(), TimeUnit::Millis).unwrap()
    }

    #[test]
    fn single_csv_row() {
        let c = corpus_from(
            "2023-01-01T12:00:00,user1,[{\"time\":1,\"key\":\"a\"}],\"a\"\n",
            PROFILES,
        );
        assert_eq!(c.user_count(), 1);
        assert_eq!(c.entry_count(), 1);
        let e = &c.entries["user1"][0];
        assert_eq!(
            e.keystrokes,
            vec![KeystrokeEvent::new(1, Key::Character('a'))]
        );
        assert_eq!(e.text, "a");
        assert!(c.unassigned().is_empty());
    }

    #[test]
    fn character_field_alias() {
        let p = parse_keystrokes(r#"[{"time": 1, "character": "a"}]"#).unwrap();
        assert_eq!(p.events, vec![KeystrokeEvent::new(1, Key::Character('a'))]);
    }

    #[test]
    fn empty_source() {
        let c = corpus_from("", "user_id,group,gender,age\n");
        assert_eq!(c.user_count(), 0);
        assert_eq!(c.entry_count(), 0);
        assert_eq!(c.log_rows, 0);
    }

    #[test]
    fn entries_sorted_by_timestamp() {
        let logs =
            "2023-01-02T09:00:00,user1,[],\"second\"\n2023-01-01T09:00:00,user1,[],\"first\"\n";
        let c = corpus_from(logs, PROFILES);
        let texts: Vec<_> = c.entries["user1"].iter().map(|e| e.text.as_str()).collect();
        assert_eq!(texts, ["first", "second"]);
    }

    #[test]
    fn keystroke_mapping() {
        let p = parse_keystrokes(r#"[{"time":0,"key":"a"},{"time":5,"key":"Backspace"}]"#).unwrap();
        assert_eq!(
            p.events,
            vec![
                KeystrokeEvent::new(0, Key::Character('a')),
                KeystrokeEvent::new(5, Key::Backspace)
            ]
        );
        assert!(parse_keystrokes("[]").unwrap().events.is_empty());
        let p = parse_keystrokes(r#"[{"time":3,"key":"Shift"}]"#).unwrap();
        assert_eq!(
            p.events,
            vec![KeystrokeEvent::new(3, Key::Other("Shift".into()))]
        );
        let p = parse_keystrokes(r#"[{"time":3,"key":" "},{"time":4,"key":"Delete"}]"#).unwrap();
        assert_eq!(p.events[0].key, Key::Character(' '));
        assert_eq!(p.events[1].key, Key::Delete);
    }

    #[test]
    fn unordered_keystrokes_are_stable_sorted() {
        let p =
            parse_keystrokes(r#"[{"time":5,"key":"b"},{"time":1,"key":"a"},{"time":5,"key":"c"}]"#)
                .unwrap();
        assert!(p.reordered);
        let keys: Vec<_> = p.events.iter().map(|e| e.key.name()).collect();
        assert_eq!(keys, ["a", "b", "c"]);
    }

    #[test]
    fn parse_error_reports_offset() {
        let raw = r#"[{"time":0,"key":"a"},{"time":}]"#;
        let err = parse_keystrokes(raw).unwrap_err();
        assert_eq!(&raw[err.offset..err.offset + 1], "}");

        let err = parse_keystrokes(r#"[{"time":0,"key":"a"},{"time":-4,"key":"b"}]"#).unwrap_err();
        assert_eq!(err.offset, 22);
    }

    #[test]
    fn seconds_unit_converts() {
        let p =
            parse_keystrokes_with_unit(r#"[{"time":1.5,"key":"a"}]"#, TimeUnit::Seconds).unwrap();
        assert_eq!(p.events[0].time_ms, 1500);
        assert!(parse_keystrokes(r#"[{"time":1.5,"key":"a"}]"#).is_err());
    }

    #[test]
    fn malformed_rows_are_recorded() {
        let logs = "\
2023-01-01T12:00:00,user1,[{\"time\":1,\"key\":\"a\"}],\"a\"
not a row
2023-13-01T12:00:00,user1,[],\"bad month\"
2023-01-01T12:00:00,,[],\"no user\"

2023-01-01T12:00:01,user2,[{\"time\":1,\"key\":\"a\"},\"x\"
";
        let c = corpus_from(logs, PROFILES);
        assert_eq!(c.log_rows, 5);
        assert_eq!(c.entry_count(), 1);
        assert_eq!(c.log_diagnostic_count(), 4);
        let lines: Vec<_> = c.diagnostics.iter().map(|d| d.line).collect();
        assert_eq!(lines, [2, 3, 4, 6]);
    }

    #[test]
    fn jsonl_variant_is_detected() {
        let logs = r#"
{"ts":"2023-01-01T12:00:00","user":"user1","keys":[{"time":1,"key":"a"}],"text":"a"}
{"ts":"2023-01-01T12:05:00","user":"user1","keys":"[{\"time\":2,\"key\":\"b\"}]","text":"ab"}
"#;
        let c = corpus_from(logs, PROFILES);
        assert_eq!(c.entry_count(), 2);
        assert_eq!(c.entries["user1"][1].keystrokes[0].time_ms, 2);
    }

    #[test]
    fn text_with_commas_and_quotes() {
        let logs =
            "2023-01-01T12:00:00,u,[{\"time\":1,\"key\":\",\"}],\"Boil, then \\\"drain\\\".\"\n";
        let c = corpus_from(logs, "user_id,group,gender,age\n");
        let e = &c.entries["u"][0];
        assert_eq!(e.keystrokes[0].key, Key::Character(','));
        assert_eq!(e.text, "Boil, then \"drain\".");
        assert_eq!(c.unassigned(), vec!["u"]);
    }

    #[test]
    fn profiles_parse_and_validate() {
        let profiles = "user_id,group,gender,age\nu1,G1,female,22\nu2,g2,M,\nu3,G3,male,20\nu4,G1,other,0\nu1,G2,male,30\n";
        let c = corpus_from("", profiles);
        assert_eq!(c.profiles.len(), 2);
        assert_eq!(c.profiles["u2"].group, Group::G2);
        assert_eq!(c.profiles["u2"].gender, Gender::Male);
        assert_eq!(c.profiles["u2"].age, None);
        assert_eq!(c.profiles["u1"].group, Group::G1);
        assert_eq!(c.diagnostics.len(), 3);
    }

    #[test]
    fn bad_profile_header_is_fatal() {
        let err = parse_corpus("".as_bytes(), "id,grp\nx,G1\n".as_bytes(), TimeUnit::Millis);
        assert!(matches!(err, Err(IngestError::ProfileHeader(_))));
    }

    #[test]
    fn cache_round_trip() {
        let c = corpus_from(
            "2023-01-01T12:00:00,user1,[{\"time\":1,\"key\":\"a\"}],\"a\"\n",
            PROFILES,
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.bin");
        c.save_cache(&path).unwrap();
        assert_eq!(Corpus::load_cache(&path).unwrap(), c);

        std::fs::write(&path, b"garbage").unwrap();
        assert!(matches!(
            Corpus::load_cache(&path),
            Err(IngestError::Cache { .. })
        ));
    }

    #[test]
    fn timestamps_with_offset_and_fraction() {
        let a = parse_timestamp("2023-01-01T13:00:00+01:00").unwrap();
        let b = parse_timestamp("2023-01-01 12:00:00.750").unwrap();
        assert_eq!(a, b);
    }
}
