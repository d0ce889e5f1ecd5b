//! Mining of keystroke logs from writing-support experiments.
//!
//! The pipeline parses submission logs ([`ingest`]), splits each user's
//! submissions into recipe sessions by embedding similarity
//! ([`embedding`], [`sessionizer`]), extracts self-regulated-learning
//! feature variables ([`features`]), compares groups ([`stats`]) and
//! discovers directly-follows graphs of the revision process
//! ([`procmine`]). [`synth`] generates corpora with known ground truth and
//! [`report`] runs everything end to end.

pub mod embedding;
pub mod features;
pub mod ingest;
pub mod procmine;
pub mod report;
pub mod sessionizer;
pub mod stats;
pub mod synth;

pub use embedding::{cosine_similarity, embed_text, preprocess, TextVector, VectorStore};
pub use features::{
    count_edits, pause_mean, session_features, EditCounts, FeatureRecord, FeatureRow,
};
pub use ingest::{Corpus, Gender, Group, Key, KeystrokeEvent, SubmissionEntry, UserProfile};
pub use procmine::{discover_dfg, export_dot, Activity, Dfg, EventLog, Trace};
pub use sessionizer::{build_sessions, find_boundaries, BoundarySet, Session};
pub use stats::{welch_t_test, OutlierPolicy, WelchResult};
pub use synth::{generate_corpus, GroundTruth, SimPlan};
