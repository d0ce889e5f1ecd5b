//! End-to-end pipeline run and plot-ready data series.
//!
//! All artifacts are rendered in memory first and written only once every
//! stage succeeded, so a failed run leaves no partial output behind.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::embedding::VectorStore;
use crate::features::{extract_all, revision_edit_counts, write_features_csv, FeatureRow};
use crate::ingest::{parse_corpus_files, Corpus, Gender, Group, TimeUnit};
use crate::procmine::{build_event_log, discover_dfg, export_dot, Dfg};
use crate::sessionizer::{
    manifest_rows, parse_overrides, sessionize_corpus, write_manifest, SessionizeOptions,
    UserSessions,
};
use crate::stats::{analyze, filter_outliers, mean, Feature, OutlierPolicy, StatsReport};

pub const TOOL: &str = "revmine";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Ingest,
    Embeddings,
    Sessionize,
    Features,
    Stats,
    Dfg,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Embeddings => "embeddings",
            Stage::Sessionize => "sessionize",
            Stage::Features => "features",
            Stage::Stats => "stats",
            Stage::Dfg => "dfg",
            Stage::Write => "write",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
#[error("[{stage}] {message}")]
pub struct ReportError {
    pub stage: Stage,
    pub message: String,
}

impl ReportError {
    fn new(stage: Stage, err: impl fmt::Display) -> Self {
        Self {
            stage,
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub logs: PathBuf,
    pub profiles: PathBuf,
    pub embeddings: PathBuf,
    pub dim: usize,
    pub threshold: f64,
    pub max_recipes: usize,
    pub overrides: Option<PathBuf>,
    pub policy: OutlierPolicy,
    pub out_dir: PathBuf,
    #[serde(serialize_with = "ser_unit")]
    pub time_unit: TimeUnit,
}

fn ser_unit<S: serde::Serializer>(unit: &TimeUnit, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match unit {
        TimeUnit::Millis => "ms",
        TimeUnit::Seconds => "s",
    })
}

impl RunConfig {
    fn validate(&self) -> Result<(), ReportError> {
        let must_exist = |what: &str, p: &Path| {
            if p.is_file() {
                Ok(())
            } else {
                Err(ReportError::new(
                    Stage::Config,
                    format!("{what} path `{}` does not exist", p.display()),
                ))
            }
        };
        must_exist("logs", &self.logs)?;
        must_exist("profiles", &self.profiles)?;
        must_exist("embeddings", &self.embeddings)?;
        if let Some(o) = &self.overrides {
            must_exist("overrides", o)?;
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(ReportError::new(
                Stage::Config,
                format!("threshold must lie in (0, 1), got {}", self.threshold),
            ));
        }
        if self.dim == 0 {
            return Err(ReportError::new(
                Stage::Config,
                "dimension must be positive",
            ));
        }
        self.policy
            .validate()
            .map_err(|e| ReportError::new(Stage::Config, e))
    }
}

/// Tool name, version and the configuration, attached to every JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Value,
}

impl Provenance {
    pub fn new<C: Serialize>(config: &C) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            config: serde_json::to_value(config).expect("config serializes"),
        }
    }

    pub fn comment_line(&self) -> String {
        format!(
            "{} {} config={}",
            self.tool,
            self.version,
            serde_json::to_string(&self.config).expect("value serializes")
        )
    }
}

#[derive(Serialize)]
struct WithProvenance<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json_with_provenance<T: Serialize>(prov: &Provenance, body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&WithProvenance {
        provenance: prov,
        body,
    })
    .expect("report serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BubbleUser {
    pub user: String,
    /// `(revision step, edit count)`, steps starting at 1.
    pub revisions: Vec<(usize, u64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BubbleRecipe {
    pub recipe: usize,
    pub groups: BTreeMap<Group, Vec<BubbleUser>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BubblePlot {
    pub recipes: Vec<BubbleRecipe>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryPoint {
    pub recipe: usize,
    pub means: BTreeMap<Feature, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryPlot {
    pub groups: BTreeMap<Group, Vec<SummaryPoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenderPoint {
    pub user: String,
    pub gender: Gender,
    pub group: Group,
    pub times_revised: u64,
    pub time_revising_s: f64,
    /// Mean over the user's recipes with a defined value.
    pub efficiency: Option<f64>,
    pub di_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenderPlot {
    pub groups: BTreeMap<Group, Vec<GenderPoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotData {
    pub bubble: BubblePlot,
    pub summary: SummaryPlot,
    pub gender: GenderPlot,
}

fn empty_groups<T>() -> BTreeMap<Group, Vec<T>> {
    Group::ALL.iter().map(|&g| (g, Vec::new())).collect()
}

/// Builds the bubble, summary and gender series. Summary means are copied
/// from `stats` so both artifacts agree exactly.
pub fn emit_plot_data(
    corpus: &Corpus,
    users: &[UserSessions],
    rows: &[FeatureRow],
    stats: &StatsReport,
) -> PlotData {
    let mut recipes: BTreeMap<usize, BTreeMap<Group, Vec<BubbleUser>>> = BTreeMap::new();
    for u in users {
        let Some(group) = corpus.group_of(&u.user_id) else {
            continue;
        };
        for s in &u.sessions {
            let edits = revision_edit_counts(&s.revisions);
            recipes
                .entry(s.recipe_ordinal)
                .or_insert_with(empty_groups)
                .entry(group)
                .or_default()
                .push(BubbleUser {
                    user: u.user_id.clone(),
                    revisions: edits
                        .into_iter()
                        .enumerate()
                        .map(|(i, e)| (i + 1, e))
                        .collect(),
                });
        }
    }
    for groups in recipes.values_mut() {
        for list in groups.values_mut() {
            list.sort_by(|a, b| {
                b.revisions
                    .len()
                    .cmp(&a.revisions.len())
                    .then_with(|| a.user.cmp(&b.user))
            });
        }
    }
    let bubble = BubblePlot {
        recipes: recipes
            .into_iter()
            .map(|(recipe, groups)| BubbleRecipe { recipe, groups })
            .collect(),
    };

    let mut summary_groups = empty_groups();
    for r in &stats.recipes {
        for (group, list) in summary_groups.iter_mut() {
            let means = r
                .rows
                .iter()
                .map(|row| {
                    let m = match group {
                        Group::G1 => row.g1_mean,
                        Group::G2 => row.g2_mean,
                    };
                    (row.feature, m)
                })
                .collect();
            list.push(SummaryPoint {
                recipe: r.recipe,
                means,
            });
        }
    }

    let (kept, _) = filter_outliers(rows, &stats.policy);
    let mut per_user: BTreeMap<&str, Vec<&FeatureRow>> = BTreeMap::new();
    for row in &kept {
        if row.group.is_some() {
            per_user
                .entry(row.record.user_id.as_str())
                .or_default()
                .push(row);
        }
    }
    let mut gender_groups = empty_groups();
    for (user, recs) in per_user {
        let group = recs[0].group.expect("filtered to grouped rows");
        let defined = |f: fn(&FeatureRow) -> Option<f64>| {
            let v: Vec<f64> = recs.iter().filter_map(|r| f(r)).collect();
            mean(&v)
        };
        gender_groups
            .get_mut(&group)
            .expect("all groups present")
            .push(GenderPoint {
                user: user.to_string(),
                gender: recs[0].gender,
                group,
                times_revised: recs.iter().map(|r| r.record.num_revisions).sum(),
                time_revising_s: recs.iter().map(|r| r.record.time_revising_s).sum(),
                efficiency: defined(|r| r.record.efficiency_ins_per_s),
                di_ratio: defined(|r| r.record.di_ratio),
            });
    }

    PlotData {
        bubble,
        summary: SummaryPlot {
            groups: summary_groups,
        },
        gender: GenderPlot {
            groups: gender_groups,
        },
    }
}

/// Renders a group's DFG; a group without traces yields an empty graph.
pub fn group_dot(
    corpus: &Corpus,
    users: &[UserSessions],
    group: Group,
    prov: &Provenance,
) -> String {
    let log = build_event_log(corpus, users, group);
    let dfg = discover_dfg(&log).unwrap_or_else(|_| Dfg {
        nodes: Default::default(),
        edges: Default::default(),
    });
    let comments = [
        prov.comment_line(),
        format!("group {group}: {} traces", log.len()),
    ];
    export_dot(&dfg, &format!("dfg_{group}"), &comments)
}

/// Everything a report run produces, keyed by path relative to the output
/// directory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportBundle {
    pub files: BTreeMap<PathBuf, Vec<u8>>,
}

impl ReportBundle {
    fn add(&mut self, path: &str, content: impl Into<Vec<u8>>) {
        self.files.insert(PathBuf::from(path), content.into());
    }

    pub fn get(&self, path: &str) -> Option<&[u8]> {
        self.files.get(Path::new(path)).map(Vec::as_slice)
    }

    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        for (rel, bytes) in &self.files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, bytes)?;
        }
        Ok(())
    }
}

pub const REPORT_FILES: [&str; 9] = [
    "features.csv",
    "stats.json",
    "g1.dot",
    "g2.dot",
    "plots/bubble.json",
    "plots/summary.json",
    "plots/gender.json",
    "sessions.jsonl",
    "diagnostics.txt",
];

/// Runs ingest, sessionization, features, statistics and discovery and
/// renders every artifact without touching the filesystem.
pub fn build_report(config: &RunConfig) -> Result<ReportBundle, ReportError> {
    config.validate()?;
    let prov = Provenance::new(config);

    let corpus = parse_corpus_files(&config.logs, &config.profiles, config.time_unit)
        .map_err(|e| ReportError::new(Stage::Ingest, e))?;
    let store = VectorStore::load(&config.embeddings, config.dim)
        .map_err(|e| ReportError::new(Stage::Embeddings, e))?;
    let overrides = match &config.overrides {
        Some(p) => {
            let file = fs::File::open(p).map_err(|e| ReportError::new(Stage::Sessionize, e))?;
            parse_overrides(file).map_err(|e| ReportError::new(Stage::Sessionize, e))?
        }
        None => Vec::new(),
    };
    let options = SessionizeOptions {
        threshold: config.threshold,
        max_recipes: config.max_recipes,
    };
    let users = sessionize_corpus(&corpus, &store, &overrides, options)
        .map_err(|e| ReportError::new(Stage::Sessionize, e))?;

    let rows = extract_all(&corpus, &users);
    let stats = analyze(&rows, &config.policy);
    let plots = emit_plot_data(&corpus, &users, &rows, &stats);

    let mut bundle = ReportBundle::default();
    let mut csv = Vec::new();
    write_features_csv(&rows, &mut csv).map_err(|e| ReportError::new(Stage::Features, e))?;
    bundle.add("features.csv", csv);
    bundle.add("stats.json", to_json_with_provenance(&prov, &stats));
    bundle.add("g1.dot", group_dot(&corpus, &users, Group::G1, &prov));
    bundle.add("g2.dot", group_dot(&corpus, &users, Group::G2, &prov));
    bundle.add(
        "plots/bubble.json",
        to_json_with_provenance(&prov, &plots.bubble),
    );
    bundle.add(
        "plots/summary.json",
        to_json_with_provenance(&prov, &plots.summary),
    );
    bundle.add(
        "plots/gender.json",
        to_json_with_provenance(&prov, &plots.gender),
    );

    let manifest = manifest_rows(&users, config.max_recipes);
    let mut jsonl = Vec::new();
    write_manifest(&manifest, &mut jsonl).map_err(|e| ReportError::new(Stage::Sessionize, e))?;
    bundle.add("sessions.jsonl", jsonl);
    bundle.add(
        "diagnostics.txt",
        diagnostics_text(&prov, &corpus, &users, &stats, config.max_recipes),
    );
    Ok(bundle)
}

pub fn run_report(config: &RunConfig) -> Result<ReportBundle, ReportError> {
    let bundle = build_report(config)?;
    bundle
        .write_to(&config.out_dir)
        .map_err(|e| ReportError::new(Stage::Write, e))?;
    Ok(bundle)
}

fn diagnostics_text(
    prov: &Provenance,
    corpus: &Corpus,
    users: &[UserSessions],
    stats: &StatsReport,
    max_recipes: usize,
) -> String {
    let mut lines = vec![format!("# {}", prov.comment_line())];
    lines.push(format!(
        "ingest: {} rows, {} entries, {} users, {} skipped",
        corpus.log_rows,
        corpus.entry_count(),
        corpus.user_count(),
        corpus.log_diagnostic_count()
    ));
    lines.extend(
        corpus
            .diagnostics
            .iter()
            .map(|d| format!("ingest: skipped {d}")),
    );
    lines.extend(
        corpus
            .warnings
            .iter()
            .map(|d| format!("ingest: warning {d}")),
    );
    lines.extend(
        corpus
            .unassigned()
            .iter()
            .map(|u| format!("ingest: user {u} has no profile")),
    );
    for u in users {
        for i in &u.undefined {
            lines.push(format!(
                "sessionize: {} entry {i}: undefined similarity, review",
                u.user_id
            ));
        }
        if u.exceeds(max_recipes) {
            lines.push(format!(
                "sessionize: {} has {} sessions (more than {max_recipes})",
                u.user_id,
                u.sessions.len()
            ));
        }
    }
    for r in &stats.recipes {
        for row in &r.rows {
            if row.g1_undefined + row.g2_undefined > 0 {
                lines.push(format!(
                    "stats: recipe {} {}: {} undefined values excluded (G1 {}, G2 {})",
                    r.recipe,
                    row.feature,
                    row.g1_undefined + row.g2_undefined,
                    row.g1_undefined,
                    row.g2_undefined
                ));
            }
        }
        lines.extend(r.diagnostics.iter().map(|d| format!("stats: {d}")));
    }
    for g in &stats.gender {
        lines.extend(
            g.tests
                .iter()
                .filter_map(|t| t.diagnostic.as_ref())
                .map(|d| format!("stats: {d}")),
        );
    }
    for o in &stats.outliers {
        let reasons: Vec<String> = o
            .reasons
            .iter()
            .map(|r| {
                serde_json::to_value(r)
                    .expect("enum")
                    .as_str()
                    .unwrap_or_default()
                    .to_string()
            })
            .collect();
        lines.push(format!(
            "stats: removed {} recipe {} ({})",
            o.user_id,
            o.recipe,
            reasons.join(", ")
        ));
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
