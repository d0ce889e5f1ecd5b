use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use revmine::embedding::VectorStore;
use revmine::features::{extract_all, read_features_csv, write_features_csv};
use revmine::ingest::{
    parse_corpus_files, write_jsonl_entry, write_profiles, Corpus, Group, TimeUnit,
};
use revmine::report::{
    group_dot, run_report, to_json_with_provenance, Provenance, RunConfig, Stage,
};
use revmine::sessionizer::{
    manifest_rows, parse_overrides, read_manifest, sessionize_corpus, sessions_from_manifest,
    write_manifest, SessionizeOptions, DEFAULT_MAX_RECIPES,
};
use revmine::stats::{analyze, OutlierPolicy};
use revmine::synth::{generate_corpus, topic_vectors_text, SimPlan};

#[derive(Parser, Debug)]
#[command(
    name = "revmine",
    version,
    about = "Mine revision behavior from keystroke logs"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GlobalOpts {
    /// Directory for outputs whose path is not given explicitly
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Cosine similarity below which an entry starts a new recipe
    #[arg(long, global = true, default_value_t = 0.995)]
    threshold: f64,
    /// Word-vector file (`word c1 ... cd` per line)
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 50)]
    dim: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Boundary corrections, `user_id,add|remove,index` per line
    #[arg(long, global = true)]
    overrides: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 10_000.0)]
    outlier_max_time: f64,
    #[arg(long, global = true, default_value_t = 0.05)]
    outlier_min_eff: f64,
}

impl GlobalOpts {
    fn out_path(&self, explicit: &Option<PathBuf>, default: &str) -> PathBuf {
        explicit
            .clone()
            .unwrap_or_else(|| self.out_dir.join(default))
    }

    fn policy(&self) -> Result<OutlierPolicy> {
        OutlierPolicy::new(self.outlier_max_time, self.outlier_min_eff)
            .map_err(|e| config_error(e.to_string()))
    }

    fn embeddings(&self) -> Result<&Path> {
        let p = self
            .embeddings
            .as_deref()
            .ok_or_else(|| config_error("--embeddings is required".into()))?;
        if !p.is_file() {
            return Err(config_error(format!(
                "embeddings path `{}` does not exist",
                p.display()
            )));
        }
        Ok(p)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse logs and profiles into a corpus cache
    Ingest {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Unit of keystroke `time` values: ms or s
        #[arg(long, default_value = "ms")]
        time_unit: TimeUnit,
    },
    /// Split each user's entries into recipe sessions
    Sessionize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_RECIPES)]
        max_recipes: usize,
    },
    /// Compute the feature table from sessions
    Features {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        sessions: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group comparisons, gender tests, trends and outlier log
    Stats {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Directly-follows graph of one group as DOT
    Dfg {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        sessions: PathBuf,
        #[arg(long)]
        group: Group,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus with ground truth
    Simulate {
        /// JSON simulation plan; defaults are used for missing fields
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        profiles_out: Option<PathBuf>,
        /// Also write a word-vector table matching the plan's topic pools
        #[arg(long)]
        vectors_out: Option<PathBuf>,
    },
    /// Run the whole pipeline and write every artifact into --out-dir
    Report {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long, default_value = "ms")]
        time_unit: TimeUnit,
        #[arg(long, default_value_t = DEFAULT_MAX_RECIPES)]
        max_recipes: usize,
    },
}

#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[config] {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: String) -> anyhow::Error {
    anyhow!(ConfigError(msg))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn load_sessions(
    corpus_path: &Path,
    sessions_path: &Path,
) -> Result<(Corpus, Vec<revmine::sessionizer::UserSessions>)> {
    let corpus = Corpus::load_cache(corpus_path).context("[ingest] loading corpus")?;
    let file = File::open(sessions_path)
        .with_context(|| format!("[sessionize] opening {}", sessions_path.display()))?;
    let rows = read_manifest(BufReader::new(file)).context("[sessionize] reading manifest")?;
    let users =
        sessions_from_manifest(&corpus, &rows).context("[sessionize] rebuilding sessions")?;
    Ok((corpus, users))
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Ingest {
            logs,
            profiles,
            out,
            time_unit,
        } => {
            let corpus = parse_corpus_files(logs, profiles, *time_unit).context("[ingest]")?;
            let out = g.out_path(out, "corpus.bin");
            corpus.save_cache(&out).context("[ingest]")?;
            eprintln!(
                "ingest: {} users, {} entries, {} rows skipped -> {}",
                corpus.user_count(),
                corpus.entry_count(),
                corpus.log_diagnostic_count(),
                out.display()
            );
            for d in &corpus.diagnostics {
                eprintln!("  skipped {d}");
            }
        }
        Command::Sessionize {
            corpus,
            out,
            max_recipes,
        } => {
            let store = VectorStore::load(g.embeddings()?, g.dim).context("[embeddings]")?;
            let corpus = Corpus::load_cache(corpus).context("[ingest] loading corpus")?;
            let overrides = match &g.overrides {
                Some(p) => parse_overrides(
                    File::open(p).with_context(|| format!("[config] {}", p.display()))?,
                )
                .context("[sessionize]")?,
                None => Vec::new(),
            };
            let options = SessionizeOptions {
                threshold: g.threshold,
                max_recipes: *max_recipes,
            };
            let users =
                sessionize_corpus(&corpus, &store, &overrides, options).context("[sessionize]")?;
            let rows = manifest_rows(&users, *max_recipes);
            let out = g.out_path(out, "sessions.jsonl");
            let mut w = create(&out)?;
            write_manifest(&rows, &mut w)?;
            w.flush()?;
            let flagged = rows.iter().filter(|r| !r.flags.is_empty()).count();
            eprintln!(
                "sessionize: {} sessions ({flagged} flagged) -> {}",
                rows.len(),
                out.display()
            );
        }
        Command::Features {
            corpus,
            sessions,
            out,
        } => {
            let (corpus, users) = load_sessions(corpus, sessions)?;
            let rows = extract_all(&corpus, &users);
            let out = g.out_path(out, "features.csv");
            let mut w = create(&out)?;
            write_features_csv(&rows, &mut w).context("[features]")?;
            w.flush()?;
            eprintln!("features: {} rows -> {}", rows.len(), out.display());
        }
        Command::Stats { features, out } => {
            let policy = g.policy()?;
            let file = File::open(features)
                .with_context(|| format!("[stats] opening {}", features.display()))?;
            let rows = read_features_csv(file).context("[stats]")?;
            let report = analyze(&rows, &policy);
            #[derive(Serialize)]
            struct StatsConfig<'a> {
                features: &'a Path,
                policy: OutlierPolicy,
            }
            let prov = Provenance::new(&StatsConfig {
                features: features.as_path(),
                policy,
            });
            let out = g.out_path(out, "stats.json");
            fs::write(&out, to_json_with_provenance(&prov, &report))
                .with_context(|| format!("[stats] {}", out.display()))?;
            eprintln!(
                "stats: {} recipes, {} outliers removed -> {}",
                report.recipes.len(),
                report.outliers.len(),
                out.display()
            );
        }
        Command::Dfg {
            corpus,
            sessions,
            group,
            out,
        } => {
            let (corpus_data, users) = load_sessions(corpus, sessions)?;
            #[derive(Serialize)]
            struct DfgConfig<'a> {
                corpus: &'a Path,
                sessions: &'a Path,
                group: Group,
            }
            let prov = Provenance::new(&DfgConfig {
                corpus,
                sessions,
                group: *group,
            });
            let dot = group_dot(&corpus_data, &users, *group, &prov);
            let default_name = format!("{}.dot", group.as_str().to_ascii_lowercase());
            let out = g.out_path(out, &default_name);
            fs::write(&out, dot).with_context(|| format!("[dfg] {}", out.display()))?;
            eprintln!("dfg: {group} -> {}", out.display());
        }
        Command::Simulate {
            plan,
            out,
            truth,
            profiles_out,
            vectors_out,
        } => {
            let mut sim: SimPlan = match plan {
                Some(p) => {
                    let text = fs::read_to_string(p)
                        .with_context(|| format!("[config] reading {}", p.display()))?;
                    serde_json::from_str(&text)
                        .map_err(|e| config_error(format!("plan {}: {e}", p.display())))?
                }
                None => SimPlan::default(),
            };
            if let Some(seed) = g.seed {
                sim.seed = seed;
            }
            let (corpus, ground_truth) =
                generate_corpus(&sim).map_err(|e| config_error(e.to_string()))?;
            let logs_path = g.out_path(out, "logs.jsonl");
            let mut w = create(&logs_path)?;
            for entry in corpus.entries.values().flatten() {
                write_jsonl_entry(entry, &mut w)?;
            }
            w.flush()?;
            let truth_path = g.out_path(truth, "truth.json");
            let mut w = create(&truth_path)?;
            serde_json::to_writer_pretty(&mut w, &ground_truth)?;
            w.write_all(b"\n")?;
            w.flush()?;
            let profiles_path = g.out_path(profiles_out, "profiles.csv");
            write_profiles(corpus.profiles.values(), create(&profiles_path)?)?;
            if let Some(v) = vectors_out {
                let text = topic_vectors_text(&sim).map_err(|e| config_error(e.to_string()))?;
                create(v)?.write_all(text.as_bytes())?;
            }
            eprintln!(
                "simulate: seed {}, {} users, {} entries -> {}",
                sim.seed,
                corpus.user_count(),
                corpus.entry_count(),
                logs_path.display()
            );
        }
        Command::Report {
            logs,
            profiles,
            time_unit,
            max_recipes,
        } => {
            let embeddings = g
                .embeddings
                .clone()
                .ok_or_else(|| config_error("--embeddings is required".into()))?;
            let config = RunConfig {
                logs: logs.clone(),
                profiles: profiles.clone(),
                embeddings,
                dim: g.dim,
                threshold: g.threshold,
                max_recipes: *max_recipes,
                overrides: g.overrides.clone(),
                policy: OutlierPolicy {
                    max_time_revising_s: g.outlier_max_time,
                    min_efficiency_ins_per_s: g.outlier_min_eff,
                },
                out_dir: g.out_dir.clone(),
                time_unit: *time_unit,
            };
            match run_report(&config) {
                Ok(bundle) => {
                    eprintln!(
                        "report: {} files -> {}",
                        bundle.files.len(),
                        config.out_dir.display()
                    );
                }
                Err(e) if e.stage == Stage::Config => bail!(ConfigError(e.message)),
                Err(e) => bail!(e),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
