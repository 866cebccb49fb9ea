//! Command-line front end: indexing, simulation, training, evaluation,
//! artifact export, and the end-to-end pipeline.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::artifact::{check_budget, export_flat, load_flat, ArtifactError, FlatModel};
use crate::config::{ConfigError, RunConfig};
use crate::eval::{
    ab_report, offline_report, ranked_lookups, split_by_user, EvalError, OfflineRanker,
    OfflineReport,
};
use crate::features::{default_schema, FeatureError, ImportanceGroup, permutation_importance, Scorer};
use crate::log_schema::{
    decode_sessions, encode_sessions, to_labeled_groups, CompletionSession, LogHeader,
    SchemaError, SCHEMA_VERSION,
};
use crate::provider::build_index;
use crate::ranker::{fit_with_progress, QueryGroup, RankerError, TreeEnsemble};
use crate::sim::{simulate, ArmRanker, SimError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("budget violation: {0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<RankerError> for CliError {
    fn from(e: RankerError) -> Self {
        match e {
            RankerError::InvalidParams(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ArtifactError> for CliError {
    fn from(e: ArtifactError) -> Self {
        match e {
            ArtifactError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {path:?}: {e}")))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Data(format!("cannot read {path:?}: {e}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Data(format!("cannot create {parent:?}: {e}")))?;
        }
    }
    fs::write(path, bytes).map_err(|e| CliError::Data(format!("cannot write {path:?}: {e}")))
}

#[derive(Debug, Parser)]
#[command(name = "logrank", version, about = "Rank code-completion candidates from usage logs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Path to the run configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index the corpus and print its statistics.
    Index(ConfigArg),
    /// Simulate users over the corpus and write a JSONL log.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        /// `heuristic`, or a path to a trained model (.json or .rnkl).
        #[arg(long, default_value = "heuristic")]
        arm: String,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the master seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train a ranking model from a JSONL log.
    Train {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recall@K on held-out logs, baseline order vs an optional model.
    EvalOffline {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate two arms over the same corpus and seed, then compare all
    /// online metrics. Arms are `heuristic` or a model path.
    Abtest {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value = "heuristic")]
        arm_a: String,
        #[arg(long)]
        arm_b: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a trained model JSON into the flat inference artifact.
    Export {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Size budget in bytes.
        #[arg(long, default_value_t = crate::artifact::DEFAULT_SIZE_BUDGET)]
        budget: usize,
    },
    /// Print artifact metadata and benchmark its ranking latency.
    Inspect {
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long, default_value_t = 30.0)]
        latency_ms: f64,
        #[arg(long, default_value_t = 100)]
        candidates: usize,
        #[arg(long, default_value_t = 200)]
        repetitions: usize,
    },
    /// Permutation importance of every feature slot.
    Importance {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 3)]
        repeats: u32,
        /// Write a pruned feature schema keeping slots with importance above
        /// this threshold or used in splits.
        #[arg(long)]
        prune: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// End-to-end: simulate, train, evaluate offline, export, A/B test.
    Pipeline {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

enum LoadedModel {
    Ensemble(TreeEnsemble),
    Flat(FlatModel),
}

impl LoadedModel {
    fn load(path: &Path) -> Result<Self, CliError> {
        if !path.is_file() {
            return Err(CliError::Config(format!("model {path:?} does not exist")));
        }
        if path.extension().and_then(|e| e.to_str()) == Some("rnkl") {
            Ok(LoadedModel::Flat(load_flat(&read_bytes(path)?)?))
        } else {
            let ensemble: TreeEnsemble = serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::Data(format!("cannot parse model {path:?}: {e}")))?;
            Ok(LoadedModel::Ensemble(ensemble))
        }
    }

    fn scorer(&self) -> &dyn Scorer {
        match self {
            LoadedModel::Ensemble(m) => m,
            LoadedModel::Flat(m) => m,
        }
    }

    fn schema_hash(&self) -> &str {
        match self {
            LoadedModel::Ensemble(m) => &m.schema_hash,
            LoadedModel::Flat(m) => &m.schema_hash,
        }
    }

    /// Which feature slots appear in at least one real split.
    fn used_slots(&self, arity: usize) -> Vec<bool> {
        let mut used = vec![false; arity];
        match self {
            LoadedModel::Ensemble(m) => {
                for (slot, flag) in m.used_features().into_iter().enumerate().take(arity) {
                    used[slot] = flag;
                }
            }
            LoadedModel::Flat(m) => {
                for split in &m.splits {
                    // padding levels carry an infinite threshold
                    if split.threshold.is_finite() {
                        if let Some(u) = used.get_mut(split.feature as usize) {
                            *u = true;
                        }
                    }
                }
            }
        }
        used
    }
}

fn read_logs(path: &Path) -> Result<(LogHeader, Vec<CompletionSession>), CliError> {
    Ok(decode_sessions(read_file(path)?.as_bytes())?)
}

fn check_hash(expected: &str, got: &str, what: &str) -> Result<(), CliError> {
    if expected != got {
        return Err(CliError::Data(format!(
            "{what} feature schema hash {got} does not match expected {expected}"
        )));
    }
    Ok(())
}

fn training_groups(sessions: &[CompletionSession]) -> Result<Vec<QueryGroup>, CliError> {
    let mut groups = Vec::new();
    for session in sessions {
        if !session.outcome().map_or(false, |o| o.is_select()) {
            continue;
        }
        for labeled in to_labeled_groups(session)? {
            groups.push(QueryGroup::from_labeled(&labeled)?);
        }
    }
    if groups.is_empty() {
        return Err(CliError::Data("logs contain no trainable look-ups".into()));
    }
    Ok(groups)
}

fn importance_groups(sessions: &[CompletionSession]) -> Result<Vec<ImportanceGroup>, CliError> {
    let mut out = Vec::new();
    for session in sessions {
        if !session.outcome().map_or(false, |o| o.is_select()) {
            continue;
        }
        for labeled in to_labeled_groups(session)? {
            out.push(ImportanceGroup {
                positive: labeled.positive_index(),
                rows: labeled.rows,
            });
        }
    }
    Ok(out)
}

fn print_offline(label: &str, report: &OfflineReport) {
    println!(
        "{label:>10}  R@1 {:.4}  R@5 {:.4}  (initial: R@1 {:.4}  R@5 {:.4}; {} look-ups)",
        report.r1_all, report.r5_all, report.r1_init, report.r5_init, report.lookups_all
    );
}

fn simulate_arm(
    config: &RunConfig,
    arm_name: &str,
    seed_override: Option<u64>,
) -> Result<(LogHeader, Vec<CompletionSession>), CliError> {
    let corpus = config.load_corpus()?;
    let keywords = config.load_keywords()?;
    let schema = default_schema();
    let mut sim = config.sim.clone();
    if let Some(seed) = seed_override {
        sim.master_seed = seed;
    }
    let model;
    let arm = if arm_name == "heuristic" {
        ArmRanker::Heuristic
    } else {
        model = LoadedModel::load(Path::new(arm_name))?;
        check_hash(&schema.hash(), model.schema_hash(), "model")?;
        ArmRanker::Model(model.scorer())
    };
    let sessions = simulate(&corpus, &keywords, &schema, &sim, &arm)?;
    let header = LogHeader {
        schema_version: SCHEMA_VERSION,
        feature_schema_hash: schema.hash(),
    };
    Ok((header, sessions))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Index(cfg) => {
            let config = RunConfig::load(&cfg.config)?;
            let corpus = config.load_corpus()?;
            let keywords = config.load_keywords()?;
            let index = build_index(&corpus, keywords)
                .map_err(|e| CliError::Data(e.to_string()))?;
            println!("files: {}", index.file_count());
            println!("distinct tokens: {}", index.distinct_tokens());
            println!("keywords: {}", index.keywords().len());
            println!("vocabulary (len >= 3): {}", index.vocabulary(3).len());
        }
        Command::Simulate { config, arm, out, seed } => {
            let config = RunConfig::load(&config.config)?;
            let (header, sessions) = simulate_arm(&config, &arm, seed)?;
            write_file(&out, encode_sessions(&header, &sessions).as_bytes())?;
            println!("wrote {} sessions to {}", sessions.len(), out.display());
        }
        Command::Train { config, logs, out } => {
            let config = RunConfig::load(&config.config)?;
            let (header, sessions) = read_logs(&logs)?;
            let schema = default_schema();
            check_hash(&schema.hash(), &header.feature_schema_hash, "log")?;
            let groups = training_groups(&sessions)?;
            println!("training on {} query groups", groups.len());
            let mut last = (0u32, 0.0f64);
            let ensemble =
                fit_with_progress(&groups, &config.train, &schema.hash(), |iter, loss| {
                    if iter == 0 || (iter + 1) % 50 == 0 {
                        println!("iter {:>4}  loss {loss:.6}", iter + 1);
                    }
                    last = (iter + 1, loss);
                })?;
            println!("final: iter {}  loss {:.6}", last.0, last.1);
            write_file(&out, serde_json::to_string(&ensemble).unwrap().as_bytes())?;
            println!("wrote model to {}", out.display());
        }
        Command::EvalOffline { config, logs, model, out } => {
            let config = RunConfig::load(&config.config)?;
            config.validate()?;
            let (header, sessions) = read_logs(&logs)?;
            let baseline = offline_report(&ranked_lookups(&sessions, &OfflineRanker::Baseline))?;
            print_offline("baseline", &baseline);
            let mut reports = vec![("baseline".to_string(), baseline)];
            if let Some(path) = model {
                let model = LoadedModel::load(&path)?;
                check_hash(&header.feature_schema_hash, model.schema_hash(), "model")?;
                let report = offline_report(&ranked_lookups(
                    &sessions,
                    &OfflineRanker::Model(model.scorer()),
                ))?;
                print_offline("model", &report);
                reports.push(("model".to_string(), report));
            }
            if let Some(out) = out {
                let json: serde_json::Map<String, serde_json::Value> = reports
                    .into_iter()
                    .map(|(k, v)| (k, serde_json::to_value(v).unwrap()))
                    .collect();
                write_file(&out, serde_json::to_string_pretty(&json).unwrap().as_bytes())?;
            }
        }
        Command::Abtest { config, arm_a, arm_b, out } => {
            let config = RunConfig::load(&config.config)?;
            let (_, sessions_a) = simulate_arm(&config, &arm_a, None)?;
            let (_, sessions_b) = simulate_arm(&config, &arm_b, None)?;
            let report = ab_report(&sessions_a, &sessions_b, &config.bootstrap)?;
            print!("{}", report.to_text());
            if let Some(out) = out {
                write_file(&out, serde_json::to_string_pretty(&report).unwrap().as_bytes())?;
            }
        }
        Command::Export { model, out, budget } => {
            let loaded = LoadedModel::load(&model)?;
            let LoadedModel::Ensemble(ensemble) = loaded else {
                return Err(CliError::Data("export expects a model JSON, not an artifact".into()));
            };
            let bytes = export_flat(&ensemble, budget)?;
            write_file(&out, &bytes)?;
            println!("wrote {} bytes to {}", bytes.len(), out.display());
        }
        Command::Inspect { artifact, latency_ms, candidates, repetitions } => {
            let bytes = read_bytes(&artifact)?;
            let model = load_flat(&bytes)?;
            println!("format version: {}", model.version);
            println!("schema hash: {}", model.schema_hash);
            println!("trees: {}  depth: {}  min arity: {}", model.n_trees(), model.depth, model.min_arity());
            let report = check_budget(
                &bytes,
                crate::artifact::DEFAULT_SIZE_BUDGET,
                latency_ms,
                candidates,
                repetitions,
            )?;
            println!(
                "size: {} bytes (budget {}, {})",
                report.size_bytes,
                report.size_limit,
                if report.size_ok { "ok" } else { "OVER" }
            );
            println!(
                "median latency: {:.3} ms over {} candidates (budget {} ms, {})",
                report.median_latency_ms,
                report.candidates,
                report.latency_limit_ms,
                if report.latency_ok { "ok" } else { "OVER" }
            );
            if !report.size_ok || !report.latency_ok {
                return Err(CliError::Budget("artifact exceeds its budget".into()));
            }
        }
        Command::Importance { config, logs, model, repeats, prune, out } => {
            let config = RunConfig::load(&config.config)?;
            let (header, sessions) = read_logs(&logs)?;
            let model = LoadedModel::load(&model)?;
            check_hash(&header.feature_schema_hash, model.schema_hash(), "model")?;
            let groups = importance_groups(&sessions)?;
            if groups.is_empty() {
                return Err(CliError::Data("logs contain no labeled look-ups".into()));
            }
            let schema = default_schema();
            let names = schema.slot_names();
            let arity = groups[0].rows[0].len();
            println!("permutation importance over {} look-ups ({repeats} repeats)", groups.len());
            let mut importances = Vec::with_capacity(arity);
            for slot in 0..arity {
                importances.push(permutation_importance(
                    model.scorer(),
                    &groups,
                    slot,
                    repeats,
                    config.bootstrap.seed,
                )?);
            }
            let mut rows: Vec<(usize, f64)> = importances.iter().copied().enumerate().collect();
            rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
            for (slot, imp) in rows {
                let name = names.get(slot).cloned().unwrap_or_else(|| format!("slot_{slot}"));
                println!("{name:<44} {imp:>9.5}");
            }
            if let Some(epsilon) = prune {
                let used = model.used_slots(arity);
                let pruned = crate::features::prune_schema(&schema, &importances, &used, epsilon)?;
                let json = serde_json::to_string_pretty(&pruned).unwrap();
                match out {
                    Some(path) => write_file(&path, json.as_bytes())?,
                    None => println!("{json}"),
                }
            }
        }
        Command::Pipeline { config, out_dir } => {
            let config = RunConfig::load(&config.config)?;
            run_pipeline(&config, &out_dir)?;
        }
    }
    Ok(())
}

/// Simulate → split → train → evaluate offline → export → A/B test.
pub fn run_pipeline(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let schema = default_schema();
    let header = LogHeader {
        schema_version: SCHEMA_VERSION,
        feature_schema_hash: schema.hash(),
    };

    println!("== simulate (heuristic arm) ==");
    let (_, sessions_a) = simulate_arm(config, "heuristic", None)?;
    let logs_a = out_dir.join("logs_heuristic.jsonl");
    write_file(&logs_a, encode_sessions(&header, &sessions_a).as_bytes())?;
    println!("{} sessions", sessions_a.len());

    println!("== train ==");
    let (train_sessions, holdout_sessions) =
        split_by_user(sessions_a.clone(), config.split_ratio, config.sim.master_seed)?;
    let groups = training_groups(&train_sessions)?;
    println!(
        "{} train / {} holdout sessions, {} query groups",
        train_sessions.len(),
        holdout_sessions.len(),
        groups.len()
    );
    let ensemble = fit_with_progress(&groups, &config.train, &schema.hash(), |iter, loss| {
        if iter == 0 || (iter + 1) % 50 == 0 {
            println!("iter {:>4}  loss {loss:.6}", iter + 1);
        }
    })?;
    let model_json = out_dir.join("model.json");
    write_file(&model_json, serde_json::to_string(&ensemble).unwrap().as_bytes())?;

    println!("== offline evaluation (holdout) ==");
    let baseline =
        offline_report(&ranked_lookups(&holdout_sessions, &OfflineRanker::Baseline))?;
    let model_report = offline_report(&ranked_lookups(
        &holdout_sessions,
        &OfflineRanker::Model(&ensemble),
    ))?;
    print_offline("baseline", &baseline);
    print_offline("model", &model_report);

    println!("== export ==");
    let bytes = export_flat(&ensemble, config.size_budget_bytes)?;
    let artifact_path = out_dir.join("model.rnkl");
    write_file(&artifact_path, &bytes)?;
    let budget = check_budget(
        &bytes,
        config.size_budget_bytes,
        config.latency_budget_ms,
        config.latency_candidates,
        config.latency_repetitions,
    )?;
    println!(
        "{} bytes, median latency {:.3} ms",
        budget.size_bytes, budget.median_latency_ms
    );
    if !budget.size_ok || !budget.latency_ok {
        return Err(CliError::Budget("artifact exceeds its budget".into()));
    }

    println!("== simulate (model arm) ==");
    let (_, sessions_b) = simulate_arm(config, artifact_path.to_str().unwrap(), None)?;
    let logs_b = out_dir.join("logs_model.jsonl");
    write_file(&logs_b, encode_sessions(&header, &sessions_b).as_bytes())?;
    println!("{} sessions", sessions_b.len());

    println!("== A/B test ==");
    let ab = ab_report(&sessions_a, &sessions_b, &config.bootstrap)?;
    print!("{}", ab.to_text());
    write_file(
        &out_dir.join("abtest.json"),
        serde_json::to_string_pretty(&ab).unwrap().as_bytes(),
    )?;
    Ok(())
}
