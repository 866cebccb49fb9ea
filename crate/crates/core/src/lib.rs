//! Learning to rank code-completion candidates from anonymized IDE usage
//! logs: candidate provider, feature extraction, listwise gradient-boosted
//! ranker, flat inference artifact, user simulator, and A/B evaluation.

pub mod artifact;
pub mod cli;
pub mod config;
pub mod eval;
pub mod features;
pub mod log_schema;
pub mod provider;
pub mod ranker;
pub mod sim;

pub use artifact::{export_flat, load_flat, FlatModel};
pub use config::RunConfig;
pub use eval::{ab_report, bootstrap_pvalue, recall_at_k, BootstrapConfig};
pub use features::{default_schema, FeatureSchema, FeatureVector, Scorer};
pub use log_schema::{decode_sessions, encode_sessions, CompletionSession};
pub use provider::{build_index, candidates_at, heuristic_rank, ScopeIndex};
pub use ranker::{fit, QueryGroup, TrainParams, TreeEnsemble};
pub use sim::{simulate, ArmRanker, SimConfig};
