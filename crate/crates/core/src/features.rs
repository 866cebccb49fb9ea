//! Feature schema, anonymized feature vectors, and feature selection.
//!
//! Every value that leaves the client side is numeric, boolean, or one-hot —
//! never string content. Missing values use a NaN sentinel that serializes as
//! JSON `null` and is routed by the tree's per-split default direction.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::log_schema::{CandidateId, Trigger};
use crate::provider::{Block, CaretContext, ScopeIndex};

/// Sentinel for inapplicable feature values.
pub const MISSING: f64 = f64::NAN;

/// Capacity of the per-user recently-selected ring buffer.
pub const HISTORY_CAPACITY: usize = 100;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("schema mismatch: slot `{0}` is not part of the default schema")]
    SchemaMismatch(String),
    #[error("arity mismatch: vector has {got} slots, schema expects {expected}")]
    ArityMismatch { got: usize, expected: usize },
    #[error("all features pruned: resulting schema would be empty")]
    EmptySchema,
}

/// Kind of a declared feature. A one-hot group occupies one slot per category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    Boolean,
    OneHot { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDef {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

impl FeatureDef {
    pub fn slot_count(&self) -> usize {
        match &self.kind {
            FeatureKind::OneHot { categories } => categories.len(),
            _ => 1,
        }
    }
}

/// Versioned, ordered feature declaration shared by logs and model artifacts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub version: u32,
    pub features: Vec<FeatureDef>,
}

impl FeatureSchema {
    /// Total number of dense slots (one-hot groups expanded).
    pub fn arity(&self) -> usize {
        self.features.iter().map(FeatureDef::slot_count).sum()
    }

    /// Expanded slot names; one-hot slots are `name=category`.
    pub fn slot_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.arity());
        for def in &self.features {
            match &def.kind {
                FeatureKind::OneHot { categories } => {
                    for c in categories {
                        names.push(format!("{}={}", def.name, c));
                    }
                }
                _ => names.push(def.name.clone()),
            }
        }
        names
    }

    /// Digest of the ordered (name, kind) definition. Changes iff the
    /// definition changes; the version counter is not part of the digest.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        for def in &self.features {
            hasher.update(def.name.as_bytes());
            hasher.update([0u8]);
            match &def.kind {
                FeatureKind::Numeric => hasher.update(b"num"),
                FeatureKind::Boolean => hasher.update(b"bool"),
                FeatureKind::OneHot { categories } => {
                    hasher.update(b"onehot");
                    for c in categories {
                        hasher.update(c.as_bytes());
                        hasher.update([1u8]);
                    }
                }
            }
            hasher.update([0u8]);
        }
        hex::encode(hasher.finalize())
    }
}

fn num(name: &str) -> FeatureDef {
    FeatureDef { name: name.into(), kind: FeatureKind::Numeric }
}

fn boolean(name: &str) -> FeatureDef {
    FeatureDef { name: name.into(), kind: FeatureKind::Boolean }
}

fn one_hot(name: &str, categories: &[&str]) -> FeatureDef {
    FeatureDef {
        name: name.into(),
        kind: FeatureKind::OneHot { categories: categories.iter().map(|s| s.to_string()).collect() },
    }
}

/// The default 25-slot schema: prefix, syntactic, history, and session groups.
pub fn default_schema() -> FeatureSchema {
    FeatureSchema {
        version: 1,
        features: vec![
            // prefix group
            num("prefix_length"),
            num("matched_chars"),
            boolean("case_sensitive_match"),
            boolean("exact_match"),
            num("match_ratio"),
            // syntactic group
            boolean("is_keyword"),
            boolean("is_same_file"),
            boolean("is_same_module"),
            boolean("is_corpus_only"),
            num("same_file_count"),
            num("global_count"),
            num("candidate_length"),
            num("recency_distance"),
            one_hot(
                "enclosing_block",
                &["top_level", "function_body", "conditional_body", "loop_body"],
            ),
            // history group
            boolean("navigated_to_definition_before"),
            boolean("selected_before_in_user_history"),
            num("selections_of_this_candidate_in_buffer"),
            // session group
            num("session_duration_s"),
            num("lookup_ordinal"),
            num("baseline_rank_prev_lookup"),
            one_hot("trigger", &["manual", "auto"]),
        ],
    }
}

/// Dense per-candidate value row aligned to schema order.
///
/// Serializes as a bare JSON array with `null` for missing slots.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Serialize for FeatureVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for &v in &self.0 {
            if v.is_nan() {
                seq.serialize_element(&Option::<f64>::None)?;
            } else {
                seq.serialize_element(&v)?;
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for FeatureVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct VecVisitor;
        impl<'de> Visitor<'de> for VecVisitor {
            type Value = FeatureVector;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of numbers or nulls")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut values = Vec::with_capacity(seq.size_hint().unwrap_or(0));
                while let Some(v) = seq.next_element::<Option<f64>>()? {
                    values.push(v.unwrap_or(MISSING));
                }
                Ok(FeatureVector(values))
            }
        }
        deserializer.deserialize_seq(VecVisitor)
    }
}

/// Per-user completion history: recently selected hashes and hashes whose
/// definition was navigated to. Holds only salted hashes, never text.
#[derive(Debug, Clone, Default)]
pub struct UserHistory {
    selected: Vec<CandidateId>,
    navigated: BTreeSet<CandidateId>,
}

impl UserHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_selection(&mut self, id: CandidateId) {
        if self.selected.len() == HISTORY_CAPACITY {
            self.selected.remove(0);
        }
        self.selected.push(id);
    }

    pub fn record_navigation(&mut self, id: CandidateId) {
        self.navigated.insert(id);
    }

    pub fn selected_before(&self, id: CandidateId) -> bool {
        self.selected.contains(&id)
    }

    pub fn selection_count(&self, id: CandidateId) -> usize {
        self.selected.iter().filter(|&&s| s == id).count()
    }

    pub fn navigated_before(&self, id: CandidateId) -> bool {
        self.navigated.contains(&id)
    }
}

/// Look-up-level state threaded into per-candidate extraction.
#[derive(Debug, Clone)]
pub struct SessionContext {
    pub offset_ms: u64,
    pub trigger: Trigger,
    pub lookup_ordinal: u32,
    /// Display position of this candidate in the previous look-up, if any.
    pub baseline_rank_prev: Option<u32>,
}

fn bool_slot(v: bool) -> f64 {
    if v {
        1.0
    } else {
        0.0
    }
}

/// Number of leading characters shared by prefix and candidate, compared
/// ASCII-case-insensitively.
pub fn matched_chars(prefix: &str, candidate: &str) -> usize {
    prefix
        .chars()
        .zip(candidate.chars())
        .take_while(|(p, c)| p.eq_ignore_ascii_case(c))
        .count()
}

/// Fills the default schema for one candidate at one look-up.
pub fn extract_candidate_features(
    schema: &FeatureSchema,
    candidate: &str,
    id: CandidateId,
    ctx: &CaretContext,
    index: &ScopeIndex,
    history: &UserHistory,
    sess: &SessionContext,
) -> Result<FeatureVector, FeatureError> {
    let stats = index.candidate_stats(candidate, ctx);
    let prefix_len = ctx.prefix.chars().count();
    let cand_len = candidate.chars().count().max(1);
    let matched = matched_chars(&ctx.prefix, candidate);
    let case_sensitive = candidate.starts_with(ctx.prefix.as_str());
    let exact = candidate == ctx.prefix;

    let block_hot = |b: Block| bool_slot(ctx.block == b);
    let full = [
        prefix_len as f64,
        matched as f64,
        bool_slot(case_sensitive),
        bool_slot(exact),
        matched as f64 / cand_len as f64,
        bool_slot(stats.is_keyword),
        bool_slot(stats.same_file_count > 0),
        bool_slot(stats.same_module),
        bool_slot(stats.same_file_count == 0 && !stats.is_keyword),
        stats.same_file_count as f64,
        stats.global_count as f64,
        cand_len as f64,
        stats.recency_distance.map(|d| d as f64).unwrap_or(MISSING),
        block_hot(Block::TopLevel),
        block_hot(Block::FunctionBody),
        block_hot(Block::ConditionalBody),
        block_hot(Block::LoopBody),
        bool_slot(history.navigated_before(id)),
        bool_slot(history.selected_before(id)),
        history.selection_count(id) as f64,
        sess.offset_ms as f64 / 1000.0,
        sess.lookup_ordinal as f64,
        sess.baseline_rank_prev.map(|r| r as f64).unwrap_or(MISSING),
        bool_slot(sess.trigger == Trigger::Manual),
        bool_slot(sess.trigger == Trigger::Auto),
    ];

    project_slots(schema, &full)
}

/// Look-up-shared context slice: duration, trigger one-hot, ordinal.
pub fn extract_context_features(sess: &SessionContext) -> FeatureVector {
    FeatureVector(vec![
        sess.offset_ms as f64 / 1000.0,
        bool_slot(sess.trigger == Trigger::Manual),
        bool_slot(sess.trigger == Trigger::Auto),
        sess.lookup_ordinal as f64,
    ])
}

/// Projects the full default-order row onto `schema`, which must be the
/// default schema or a pruned subset of it.
fn project_slots(schema: &FeatureSchema, full: &[f64]) -> Result<FeatureVector, FeatureError> {
    let default = default_schema();
    let default_names = default.slot_names();
    debug_assert_eq!(default_names.len(), full.len());
    if *schema == default {
        return Ok(FeatureVector(full.to_vec()));
    }
    let mut out = Vec::with_capacity(schema.arity());
    for name in schema.slot_names() {
        match default_names.iter().position(|n| *n == name) {
            Some(i) => out.push(full[i]),
            None => return Err(FeatureError::SchemaMismatch(name)),
        }
    }
    Ok(FeatureVector(out))
}

/// A scoring model over dense feature rows. Implemented by the trained
/// ensemble and by the flat inference artifact.
pub trait Scorer {
    fn score(&self, values: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> Scorer for F {
    fn score(&self, values: &[f64]) -> f64 {
        self(values)
    }
}

/// One look-up's rows with the known positive index, for importance and
/// offline evaluation.
#[derive(Debug, Clone)]
pub struct ImportanceGroup {
    pub rows: Vec<FeatureVector>,
    pub positive: usize,
}

fn recall_at_1(scorer: &dyn Scorer, groups: &[ImportanceGroup]) -> f64 {
    let mut hits = 0usize;
    for g in groups {
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (i, row) in g.rows.iter().enumerate() {
            let s = scorer.score(row.values());
            if s > best_score {
                best_score = s;
                best = i;
            }
        }
        if best == g.positive {
            hits += 1;
        }
    }
    hits as f64 / groups.len() as f64
}

/// Mean drop in R@1 caused by globally permuting one feature column.
pub fn permutation_importance(
    scorer: &dyn Scorer,
    groups: &[ImportanceGroup],
    feature: usize,
    repeats: u32,
    seed: u64,
) -> Result<f64, FeatureError> {
    let arity = groups
        .first()
        .and_then(|g| g.rows.first())
        .map(|r| r.len())
        .unwrap_or(0);
    if feature >= arity {
        return Err(FeatureError::ArityMismatch { got: feature, expected: arity });
    }
    let intact = recall_at_1(scorer, groups);

    let column: Vec<f64> = groups
        .iter()
        .flat_map(|g| g.rows.iter().map(|r| r.values()[feature]))
        .collect();
    let mut total = 0.0;
    for rep in 0..repeats {
        let mut order: Vec<usize> = (0..column.len()).collect();
        let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(rep as u64));
        order.shuffle(&mut rng);
        let mut shuffled = groups.to_vec();
        let mut k = 0;
        for g in shuffled.iter_mut() {
            for row in g.rows.iter_mut() {
                row.0[feature] = column[order[k]];
                k += 1;
            }
        }
        total += intact - recall_at_1(scorer, &shuffled);
    }
    Ok(total / repeats as f64)
}

/// Keeps features whose importance exceeds `epsilon` or that appear in at
/// least one tree split. One-hot groups are kept if any of their slots
/// qualifies. Order is preserved and the version is incremented.
pub fn prune_schema(
    schema: &FeatureSchema,
    slot_importances: &[f64],
    slots_used_in_splits: &[bool],
    epsilon: f64,
) -> Result<FeatureSchema, FeatureError> {
    if slot_importances.len() != schema.arity() || slots_used_in_splits.len() != schema.arity() {
        return Err(FeatureError::ArityMismatch {
            got: slot_importances.len(),
            expected: schema.arity(),
        });
    }
    let mut kept = Vec::new();
    let mut slot = 0;
    for def in &schema.features {
        let n = def.slot_count();
        let keep = (slot..slot + n)
            .any(|i| slot_importances[i] > epsilon || slots_used_in_splits[i]);
        if keep {
            kept.push(def.clone());
        }
        slot += n;
    }
    if kept.is_empty() {
        return Err(FeatureError::EmptySchema);
    }
    Ok(FeatureSchema { version: schema.version + 1, features: kept })
}
