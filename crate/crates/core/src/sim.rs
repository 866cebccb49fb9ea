//! Deterministic user simulator: replays typing sessions over a corpus and
//! emits anonymized completion logs for either ranking arm.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::features::{
    extract_candidate_features, extract_context_features, FeatureError, FeatureSchema,
    Scorer, SessionContext, UserHistory,
};
use crate::log_schema::{
    validate_session, CandidateId, CandidateRecord, CompletionSession, LookupRecord,
    SchemaError, SessionEvent, SessionHeader, SessionOutcome, Trigger,
};
use crate::provider::{
    build_index, candidates_at, heuristic_rank, tokenize, Block, CaretContext,
    ProviderError, ScopeIndex, Token, TokenKind,
};

/// Milliseconds charged per simulated user action.
pub const ACTION_MS: u64 = 120;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("corpus has no files")]
    EmptyCorpus,
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub users: u32,
    pub sessions_per_user: u32,
    /// Number of list positions the simulated user actually looks at.
    pub visible_window: usize,
    /// Selection probability at each visible position.
    pub select_probs: Vec<f64>,
    pub manual_start_prob: f64,
    pub explicit_cancel_prob: f64,
    pub min_token_length: usize,
    /// Display cap; the model arm re-ranks within this pool.
    pub candidate_cap: usize,
    pub master_seed: u64,
    pub session_date: String,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            users: 40,
            sessions_per_user: 60,
            visible_window: 5,
            select_probs: vec![0.8, 0.55, 0.35, 0.2, 0.1],
            manual_start_prob: 0.05,
            explicit_cancel_prob: 0.01,
            min_token_length: 3,
            candidate_cap: 20,
            master_seed: 0,
            session_date: "2026-08-01".into(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |m: &str| Err(SimError::InvalidConfig(m.into()));
        if self.users == 0 || self.sessions_per_user == 0 {
            return fail("users and sessions_per_user must be positive");
        }
        if self.visible_window == 0 || self.select_probs.len() != self.visible_window {
            return fail("select_probs must have one entry per visible position");
        }
        if self
            .select_probs
            .iter()
            .chain([&self.manual_start_prob, &self.explicit_cancel_prob])
            .any(|p| !(0.0..=1.0).contains(p))
        {
            return fail("probabilities must lie in [0, 1]");
        }
        if self.candidate_cap < 2 {
            return fail("candidate_cap must be at least 2");
        }
        if self.min_token_length == 0 {
            return fail("min_token_length must be positive");
        }
        Ok(())
    }
}

/// Which ranking the simulated IDE shows.
pub enum ArmRanker<'a> {
    Heuristic,
    Model(&'a dyn Scorer),
}

fn seeded_rng(tag: &str, master_seed: u64, a: u64, b: u64) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    h.update(master_seed.to_le_bytes());
    h.update(a.to_le_bytes());
    h.update(b.to_le_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}

fn user_salt(master_seed: u64, user_ord: u32) -> u64 {
    let mut h = Sha256::new();
    h.update(b"salt");
    h.update(master_seed.to_le_bytes());
    h.update(u64::from(user_ord).to_le_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().unwrap())
}

/// Salted candidate hash; the raw token text never reaches the log.
pub fn hash_candidate(salt: u64, text: &str) -> CandidateId {
    let mut h = Sha256::new();
    h.update(salt.to_le_bytes());
    h.update(text.as_bytes());
    CandidateId(u64::from_le_bytes(h.finalize()[..8].try_into().unwrap()))
}

/// Enclosing block inferred from the most recent structural keyword before
/// the caret.
fn block_at(tokens: &[Token], caret_ordinal: usize) -> Block {
    for token in tokens[..caret_ordinal.min(tokens.len())].iter().rev() {
        match token.text.as_str() {
            "if" | "elif" | "else" | "match" => return Block::ConditionalBody,
            "for" | "while" | "loop" => return Block::LoopBody,
            "def" | "fn" | "func" | "function" => return Block::FunctionBody,
            _ => {}
        }
    }
    Block::TopLevel
}

struct SessionSetup<'a> {
    file_id: &'a str,
    truth: &'a str,
    byte_offset: usize,
    block: Block,
    trigger: Trigger,
}

/// Runs one completion session; `None` when nothing can be shown at the
/// starting caret.
#[allow(clippy::too_many_arguments)]
fn run_session(
    setup: &SessionSetup,
    index: &ScopeIndex,
    schema: &FeatureSchema,
    config: &SimConfig,
    arm: &ArmRanker,
    salt: u64,
    history: &mut UserHistory,
    policy: &mut ChaCha20Rng,
) -> Result<Option<(Vec<SessionEvent>, SessionOutcome, Option<CandidateId>)>, SimError> {
    let truth_chars: Vec<char> = setup.truth.chars().collect();
    let truth_id = hash_candidate(salt, setup.truth);
    let mut prefix = String::new();
    if setup.trigger == Trigger::Auto {
        prefix.push(truth_chars[0]);
    }

    let mut events: Vec<SessionEvent> = Vec::new();
    let mut prev_ranks: HashMap<String, u32> = HashMap::new();
    let mut truth_displayed = false;

    loop {
        let now = events.len() as u64 * ACTION_MS;
        let ordinal = events.len() as u32;
        let ctx = CaretContext {
            file_id: setup.file_id.to_string(),
            byte_offset: setup.byte_offset,
            prefix: prefix.clone(),
            block: setup.block,
        };
        let matched = candidates_at(index, &ctx)?;
        if matched.is_empty() {
            if events.is_empty() {
                return Ok(None);
            }
            // Nothing left to show; the user finishes the word unassisted.
            let outcome = if truth_displayed {
                SessionOutcome::TypedSelect
            } else {
                SessionOutcome::TypedCancel
            };
            let selected = (outcome == SessionOutcome::TypedSelect).then_some(truth_id);
            events.push(SessionEvent::finished(now, outcome, selected));
            return Ok(Some((events, outcome, selected)));
        }

        // Pool = heuristic top positions; both arms share it so the model
        // only reorders what the baseline would have shown.
        let mut pool = heuristic_rank(matched, &ctx, index);
        pool.truncate(config.candidate_cap);
        let rows = pool
            .iter()
            .map(|text| {
                let sess = SessionContext {
                    offset_ms: now,
                    trigger: setup.trigger,
                    lookup_ordinal: ordinal,
                    baseline_rank_prev: prev_ranks.get(text).copied(),
                };
                extract_candidate_features(
                    schema,
                    text,
                    hash_candidate(salt, text),
                    &ctx,
                    index,
                    history,
                    &sess,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut display: Vec<usize> = (0..pool.len()).collect();
        if let ArmRanker::Model(scorer) = arm {
            let scores: Vec<f64> = rows.iter().map(|r| scorer.score(r.values())).collect();
            display.sort_by(|&a, &b| {
                scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b))
            });
        }

        let shared = extract_context_features(&SessionContext {
            offset_ms: now,
            trigger: setup.trigger,
            lookup_ordinal: ordinal,
            baseline_rank_prev: None,
        });
        let lookup = LookupRecord {
            ordinal,
            prefix_length: prefix.chars().count() as u32,
            shared_features: shared,
            candidates: display
                .iter()
                .enumerate()
                .map(|(pos, &i)| CandidateRecord {
                    candidate_id: hash_candidate(salt, &pool[i]),
                    baseline_rank: pos as u32,
                    features: rows[i].clone(),
                })
                .collect(),
        };
        if ordinal == 0 {
            events.push(SessionEvent::started(lookup));
        } else {
            events.push(SessionEvent::char_typed(now, lookup));
        }
        prev_ranks = display
            .iter()
            .enumerate()
            .map(|(pos, &i)| (pool[i].clone(), pos as u32))
            .collect();
        let truth_pos = display.iter().position(|&i| pool[i] == setup.truth);
        truth_displayed |= truth_pos.is_some();

        // Both draws happen every step so the stream position does not leak
        // information about the displayed list.
        let u_select: f64 = policy.gen();
        let u_cancel: f64 = policy.gen();

        if let Some(pos) = truth_pos {
            if pos < config.visible_window && u_select < config.select_probs[pos] {
                for _ in 0..pos {
                    events.push(SessionEvent::nav_down(events.len() as u64 * ACTION_MS));
                }
                events.push(SessionEvent::finished(
                    events.len() as u64 * ACTION_MS,
                    SessionOutcome::ExplicitSelect,
                    Some(truth_id),
                ));
                return Ok(Some((events, SessionOutcome::ExplicitSelect, Some(truth_id))));
            }
        }
        if u_cancel < config.explicit_cancel_prob {
            events.push(SessionEvent::finished(
                events.len() as u64 * ACTION_MS,
                SessionOutcome::ExplicitCancel,
                None,
            ));
            return Ok(Some((events, SessionOutcome::ExplicitCancel, None)));
        }
        if prefix.chars().count() == truth_chars.len() {
            let outcome = if truth_displayed {
                SessionOutcome::TypedSelect
            } else {
                SessionOutcome::TypedCancel
            };
            let selected = (outcome == SessionOutcome::TypedSelect).then_some(truth_id);
            events.push(SessionEvent::finished(
                events.len() as u64 * ACTION_MS,
                outcome,
                selected,
            ));
            return Ok(Some((events, outcome, selected)));
        }
        prefix.push(truth_chars[prefix.chars().count()]);
    }
}

/// Simulates every user over the corpus and returns validated sessions.
/// Fully deterministic in `(corpus, keywords, schema, config, arm)`; session
/// triggering depends only on the corpus and config, never on the arm.
pub fn simulate(
    corpus: &[(String, String)],
    keywords: &BTreeSet<String>,
    schema: &FeatureSchema,
    config: &SimConfig,
    arm: &ArmRanker,
) -> Result<Vec<CompletionSession>, SimError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(SimError::EmptyCorpus);
    }
    let index = build_index(corpus, keywords.clone())?;
    let file_tokens: Vec<Vec<Token>> =
        corpus.iter().map(|(_, text)| tokenize(text, keywords)).collect();

    let mut sessions = Vec::new();
    for user_ord in 0..config.users {
        let salt = user_salt(config.master_seed, user_ord);
        // Digits only: identifier-free by construction.
        let user_id = format!("u{:020}", user_salt(config.master_seed ^ 0x5eed, user_ord));
        let mut trigger_rng = seeded_rng("trigger", config.master_seed, user_ord.into(), 0);
        let mut history = UserHistory::new();
        let mut emitted = 0u32;
        let mut attempt = 0u64;

        'files: for step in 0..corpus.len() {
            let fi = (user_ord as usize + step) % corpus.len();
            let (file_id, _) = &corpus[fi];
            for (tok_ord, token) in file_tokens[fi].iter().enumerate() {
                if token.text.chars().count() < config.min_token_length
                    || !matches!(token.kind, TokenKind::Identifier | TokenKind::Keyword)
                {
                    continue;
                }
                let manual: bool = trigger_rng.gen::<f64>() < config.manual_start_prob;
                let mut policy = seeded_rng("policy", config.master_seed, user_ord.into(), attempt);
                attempt += 1;
                let setup = SessionSetup {
                    file_id,
                    truth: &token.text,
                    byte_offset: token.byte_offset,
                    block: block_at(&file_tokens[fi], tok_ord),
                    trigger: if manual { Trigger::Manual } else { Trigger::Auto },
                };
                let Some((events, outcome, selected)) = run_session(
                    &setup, &index, schema, config, arm, salt, &mut history, &mut policy,
                )?
                else {
                    continue;
                };
                if outcome.is_select() {
                    history.record_selection(selected.unwrap());
                }
                let header = SessionHeader {
                    user_id: user_id.clone(),
                    session_id: format!("{user_id}-{emitted}"),
                    session_date: config.session_date.clone(),
                    trigger: setup.trigger,
                };
                sessions.push(validate_session(events, header)?);
                emitted += 1;
                if emitted == config.sessions_per_user {
                    break 'files;
                }
            }
        }
    }
    Ok(sessions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::default_schema;
    use crate::log_schema::{decode_sessions, encode_sessions, leakage_scan, LogHeader};

    fn corpus() -> Vec<(String, String)> {
        let files = [
            ("src/render.py", "def render(canvas, sprite):\n    for layer in canvas.layers:\n        layer.blit(sprite)\n    return canvas\n"),
            ("src/canvas.py", "def resize(canvas, width, height):\n    canvas.width = width\n    canvas.height = height\n    if canvas.dirty:\n        canvas.flush()\n"),
            ("src/sprite.py", "def load_sprite(path):\n    sprite = decode(path)\n    while sprite.pending:\n        sprite.advance()\n    return sprite\n"),
            ("util/decode.py", "def decode(path):\n    payload = read(path)\n    if payload:\n        return unpack(payload)\n    return None\n"),
        ];
        files.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn keywords() -> BTreeSet<String> {
        ["def", "for", "if", "while", "return", "None", "in"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn small_config() -> SimConfig {
        SimConfig {
            users: 4,
            sessions_per_user: 10,
            master_seed: 11,
            ..SimConfig::default()
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let schema = default_schema();
        let cfg = small_config();
        let a = simulate(&corpus(), &keywords(), &schema, &cfg, &ArmRanker::Heuristic).unwrap();
        let b = simulate(&corpus(), &keywords(), &schema, &cfg, &ArmRanker::Heuristic).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(!a.is_empty());
    }

    #[test]
    fn emitted_logs_decode_and_revalidate() {
        let schema = default_schema();
        let cfg = small_config();
        let sessions =
            simulate(&corpus(), &keywords(), &schema, &cfg, &ArmRanker::Heuristic).unwrap();
        let header = LogHeader {
            schema_version: crate::log_schema::SCHEMA_VERSION,
            feature_schema_hash: schema.hash(),
        };
        let text = encode_sessions(&header, &sessions);
        let (decoded_header, decoded) = decode_sessions(text.as_bytes()).unwrap();
        assert_eq!(decoded_header.feature_schema_hash, schema.hash());
        // NaN slots make direct comparison useless; the byte form is exact.
        assert_eq!(encode_sessions(&decoded_header, &decoded), text);
    }

    #[test]
    fn zero_select_probs_mean_no_explicit_selects() {
        let schema = default_schema();
        let cfg = SimConfig {
            select_probs: vec![0.0; 5],
            ..small_config()
        };
        let sessions =
            simulate(&corpus(), &keywords(), &schema, &cfg, &ArmRanker::Heuristic).unwrap();
        assert!(sessions
            .iter()
            .all(|s| s.outcome() != Some(SessionOutcome::ExplicitSelect)));
    }

    #[test]
    fn triggering_is_ranker_independent() {
        let schema = default_schema();
        let cfg = small_config();
        let heur =
            simulate(&corpus(), &keywords(), &schema, &cfg, &ArmRanker::Heuristic).unwrap();
        // A ranker that actively inverts candidate length preferences.
        let upside_down = |v: &[f64]| v[11];
        let model = simulate(
            &corpus(),
            &keywords(),
            &schema,
            &cfg,
            &ArmRanker::Model(&upside_down),
        )
        .unwrap();
        let starts = |s: &[CompletionSession]| -> Vec<(String, Trigger, u32)> {
            s.iter()
                .map(|x| {
                    (
                        x.user_id.clone(),
                        x.trigger,
                        x.lookups().next().unwrap().prefix_length,
                    )
                })
                .collect()
        };
        assert_eq!(starts(&heur), starts(&model));
    }

    #[test]
    fn candidate_ids_are_salted_per_user() {
        let s1 = user_salt(5, 0);
        let s2 = user_salt(5, 1);
        assert_ne!(s1, s2);
        assert_eq!(hash_candidate(s1, "canvas"), hash_candidate(s1, "canvas"));
        assert_ne!(hash_candidate(s1, "canvas"), hash_candidate(s2, "canvas"));
        assert_ne!(hash_candidate(s1, "canvas"), hash_candidate(s1, "sprite"));
    }

    #[test]
    fn logs_leak_no_vocabulary() {
        let schema = default_schema();
        let cfg = small_config();
        let sessions =
            simulate(&corpus(), &keywords(), &schema, &cfg, &ArmRanker::Heuristic).unwrap();
        let header = LogHeader {
            schema_version: crate::log_schema::SCHEMA_VERSION,
            feature_schema_hash: schema.hash(),
        };
        let text = encode_sessions(&header, &sessions);
        let index = build_index(&corpus(), keywords()).unwrap();
        let leaks = leakage_scan(text.as_bytes(), &index.vocabulary(3));
        assert!(leaks.is_empty(), "leaked: {leaks:?}");
    }

    #[test]
    fn session_quota_is_respected() {
        let schema = default_schema();
        let cfg = SimConfig { users: 2, sessions_per_user: 3, ..small_config() };
        let sessions =
            simulate(&corpus(), &keywords(), &schema, &cfg, &ArmRanker::Heuristic).unwrap();
        let mut per_user: HashMap<&str, usize> = HashMap::new();
        for s in &sessions {
            *per_user.entry(&s.user_id).or_default() += 1;
        }
        assert_eq!(per_user.len(), 2);
        assert!(per_user.values().all(|&n| n <= 3));
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = SimConfig { select_probs: vec![0.5; 3], ..SimConfig::default() };
        assert!(matches!(bad.validate(), Err(SimError::InvalidConfig(_))));
        let bad = SimConfig { manual_start_prob: 1.5, ..SimConfig::default() };
        assert!(matches!(bad.validate(), Err(SimError::InvalidConfig(_))));
        let bad = SimConfig { users: 0, ..SimConfig::default() };
        assert!(matches!(bad.validate(), Err(SimError::InvalidConfig(_))));
    }
}
