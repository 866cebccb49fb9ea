//! Anonymized completion-session log schema: validation, labeling, and the
//! line-delimited file format.
//!
//! A log file is UTF-8 text. Line 1 is a header record
//! `{"schema_version": N, "feature_schema_hash": "..."}`; each following line
//! is one session. The schema is closed: unknown fields are rejected, and the
//! field names below form the fixed whitelist used by [`leakage_scan`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;

/// Current log format version.
pub const SCHEMA_VERSION: u32 = 1;

/// Every JSON field name and enum literal the format may emit. Anything the
/// leakage scanner finds outside this set is a potential leak.
pub const FIELD_WHITELIST: &[&str] = &[
    "schema_version",
    "feature_schema_hash",
    "user_id",
    "session_id",
    "session_date",
    "trigger",
    "events",
    "kind",
    "offset_ms",
    "lookup",
    "outcome",
    "selected_candidate",
    "ordinal",
    "prefix_length",
    "shared_features",
    "candidates",
    "candidate_id",
    "baseline_rank",
    "features",
    "Started",
    "CharTyped",
    "NavUp",
    "NavDown",
    "Finished",
    "Manual",
    "Auto",
    "ExplicitSelect",
    "TypedSelect",
    "ExplicitCancel",
    "TypedCancel",
];

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("session has no Started event at position 0")]
    MissingStarted,
    #[error("session has no Finished event at the end")]
    MissingFinished,
    #[error("event {index}: offset {offset} decreases or Started is not at 0")]
    NonMonotoneTime { index: usize, offset: u64 },
    #[error("look-up ordinals are not consecutive (expected {expected}, got {got:?})")]
    LookupGap { expected: u32, got: Option<u32> },
    #[error("select outcome without a selected candidate present in the look-ups")]
    SelectWithoutCandidate,
    #[error("event {index}: {reason}")]
    EventShape { index: usize, reason: String },
    #[error("session outcome is not a select; no labeled groups can be produced")]
    NotASelectOutcome,
    #[error("log header declares schema version {got}, expected {expected}")]
    SchemaVersionMismatch { got: u32, expected: u32 },
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
}

/// 64-bit salted hash of a candidate token. The salt is per-user and lives
/// only in the generator's runtime state.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct CandidateId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trigger {
    Manual,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SessionOutcome {
    ExplicitSelect,
    TypedSelect,
    ExplicitCancel,
    TypedCancel,
}

impl SessionOutcome {
    pub fn is_select(self) -> bool {
        matches!(self, SessionOutcome::ExplicitSelect | SessionOutcome::TypedSelect)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Started,
    CharTyped,
    NavUp,
    NavDown,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateRecord {
    pub candidate_id: CandidateId,
    pub baseline_rank: u32,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LookupRecord {
    pub ordinal: u32,
    pub prefix_length: u32,
    pub shared_features: FeatureVector,
    pub candidates: Vec<CandidateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionEvent {
    pub kind: EventKind,
    pub offset_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lookup: Option<LookupRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<SessionOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_candidate: Option<CandidateId>,
}

impl SessionEvent {
    pub fn started(lookup: LookupRecord) -> Self {
        Self {
            kind: EventKind::Started,
            offset_ms: 0,
            lookup: Some(lookup),
            outcome: None,
            selected_candidate: None,
        }
    }

    pub fn char_typed(offset_ms: u64, lookup: LookupRecord) -> Self {
        Self {
            kind: EventKind::CharTyped,
            offset_ms,
            lookup: Some(lookup),
            outcome: None,
            selected_candidate: None,
        }
    }

    pub fn nav_down(offset_ms: u64) -> Self {
        Self {
            kind: EventKind::NavDown,
            offset_ms,
            lookup: None,
            outcome: None,
            selected_candidate: None,
        }
    }

    pub fn finished(
        offset_ms: u64,
        outcome: SessionOutcome,
        selected: Option<CandidateId>,
    ) -> Self {
        Self {
            kind: EventKind::Finished,
            offset_ms,
            lookup: None,
            outcome: Some(outcome),
            selected_candidate: selected,
        }
    }
}

/// Session metadata supplied alongside the raw event list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionHeader {
    pub user_id: String,
    pub session_id: String,
    pub session_date: String,
    pub trigger: Trigger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompletionSession {
    pub user_id: String,
    pub session_id: String,
    pub session_date: String,
    pub trigger: Trigger,
    pub events: Vec<SessionEvent>,
}

impl CompletionSession {
    pub fn lookups(&self) -> impl Iterator<Item = &LookupRecord> {
        self.events.iter().filter_map(|e| e.lookup.as_ref())
    }

    pub fn outcome(&self) -> Option<SessionOutcome> {
        self.events.last().and_then(|e| e.outcome)
    }

    pub fn selected_candidate(&self) -> Option<CandidateId> {
        self.events.last().and_then(|e| e.selected_candidate)
    }

    pub fn char_typed_count(&self) -> usize {
        self.events.iter().filter(|e| e.kind == EventKind::CharTyped).count()
    }

    /// Prefix length of the last look-up.
    pub fn final_prefix_length(&self) -> Option<u32> {
        self.lookups().last().map(|l| l.prefix_length)
    }
}

/// One look-up converted to a training query group.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGroup {
    pub session_id: String,
    pub lookup_ordinal: u32,
    pub rows: Vec<FeatureVector>,
    pub targets: Vec<u8>,
}

impl LabeledGroup {
    pub fn positive_index(&self) -> usize {
        self.targets.iter().position(|&t| t == 1).expect("one positive per group")
    }
}

/// Checks every structural invariant and assembles the session.
pub fn validate_session(
    events: Vec<SessionEvent>,
    header: SessionHeader,
) -> Result<CompletionSession, SchemaError> {
    let first = events.first().ok_or(SchemaError::MissingStarted)?;
    if first.kind != EventKind::Started {
        return Err(SchemaError::MissingStarted);
    }
    if first.offset_ms != 0 {
        return Err(SchemaError::NonMonotoneTime { index: 0, offset: first.offset_ms });
    }
    let last = events.last().unwrap();
    if last.kind != EventKind::Finished {
        return Err(SchemaError::MissingFinished);
    }

    let mut prev_offset = 0u64;
    let mut next_ordinal = 0u32;
    let mut prev_prefix_len: Option<u32> = None;
    for (i, event) in events.iter().enumerate() {
        if i > 0 && event.kind == EventKind::Started {
            return Err(SchemaError::EventShape {
                index: i,
                reason: "duplicate Started event".into(),
            });
        }
        if i + 1 < events.len() && event.kind == EventKind::Finished {
            return Err(SchemaError::EventShape {
                index: i,
                reason: "Finished event before the end of the session".into(),
            });
        }
        if event.offset_ms < prev_offset {
            return Err(SchemaError::NonMonotoneTime { index: i, offset: event.offset_ms });
        }
        prev_offset = event.offset_ms;

        match event.kind {
            EventKind::Started | EventKind::CharTyped => {
                let lookup = event
                    .lookup
                    .as_ref()
                    .ok_or(SchemaError::LookupGap { expected: next_ordinal, got: None })?;
                if lookup.ordinal != next_ordinal {
                    return Err(SchemaError::LookupGap {
                        expected: next_ordinal,
                        got: Some(lookup.ordinal),
                    });
                }
                next_ordinal += 1;
                if lookup.candidates.is_empty() {
                    return Err(SchemaError::EventShape {
                        index: i,
                        reason: "look-up has no candidates".into(),
                    });
                }
                let ids: BTreeSet<_> =
                    lookup.candidates.iter().map(|c| c.candidate_id).collect();
                if ids.len() != lookup.candidates.len() {
                    return Err(SchemaError::EventShape {
                        index: i,
                        reason: "duplicate candidate ids in look-up".into(),
                    });
                }
                for (pos, cand) in lookup.candidates.iter().enumerate() {
                    if cand.baseline_rank != pos as u32 {
                        return Err(SchemaError::EventShape {
                            index: i,
                            reason: format!(
                                "baseline_rank {} does not match list position {pos}",
                                cand.baseline_rank
                            ),
                        });
                    }
                }
                if let Some(prev) = prev_prefix_len {
                    if lookup.prefix_length < prev {
                        return Err(SchemaError::EventShape {
                            index: i,
                            reason: "prefix_length decreased across look-ups".into(),
                        });
                    }
                }
                prev_prefix_len = Some(lookup.prefix_length);
            }
            EventKind::NavUp | EventKind::NavDown | EventKind::Finished => {
                if event.lookup.is_some() {
                    return Err(SchemaError::EventShape {
                        index: i,
                        reason: "navigation/finish events must not carry a look-up".into(),
                    });
                }
            }
        }
        if event.kind != EventKind::Finished && event.outcome.is_some() {
            return Err(SchemaError::EventShape {
                index: i,
                reason: "outcome on a non-Finished event".into(),
            });
        }
    }

    let outcome = last.outcome.ok_or(SchemaError::MissingFinished)?;
    match (outcome.is_select(), last.selected_candidate) {
        (true, None) | (false, Some(_)) => return Err(SchemaError::SelectWithoutCandidate),
        (true, Some(id)) => {
            let session_lookups: Vec<&LookupRecord> =
                events.iter().filter_map(|e| e.lookup.as_ref()).collect();
            let contains =
                |l: &&LookupRecord| l.candidates.iter().any(|c| c.candidate_id == id);
            let present = match outcome {
                SessionOutcome::ExplicitSelect => session_lookups.last().map_or(false, contains),
                _ => session_lookups.iter().any(|l| contains(&l)),
            };
            if !present {
                return Err(SchemaError::SelectWithoutCandidate);
            }
        }
        (false, None) => {}
    }

    Ok(CompletionSession {
        user_id: header.user_id,
        session_id: header.session_id,
        session_date: header.session_date,
        trigger: header.trigger,
        events,
    })
}

/// Converts a select-outcome session into training query groups: one per
/// look-up that contains the selected candidate and offers a real choice.
pub fn to_labeled_groups(session: &CompletionSession) -> Result<Vec<LabeledGroup>, SchemaError> {
    let outcome = session.outcome().ok_or(SchemaError::MissingFinished)?;
    if !outcome.is_select() {
        return Err(SchemaError::NotASelectOutcome);
    }
    let selected = session.selected_candidate().ok_or(SchemaError::SelectWithoutCandidate)?;

    let mut groups = Vec::new();
    for lookup in session.lookups() {
        if lookup.candidates.len() < 2 {
            continue;
        }
        if !lookup.candidates.iter().any(|c| c.candidate_id == selected) {
            continue;
        }
        let rows = lookup.candidates.iter().map(|c| c.features.clone()).collect();
        let targets = lookup
            .candidates
            .iter()
            .map(|c| u8::from(c.candidate_id == selected))
            .collect();
        groups.push(LabeledGroup {
            session_id: session.session_id.clone(),
            lookup_ordinal: lookup.ordinal,
            rows,
            targets,
        });
    }
    Ok(groups)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub schema_version: u32,
    pub feature_schema_hash: String,
}

/// Serializes sessions as one JSON object per line, preceded by the header.
pub fn encode_sessions(header: &LogHeader, sessions: &[CompletionSession]) -> String {
    let mut out = String::new();
    out.push_str(&serde_json::to_string(header).expect("header serializes"));
    out.push('\n');
    for session in sessions {
        out.push_str(&serde_json::to_string(session).expect("session serializes"));
        out.push('\n');
    }
    out
}

/// Parses and re-validates a log file. Empty input yields an empty list.
pub fn decode_sessions(
    bytes: &[u8],
) -> Result<(LogHeader, Vec<CompletionSession>), SchemaError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| SchemaError::MalformedRecord { line: 0, reason: e.to_string() })?;
    if text.trim().is_empty() {
        return Ok((
            LogHeader {
                schema_version: SCHEMA_VERSION,
                feature_schema_hash: String::new(),
            },
            Vec::new(),
        ));
    }
    let mut lines = text.lines().enumerate();
    let (_, header_line) = lines.next().unwrap();
    let header: LogHeader = serde_json::from_str(header_line)
        .map_err(|e| SchemaError::MalformedRecord { line: 1, reason: e.to_string() })?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(SchemaError::SchemaVersionMismatch {
            got: header.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    let mut sessions = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let session: CompletionSession = serde_json::from_str(line)
            .map_err(|e| SchemaError::MalformedRecord { line: i + 1, reason: e.to_string() })?;
        let header = SessionHeader {
            user_id: session.user_id.clone(),
            session_id: session.session_id.clone(),
            session_date: session.session_date.clone(),
            trigger: session.trigger,
        };
        let session = validate_session(session.events, header)?;
        if !seen_ids.insert(session.session_id.clone()) {
            return Err(SchemaError::MalformedRecord {
                line: i + 1,
                reason: format!("duplicate session_id {}", session.session_id),
            });
        }
        sessions.push(session);
    }
    Ok((header, sessions))
}

/// Reports vocabulary strings that appear in the encoded bytes outside the
/// field-name whitelist. An empty set means the log leaks nothing.
pub fn leakage_scan(bytes: &[u8], vocabulary: &BTreeSet<String>) -> BTreeSet<String> {
    let mut text = String::from_utf8_lossy(bytes).into_owned();
    // Mask whitelisted schema words so they cannot produce false positives.
    for word in FIELD_WHITELIST {
        let mask: String = "\u{1}".repeat(word.len());
        text = text.replace(word, &mask);
    }
    vocabulary
        .iter()
        .filter(|w| w.len() >= 3 && !FIELD_WHITELIST.contains(&w.as_str()))
        .filter(|w| text.contains(w.as_str()))
        .cloned()
        .collect()
}
