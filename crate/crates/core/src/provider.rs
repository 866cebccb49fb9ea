//! Lexical candidate provision: tokenizing a corpus, indexing identifier
//! usage per file, producing prefix-matching candidates at a caret position,
//! and the heuristic baseline ranking.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the ranked candidate list (IDE pop-ups are bounded).
pub const DEFAULT_CANDIDATE_CAP: usize = 64;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("duplicate file id `{0}`")]
    DuplicateFileId(String),
    #[error("unknown file `{0}`")]
    UnknownFile(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    pub byte_offset: usize,
}

/// Lexical block classification of the caret position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    TopLevel,
    FunctionBody,
    ConditionalBody,
    LoopBody,
}

/// Caret position inside an indexed file. The prefix is held only in
/// generator memory and never logged.
#[derive(Debug, Clone)]
pub struct CaretContext {
    pub file_id: String,
    pub byte_offset: usize,
    pub prefix: String,
    pub block: Block,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Maximal-munch lexing of identifiers and keywords; all other bytes are
/// skipped.
pub fn tokenize(text: &str, keywords: &BTreeSet<String>) -> Vec<Token> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if is_ident_start(c) {
            let start = i;
            while i < bytes.len() && is_ident_continue(bytes[i] as char) {
                i += 1;
            }
            let word = &text[start..i];
            let kind = if keywords.contains(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            tokens.push(Token { text: word.to_string(), kind, byte_offset: start });
        } else {
            // Digit-led runs are not identifiers; consume them whole so a
            // trailing letter does not start a token mid-number.
            if c.is_ascii_digit() {
                while i < bytes.len() && is_ident_continue(bytes[i] as char) {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
    }
    tokens
}

#[derive(Debug, Clone, Default)]
struct FileUse {
    count: u32,
    /// Token ordinals (within the file) of each occurrence, ascending.
    ordinals: Vec<u32>,
    last_offset: usize,
}

#[derive(Debug, Clone)]
struct TokenEntry {
    total: u32,
    per_file: BTreeMap<u32, FileUse>,
}

#[derive(Debug, Clone)]
struct FileMeta {
    dir: String,
    /// Byte offsets of every token, ascending; maps a caret offset to its
    /// token ordinal.
    token_offsets: Vec<usize>,
}

/// Per-file and global token usage table. Immutable after build and safe for
/// concurrent readers.
#[derive(Debug, Clone)]
pub struct ScopeIndex {
    files: Vec<FileMeta>,
    file_lookup: HashMap<String, u32>,
    entries: BTreeMap<String, TokenEntry>,
    keywords: BTreeSet<String>,
}

/// Usage statistics for one candidate relative to a caret position.
#[derive(Debug, Clone, Copy, Default)]
pub struct CandidateStats {
    pub is_keyword: bool,
    pub same_file_count: u32,
    pub global_count: u32,
    pub same_module: bool,
    /// Token distance to the last same-file use strictly before the caret.
    pub recency_distance: Option<u32>,
}

fn dir_of(path: &str) -> String {
    match path.rfind('/') {
        Some(i) => path[..i].to_string(),
        None => String::new(),
    }
}

/// Builds the index over `(file_id, text)` pairs. Deterministic for a fixed
/// input order.
pub fn build_index(
    files: &[(String, String)],
    keywords: BTreeSet<String>,
) -> Result<ScopeIndex, ProviderError> {
    let mut index = ScopeIndex {
        files: Vec::new(),
        file_lookup: HashMap::new(),
        entries: BTreeMap::new(),
        keywords,
    };
    for (file_id, text) in files {
        if index.file_lookup.contains_key(file_id) {
            return Err(ProviderError::DuplicateFileId(file_id.clone()));
        }
        let fid = index.files.len() as u32;
        index.file_lookup.insert(file_id.clone(), fid);
        let tokens = tokenize(text, &index.keywords);
        let mut token_offsets = Vec::with_capacity(tokens.len());
        for (ordinal, token) in tokens.iter().enumerate() {
            token_offsets.push(token.byte_offset);
            let entry = index.entries.entry(token.text.clone()).or_insert_with(|| TokenEntry {
                total: 0,
                per_file: BTreeMap::new(),
            });
            entry.total += 1;
            let file_use = entry.per_file.entry(fid).or_default();
            file_use.count += 1;
            file_use.ordinals.push(ordinal as u32);
            file_use.last_offset = token.byte_offset;
        }
        index.files.push(FileMeta { dir: dir_of(file_id), token_offsets });
    }
    Ok(index)
}

impl ScopeIndex {
    pub fn keywords(&self) -> &BTreeSet<String> {
        &self.keywords
    }

    pub fn file_count(&self) -> usize {
        self.files.len()
    }

    pub fn distinct_tokens(&self) -> usize {
        self.entries.len()
    }

    pub fn total_count(&self, text: &str) -> u32 {
        self.entries.get(text).map_or(0, |e| e.total)
    }

    pub fn file_count_of(&self, text: &str, file_id: &str) -> u32 {
        let Some(fid) = self.file_lookup.get(file_id) else { return 0 };
        self.entries
            .get(text)
            .and_then(|e| e.per_file.get(fid))
            .map_or(0, |u| u.count)
    }

    /// All corpus identifiers with length at least `min_len`; the vocabulary
    /// the leakage scanner checks against.
    pub fn vocabulary(&self, min_len: usize) -> BTreeSet<String> {
        self.entries
            .keys()
            .chain(self.keywords.iter())
            .filter(|t| t.len() >= min_len)
            .cloned()
            .collect()
    }

    fn caret_ordinal(&self, fid: u32, byte_offset: usize) -> u32 {
        self.files[fid as usize].token_offsets.partition_point(|&o| o < byte_offset) as u32
    }

    pub fn candidate_stats(&self, text: &str, ctx: &CaretContext) -> CandidateStats {
        let is_keyword = self.keywords.contains(text);
        let Some(entry) = self.entries.get(text) else {
            return CandidateStats { is_keyword, ..Default::default() };
        };
        let mut stats = CandidateStats {
            is_keyword,
            global_count: entry.total,
            ..Default::default()
        };
        let Some(&fid) = self.file_lookup.get(&ctx.file_id) else {
            return stats;
        };
        let caret_dir = &self.files[fid as usize].dir;
        stats.same_module = entry
            .per_file
            .keys()
            .any(|&f| self.files[f as usize].dir == *caret_dir);
        if let Some(file_use) = entry.per_file.get(&fid) {
            stats.same_file_count = file_use.count;
            let caret = self.caret_ordinal(fid, ctx.byte_offset);
            let before = file_use.ordinals.partition_point(|&o| o < caret);
            if before > 0 {
                stats.recency_distance = Some(caret - file_use.ordinals[before - 1]);
            }
        }
        stats
    }

    /// True when the token's only corpus occurrence is the one at the caret.
    fn only_occurrence_is_caret(&self, text: &str, ctx: &CaretContext) -> bool {
        let Some(entry) = self.entries.get(text) else { return false };
        if entry.total != 1 {
            return false;
        }
        let Some(&fid) = self.file_lookup.get(&ctx.file_id) else { return false };
        entry
            .per_file
            .get(&fid)
            .map_or(false, |u| u.last_offset == ctx.byte_offset)
    }
}

/// All distinct index tokens and keywords matching the caret prefix. Matching
/// is case-sensitive, falling back to case-insensitive when the sensitive set
/// is empty. The token occurrence at the caret itself is excluded. Order is
/// deterministic but unspecified; ranking is separate.
pub fn candidates_at(index: &ScopeIndex, ctx: &CaretContext) -> Result<Vec<String>, ProviderError> {
    if !index.file_lookup.contains_key(&ctx.file_id) {
        return Err(ProviderError::UnknownFile(ctx.file_id.clone()));
    }
    let universe = || {
        index
            .entries
            .keys()
            .chain(index.keywords.iter().filter(|k| !index.entries.contains_key(*k)))
    };
    let eligible = |text: &str| !index.only_occurrence_is_caret(text, ctx);

    let mut out: Vec<String> = universe()
        .filter(|t| t.starts_with(ctx.prefix.as_str()))
        .filter(|t| eligible(t))
        .cloned()
        .collect();
    if out.is_empty() && !ctx.prefix.is_empty() {
        let lower = ctx.prefix.to_ascii_lowercase();
        out = universe()
            .filter(|t| t.to_ascii_lowercase().starts_with(&lower))
            .filter(|t| eligible(t))
            .cloned()
            .collect();
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Heuristic baseline score for one candidate.
pub fn heuristic_score(candidate: &str, ctx: &CaretContext, index: &ScopeIndex) -> f64 {
    let stats = index.candidate_stats(candidate, ctx);
    let prefix_len = ctx.prefix.chars().count() as f64;
    let cand_len = candidate.chars().count().max(1) as f64;
    let exact_prefix = candidate.starts_with(ctx.prefix.as_str());
    let recency = match stats.recency_distance {
        Some(d) => 1.0 / (1.0 + d as f64),
        None => 0.0,
    };
    let kind_bonus = if stats.is_keyword {
        0.5
    } else if stats.same_file_count > 0 {
        1.0
    } else {
        0.0
    };
    3.0 * f64::from(u8::from(exact_prefix))
        + 2.0 * (prefix_len / cand_len)
        + (1.0 + stats.same_file_count as f64).ln()
        + 0.5 * recency
        + kind_bonus
}

/// Ranks candidates by descending heuristic score; ties break to shorter
/// text, then lexicographic. Returns a permutation of the input.
pub fn heuristic_rank(
    candidates: Vec<String>,
    ctx: &CaretContext,
    index: &ScopeIndex,
) -> Vec<String> {
    let mut scored: Vec<(f64, String)> = candidates
        .into_iter()
        .map(|c| (heuristic_score(&c, ctx, index), c))
        .collect();
    scored.sort_by(|(sa, ta), (sb, tb)| {
        sb.partial_cmp(sa)
            .unwrap()
            .then_with(|| ta.len().cmp(&tb.len()))
            .then_with(|| ta.cmp(tb))
    });
    scored.into_iter().map(|(_, t)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kw(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    fn ctx(file: &str, offset: usize, prefix: &str) -> CaretContext {
        CaretContext {
            file_id: file.into(),
            byte_offset: offset,
            prefix: prefix.into(),
            block: Block::TopLevel,
        }
    }

    #[test]
    fn tokenize_keywords_and_identifiers() {
        let tokens = tokenize("for x in xs:", &kw(&["for", "in"]));
        let kinds: Vec<_> = tokens.iter().map(|t| (t.text.as_str(), t.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                ("for", TokenKind::Keyword),
                ("x", TokenKind::Identifier),
                ("in", TokenKind::Keyword),
                ("xs", TokenKind::Identifier),
            ]
        );
    }

    #[test]
    fn tokenize_empty_and_offsets() {
        assert!(tokenize("", &kw(&[])).is_empty());
        let tokens = tokenize("a1_b a1_b", &kw(&[]));
        assert_eq!(tokens.len(), 2);
        assert_eq!(tokens[0].byte_offset, 0);
        assert_eq!(tokens[1].byte_offset, 5);
        assert_eq!(tokens[0].text, tokens[1].text);
    }

    #[test]
    fn tokenize_skips_digit_led_runs() {
        let tokens = tokenize("123abc x", &kw(&[]));
        let texts: Vec<_> = tokens.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec!["x"]);
    }

    #[test]
    fn index_counts_match_occurrences() {
        let files = vec![("a.txt".to_string(), "x x y".to_string())];
        let index = build_index(&files, kw(&[])).unwrap();
        assert_eq!(index.total_count("x"), 2);
        assert_eq!(index.total_count("y"), 1);
        assert_eq!(index.file_count_of("x", "a.txt"), 2);
    }

    #[test]
    fn global_count_sums_per_file() {
        let files = vec![
            ("a/a.txt".to_string(), "util x util".to_string()),
            ("b/b.txt".to_string(), "util y".to_string()),
        ];
        let index = build_index(&files, kw(&[])).unwrap();
        assert_eq!(index.total_count("util"), 3);
        assert_eq!(index.file_count_of("util", "a/a.txt"), 2);
        assert_eq!(index.file_count_of("util", "b/b.txt"), 1);
    }

    #[test]
    fn duplicate_file_id_rejected() {
        let files = vec![
            ("a.txt".to_string(), "x".to_string()),
            ("a.txt".to_string(), "y".to_string()),
        ];
        assert!(matches!(
            build_index(&files, kw(&[])),
            Err(ProviderError::DuplicateFileId(_))
        ));
    }

    #[test]
    fn empty_file_list_gives_empty_index() {
        let index = build_index(&[], kw(&[])).unwrap();
        assert_eq!(index.distinct_tokens(), 0);
    }

    #[test]
    fn prefix_filter_and_keywords() {
        let files = vec![("a.txt".to_string(), "set setOut get set".to_string())];
        let index = build_index(&files, kw(&["select"])).unwrap();
        let cands = candidates_at(&index, &ctx("a.txt", 100, "se")).unwrap();
        assert_eq!(cands, vec!["select", "set", "setOut"]);
        let all = candidates_at(&index, &ctx("a.txt", 100, "")).unwrap();
        assert_eq!(all, vec!["get", "select", "set", "setOut"]);
    }

    #[test]
    fn case_insensitive_fallback() {
        let files = vec![("a.txt".to_string(), "setOut setOut".to_string())];
        let index = build_index(&files, kw(&[])).unwrap();
        let cands = candidates_at(&index, &ctx("a.txt", 100, "SE")).unwrap();
        assert_eq!(cands, vec!["setOut"]);
    }

    #[test]
    fn caret_occurrence_is_excluded() {
        // "once" appears exactly once, at offset 0; a caret typing it there
        // must not see it as its own candidate.
        let files = vec![("a.txt".to_string(), "once other".to_string())];
        let index = build_index(&files, kw(&[])).unwrap();
        let at_caret = candidates_at(&index, &ctx("a.txt", 0, "on")).unwrap();
        assert!(at_caret.is_empty());
        // Elsewhere the token is offered.
        let elsewhere = candidates_at(&index, &ctx("a.txt", 5, "on")).unwrap();
        assert_eq!(elsewhere, vec!["once"]);
    }

    #[test]
    fn unknown_file_rejected() {
        let index = build_index(&[("a.txt".to_string(), "x".to_string())], kw(&[])).unwrap();
        assert!(matches!(
            candidates_at(&index, &ctx("b.txt", 0, "")),
            Err(ProviderError::UnknownFile(_))
        ));
    }

    #[test]
    fn same_file_frequency_beats_corpus_only() {
        let files = vec![
            ("a.txt".to_string(), "setOut setOut setOut caret".to_string()),
            ("b.txt".to_string(), "setOpt".to_string()),
        ];
        let index = build_index(&files, kw(&[])).unwrap();
        let c = ctx("a.txt", 22, "se");
        let ranked = heuristic_rank(vec!["setOpt".into(), "setOut".into()], &c, &index);
        assert_eq!(ranked, vec!["setOut", "setOpt"]);
        assert!(heuristic_score("setOut", &c, &index) > heuristic_score("setOpt", &c, &index));
    }

    #[test]
    fn tie_break_prefers_shorter_then_lexicographic() {
        let files = vec![("a.txt".to_string(), "caret".to_string())];
        let index = build_index(&files, kw(&[])).unwrap();
        let c = ctx("a.txt", 0, "a");
        let ranked = heuristic_rank(vec!["ab2".into(), "ab".into()], &c, &index);
        assert_eq!(ranked, vec!["ab", "ab2"]);
        assert!(heuristic_rank(Vec::new(), &c, &index).is_empty());
    }

    #[test]
    fn rerank_is_idempotent_permutation() {
        let files = vec![("a.txt".to_string(), "alpha beta alpha gamma beta beta".to_string())];
        let index = build_index(&files, kw(&[])).unwrap();
        let c = ctx("a.txt", 30, "");
        let cands = candidates_at(&index, &c).unwrap();
        let once = heuristic_rank(cands.clone(), &c, &index);
        let twice = heuristic_rank(once.clone(), &c, &index);
        assert_eq!(once, twice);
        let mut sorted_once = once.clone();
        sorted_once.sort();
        assert_eq!(sorted_once, cands);
    }

    #[test]
    fn tokenize_concat_commutes() {
        let kws = kw(&["for"]);
        let a = "for x in";
        let b = "y for z";
        let joined = format!("{a} {b}");
        let mut parts = tokenize(a, &kws);
        parts.extend(tokenize(b, &kws).into_iter().map(|mut t| {
            t.byte_offset += a.len() + 1;
            t
        }));
        assert_eq!(tokenize(&joined, &kws), parts);
    }
}
