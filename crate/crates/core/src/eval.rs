//! Offline Recall@K reports and online A/B metrics with user-grouped
//! bootstrap significance.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::Scorer;
use crate::log_schema::{CompletionSession, SessionOutcome, Trigger};
use crate::ranker::rank_candidates;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no look-ups in scope")]
    EmptyScope,
    #[error("need at least {needed} users, found {found}")]
    TooFewUsers { needed: usize, found: usize },
    #[error("no sessions qualify for metric {0:?}")]
    NoQualifyingSessions(MetricKind),
}

/// A look-up reduced to its ordinal and the post-ranking position of the
/// ground-truth candidate (None when the truth is absent — a miss).
#[derive(Debug, Clone, Copy)]
pub struct RankedLookup {
    pub ordinal: u32,
    pub truth_pos: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Initial,
}

/// Fraction of in-scope look-ups whose ground truth ranks within the top k.
pub fn recall_at_k(lookups: &[RankedLookup], k: usize, scope: Scope) -> Result<f64, EvalError> {
    let in_scope = |l: &&RankedLookup| scope == Scope::All || l.ordinal == 0;
    let total = lookups.iter().filter(in_scope).count();
    if total == 0 {
        return Err(EvalError::EmptyScope);
    }
    let hits = lookups
        .iter()
        .filter(in_scope)
        .filter(|l| l.truth_pos.map_or(false, |p| p < k))
        .count();
    Ok(hits as f64 / total as f64)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OfflineReport {
    pub r1_all: f64,
    pub r5_all: f64,
    pub r1_init: f64,
    pub r5_init: f64,
    pub lookups_all: usize,
    pub lookups_init: usize,
}

pub fn offline_report(lookups: &[RankedLookup]) -> Result<OfflineReport, EvalError> {
    Ok(OfflineReport {
        r1_all: recall_at_k(lookups, 1, Scope::All)?,
        r5_all: recall_at_k(lookups, 5, Scope::All)?,
        r1_init: recall_at_k(lookups, 1, Scope::Initial)?,
        r5_init: recall_at_k(lookups, 5, Scope::Initial)?,
        lookups_all: lookups.len(),
        lookups_init: lookups.iter().filter(|l| l.ordinal == 0).count(),
    })
}

/// Ranker applied to held-out logs: the baseline keeps the logged display
/// order, a model re-scores the logged feature vectors.
pub enum OfflineRanker<'a> {
    Baseline,
    Model(&'a dyn Scorer),
}

/// Reduces select-outcome sessions to ranked look-ups under the given ranker.
pub fn ranked_lookups(
    sessions: &[CompletionSession],
    ranker: &OfflineRanker,
) -> Vec<RankedLookup> {
    let mut out = Vec::new();
    for session in sessions {
        let Some(selected) = session.selected_candidate() else { continue };
        for lookup in session.lookups() {
            let logged_pos =
                lookup.candidates.iter().position(|c| c.candidate_id == selected);
            let truth_pos = match ranker {
                OfflineRanker::Baseline => logged_pos,
                OfflineRanker::Model(scorer) => logged_pos.map(|p| {
                    let scores: Vec<f64> = lookup
                        .candidates
                        .iter()
                        .map(|c| scorer.score(c.features.values()))
                        .collect();
                    rank_candidates(&scores).iter().position(|&i| i == p).unwrap()
                }),
            };
            out.push(RankedLookup { ordinal: lookup.ordinal, truth_pos });
        }
    }
    out
}

/// Partitions users (not sessions) at `ratio` with a seeded shuffle; every
/// session follows its user.
pub fn split_by_user(
    sessions: Vec<CompletionSession>,
    ratio: f64,
    seed: u64,
) -> Result<(Vec<CompletionSession>, Vec<CompletionSession>), EvalError> {
    let mut users: Vec<String> = Vec::new();
    for s in &sessions {
        if !users.contains(&s.user_id) {
            users.push(s.user_id.clone());
        }
    }
    if users.len() < 2 {
        return Err(EvalError::TooFewUsers { needed: 2, found: users.len() });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    users.shuffle(&mut rng);
    let n_train = ((users.len() as f64 * ratio).round() as usize).clamp(1, users.len() - 1);
    let train_users: std::collections::BTreeSet<&String> = users[..n_train].iter().collect();
    let (train, holdout) = sessions
        .into_iter()
        .partition(|s| train_users.contains(&s.user_id));
    Ok((train, holdout))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    ExplicitSelect,
    TypedSelect,
    TypingActions,
    PrefixLength,
    ManualStart,
}

pub const ALL_METRICS: [MetricKind; 5] = [
    MetricKind::ExplicitSelect,
    MetricKind::TypedSelect,
    MetricKind::TypingActions,
    MetricKind::PrefixLength,
    MetricKind::ManualStart,
];

/// Per-session scalars sufficient to recompute every online metric.
#[derive(Debug, Clone, Copy)]
struct SessionStat {
    outcome: SessionOutcome,
    manual: bool,
    typed_chars: u32,
    final_prefix_len: u32,
}

fn stat_of(session: &CompletionSession) -> SessionStat {
    SessionStat {
        outcome: session.outcome().expect("validated session has an outcome"),
        manual: session.trigger == Trigger::Manual,
        typed_chars: session.char_typed_count() as u32,
        final_prefix_len: session.final_prefix_length().unwrap_or(0),
    }
}

/// Nearest-rank quantile: the ceil(q*n)-th smallest value.
fn nearest_rank_quantile(values: &mut [u32], q: f64) -> u32 {
    debug_assert!(!values.is_empty());
    let rank = ((q * values.len() as f64).ceil() as usize).clamp(1, values.len());
    let (_, v, _) = values.select_nth_unstable(rank - 1);
    *v
}

fn metric_of_stats(kind: MetricKind, stats: &[SessionStat]) -> Option<f64> {
    if stats.is_empty() {
        return None;
    }
    let n = stats.len() as f64;
    match kind {
        MetricKind::ExplicitSelect => Some(
            stats.iter().filter(|s| s.outcome == SessionOutcome::ExplicitSelect).count() as f64
                / n,
        ),
        MetricKind::TypedSelect => Some(
            stats.iter().filter(|s| s.outcome == SessionOutcome::TypedSelect).count() as f64 / n,
        ),
        MetricKind::ManualStart => {
            Some(stats.iter().filter(|s| s.manual).count() as f64 / n)
        }
        MetricKind::TypingActions => {
            // 0.99 nearest-rank cutoff removes anomalously long sessions.
            let mut counts: Vec<u32> = stats.iter().map(|s| s.typed_chars).collect();
            let cutoff = nearest_rank_quantile(&mut counts, 0.99);
            let kept: Vec<u32> = counts.into_iter().filter(|&c| c <= cutoff).collect();
            if kept.is_empty() {
                return None;
            }
            Some(kept.iter().map(|&c| c as f64).sum::<f64>() / kept.len() as f64)
        }
        MetricKind::PrefixLength => {
            let lens: Vec<f64> = stats
                .iter()
                .filter(|s| s.outcome == SessionOutcome::ExplicitSelect)
                .map(|s| s.final_prefix_len as f64)
                .collect();
            if lens.is_empty() {
                return None;
            }
            Some(lens.iter().sum::<f64>() / lens.len() as f64)
        }
    }
}

pub fn online_metric(kind: MetricKind, sessions: &[CompletionSession]) -> Result<f64, EvalError> {
    let stats: Vec<SessionStat> = sessions.iter().map(stat_of).collect();
    metric_of_stats(kind, &stats).ok_or(EvalError::NoQualifyingSessions(kind))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub resamples: u32,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { resamples: 1000, seed: 0, alpha: 0.01 }
    }
}

fn stats_by_user(sessions: &[CompletionSession]) -> Vec<Vec<SessionStat>> {
    let mut by_user: BTreeMap<&str, Vec<SessionStat>> = BTreeMap::new();
    for s in sessions {
        by_user.entry(&s.user_id).or_default().push(stat_of(s));
    }
    by_user.into_values().collect()
}

fn bootstrap_pvalue_stats(
    users_a: &[Vec<SessionStat>],
    users_b: &[Vec<SessionStat>],
    kind: MetricKind,
    config: &BootstrapConfig,
) -> Result<f64, EvalError> {
    for (users, _) in [(users_a, "A"), (users_b, "B")] {
        if users.len() < 2 {
            return Err(EvalError::TooFewUsers { needed: 2, found: users.len() });
        }
    }
    let diffs: Vec<f64> = (0..config.resamples)
        .into_par_iter()
        .map(|i| {
            // Per-resample stream derived from (seed, index) keeps the result
            // independent of scheduling.
            let mut rng = ChaCha20Rng::seed_from_u64(
                config.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64),
            );
            let draw = |rng: &mut ChaCha20Rng, users: &[Vec<SessionStat>]| {
                let mut sample = Vec::new();
                for _ in 0..users.len() {
                    let u = rng.gen_range(0..users.len());
                    sample.extend_from_slice(&users[u]);
                }
                sample
            };
            let sample_a = draw(&mut rng, users_a);
            let sample_b = draw(&mut rng, users_b);
            match (metric_of_stats(kind, &sample_a), metric_of_stats(kind, &sample_b)) {
                (Some(a), Some(b)) => b - a,
                // A resample where the metric is undefined counts as a zero
                // difference, which is conservative for both tails.
                _ => 0.0,
            }
        })
        .collect();

    let le = diffs.iter().filter(|&&d| d <= 0.0).count();
    let ge = diffs.iter().filter(|&&d| d >= 0.0).count();
    let n = config.resamples as f64;
    let p = 2.0 * (le.min(ge) as f64 + 1.0) / (n + 1.0);
    Ok(p.min(1.0))
}

/// Two-sided add-one-smoothed bootstrap p-value for the metric difference
/// `B − A`, resampling users with replacement within each group.
pub fn bootstrap_pvalue(
    sessions_a: &[CompletionSession],
    sessions_b: &[CompletionSession],
    kind: MetricKind,
    config: &BootstrapConfig,
) -> Result<f64, EvalError> {
    bootstrap_pvalue_stats(&stats_by_user(sessions_a), &stats_by_user(sessions_b), kind, config)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricResult {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbReport {
    pub explicit_select: MetricResult,
    pub typed_select: MetricResult,
    pub typing_actions: MetricResult,
    pub prefix_length: MetricResult,
    pub manual_start: MetricResult,
    pub sessions_a: usize,
    pub sessions_b: usize,
    pub resamples: u32,
    pub alpha: f64,
}

impl AbReport {
    pub fn metric(&self, kind: MetricKind) -> &MetricResult {
        match kind {
            MetricKind::ExplicitSelect => &self.explicit_select,
            MetricKind::TypedSelect => &self.typed_select,
            MetricKind::TypingActions => &self.typing_actions,
            MetricKind::PrefixLength => &self.prefix_length,
            MetricKind::ManualStart => &self.manual_start,
        }
    }

    /// Aligned-column text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<16} {:>10} {:>10} {:>10}  significant (p < {})\n",
            "metric", "A", "B", "p", self.alpha
        ));
        for kind in ALL_METRICS {
            let m = self.metric(kind);
            out.push_str(&format!(
                "{:<16} {:>10.4} {:>10.4} {:>10.4}  {}\n",
                format!("{kind:?}"),
                m.a,
                m.b,
                m.p,
                if m.significant { "yes" } else { "no" }
            ));
        }
        out
    }
}

/// All five online metrics with bootstrap p-values.
pub fn ab_report(
    sessions_a: &[CompletionSession],
    sessions_b: &[CompletionSession],
    config: &BootstrapConfig,
) -> Result<AbReport, EvalError> {
    let users_a = stats_by_user(sessions_a);
    let users_b = stats_by_user(sessions_b);
    let stats_a: Vec<SessionStat> = users_a.iter().flatten().copied().collect();
    let stats_b: Vec<SessionStat> = users_b.iter().flatten().copied().collect();
    let mut results = Vec::new();
    for kind in ALL_METRICS {
        let a = metric_of_stats(kind, &stats_a)
            .ok_or(EvalError::NoQualifyingSessions(kind))?;
        let b = metric_of_stats(kind, &stats_b)
            .ok_or(EvalError::NoQualifyingSessions(kind))?;
        let p = bootstrap_pvalue_stats(&users_a, &users_b, kind, config)?;
        results.push(MetricResult { a, b, p, significant: p < config.alpha });
    }
    let mut it = results.into_iter();
    Ok(AbReport {
        explicit_select: it.next().unwrap(),
        typed_select: it.next().unwrap(),
        typing_actions: it.next().unwrap(),
        prefix_length: it.next().unwrap(),
        manual_start: it.next().unwrap(),
        sessions_a: sessions_a.len(),
        sessions_b: sessions_b.len(),
        resamples: config.resamples,
        alpha: config.alpha,
    })
}
