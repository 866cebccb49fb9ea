//! Listwise gradient boosting over oblivious regression trees.
//!
//! Each training unit is one look-up's candidate rows with a single positive
//! target. Scores are turned into a softmax distribution per group and the
//! loss is the negative log-probability of the positive row. Trees are
//! oblivious: every node of a level applies the same (feature, threshold)
//! test, so evaluation is a `2^depth` table index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureVector, Scorer};
use crate::log_schema::{LabeledGroup, LookupRecord};

const HESSIAN_FLOOR: f64 = 1e-16;
const MISSING_BIN: u8 = u8::MAX;

#[derive(Debug, Error)]
pub enum RankerError {
    #[error("scores length {scores} does not match group size {rows}")]
    SizeMismatch { scores: usize, rows: usize },
    #[error("no training groups")]
    EmptyDataset,
    #[error("feature arity mismatch: {got} vs {expected}")]
    ArityMismatch { got: usize, expected: usize },
    #[error("all groups are degenerate (single-row or no positive)")]
    DegenerateGroups,
    #[error("invalid training parameters: {0}")]
    InvalidParams(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainParams {
    pub iterations: u32,
    pub depth: u32,
    pub learning_rate: f64,
    pub l2_leaf_reg: f64,
    pub max_bins: u32,
    pub row_subsample: f64,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            iterations: 200,
            depth: 6,
            learning_rate: 0.1,
            l2_leaf_reg: 3.0,
            max_bins: 255,
            row_subsample: 1.0,
            seed: 0,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<(), RankerError> {
        if self.iterations < 1 {
            return Err(RankerError::InvalidParams("iterations must be >= 1".into()));
        }
        if !(1..=16).contains(&self.depth) {
            return Err(RankerError::InvalidParams("depth must be in [1, 16]".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(RankerError::InvalidParams("learning_rate must be in (0, 1]".into()));
        }
        if !(2..=255).contains(&self.max_bins) {
            return Err(RankerError::InvalidParams("max_bins must be in [2, 255]".into()));
        }
        if !(self.row_subsample > 0.0 && self.row_subsample <= 1.0) {
            return Err(RankerError::InvalidParams("row_subsample must be in (0, 1]".into()));
        }
        if self.l2_leaf_reg < 0.0 {
            return Err(RankerError::InvalidParams("l2_leaf_reg must be >= 0".into()));
        }
        Ok(())
    }
}

/// One look-up's rows with exactly one positive target.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryGroup {
    pub rows: Vec<FeatureVector>,
    pub targets: Vec<u8>,
}

impl QueryGroup {
    pub fn new(rows: Vec<FeatureVector>, targets: Vec<u8>) -> Result<Self, RankerError> {
        if rows.len() < 2 || rows.len() != targets.len() {
            return Err(RankerError::DegenerateGroups);
        }
        if targets.iter().filter(|&&t| t == 1).count() != 1
            || targets.iter().any(|&t| t > 1)
        {
            return Err(RankerError::DegenerateGroups);
        }
        Ok(Self { rows, targets })
    }

    pub fn from_labeled(group: &LabeledGroup) -> Result<Self, RankerError> {
        Self::new(group.rows.clone(), group.targets.clone())
    }

    pub fn positive_index(&self) -> usize {
        self.targets.iter().position(|&t| t == 1).expect("one positive")
    }

    /// QuerySoftMax loss for this group: −log p(positive).
    pub fn loss(&self, scores: &[f64]) -> Result<f64, RankerError> {
        if scores.len() != self.rows.len() {
            return Err(RankerError::SizeMismatch { scores: scores.len(), rows: self.rows.len() });
        }
        let probs = softmax_probs(scores);
        Ok(-probs[self.positive_index()].ln())
    }

    /// Analytic gradient and hessian of the loss w.r.t. each score:
    /// `g_i = p_i − t_i`, `h_i = p_i (1 − p_i)` floored at 1e-16.
    pub fn grad_hess(&self, scores: &[f64]) -> Result<(Vec<f64>, Vec<f64>), RankerError> {
        if scores.len() != self.rows.len() {
            return Err(RankerError::SizeMismatch { scores: scores.len(), rows: self.rows.len() });
        }
        let probs = softmax_probs(scores);
        let grads = probs
            .iter()
            .zip(&self.targets)
            .map(|(&p, &t)| p - f64::from(t))
            .collect();
        let hessians = probs.iter().map(|&p| (p * (1.0 - p)).max(HESSIAN_FLOOR)).collect();
        Ok((grads, hessians))
    }
}

/// Numerically stable softmax; invariant under adding a constant.
pub fn softmax_probs(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// One level of an oblivious tree: the same test at every node of the level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitLevel {
    pub feature: u16,
    pub threshold: f64,
    pub missing_goes_right: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObliviousTree {
    pub levels: Vec<SplitLevel>,
    /// `2^levels.len()` values indexed by the concatenated level bits.
    pub leaf_values: Vec<f64>,
}

impl ObliviousTree {
    pub fn leaf_index(&self, values: &[f64]) -> usize {
        let mut idx = 0usize;
        for (level, split) in self.levels.iter().enumerate() {
            let x = values[split.feature as usize];
            let bit = if x.is_nan() { split.missing_goes_right } else { x > split.threshold };
            idx |= usize::from(bit) << level;
        }
        idx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEnsemble {
    pub schema_hash: String,
    pub arity: u32,
    pub base_score: f64,
    pub trees: Vec<ObliviousTree>,
    pub params: TrainParams,
}

impl TreeEnsemble {
    /// Raw double-precision score of one feature row.
    pub fn predict(&self, values: &[f64]) -> f64 {
        let mut score = self.base_score;
        for tree in &self.trees {
            score += tree.leaf_values[tree.leaf_index(values)];
        }
        score
    }

    /// Canonical single-precision score: thresholds, leaves, inputs, and the
    /// accumulator all narrowed to f32. The flat artifact reproduces this
    /// path exactly.
    pub fn predict_single(&self, values: &[f64]) -> f32 {
        let mut score = self.base_score as f32;
        for tree in &self.trees {
            let mut idx = 0usize;
            for (level, split) in tree.levels.iter().enumerate() {
                let x = values[split.feature as usize] as f32;
                let bit = if x.is_nan() {
                    split.missing_goes_right
                } else {
                    x > split.threshold as f32
                };
                idx |= usize::from(bit) << level;
            }
            score += tree.leaf_values[idx] as f32;
        }
        score
    }

    /// Feature slots used by at least one tree split.
    pub fn used_features(&self) -> Vec<bool> {
        let mut used = vec![false; self.arity as usize];
        for tree in &self.trees {
            for split in &tree.levels {
                used[split.feature as usize] = true;
            }
        }
        used
    }
}

impl Scorer for TreeEnsemble {
    fn score(&self, values: &[f64]) -> f64 {
        self.predict(values)
    }
}

/// Indices sorted by descending score; ties keep the incoming (baseline)
/// order, so an uninformative model degrades to the heuristic ranking.
pub fn rank_candidates(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    order
}

/// Ranks a logged look-up with any scorer.
pub fn rank_lookup(
    scorer: &dyn Scorer,
    lookup: &LookupRecord,
    arity: usize,
) -> Result<Vec<usize>, RankerError> {
    let mut scores = Vec::with_capacity(lookup.candidates.len());
    for cand in &lookup.candidates {
        if cand.features.len() != arity {
            return Err(RankerError::ArityMismatch { got: cand.features.len(), expected: arity });
        }
        scores.push(scorer.score(cand.features.values()));
    }
    Ok(rank_candidates(&scores))
}

/// Quantile bin thresholds per feature, fixed before iteration 1.
fn bin_thresholds(rows: &[&FeatureVector], arity: usize, max_bins: u32) -> Vec<Vec<f64>> {
    (0..arity)
        .into_par_iter()
        .map(|j| {
            let mut values: Vec<f64> =
                rows.iter().map(|r| r.values()[j]).filter(|v| !v.is_nan()).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if values.is_empty() {
                return Vec::new();
            }
            let mut distinct = values.clone();
            distinct.dedup();
            let limit = (max_bins - 1) as usize;
            let mut thresholds = Vec::new();
            if distinct.len() <= max_bins as usize {
                for pair in distinct.windows(2) {
                    thresholds.push((pair[0] + pair[1]) / 2.0);
                }
            } else {
                let n = values.len();
                for i in 1..=limit {
                    let k = i * n / (limit + 1);
                    if k > 0 && k < n && values[k - 1] < values[k] {
                        thresholds.push((values[k - 1] + values[k]) / 2.0);
                    }
                }
                thresholds.dedup();
            }
            thresholds
        })
        .collect()
}

fn bin_value(thresholds: &[f64], v: f64) -> u8 {
    if v.is_nan() {
        return MISSING_BIN;
    }
    thresholds.partition_point(|&t| v > t) as u8
}

struct FeatureBest {
    gain: f64,
    threshold_idx: usize,
    missing_right: bool,
}

/// Best split of one feature for the current leaf partition, scanning
/// thresholds in ascending order with strict improvement.
fn best_split_for_feature(
    binned: &[u8],
    thresholds: &[f64],
    grads: &[f64],
    hessians: &[f64],
    leaf_of: &[u16],
    included: &[bool],
    n_leaves: usize,
    l2: f64,
) -> Option<FeatureBest> {
    if thresholds.is_empty() {
        return None;
    }
    let nb = thresholds.len() + 1;
    let mut hist_g = vec![0.0f64; n_leaves * nb];
    let mut hist_h = vec![0.0f64; n_leaves * nb];
    let mut miss_g = vec![0.0f64; n_leaves];
    let mut miss_h = vec![0.0f64; n_leaves];
    let mut has_missing = false;
    for (r, (&bin, &leaf)) in binned.iter().zip(leaf_of).enumerate() {
        if !included[r] {
            continue;
        }
        let leaf = leaf as usize;
        if bin == MISSING_BIN {
            miss_g[leaf] += grads[r];
            miss_h[leaf] += hessians[r];
            has_missing = true;
        } else {
            hist_g[leaf * nb + bin as usize] += grads[r];
            hist_h[leaf * nb + bin as usize] += hessians[r];
        }
    }

    // Prefix sums per leaf: left side of threshold t is bins 0..=t.
    for leaf in 0..n_leaves {
        for b in 1..nb {
            hist_g[leaf * nb + b] += hist_g[leaf * nb + b - 1];
            hist_h[leaf * nb + b] += hist_h[leaf * nb + b - 1];
        }
    }

    let leaf_score = |g: f64, h: f64| g * g / (h + l2);
    let mut best: Option<FeatureBest> = None;
    let dirs: &[bool] = if has_missing { &[false, true] } else { &[false] };
    for t in 0..thresholds.len() {
        for &dir in dirs {
            let mut gain = 0.0;
            for leaf in 0..n_leaves {
                let total_g = hist_g[leaf * nb + nb - 1] + miss_g[leaf];
                let total_h = hist_h[leaf * nb + nb - 1] + miss_h[leaf];
                let mut left_g = hist_g[leaf * nb + t];
                let mut left_h = hist_h[leaf * nb + t];
                if !dir {
                    left_g += miss_g[leaf];
                    left_h += miss_h[leaf];
                }
                gain += leaf_score(left_g, left_h) + leaf_score(total_g - left_g, total_h - left_h);
            }
            if best.as_ref().map_or(true, |b| gain > b.gain) {
                best = Some(FeatureBest { gain, threshold_idx: t, missing_right: dir });
            }
        }
    }
    best
}

pub fn fit(
    groups: &[QueryGroup],
    params: &TrainParams,
    schema_hash: &str,
) -> Result<TreeEnsemble, RankerError> {
    fit_with_progress(groups, params, schema_hash, |_, _| {})
}

/// Second-order boosting: per iteration, soft-max gradients over all rows,
/// one oblivious tree grown greedily level-by-level on quantile-binned
/// features, Newton leaf values scaled by the learning rate. Deterministic
/// for a fixed seed and independent of the rayon worker count.
pub fn fit_with_progress(
    groups: &[QueryGroup],
    params: &TrainParams,
    schema_hash: &str,
    mut progress: impl FnMut(u32, f64),
) -> Result<TreeEnsemble, RankerError> {
    params.validate()?;
    if groups.is_empty() {
        return Err(RankerError::EmptyDataset);
    }
    let arity = groups[0].rows[0].len();
    for g in groups {
        for row in &g.rows {
            if row.len() != arity {
                return Err(RankerError::ArityMismatch { got: row.len(), expected: arity });
            }
        }
    }
    if arity > u16::MAX as usize {
        return Err(RankerError::ArityMismatch { got: arity, expected: u16::MAX as usize });
    }

    let rows: Vec<&FeatureVector> = groups.iter().flat_map(|g| g.rows.iter()).collect();
    let n_rows = rows.len();
    let mut group_start = Vec::with_capacity(groups.len());
    let mut start = 0usize;
    for g in groups {
        group_start.push(start);
        start += g.rows.len();
    }

    let thresholds = bin_thresholds(&rows, arity, params.max_bins);
    let binned: Vec<Vec<u8>> = (0..arity)
        .into_par_iter()
        .map(|j| rows.iter().map(|r| bin_value(&thresholds[j], r.values()[j])).collect())
        .collect();

    let mut scores = vec![0.0f64; n_rows];
    let mut grads = vec![0.0f64; n_rows];
    let mut hessians = vec![0.0f64; n_rows];
    let mut included = vec![true; n_rows];
    let mut leaf_of = vec![0u16; n_rows];
    let mut trees = Vec::with_capacity(params.iterations as usize);

    for iter in 0..params.iterations {
        let mut total_loss = 0.0;
        for (gi, g) in groups.iter().enumerate() {
            let s = &scores[group_start[gi]..group_start[gi] + g.rows.len()];
            total_loss += g.loss(s)?;
            let (gg, hh) = g.grad_hess(s)?;
            grads[group_start[gi]..group_start[gi] + g.rows.len()].copy_from_slice(&gg);
            hessians[group_start[gi]..group_start[gi] + g.rows.len()].copy_from_slice(&hh);
        }
        progress(iter, total_loss / groups.len() as f64);

        if params.row_subsample < 1.0 {
            let mut rng = ChaCha20Rng::seed_from_u64(params.seed.wrapping_add(iter as u64));
            for (gi, g) in groups.iter().enumerate() {
                let keep = rng.gen::<f64>() < params.row_subsample;
                for r in group_start[gi]..group_start[gi] + g.rows.len() {
                    included[r] = keep;
                }
            }
            if included.iter().all(|&k| !k) {
                included.fill(true);
            }
        }

        leaf_of.fill(0);
        let mut levels = Vec::with_capacity(params.depth as usize);
        for level in 0..params.depth {
            let n_leaves = 1usize << level;
            let candidates: Vec<Option<FeatureBest>> = (0..arity)
                .into_par_iter()
                .map(|j| {
                    best_split_for_feature(
                        &binned[j],
                        &thresholds[j],
                        &grads,
                        &hessians,
                        &leaf_of,
                        &included,
                        n_leaves,
                        params.l2_leaf_reg,
                    )
                })
                .collect();
            let mut best: Option<(usize, FeatureBest)> = None;
            for (j, cand) in candidates.into_iter().enumerate() {
                if let Some(c) = cand {
                    if best.as_ref().map_or(true, |(_, b)| c.gain > b.gain) {
                        best = Some((j, c));
                    }
                }
            }
            let Some((feature, chosen)) = best else { break };
            let threshold = thresholds[feature][chosen.threshold_idx];
            for r in 0..n_rows {
                let bin = binned[feature][r];
                let bit = if bin == MISSING_BIN {
                    chosen.missing_right
                } else {
                    bin as usize > chosen.threshold_idx
                };
                leaf_of[r] |= u16::from(bit) << level;
            }
            levels.push(SplitLevel {
                feature: feature as u16,
                threshold,
                missing_goes_right: chosen.missing_right,
            });
        }

        let n_leaves = 1usize << levels.len();
        let mut leaf_g = vec![0.0f64; n_leaves];
        let mut leaf_h = vec![0.0f64; n_leaves];
        for r in 0..n_rows {
            if included[r] {
                leaf_g[leaf_of[r] as usize] += grads[r];
                leaf_h[leaf_of[r] as usize] += hessians[r];
            }
        }
        let leaf_values: Vec<f64> = leaf_g
            .iter()
            .zip(&leaf_h)
            .map(|(&g, &h)| -g / (h + params.l2_leaf_reg) * params.learning_rate)
            .collect();
        for r in 0..n_rows {
            scores[r] += leaf_values[leaf_of[r] as usize];
        }
        trees.push(ObliviousTree { levels, leaf_values });
    }

    Ok(TreeEnsemble {
        schema_hash: schema_hash.to_string(),
        arity: arity as u32,
        base_score: 0.0,
        trees,
        params: params.clone(),
    })
}
