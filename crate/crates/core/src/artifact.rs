//! Compact flat serialization of the tree ensemble for low-latency inference.
//!
//! Layout (little-endian, no padding):
//!
//! ```text
//! magic        4 bytes   "RNKL"
//! version      u32
//! schema_hash  32 bytes  (raw sha-256 of the feature schema)
//! n_trees      u32
//! depth        u16       (maximum level count; shorter trees are padded)
//! base_score   f32
//! per tree:    depth x { feature u16, threshold f32, missing u8 }
//!              2^depth x f32 leaf values
//! ```
//!
//! Thresholds and leaves are stored in single precision; the canonical
//! prediction path is single precision on both sides, so round-trip score
//! equality is exact.

use std::time::Instant;

use thiserror::Error;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::features::Scorer;
use crate::ranker::{rank_candidates, TreeEnsemble};

pub const MAGIC: &[u8; 4] = b"RNKL";
pub const FORMAT_VERSION: u32 = 1;
/// Default size budget: 2 MiB.
pub const DEFAULT_SIZE_BUDGET: usize = 2 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("artifact is {size} bytes, over the {limit}-byte budget")]
    BudgetExceeded { size: usize, limit: usize },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    VersionUnsupported(u32),
    #[error("artifact truncated or size inconsistent")]
    Truncated,
    #[error("schema hash mismatch: artifact {artifact}, expected {expected}")]
    SchemaHashMismatch { artifact: String, expected: String },
    #[error("schema hash must be 64 hex characters, got `{0}`")]
    BadSchemaHash(String),
    #[error("tree depth {0} out of range")]
    DepthOutOfRange(u32),
}

const HEADER_LEN: usize = 4 + 4 + 32 + 4 + 2 + 4;
const SPLIT_LEN: usize = 2 + 4 + 1;

/// Per-level split record of the flat form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatSplit {
    pub feature: u16,
    pub threshold: f32,
    pub missing_goes_right: bool,
}

/// Loaded flat model. Immutable; concurrent prediction needs no locking.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatModel {
    pub version: u32,
    pub schema_hash: String,
    pub depth: u16,
    pub base_score: f32,
    /// `n_trees * depth` split records.
    pub splits: Vec<FlatSplit>,
    /// `n_trees * 2^depth` leaf values.
    pub leaves: Vec<f32>,
}

impl FlatModel {
    pub fn n_trees(&self) -> usize {
        if self.depth == 0 {
            return self.leaves.len();
        }
        self.splits.len() / self.depth as usize
    }

    /// Highest feature index referenced by any split, plus one.
    pub fn min_arity(&self) -> usize {
        self.splits.iter().map(|s| s.feature as usize + 1).max().unwrap_or(0)
    }

    pub fn check_schema(&self, expected_hash: &str) -> Result<(), ArtifactError> {
        if self.schema_hash != expected_hash {
            return Err(ArtifactError::SchemaHashMismatch {
                artifact: self.schema_hash.clone(),
                expected: expected_hash.to_string(),
            });
        }
        Ok(())
    }

    /// Canonical single-precision score.
    pub fn predict(&self, values: &[f64]) -> f32 {
        let depth = self.depth as usize;
        let leaves_per_tree = 1usize << depth;
        let mut score = self.base_score;
        for tree in 0..self.n_trees() {
            let mut idx = 0usize;
            for level in 0..depth {
                let split = &self.splits[tree * depth + level];
                let x = values[split.feature as usize] as f32;
                let bit = if x.is_nan() { split.missing_goes_right } else { x > split.threshold };
                idx |= usize::from(bit) << level;
            }
            score += self.leaves[tree * leaves_per_tree + idx];
        }
        score
    }
}

impl Scorer for FlatModel {
    fn score(&self, values: &[f64]) -> f64 {
        f64::from(self.predict(values))
    }
}

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Serializes the ensemble, rejecting artifacts over `limit` bytes.
/// Deterministic: re-exporting the same ensemble yields identical bytes.
pub fn export_flat(ensemble: &TreeEnsemble, limit: usize) -> Result<Vec<u8>, ArtifactError> {
    let hash_bytes = hex::decode(&ensemble.schema_hash)
        .map_err(|_| ArtifactError::BadSchemaHash(ensemble.schema_hash.clone()))?;
    if hash_bytes.len() != 32 {
        return Err(ArtifactError::BadSchemaHash(ensemble.schema_hash.clone()));
    }
    let depth =
        ensemble.trees.iter().map(|t| t.levels.len()).max().unwrap_or(0) as u32;
    if depth > 16 {
        return Err(ArtifactError::DepthOutOfRange(depth));
    }
    let leaves_per_tree = 1usize << depth;

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    push_u32(&mut out, FORMAT_VERSION);
    out.extend_from_slice(&hash_bytes);
    push_u32(&mut out, ensemble.trees.len() as u32);
    out.extend_from_slice(&(depth as u16).to_le_bytes());
    out.extend_from_slice(&(ensemble.base_score as f32).to_le_bytes());

    for tree in &ensemble.trees {
        for level in 0..depth as usize {
            // Shorter trees are padded with no-op levels that replicate each
            // leaf: feature 0, threshold +inf (everything goes left).
            match tree.levels.get(level) {
                Some(split) => {
                    out.extend_from_slice(&split.feature.to_le_bytes());
                    out.extend_from_slice(&(split.threshold as f32).to_le_bytes());
                    out.push(u8::from(split.missing_goes_right));
                }
                None => {
                    out.extend_from_slice(&0u16.to_le_bytes());
                    out.extend_from_slice(&f32::INFINITY.to_le_bytes());
                    out.push(0);
                }
            }
        }
        let native = 1usize << tree.levels.len();
        for idx in 0..leaves_per_tree {
            // Padded levels contribute zero bits, so index modulo the native
            // leaf count replays the original table.
            let value = tree.leaf_values[idx % native] as f32;
            out.extend_from_slice(&value.to_le_bytes());
        }
    }

    if out.len() > limit {
        return Err(ArtifactError::BudgetExceeded { size: out.len(), limit });
    }
    Ok(out)
}

fn take<'a>(bytes: &'a [u8], pos: &mut usize, n: usize) -> Result<&'a [u8], ArtifactError> {
    let end = pos.checked_add(n).ok_or(ArtifactError::Truncated)?;
    if end > bytes.len() {
        return Err(ArtifactError::Truncated);
    }
    let slice = &bytes[*pos..end];
    *pos = end;
    Ok(slice)
}

/// Parses and bounds-checks a flat artifact. Never reads out of bounds for
/// any input byte string.
pub fn load_flat(bytes: &[u8]) -> Result<FlatModel, ArtifactError> {
    let mut pos = 0usize;
    let magic = take(bytes, &mut pos, 4)?;
    if magic != MAGIC {
        return Err(ArtifactError::BadMagic);
    }
    let version = u32::from_le_bytes(take(bytes, &mut pos, 4)?.try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(ArtifactError::VersionUnsupported(version));
    }
    let schema_hash = hex::encode(take(bytes, &mut pos, 32)?);
    let n_trees = u32::from_le_bytes(take(bytes, &mut pos, 4)?.try_into().unwrap()) as usize;
    let depth = u16::from_le_bytes(take(bytes, &mut pos, 2)?.try_into().unwrap());
    if depth > 16 {
        return Err(ArtifactError::DepthOutOfRange(depth as u32));
    }
    let base_score = f32::from_le_bytes(take(bytes, &mut pos, 4)?.try_into().unwrap());

    let leaves_per_tree = 1usize << depth;
    let body = (depth as u64 * SPLIT_LEN as u64 + leaves_per_tree as u64 * 4)
        .checked_mul(n_trees as u64)
        .ok_or(ArtifactError::Truncated)?;
    if HEADER_LEN as u64 + body != bytes.len() as u64 {
        return Err(ArtifactError::Truncated);
    }

    let mut splits = Vec::with_capacity(n_trees * depth as usize);
    let mut leaves = Vec::with_capacity(n_trees * leaves_per_tree);
    for _ in 0..n_trees {
        for _ in 0..depth {
            let feature = u16::from_le_bytes(take(bytes, &mut pos, 2)?.try_into().unwrap());
            let threshold = f32::from_le_bytes(take(bytes, &mut pos, 4)?.try_into().unwrap());
            let missing = take(bytes, &mut pos, 1)?[0] != 0;
            splits.push(FlatSplit { feature, threshold, missing_goes_right: missing });
        }
        for _ in 0..leaves_per_tree {
            leaves.push(f32::from_le_bytes(take(bytes, &mut pos, 4)?.try_into().unwrap()));
        }
    }

    Ok(FlatModel { version, schema_hash, depth, base_score, splits, leaves })
}

#[derive(Debug, Clone)]
pub struct BudgetReport {
    pub size_bytes: usize,
    pub size_limit: usize,
    pub size_ok: bool,
    pub median_latency_ms: f64,
    pub latency_limit_ms: f64,
    pub latency_ok: bool,
    pub candidates: usize,
    pub repetitions: usize,
}

/// Verifies the size budget and benchmarks ranking one `candidates`-wide
/// look-up `repetitions` times, reporting the median wall time.
pub fn check_budget(
    bytes: &[u8],
    size_limit: usize,
    latency_limit_ms: f64,
    candidates: usize,
    repetitions: usize,
) -> Result<BudgetReport, ArtifactError> {
    let model = load_flat(bytes)?;
    let arity = model.min_arity().max(1);
    let mut rng = ChaCha20Rng::seed_from_u64(0xb_eac);
    let lookup: Vec<Vec<f64>> = (0..candidates)
        .map(|_| (0..arity).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();

    let mut times = Vec::with_capacity(repetitions);
    let mut sink = 0usize;
    for _ in 0..repetitions {
        let start = Instant::now();
        let scores: Vec<f64> = lookup.iter().map(|v| f64::from(model.predict(v))).collect();
        let order = rank_candidates(&scores);
        sink ^= order[0];
        times.push(start.elapsed().as_secs_f64() * 1000.0);
    }
    std::hint::black_box(sink);
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = times[times.len() / 2];
    Ok(BudgetReport {
        size_bytes: bytes.len(),
        size_limit,
        size_ok: bytes.len() <= size_limit,
        median_latency_ms: median,
        latency_limit_ms,
        latency_ok: median < latency_limit_ms,
        candidates,
        repetitions,
    })
}
