//! Hierarchical filtering and ranking: bucket-index candidates ->
//! structural-similarity filter -> textual-similarity filter -> weighted
//! combined score -> top-k.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RptError};
use crate::frontend::Language;
use crate::pbi::PbiIndex;
use crate::repr::ProgramRepr;
use crate::store::Store;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetrievalConfig {
    /// Weight of structural similarity; `w_struct + w_text = 1`.
    pub w_struct: f64,
    pub w_text: f64,
    /// Survivor count of the structural filter.
    pub k1: usize,
    /// Result count.
    pub k: usize,
    /// Bucket-probe slack, in buckets.
    pub slack: usize,
    /// Keep candidates hit by at least this fraction of query path types.
    pub min_hit_ratio: f64,
    /// Candidate cap after index probing.
    pub cap: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            w_struct: 0.6,
            w_text: 0.4,
            k1: 100,
            k: 10,
            slack: 1,
            min_hit_ratio: 0.3,
            cap: 1000,
        }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<()> {
        if (self.w_struct + self.w_text - 1.0).abs() > 1e-12 {
            return Err(RptError::InvalidConfig(
                "w_struct + w_text must equal 1".into(),
            ));
        }
        if self.w_struct < 0.0 || self.w_text < 0.0 {
            return Err(RptError::InvalidConfig("weights must be non-negative".into()));
        }
        if self.k < 1 || self.k1 < self.k {
            return Err(RptError::InvalidConfig("need K1 >= k >= 1".into()));
        }
        Ok(())
    }
}

/// One ranked candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredResult {
    pub program_id: String,
    pub s_struct: f64,
    pub s_text: f64,
    pub s_combined: f64,
}

/// Ordered candidate list, best first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub results: Vec<ScoredResult>,
}

/// Cosine similarity of the path-type frequency vectors over the union of
/// path types.
pub fn struct_sim(a: &ProgramRepr, b: &ProgramRepr) -> f64 {
    let mut dot = 0.0f64;
    for (ty, &fa) in &a.freq {
        if let Some(&fb) = b.freq.get(ty) {
            dot += fa as f64 * fb as f64;
        }
    }
    if dot == 0.0 {
        return 0.0;
    }
    let na: f64 = a.freq.values().map(|&f| (f as f64).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.freq.values().map(|&f| (f as f64).powi(2)).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// Structure-dependent textual similarity: over shared path types, cosine
/// of the two token bags weighted by the smaller of the two frequencies.
pub fn text_sim(a: &ProgramRepr, b: &ProgramRepr) -> f64 {
    let mut weight_total = 0.0f64;
    let mut weighted = 0.0f64;
    for (ty, &fa) in &a.freq {
        let fb = match b.freq.get(ty) {
            Some(&f) => f,
            None => continue,
        };
        let weight = fa.min(fb) as f64;
        weight_total += weight;
        if let (Some(bag_a), Some(bag_b)) = (a.text.get(ty), b.text.get(ty)) {
            weighted += weight * bag_cosine(bag_a, bag_b);
        }
    }
    if weight_total == 0.0 {
        0.0
    } else {
        (weighted / weight_total).clamp(0.0, 1.0)
    }
}

fn bag_cosine(a: &crate::repr::TokenBag, b: &crate::repr::TokenBag) -> f64 {
    let mut dot = 0.0f64;
    for (tok, &ca) in &a.0 {
        if let Some(&cb) = b.0.get(tok) {
            dot += ca as f64 * cb as f64;
        }
    }
    if dot == 0.0 {
        return 0.0;
    }
    let na: f64 = a.0.values().map(|&c| (c as f64).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.0.values().map(|&c| (c as f64).powi(2)).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Weighted sum of the two similarities.
pub fn combined(s_struct: f64, s_text: f64, cfg: &RetrievalConfig) -> f64 {
    cfg.w_struct * s_struct + cfg.w_text * s_text
}

/// Run the full retrieval pipeline for an already-represented query.
pub fn retrieve(
    query: &ProgramRepr,
    target_language: Language,
    cfg: &RetrievalConfig,
    index: &PbiIndex,
    store: &Store,
) -> Result<RankedResult> {
    cfg.validate()?;
    if index.store_checksum() != store.checksum()? {
        return Err(RptError::IndexStoreMismatch);
    }
    let candidates =
        index.gather_candidates(query, target_language, cfg.slack, cfg.min_hit_ratio, cfg.cap);

    // Structural filter: score candidates, keep the best K1.
    let mut structural: Vec<(String, f64)> = Vec::with_capacity(candidates.len());
    for c in &candidates {
        let id = index.program_id(c.program);
        let record = store.get(id)?;
        structural.push((id.to_string(), struct_sim(query, &record.repr)));
    }
    structural.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("similarity is finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    structural.truncate(cfg.k1);

    // Textual filter and combined ranking over the survivors.
    let mut results: Vec<ScoredResult> = Vec::with_capacity(structural.len());
    for (id, s_struct) in structural {
        let record = store.get(&id)?;
        let s_text = text_sim(query, &record.repr);
        let s_combined = combined(s_struct, s_text, cfg);
        results.push(ScoredResult {
            program_id: id,
            s_struct,
            s_text,
            s_combined,
        });
    }
    results.sort_by(|a, b| {
        b.s_combined
            .partial_cmp(&a.s_combined)
            .expect("score is finite")
            .then_with(|| a.program_id.cmp(&b.program_id))
    });
    results.truncate(cfg.k);
    Ok(RankedResult { results })
}

/// Brute-force reference ranking: combined score against every program of
/// the target language, no index and no filtering. The oracle the pipeline
/// must match under relaxed configuration.
pub fn brute_force_rank(
    query: &ProgramRepr,
    target_language: Language,
    cfg: &RetrievalConfig,
    store: &Store,
) -> RankedResult {
    let mut results: Vec<ScoredResult> = store
        .scan(target_language)
        .map(|record| {
            let s_struct = struct_sim(query, &record.repr);
            let s_text = text_sim(query, &record.repr);
            ScoredResult {
                program_id: record.repr.program_id.clone(),
                s_struct,
                s_text,
                s_combined: combined(s_struct, s_text, cfg),
            }
        })
        .collect();
    results.sort_by(|a, b| {
        b.s_combined
            .partial_cmp(&a.s_combined)
            .expect("score is finite")
            .then_with(|| a.program_id.cmp(&b.program_id))
    });
    results.truncate(cfg.k);
    RankedResult { results }
}
