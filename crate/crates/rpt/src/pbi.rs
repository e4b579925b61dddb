//! Path-type-bucket index: per (language, path type), equi-depth frequency
//! buckets mapping to posting lists of program ids.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RptError};
use crate::frontend::Language;
use crate::repr::{ExtractionConfig, PathType, ProgramRepr};
use crate::store::Store;

pub const META_FILE: &str = "index.meta.json";
pub const POSTINGS_FILE: &str = "postings.jsonl";

/// Equi-depth bucket boundaries. `edges` holds the finite upper edges in
/// strictly increasing order; one overflow bucket to +inf is implicit, so
/// the bucket count is `edges.len() + 1`. Bucket 0 covers `[min, edges[0]]`,
/// bucket i covers `(edges[i-1], edges[i]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketBoundaries {
    pub edges: Vec<f64>,
}

impl BucketBoundaries {
    pub fn bucket_count(&self) -> usize {
        self.edges.len() + 1
    }
}

/// Equi-depth boundaries over positive frequency samples: walk the sorted
/// samples filling each bucket with about `len / budget` values, extending
/// past duplicates so edges stay strictly increasing. Duplicate-heavy
/// distributions therefore yield fewer than `budget` buckets.
pub fn build_boundaries(samples: &[f64], budget: usize) -> Result<BucketBoundaries> {
    if samples.is_empty() {
        return Err(RptError::EmptySamples);
    }
    if budget == 0 {
        return Err(RptError::InvalidConfig("bucket budget must be >= 1".into()));
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite frequency samples"));
    let n = sorted.len();
    let mut edges = Vec::new();
    let mut start = 0usize;
    let mut buckets_left = budget;
    while start < n && buckets_left > 1 {
        let target = (n - start).div_ceil(buckets_left);
        let mut end = start + target;
        while end < n && sorted[end] == sorted[end - 1] {
            end += 1;
        }
        if end >= n {
            edges.push(sorted[n - 1]);
            break;
        }
        edges.push(sorted[end - 1]);
        start = end;
        buckets_left -= 1;
    }
    Ok(BucketBoundaries { edges })
}

/// Index of the bucket covering `freq`. Total: frequencies above the last
/// finite edge land in the overflow bucket.
pub fn bucket_of(freq: f64, boundaries: &BucketBoundaries) -> usize {
    boundaries.edges.partition_point(|&e| e < freq)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TypeEntry {
    boundaries: BucketBoundaries,
    /// One posting list per bucket: ascending program indexes.
    buckets: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IndexMeta {
    version: u32,
    bucket_budget: usize,
    store_checksum: String,
    config: ExtractionConfig,
    /// Ascending program ids; postings refer to positions in this table.
    program_ids: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PostingLine {
    language: Language,
    path_type: PathType,
    #[serde(flatten)]
    entry: TypeEntry,
}

/// The serialized-at-rest, immutable-after-build bucket index.
#[derive(Debug, Clone)]
pub struct PbiIndex {
    bucket_budget: usize,
    store_checksum: String,
    config: ExtractionConfig,
    program_ids: Vec<String>,
    languages: BTreeMap<Language, BTreeMap<PathType, TypeEntry>>,
}

/// A candidate from `gather_candidates`: program id position plus the number
/// of query path types that probed to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub program: u32,
    pub hits: u32,
}

impl PbiIndex {
    /// Build the index over every (language, path type) in the store.
    pub fn build(store: &Store, bucket_budget: usize) -> Result<PbiIndex> {
        if bucket_budget == 0 {
            return Err(RptError::InvalidConfig("bucket budget must be >= 1".into()));
        }
        let mut program_ids: Vec<String> =
            store.iter().map(|r| r.repr.program_id.clone()).collect();
        program_ids.sort_unstable();
        let position: BTreeMap<&str, u32> = program_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i as u32))
            .collect();

        // (language, path type) -> [(frequency, program position)]
        let mut occurrences: BTreeMap<Language, BTreeMap<PathType, Vec<(u32, u32)>>> =
            BTreeMap::new();
        for record in store.iter() {
            let pos = position[record.repr.program_id.as_str()];
            let per_lang = occurrences.entry(record.repr.language).or_default();
            for (&ty, &freq) in &record.repr.freq {
                per_lang.entry(ty).or_default().push((freq, pos));
            }
        }

        let mut languages = BTreeMap::new();
        for (language, types) in occurrences {
            let mut built: BTreeMap<PathType, TypeEntry> = BTreeMap::new();
            for (ty, occ) in types {
                let samples: Vec<f64> = occ.iter().map(|&(f, _)| f as f64).collect();
                let boundaries = build_boundaries(&samples, bucket_budget)?;
                let mut buckets = vec![Vec::new(); boundaries.bucket_count()];
                for (freq, pos) in occ {
                    buckets[bucket_of(freq as f64, &boundaries)].push(pos);
                }
                for bucket in &mut buckets {
                    bucket.sort_unstable();
                }
                built.insert(ty, TypeEntry { boundaries, buckets });
            }
            languages.insert(language, built);
        }
        Ok(PbiIndex {
            bucket_budget,
            store_checksum: store.checksum()?,
            config: store.manifest().config.clone(),
            program_ids,
            languages,
        })
    }

    pub fn bucket_budget(&self) -> usize {
        self.bucket_budget
    }

    pub fn store_checksum(&self) -> &str {
        &self.store_checksum
    }

    pub fn config(&self) -> &ExtractionConfig {
        &self.config
    }

    pub fn program_id(&self, position: u32) -> &str {
        &self.program_ids[position as usize]
    }

    pub fn program_count(&self) -> usize {
        self.program_ids.len()
    }

    pub fn path_types(&self, language: Language) -> impl Iterator<Item = &PathType> {
        self.languages.get(&language).into_iter().flat_map(|m| m.keys())
    }

    pub fn boundaries(&self, language: Language, ty: PathType) -> Option<&BucketBoundaries> {
        self.languages.get(&language)?.get(&ty).map(|e| &e.boundaries)
    }

    pub fn bucket_sizes(&self, language: Language, ty: PathType) -> Option<Vec<usize>> {
        self.languages
            .get(&language)?
            .get(&ty)
            .map(|e| e.buckets.iter().map(Vec::len).collect())
    }

    /// Program positions whose `ty` frequency falls within `slack` buckets
    /// of `freq`'s bucket. Sorted ascending. Empty when the path type is
    /// unknown for that language.
    pub fn probe(
        &self,
        language: Language,
        ty: PathType,
        freq: u32,
        slack: usize,
    ) -> Vec<u32> {
        let entry = match self.languages.get(&language).and_then(|m| m.get(&ty)) {
            Some(e) => e,
            None => return Vec::new(),
        };
        let center = bucket_of(freq as f64, &entry.boundaries);
        let lo = center.saturating_sub(slack);
        let hi = (center + slack).min(entry.buckets.len() - 1);
        let mut out: Vec<u32> = entry.buckets[lo..=hi].concat();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Same as [`probe`](Self::probe) but resolving positions to ids.
    pub fn probe_ids(
        &self,
        language: Language,
        ty: PathType,
        freq: u32,
        slack: usize,
    ) -> Vec<&str> {
        self.probe(language, ty, freq, slack)
            .into_iter()
            .map(|p| self.program_id(p))
            .collect()
    }

    /// Bucket-probe every path type of the query and keep programs hit by
    /// at least `ceil(min_hit_ratio * known)` of the `known` query types the
    /// index has seen for that language. Sorted by (hits desc, id asc),
    /// truncated at `cap`.
    pub fn gather_candidates(
        &self,
        query: &ProgramRepr,
        target_language: Language,
        slack: usize,
        min_hit_ratio: f64,
        cap: usize,
    ) -> Vec<Candidate> {
        let types = match self.languages.get(&target_language) {
            Some(t) => t,
            None => return Vec::new(),
        };
        let mut hits = vec![0u32; self.program_ids.len()];
        let mut known = 0usize;
        for (&ty, &freq) in &query.freq {
            let entry = match types.get(&ty) {
                Some(e) => e,
                None => continue,
            };
            known += 1;
            // Each program sits in exactly one bucket per type, so the
            // probed window needs no dedup.
            let center = bucket_of(freq as f64, &entry.boundaries);
            let lo = center.saturating_sub(slack);
            let hi = (center + slack).min(entry.buckets.len() - 1);
            for bucket in &entry.buckets[lo..=hi] {
                for &pos in bucket {
                    hits[pos as usize] += 1;
                }
            }
        }
        if known == 0 {
            return Vec::new();
        }
        let threshold = ((min_hit_ratio * known as f64).ceil() as u32).max(1);
        let mut candidates: Vec<Candidate> = hits
            .iter()
            .enumerate()
            .filter(|&(_, &h)| h >= threshold)
            .map(|(pos, &h)| Candidate {
                program: pos as u32,
                hits: h,
            })
            .collect();
        candidates.sort_by(|a, b| b.hits.cmp(&a.hits).then_with(|| a.program.cmp(&b.program)));
        candidates.truncate(cap);
        candidates
    }

    /// Write `index.meta.json` and the postings file under `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let meta = IndexMeta {
            version: 1,
            bucket_budget: self.bucket_budget,
            store_checksum: self.store_checksum.clone(),
            config: self.config.clone(),
            program_ids: self.program_ids.clone(),
        };
        fs::write(
            dir.join(META_FILE),
            serde_json::to_string_pretty(&meta)? + "\n",
        )?;
        let mut writer = BufWriter::new(fs::File::create(dir.join(POSTINGS_FILE))?);
        for (&language, types) in &self.languages {
            for (&path_type, entry) in types {
                let line = PostingLine {
                    language,
                    path_type,
                    entry: entry.clone(),
                };
                serde_json::to_writer(&mut writer, &line)?;
                writer.write_all(b"\n")?;
            }
        }
        writer.flush()?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<PbiIndex> {
        let meta: IndexMeta = serde_json::from_str(&fs::read_to_string(dir.join(META_FILE))?)?;
        let mut languages: BTreeMap<Language, BTreeMap<PathType, TypeEntry>> = BTreeMap::new();
        let text = fs::read_to_string(dir.join(POSTINGS_FILE))?;
        for line in text.lines() {
            if line.is_empty() {
                continue;
            }
            let parsed: PostingLine = serde_json::from_str(line)
                .map_err(|e| RptError::CorruptIndex(e.to_string()))?;
            languages
                .entry(parsed.language)
                .or_default()
                .insert(parsed.path_type, parsed.entry);
        }
        Ok(PbiIndex {
            bucket_budget: meta.bucket_budget,
            store_checksum: meta.store_checksum,
            config: meta.config,
            program_ids: meta.program_ids,
            languages,
        })
    }
}
