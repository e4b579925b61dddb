//! Evaluation harness: accuracy@1 / recall@10 over parallel pairs,
//! deterministic synthetic corpora, clone mutation, and index benchmarks.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::Category;
use crate::error::{Result, RptError};
use crate::frontend::Language;
use crate::pbi::PbiIndex;
use crate::repr::{ExtractionConfig, PathType, ProgramRepr, TokenBag};
use crate::retrieve::{retrieve, struct_sim, RetrievalConfig};
use crate::store::{Store, StoreRecord};

/// A ground-truth translation pair by program id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelPair {
    pub source_id: String,
    pub translation_id: String,
}

/// Parse a line-oriented `source_id<TAB>translation_id` pairs file.
/// Blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<ParallelPair>> {
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                pairs.push(ParallelPair {
                    source_id: a.to_string(),
                    translation_id: b.to_string(),
                });
            }
            _ => {
                return Err(RptError::InvalidConfig(format!(
                    "pairs line {}: expected `source_id<TAB>translation_id`",
                    lineno + 1
                )))
            }
        }
    }
    Ok(pairs)
}

/// Outcome of one evaluation query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub source_id: String,
    pub translation_id: String,
    /// 1-based rank of the ground truth in the result list, if present.
    pub rank: Option<usize>,
    pub micros: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub pairs: usize,
    pub accuracy_at_1: f64,
    pub recall_at_10: f64,
    pub mean_query_micros: f64,
    pub median_query_micros: f64,
    pub per_query: Vec<QueryRecord>,
}

impl EvalReport {
    /// Human-readable table for the terminal; the JSON form is the
    /// machine interface.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str("source_id\ttranslation_id\trank\tmicros\n");
        for q in &self.per_query {
            let rank = q
                .rank
                .map(|r| r.to_string())
                .unwrap_or_else(|| "-".to_string());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                q.source_id, q.translation_id, rank, q.micros
            ));
        }
        out.push_str(&format!(
            "pairs={} accuracy@1={:.4} recall@10={:.4} mean={:.1}us median={:.1}us\n",
            self.pairs,
            self.accuracy_at_1,
            self.recall_at_10,
            self.mean_query_micros,
            self.median_query_micros
        ));
        out
    }
}

fn median(mut xs: Vec<u64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2] as f64
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) as f64 / 2.0
    }
}

fn run_pair(
    pair: &ParallelPair,
    cfg: &RetrievalConfig,
    index: &PbiIndex,
    store: &Store,
    timed: bool,
) -> Result<QueryRecord> {
    let source = store
        .get(&pair.source_id)
        .map_err(|_| RptError::MissingUnit(pair.source_id.clone()))?;
    let truth = store
        .get(&pair.translation_id)
        .map_err(|_| RptError::MissingUnit(pair.translation_id.clone()))?;
    if source.repr.language == truth.repr.language {
        return Err(RptError::InvalidConfig(format!(
            "pair {} -> {}: both sides are {}",
            pair.source_id, pair.translation_id, source.repr.language
        )));
    }
    let start = Instant::now();
    let ranked = retrieve(&source.repr, truth.repr.language, cfg, index, store)?;
    let micros = if timed {
        start.elapsed().as_micros() as u64
    } else {
        0
    };
    let rank = ranked
        .results
        .iter()
        .position(|r| r.program_id == pair.translation_id)
        .map(|i| i + 1);
    Ok(QueryRecord {
        source_id: pair.source_id.clone(),
        translation_id: pair.translation_id.clone(),
        rank,
        micros,
    })
}

/// Query each pair's source against its translation's language and score
/// the ground truth's rank. Sequential so per-query timing is meaningful;
/// see [`evaluate_parallel`] for throughput runs.
pub fn evaluate(
    pairs: &[ParallelPair],
    cfg: &RetrievalConfig,
    index: &PbiIndex,
    store: &Store,
) -> Result<EvalReport> {
    let per_query: Vec<QueryRecord> = pairs
        .iter()
        .map(|p| run_pair(p, cfg, index, store, true))
        .collect::<Result<_>>()?;
    Ok(summarize(per_query))
}

/// Fan pairs out across threads; timing fields are zeroed because
/// contended wall-clock readings are not comparable.
pub fn evaluate_parallel(
    pairs: &[ParallelPair],
    cfg: &RetrievalConfig,
    index: &PbiIndex,
    store: &Store,
) -> Result<EvalReport> {
    let per_query: Vec<QueryRecord> = pairs
        .par_iter()
        .map(|p| run_pair(p, cfg, index, store, false))
        .collect::<Result<_>>()?;
    Ok(summarize(per_query))
}

fn summarize(per_query: Vec<QueryRecord>) -> EvalReport {
    let n = per_query.len();
    let hits_at_1 = per_query.iter().filter(|q| q.rank == Some(1)).count();
    let hits_at_10 = per_query
        .iter()
        .filter(|q| matches!(q.rank, Some(r) if r <= 10))
        .count();
    let times: Vec<u64> = per_query.iter().map(|q| q.micros).collect();
    let (accuracy_at_1, recall_at_10) = if n == 0 {
        (0.0, 0.0)
    } else {
        (hits_at_1 as f64 / n as f64, hits_at_10 as f64 / n as f64)
    };
    EvalReport {
        pairs: n,
        accuracy_at_1,
        recall_at_10,
        mean_query_micros: if n == 0 {
            0.0
        } else {
            times.iter().sum::<u64>() as f64 / n as f64
        },
        median_query_micros: median(times),
        per_query,
    }
}

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

/// Success probability of the geometric frequency generator.
pub const SYNTH_GEOM_P: f64 = 0.4;

/// Closed-form mean of the generated frequencies (`1/p`).
pub const SYNTH_FREQ_MEAN: f64 = 1.0 / SYNTH_GEOM_P;

/// Closed-form variance of the generated frequencies (`(1-p)/p^2`).
pub const SYNTH_FREQ_VAR: f64 = (1.0 - SYNTH_GEOM_P) / (SYNTH_GEOM_P * SYNTH_GEOM_P);

/// Geometric on {1, 2, ...} via inverse transform: frequencies that decay
/// exponentially, like real path-type counts.
fn geometric(rng: &mut ChaCha8Rng) -> u32 {
    let u: f64 = rng.gen_range(0.0..1.0);
    1 + ((1.0 - u).ln() / (1.0 - SYNTH_GEOM_P).ln()).floor() as u32
}

fn synth_type_universe() -> Vec<PathType> {
    use Category::*;
    let tops = [
        Program, Block, FuncDecl, VarDecl, Assign, Cond, Loop, Call,
    ];
    let leaves = [Ident, TypeRef, LitNum, LitStr];
    let mut universe = Vec::new();
    for &top in &tops {
        for (i, &a) in leaves.iter().enumerate() {
            universe.push(PathType::unary(top, a));
            for &b in &leaves[i..] {
                universe.push(PathType::pair(top, a, b));
            }
        }
    }
    universe
}

const SYNTH_VOCAB: &[&str] = &[
    "count", "index", "value", "total", "result", "buffer", "item", "node",
    "list", "size", "name", "flag", "sum", "offset", "line", "key",
];

/// Path types present in every synthetic program, guaranteeing that any two
/// programs share structure (so exhaustive oracles see a connected corpus).
const SYNTH_BACKBONE: usize = 4;
/// Optional types drawn per program from the rest of the universe.
const SYNTH_EXTRA: usize = 8;

fn synth_repr(id: &str, language: Language, rng: &mut ChaCha8Rng) -> ProgramRepr {
    let universe = synth_type_universe();
    let mut freq = BTreeMap::new();
    let mut text = BTreeMap::new();
    let mut path_total = 0u64;
    let mut chosen: Vec<PathType> = universe[..SYNTH_BACKBONE].to_vec();
    for _ in 0..SYNTH_EXTRA {
        let ty = universe[SYNTH_BACKBONE + rng.gen_range(0..universe.len() - SYNTH_BACKBONE)];
        if !chosen.contains(&ty) {
            chosen.push(ty);
        }
    }
    for ty in chosen {
        let f = geometric(rng);
        let mut bag = TokenBag::default();
        let tokens = 1 + rng.gen_range(0..3usize);
        for _ in 0..tokens {
            let tok = SYNTH_VOCAB[rng.gen_range(0..SYNTH_VOCAB.len())];
            bag.add(tok);
        }
        freq.insert(ty, f);
        text.insert(ty, bag);
        path_total += f as u64;
    }
    ProgramRepr {
        program_id: id.to_string(),
        language,
        freq,
        text,
        path_total,
    }
}

/// Generate `n` deterministic synthetic programs (all Java) into a fresh
/// store at `dir`. Same `(n, seed)` produce byte-identical stores.
pub fn synth_corpus(n: usize, seed: u64, dir: &Path) -> Result<Store> {
    if n == 0 {
        return Err(RptError::InvalidConfig("synthetic corpus needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = ExtractionConfig::default();
    {
        let mut store = Store::open_append(dir, &config)?;
        for i in 0..n {
            let id = format!("synth-{i:06}");
            let repr = synth_repr(&id, Language::Java, &mut rng);
            store.append(StoreRecord {
                locator: format!("synth://{seed}/{i}"),
                repr,
            })?;
        }
    }
    Store::open_read(dir, Some(&config))
}

/// Derive a near-duplicate of `base`: consistent token renames (identifier
/// renaming) plus ±1 jitter on a few type frequencies (the path-level
/// footprint of statement reordering and small edits).
pub fn mutate_clone(base: &ProgramRepr, clone_id: &str, seed: u64) -> ProgramRepr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rename: BTreeMap<&str, String> = SYNTH_VOCAB
        .iter()
        .map(|&t| (t, format!("{t}{}", rng.gen_range(0..100u32))))
        .collect();
    let mut freq = BTreeMap::new();
    let mut text = BTreeMap::new();
    let mut path_total = 0u64;
    for (&ty, &f) in &base.freq {
        let jitter: i64 = if rng.gen_bool(0.2) {
            if rng.gen_bool(0.5) {
                1
            } else {
                -1
            }
        } else {
            0
        };
        let f = ((f as i64 + jitter).max(1)) as u32;
        let mut bag = TokenBag::default();
        for (tok, &count) in &base.text[&ty].0 {
            let renamed = rename
                .get(tok.as_str())
                .cloned()
                .unwrap_or_else(|| tok.clone());
            for _ in 0..count {
                bag.add(&renamed);
            }
        }
        freq.insert(ty, f);
        text.insert(ty, bag);
        path_total += f as u64;
    }
    ProgramRepr {
        program_id: clone_id.to_string(),
        language: base.language,
        freq,
        text,
        path_total,
    }
}

// ---------------------------------------------------------------------------
// Index benchmark
// ---------------------------------------------------------------------------

/// Posting list per path type with no buckets: the flat baseline the
/// bucketed index is compared against.
pub struct NaiveIndex {
    postings: BTreeMap<Language, BTreeMap<PathType, Vec<u32>>>,
    ids: Vec<String>,
}

impl NaiveIndex {
    pub fn build(store: &Store) -> NaiveIndex {
        let mut ids: Vec<String> = store
            .iter()
            .map(|r| r.repr.program_id.clone())
            .collect();
        ids.sort();
        let position: BTreeMap<&str, u32> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i as u32))
            .collect();
        let mut postings: BTreeMap<Language, BTreeMap<PathType, Vec<u32>>> = BTreeMap::new();
        for record in store.iter() {
            let pos = position[record.repr.program_id.as_str()];
            let per_lang = postings.entry(record.repr.language).or_default();
            for &ty in record.repr.freq.keys() {
                per_lang.entry(ty).or_default().push(pos);
            }
        }
        for per_lang in postings.values_mut() {
            for list in per_lang.values_mut() {
                list.sort_unstable();
            }
        }
        NaiveIndex { postings, ids }
    }

    /// Union of the posting lists of the query's path types. Sorted.
    pub fn candidates(&self, query: &ProgramRepr, language: Language) -> Vec<u32> {
        let per_lang = match self.postings.get(&language) {
            Some(p) => p,
            None => return Vec::new(),
        };
        let mut out = Vec::new();
        for ty in query.freq.keys() {
            if let Some(list) = per_lang.get(ty) {
                out.extend_from_slice(list);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn program_id(&self, pos: u32) -> &str {
        &self.ids[pos as usize]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub programs: usize,
    pub queries: usize,
    pub pbi_micros_median: f64,
    pub naive_micros_median: f64,
    pub scan_micros_median: f64,
    pub speedup_vs_scan: f64,
    pub speedup_vs_naive: f64,
    /// PBI(slack=1) ⊆ PBI(slack=2) ⊆ naive candidate set, for every query.
    pub subsets_ok: bool,
}

const BENCH_REPS: usize = 3;

fn timed_median<F: FnMut()>(mut f: F) -> f64 {
    f(); // warm-up, discarded
    let mut times = Vec::with_capacity(BENCH_REPS);
    for _ in 0..BENCH_REPS {
        let start = Instant::now();
        f();
        times.push(start.elapsed().as_micros() as u64);
    }
    median(times)
}

/// Time candidate generation through the bucketed index against the flat
/// posting-list baseline and a full similarity scan, over `query_count`
/// programs sampled from the store.
pub fn bench_index(
    store: &Store,
    index: &PbiIndex,
    query_count: usize,
    seed: u64,
) -> Result<BenchReport> {
    if store.is_empty() || query_count == 0 {
        return Err(RptError::InvalidConfig(
            "benchmark needs a non-empty store and query_count >= 1".into(),
        ));
    }
    let naive = NaiveIndex::build(store);
    let records: Vec<&StoreRecord> = store.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let queries: Vec<&ProgramRepr> = (0..query_count)
        .map(|_| &records[rng.gen_range(0..records.len())].repr)
        .collect();

    let mut subsets_ok = true;
    for q in &queries {
        let ids = |candidates: Vec<crate::pbi::Candidate>| -> std::collections::BTreeSet<&str> {
            candidates
                .iter()
                .map(|c| index.program_id(c.program))
                .collect()
        };
        let tight = ids(index.gather_candidates(q, q.language, 1, 0.0, usize::MAX));
        let loose = ids(index.gather_candidates(q, q.language, 2, 0.0, usize::MAX));
        let flat: std::collections::BTreeSet<&str> = naive
            .candidates(q, q.language)
            .iter()
            .map(|&p| naive.program_id(p))
            .collect();
        if !tight.is_subset(&loose) || !loose.is_subset(&flat) {
            subsets_ok = false;
        }
    }

    let pbi_micros_median = timed_median(|| {
        for q in &queries {
            std::hint::black_box(index.gather_candidates(q, q.language, 1, 0.3, 1000));
        }
    });
    let naive_micros_median = timed_median(|| {
        for q in &queries {
            std::hint::black_box(naive.candidates(q, q.language));
        }
    });
    let scan_micros_median = timed_median(|| {
        for q in &queries {
            let mut best = (f64::MIN, "");
            for r in store.scan(q.language) {
                let s = struct_sim(q, &r.repr);
                if s > best.0 {
                    best = (s, &r.repr.program_id);
                }
            }
            std::hint::black_box(best);
        }
    });

    Ok(BenchReport {
        programs: store.len(),
        queries: queries.len(),
        pbi_micros_median,
        naive_micros_median,
        scan_micros_median,
        speedup_vs_scan: scan_micros_median / pbi_micros_median.max(1.0),
        speedup_vs_naive: naive_micros_median / pbi_micros_median.max(1.0),
        subsets_ok,
    })
}
