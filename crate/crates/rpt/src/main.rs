use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, warn};
use rayon::prelude::*;
use serde_json::json;

use rpt::error::{Result, RptError};
use rpt::eval::{bench_index, evaluate, evaluate_parallel, parse_pairs, synth_corpus};
use rpt::frontend::{abstract_tree, parse, resolve_mapping, Language, SourceUnit};
use rpt::repr::{represent, ProgramRepr};
use rpt::retrieve::retrieve;
use rpt::store::{Store, StoreRecord};
use rpt::{ExtractionConfig, PbiIndex, RetrievalConfig};

#[derive(Parser)]
#[command(name = "rpt", about = "Cross-language program translation retrieval", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StoreArgs {
    /// Feature store directory.
    #[arg(long)]
    store: PathBuf,
}

#[derive(Args)]
struct MappingArgs {
    /// Directory of per-language mapping tables; falls back to the
    /// RPT_MAPPING_DIR environment variable, then the bundled tables.
    #[arg(long)]
    mapping_dir: Option<PathBuf>,
}

impl MappingArgs {
    fn dir(&self) -> Option<PathBuf> {
        self.mapping_dir
            .clone()
            .or_else(|| std::env::var_os("RPT_MAPPING_DIR").map(PathBuf::from))
    }
}

#[derive(Args)]
struct RetrievalArgs {
    /// Structural-similarity weight; textual weight is 1 - w_struct.
    #[arg(long, default_value_t = 0.6)]
    w_struct: f64,
    /// Structural-filter survivor count.
    #[arg(long, default_value_t = 100)]
    k1: usize,
    /// Result count.
    #[arg(long, short, default_value_t = 10)]
    k: usize,
    /// Bucket-probe slack.
    #[arg(long, default_value_t = 1)]
    slack: usize,
    /// Minimum fraction of query path types a candidate must hit.
    #[arg(long, default_value_t = 0.3)]
    min_hit_ratio: f64,
    /// Candidate cap after index probing.
    #[arg(long, default_value_t = 1000)]
    cap: usize,
}

impl RetrievalArgs {
    fn config(&self) -> Result<RetrievalConfig> {
        let cfg = RetrievalConfig {
            w_struct: self.w_struct,
            w_text: 1.0 - self.w_struct,
            k1: self.k1,
            k: self.k,
            slack: self.slack,
            min_hit_ratio: self.min_hit_ratio,
            cap: self.cap,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse source files and append their representations to the store.
    Ingest {
        #[command(flatten)]
        store: StoreArgs,
        #[command(flatten)]
        mapping: MappingArgs,
        /// Treat every input as this language instead of detecting by
        /// extension.
        #[arg(long)]
        lang: Option<String>,
        #[arg(long, default_value_t = 8)]
        max_path_length: usize,
        #[arg(long, default_value_t = 10_000)]
        max_paths: usize,
        /// Files or directories (recursed) to ingest.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Build the bucketed inverted index from the store.
    BuildIndex {
        #[command(flatten)]
        store: StoreArgs,
        /// Index output directory.
        #[arg(long)]
        index: PathBuf,
        /// Bucket budget per path type.
        #[arg(long, default_value_t = 16)]
        buckets: usize,
    },
    /// Retrieve candidate translations for a source file.
    Query {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        mapping: MappingArgs,
        #[command(flatten)]
        retrieval: RetrievalArgs,
        /// Language to retrieve from.
        #[arg(long)]
        target_lang: String,
        /// Override the query file's detected language.
        #[arg(long)]
        lang: Option<String>,
        file: PathBuf,
    },
    /// Score ground-truth pairs: accuracy@1, recall@10, query times.
    Eval {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        retrieval: RetrievalArgs,
        /// Pairs file: one `source_id<TAB>translation_id` per line.
        #[arg(long)]
        pairs: PathBuf,
        /// Run queries across threads (timing fields zeroed).
        #[arg(long)]
        parallel: bool,
    },
    /// Benchmark index probing against flat postings and a full scan on a
    /// synthetic store.
    Bench {
        /// Synthetic store size.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        buckets: usize,
        #[arg(long, default_value_t = 20)]
        queries: usize,
    },
    /// Summarize the store and, optionally, index bucket occupancy.
    Stats {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        index: Option<PathBuf>,
    },
}

fn parse_language(name: &str) -> Result<Language> {
    match name.to_ascii_lowercase().as_str() {
        "java" => Ok(Language::Java),
        "csharp" | "cs" | "c#" => Ok(Language::CSharp),
        "javascript" | "js" => Ok(Language::JavaScript),
        other => Err(RptError::UnsupportedLanguage(other.to_string())),
    }
}

/// 0 = success, 1 = operational error (I/O, store, index), 2 = input error
/// (bad arguments, malformed sources or pairs).
fn exit_code_for(err: &RptError) -> u8 {
    match err {
        RptError::UnsupportedLanguage(_)
        | RptError::Syntax { .. }
        | RptError::MappingFormat { .. }
        | RptError::UnknownCategoryLabel(_)
        | RptError::UnmappedKind { .. }
        | RptError::EmptyProgram
        | RptError::InvalidConfig(_)
        | RptError::NotFound(_)
        | RptError::MissingUnit(_) => 2,
        _ => 1,
    }
}

fn file_to_repr(
    path: &Path,
    forced: Option<Language>,
    mapping_dir: Option<&Path>,
    cfg: &ExtractionConfig,
) -> Result<ProgramRepr> {
    let language = match forced {
        Some(l) => l,
        None => {
            let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
            Language::from_extension(ext)
                .ok_or_else(|| RptError::UnsupportedLanguage(path.display().to_string()))?
        }
    };
    let body = std::fs::read_to_string(path)?;
    let unit = SourceUnit {
        id: path.display().to_string(),
        language,
        body,
    };
    let mapping = resolve_mapping(language, mapping_dir)?;
    let cst = parse(&unit)?;
    let tree = abstract_tree(&cst, &mapping, false)?;
    represent(unit.id.clone(), language, &tree, cfg)
}

fn collect_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            for entry in walkdir::WalkDir::new(path).sort_by_file_name() {
                let entry = entry.map_err(|e| {
                    RptError::Io(e.into_io_error().unwrap_or_else(|| {
                        std::io::Error::new(std::io::ErrorKind::Other, "walk error")
                    }))
                })?;
                if entry.file_type().is_file() {
                    files.push(entry.into_path());
                }
            }
        } else {
            files.push(path.clone());
        }
    }
    Ok(files)
}

fn cmd_ingest(
    store_dir: &Path,
    mapping_dir: Option<&Path>,
    lang: Option<Language>,
    cfg: ExtractionConfig,
    paths: &[PathBuf],
) -> Result<()> {
    let files = collect_files(paths)?;
    // Parse and represent in parallel; append from this single thread.
    let results: Vec<(PathBuf, Result<ProgramRepr>)> = files
        .par_iter()
        .map(|f| (f.clone(), file_to_repr(f, lang, mapping_dir, &cfg)))
        .collect();
    let mut store = Store::open_append(store_dir, &cfg)?;
    let (mut ok, mut parse_failed, mut empty, mut duplicate) = (0u64, 0u64, 0u64, 0u64);
    for (file, result) in results {
        match result {
            Ok(repr) => {
                let locator = format!("file://{}", file.display());
                match store.append(StoreRecord { repr, locator }) {
                    Ok(()) => ok += 1,
                    Err(RptError::DuplicateId(id)) => {
                        warn!("skipping {}: duplicate id {id}", file.display());
                        duplicate += 1;
                    }
                    Err(other) => return Err(other),
                }
            }
            Err(RptError::EmptyProgram) => {
                warn!("skipping {}: no paths extracted", file.display());
                empty += 1;
            }
            Err(err) => {
                warn!("skipping {}: {err}", file.display());
                parse_failed += 1;
            }
        }
    }
    store.flush()?;
    if duplicate > 0 {
        warn!("{duplicate} duplicate id(s) skipped");
    }
    println!(
        "{}",
        json!({"ok": ok, "parse_failed": parse_failed, "empty": empty})
    );
    Ok(())
}

fn cmd_build_index(store_dir: &Path, index_dir: &Path, buckets: usize) -> Result<()> {
    let store = Store::open_read(store_dir, None)?;
    let index = PbiIndex::build(&store, buckets)?;
    index.save(index_dir)?;
    let types: usize = [Language::Java, Language::CSharp, Language::JavaScript]
        .iter()
        .map(|&l| index.path_types(l).count())
        .sum();
    println!(
        "{}",
        json!({"programs": index.program_count(), "path_types": types, "buckets": buckets})
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_query(
    store_dir: &Path,
    index_dir: &Path,
    mapping_dir: Option<&Path>,
    cfg: &RetrievalConfig,
    target: Language,
    lang: Option<Language>,
    file: &Path,
) -> Result<()> {
    let store = Store::open_read(store_dir, None)?;
    let index = PbiIndex::load(index_dir)?;
    let query = file_to_repr(file, lang, mapping_dir, index.config())?;
    let ranked = retrieve(&query, target, cfg, &index, &store)?;
    for (i, r) in ranked.results.iter().enumerate() {
        let locator = store.get(&r.program_id).map(|rec| rec.locator.as_str())?;
        println!(
            "{}",
            json!({
                "rank": i + 1,
                "program_id": r.program_id,
                "locator": locator,
                "s_struct": r.s_struct,
                "s_text": r.s_text,
                "s_combined": r.s_combined,
            })
        );
    }
    Ok(())
}

fn cmd_eval(
    store_dir: &Path,
    index_dir: &Path,
    cfg: &RetrievalConfig,
    pairs_file: &Path,
    parallel: bool,
) -> Result<()> {
    let store = Store::open_read(store_dir, None)?;
    let index = PbiIndex::load(index_dir)?;
    let pairs = parse_pairs(&std::fs::read_to_string(pairs_file)?)?;
    let report = if parallel {
        evaluate_parallel(&pairs, cfg, &index, &store)?
    } else {
        evaluate(&pairs, cfg, &index, &store)?
    };
    eprint!("{}", report.render_table());
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn cmd_bench(n: usize, seed: u64, buckets: usize, queries: usize) -> Result<()> {
    let dir = tempfile::TempDir::new()?;
    let store = synth_corpus(n, seed, dir.path())?;
    let index = PbiIndex::build(&store, buckets)?;
    let report = bench_index(&store, &index, queries, seed)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn percentile(sorted: &[u32], p: f64) -> u32 {
    if sorted.is_empty() {
        return 0;
    }
    let idx = ((sorted.len() - 1) as f64 * p).round() as usize;
    sorted[idx]
}

fn cmd_stats(store_dir: &Path, index_dir: Option<&Path>) -> Result<()> {
    let store = Store::open_read(store_dir, None)?;
    for (lang, count) in &store.manifest().program_counts {
        println!("programs\t{lang}\t{count}");
    }
    let languages = [Language::Java, Language::CSharp, Language::JavaScript];
    for &lang in &languages {
        let mut totals: Vec<(rpt::PathType, u64)> = Vec::new();
        let mut distinct = std::collections::BTreeSet::new();
        for record in store.scan(lang) {
            for (&ty, &f) in &record.repr.freq {
                distinct.insert(ty);
                match totals.iter_mut().find(|(t, _)| *t == ty) {
                    Some((_, sum)) => *sum += f as u64,
                    None => totals.push((ty, f as u64)),
                }
            }
        }
        if distinct.is_empty() {
            continue;
        }
        println!("path_types\t{lang}\t{}", distinct.len());
        totals.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        for (ty, _) in totals.iter().take(10) {
            let mut freqs = store.freq_histogram(lang, *ty);
            freqs.sort_unstable();
            println!(
                "freq\t{lang}\t{ty}\tmin={} median={} p95={} max={}",
                freqs[0],
                percentile(&freqs, 0.5),
                percentile(&freqs, 0.95),
                freqs[freqs.len() - 1]
            );
        }
    }
    if let Some(index_dir) = index_dir {
        let index = PbiIndex::load(index_dir)?;
        for &lang in &languages {
            let types: Vec<_> = index.path_types(lang).copied().collect();
            for ty in types {
                if let Some(sizes) = index.bucket_sizes(lang, ty) {
                    let rendered: Vec<String> =
                        sizes.iter().map(|s| s.to_string()).collect();
                    println!("buckets\t{lang}\t{ty}\t[{}]", rendered.join(","));
                }
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            store,
            mapping,
            lang,
            max_path_length,
            max_paths,
            paths,
        } => {
            let lang = lang.as_deref().map(parse_language).transpose()?;
            let cfg = ExtractionConfig {
                max_length: max_path_length,
                max_paths,
            };
            cmd_ingest(&store.store, mapping.dir().as_deref(), lang, cfg, &paths)
        }
        Command::BuildIndex {
            store,
            index,
            buckets,
        } => cmd_build_index(&store.store, &index, buckets),
        Command::Query {
            store,
            index,
            mapping,
            retrieval,
            target_lang,
            lang,
            file,
        } => {
            let cfg = retrieval.config()?;
            let target = parse_language(&target_lang)?;
            let lang = lang.as_deref().map(parse_language).transpose()?;
            cmd_query(
                &store.store,
                &index,
                mapping.dir().as_deref(),
                &cfg,
                target,
                lang,
                &file,
            )
        }
        Command::Eval {
            store,
            index,
            retrieval,
            pairs,
            parallel,
        } => {
            let cfg = retrieval.config()?;
            cmd_eval(&store.store, &index, &cfg, &pairs, parallel)
        }
        Command::Bench {
            n,
            seed,
            buckets,
            queries,
        } => cmd_bench(n, seed, buckets, queries),
        Command::Stats { store, index } => cmd_stats(&store.store, index.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            error!("{err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
