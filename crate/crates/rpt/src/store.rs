//! Append-only feature store: one JSON record per line plus a manifest
//! carrying the extraction config snapshot.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, RptError};
use crate::frontend::Language;
use crate::repr::{ExtractionConfig, PathType, ProgramRepr};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECORDS_FILE: &str = "records.jsonl";
pub const LOCK_FILE: &str = "lock";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoreManifest {
    pub version: u32,
    pub config: ExtractionConfig,
    pub program_counts: BTreeMap<Language, u64>,
    pub created_unix: u64,
}

/// A program representation plus where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreRecord {
    pub repr: ProgramRepr,
    pub locator: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Read,
    Append,
}

#[derive(Debug)]
pub struct Store {
    path: PathBuf,
    mode: Mode,
    manifest: StoreManifest,
    records: Vec<StoreRecord>,
    by_id: BTreeMap<String, usize>,
    writer: Option<File>,
}

impl Store {
    /// Open an existing store read-only. When `expected` is given the stored
    /// extraction config must match it exactly.
    pub fn open_read(path: &Path, expected: Option<&ExtractionConfig>) -> Result<Store> {
        let manifest = read_manifest(path)?;
        check_config(&manifest, expected)?;
        let (records, by_id) = read_records(path)?;
        Ok(Store {
            path: path.to_path_buf(),
            mode: Mode::Read,
            manifest,
            records,
            by_id,
            writer: None,
        })
    }

    /// Open (or create) a store for appending. A lock file guards against a
    /// second concurrent appender.
    pub fn open_append(path: &Path, config: &ExtractionConfig) -> Result<Store> {
        fs::create_dir_all(path)?;
        let manifest_path = path.join(MANIFEST_FILE);
        let manifest = if manifest_path.exists() {
            let manifest = read_manifest(path)?;
            check_config(&manifest, Some(config))?;
            manifest
        } else {
            let manifest = StoreManifest {
                version: 1,
                config: config.clone(),
                program_counts: BTreeMap::new(),
                created_unix: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            };
            write_manifest(path, &manifest)?;
            manifest
        };
        let lock_path = path.join(LOCK_FILE);
        OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&lock_path)
            .map_err(|e| {
                if e.kind() == std::io::ErrorKind::AlreadyExists {
                    RptError::StoreLocked(lock_path.clone())
                } else {
                    RptError::Io(e)
                }
            })?;
        let (records, by_id) = read_records(path)?;
        let writer = OpenOptions::new()
            .append(true)
            .create(true)
            .open(path.join(RECORDS_FILE))?;
        Ok(Store {
            path: path.to_path_buf(),
            mode: Mode::Append,
            manifest, // counts refreshed on flush
            records,
            by_id,
            writer: Some(writer),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn manifest(&self) -> &StoreManifest {
        &self.manifest
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn append(&mut self, record: StoreRecord) -> Result<()> {
        let writer = match self.writer.as_mut() {
            Some(w) => w,
            None => return Err(RptError::ReadOnlyStore),
        };
        let id = record.repr.program_id.clone();
        if self.by_id.contains_key(&id) {
            return Err(RptError::DuplicateId(id));
        }
        let mut line = serde_json::to_string(&record)?;
        line.push('\n');
        writer.write_all(line.as_bytes())?;
        self.by_id.insert(id, self.records.len());
        self.records.push(record);
        Ok(())
    }

    pub fn get(&self, program_id: &str) -> Result<&StoreRecord> {
        self.by_id
            .get(program_id)
            .map(|&i| &self.records[i])
            .ok_or_else(|| RptError::NotFound(program_id.to_string()))
    }

    pub fn contains(&self, program_id: &str) -> bool {
        self.by_id.contains_key(program_id)
    }

    /// All records in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &StoreRecord> {
        self.records.iter()
    }

    /// Records of one language, in insertion order.
    pub fn scan(&self, language: Language) -> impl Iterator<Item = &StoreRecord> {
        self.records
            .iter()
            .filter(move |r| r.repr.language == language)
    }

    /// One frequency sample per program of `language` containing `path_type`.
    pub fn freq_histogram(&self, language: Language, path_type: PathType) -> Vec<u32> {
        self.scan(language)
            .filter_map(|r| r.repr.freq.get(&path_type).copied())
            .collect()
    }

    /// SHA-256 of the record file, hex encoded. Ties an index to the exact
    /// store it was built from.
    pub fn checksum(&self) -> Result<String> {
        let bytes = fs::read(self.path.join(RECORDS_FILE)).unwrap_or_default();
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        Ok(format!("{:x}", hasher.finalize()))
    }

    /// Rewrite the manifest with current per-language counts.
    pub fn flush(&mut self) -> Result<()> {
        if self.mode != Mode::Append {
            return Ok(());
        }
        self.writer.as_mut().expect("append mode").flush()?;
        let mut counts: BTreeMap<Language, u64> = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.repr.language).or_insert(0) += 1;
        }
        self.manifest.program_counts = counts;
        write_manifest(&self.path, &self.manifest)
    }
}

impl Drop for Store {
    fn drop(&mut self) {
        if self.mode == Mode::Append {
            let _ = self.flush();
            let _ = fs::remove_file(self.path.join(LOCK_FILE));
        }
    }
}

fn check_config(manifest: &StoreManifest, expected: Option<&ExtractionConfig>) -> Result<()> {
    if let Some(expected) = expected {
        if &manifest.config != expected {
            return Err(RptError::ConfigMismatch(format!(
                "store has max_length={}, max_paths={}; requested max_length={}, max_paths={}",
                manifest.config.max_length,
                manifest.config.max_paths,
                expected.max_length,
                expected.max_paths
            )));
        }
    }
    Ok(())
}

fn read_manifest(path: &Path) -> Result<StoreManifest> {
    let text = fs::read_to_string(path.join(MANIFEST_FILE))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_manifest(path: &Path, manifest: &StoreManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    Ok(fs::write(path.join(MANIFEST_FILE), text + "\n")?)
}

fn read_records(path: &Path) -> Result<(Vec<StoreRecord>, BTreeMap<String, usize>)> {
    let file_path = path.join(RECORDS_FILE);
    let mut records = Vec::new();
    let mut by_id = BTreeMap::new();
    if !file_path.exists() {
        return Ok((records, by_id));
    }
    let reader = BufReader::new(File::open(&file_path)?);
    let mut offset: u64 = 0;
    for line in reader.split(b'\n') {
        let line = line?;
        if line.is_empty() {
            offset += 1;
            continue;
        }
        let record: StoreRecord =
            serde_json::from_slice(&line).map_err(|e| RptError::CorruptStore {
                offset,
                reason: e.to_string(),
            })?;
        let id = record.repr.program_id.clone();
        if by_id.insert(id.clone(), records.len()).is_some() {
            return Err(RptError::CorruptStore {
                offset,
                reason: format!("duplicate program id {id}"),
            });
        }
        records.push(record);
        offset += line.len() as u64 + 1;
    }
    Ok((records, by_id))
}
