//! Mapping tables: adapter-native node kinds -> universal categories.
//!
//! Format is line oriented: `kind<TAB>CATEGORY` maps a kind, `prune<TAB>kind`
//! discards one, `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::Language;
use crate::category::Category;
use crate::error::{Result, RptError};

#[derive(Debug, Clone)]
pub struct CategoryMapping {
    pub language: Language,
    pub entries: BTreeMap<String, Category>,
    pub prune_set: BTreeSet<String>,
}

impl CategoryMapping {
    pub fn lookup(&self, kind: &str) -> Option<Category> {
        self.entries.get(kind).copied()
    }

    pub fn is_pruned(&self, kind: &str) -> bool {
        self.prune_set.contains(kind)
    }
}

fn parse_mapping(language: Language, text: &str, origin: &Path) -> Result<CategoryMapping> {
    let mut entries = BTreeMap::new();
    let mut prune_set = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| RptError::MappingFormat {
            path: origin.to_path_buf(),
            line: lineno + 1,
            reason: reason.to_string(),
        };
        let (left, right) = line.split_once('\t').ok_or_else(|| err("expected two tab-separated fields"))?;
        if left.is_empty() || right.is_empty() {
            return Err(err("empty field"));
        }
        if left == "prune" {
            if entries.contains_key(right) {
                return Err(err("kind both pruned and mapped"));
            }
            prune_set.insert(right.to_string());
        } else {
            let category: Category = right.parse()?;
            if prune_set.contains(left) {
                return Err(err("kind both pruned and mapped"));
            }
            if entries.insert(left.to_string(), category).is_some() {
                return Err(err("duplicate mapping for kind"));
            }
        }
    }
    if entries.is_empty() && !prune_set.is_empty() {
        log::warn!(
            "mapping for {language} has no category entries, only prune rules ({})",
            origin.display()
        );
    }
    Ok(CategoryMapping {
        language,
        entries,
        prune_set,
    })
}

/// Load and validate a mapping table from a file.
pub fn load_mapping(language: Language, path: &Path) -> Result<CategoryMapping> {
    let text = fs::read_to_string(path)?;
    parse_mapping(language, &text, path)
}

/// Parse a mapping table from in-memory text (bundled defaults, tests).
pub fn load_mapping_str(language: Language, text: &str) -> Result<CategoryMapping> {
    parse_mapping(language, text, &PathBuf::from(format!("<{language}>")))
}

/// Resolve the mapping for a language: a `<lang>.map` file under `dir` if
/// present, otherwise the bundled default table.
pub fn resolve_mapping(language: Language, dir: Option<&Path>) -> Result<CategoryMapping> {
    if let Some(dir) = dir {
        let candidate = dir.join(format!("{language}.map"));
        if candidate.is_file() {
            return load_mapping(language, &candidate);
        }
    }
    load_mapping_str(language, language.default_mapping_text())
}
