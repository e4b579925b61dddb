//! Language frontend: parse source text into a concrete tree, then re-label
//! it into a unified category tree via per-language mapping tables.

mod adapter;
mod mapping;
mod unify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adapter::{parse, ConcreteNode, Span};
pub use mapping::{load_mapping, load_mapping_str, resolve_mapping, CategoryMapping};
pub use unify::{abstract_tree, UniNode};

use crate::error::RptError;

/// Languages with a registered parser adapter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Language {
    Java,
    CSharp,
    JavaScript,
}

pub const ALL_LANGUAGES: [Language; 3] = [Language::Java, Language::CSharp, Language::JavaScript];

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::Java => "java",
            Language::CSharp => "csharp",
            Language::JavaScript => "javascript",
        }
    }

    /// Detect language from a file extension, e.g. `java`, `cs`, `js`.
    pub fn from_extension(ext: &str) -> Option<Language> {
        match ext {
            "java" => Some(Language::Java),
            "cs" => Some(Language::CSharp),
            "js" | "mjs" | "cjs" => Some(Language::JavaScript),
            _ => None,
        }
    }

    /// Bundled default mapping table for this language.
    pub fn default_mapping_text(self) -> &'static str {
        match self {
            Language::Java => include_str!("../../mappings/java.map"),
            Language::CSharp => include_str!("../../mappings/csharp.map"),
            Language::JavaScript => include_str!("../../mappings/javascript.map"),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = RptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "java" => Ok(Language::Java),
            "csharp" | "cs" | "c#" => Ok(Language::CSharp),
            "javascript" | "js" => Ok(Language::JavaScript),
            other => Err(RptError::UnsupportedLanguage(other.to_string())),
        }
    }
}

impl TryFrom<String> for Language {
    type Error = RptError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Language> for String {
    fn from(l: Language) -> String {
        l.as_str().to_string()
    }
}

/// One source file queued for ingestion or querying.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceUnit {
    pub id: String,
    pub language: Language,
    pub body: String,
}

impl SourceUnit {
    pub fn new(id: impl Into<String>, language: Language, body: impl Into<String>) -> Self {
        SourceUnit {
            id: id.into(),
            language,
            body: body.into(),
        }
    }
}
