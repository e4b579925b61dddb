//! Cross-language program translation retrieval.
//!
//! Programs are parsed into language-agnostic category trees, summarized as
//! bags of abstract syntax-tree paths, stored in a feature store, and served
//! through a bucketed inverted index with hierarchical structural-then-
//! textual ranking.

pub mod category;
pub mod error;
pub mod eval;
pub mod frontend;
pub mod pbi;
pub mod repr;
pub mod retrieve;
pub mod store;

pub use category::Category;
pub use error::{Result, RptError};
pub use frontend::{Language, SourceUnit};
pub use pbi::PbiIndex;
pub use repr::{ExtractionConfig, PathType, ProgramRepr};
pub use retrieve::{retrieve, RankedResult, RetrievalConfig, ScoredResult};
pub use store::Store;
