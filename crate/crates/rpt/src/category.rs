//! Universal node categories shared by every language frontend.
//!
//! The vocabulary is closed: mapping tables may only target these labels,
//! and every tree handed to path extraction is built from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::RptError;

/// Universal category label for unified-tree nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Category {
    Program,
    TypeDecl,
    FuncDecl,
    Param,
    Block,
    VarDecl,
    Assign,
    Call,
    MemberAccess,
    IndexAccess,
    Cond,
    Loop,
    Switch,
    Return,
    Throw,
    Try,
    Lambda,
    Binop,
    Unop,
    Cast,
    New,
    Ident,
    TypeRef,
    LitNum,
    LitStr,
    LitBool,
    Operator,
    /// Sentinel for kinds without a mapping entry (lenient mode).
    Other,
}

pub const ALL_CATEGORIES: [Category; 28] = [
    Category::Program,
    Category::TypeDecl,
    Category::FuncDecl,
    Category::Param,
    Category::Block,
    Category::VarDecl,
    Category::Assign,
    Category::Call,
    Category::MemberAccess,
    Category::IndexAccess,
    Category::Cond,
    Category::Loop,
    Category::Switch,
    Category::Return,
    Category::Throw,
    Category::Try,
    Category::Lambda,
    Category::Binop,
    Category::Unop,
    Category::Cast,
    Category::New,
    Category::Ident,
    Category::TypeRef,
    Category::LitNum,
    Category::LitStr,
    Category::LitBool,
    Category::Operator,
    Category::Other,
];

/// Leaf categories: paths are defined over leaves carrying one of these.
pub const LEAF_CATEGORIES: [Category; 6] = [
    Category::Ident,
    Category::TypeRef,
    Category::LitNum,
    Category::LitStr,
    Category::LitBool,
    Category::Operator,
];

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Program => "PROGRAM",
            Category::TypeDecl => "TYPE_DECL",
            Category::FuncDecl => "FUNC_DECL",
            Category::Param => "PARAM",
            Category::Block => "BLOCK",
            Category::VarDecl => "VAR_DECL",
            Category::Assign => "ASSIGN",
            Category::Call => "CALL",
            Category::MemberAccess => "MEMBER_ACCESS",
            Category::IndexAccess => "INDEX_ACCESS",
            Category::Cond => "COND",
            Category::Loop => "LOOP",
            Category::Switch => "SWITCH",
            Category::Return => "RETURN",
            Category::Throw => "THROW",
            Category::Try => "TRY",
            Category::Lambda => "LAMBDA",
            Category::Binop => "BINOP",
            Category::Unop => "UNOP",
            Category::Cast => "CAST",
            Category::New => "NEW",
            Category::Ident => "IDENT",
            Category::TypeRef => "TYPE_REF",
            Category::LitNum => "LIT_NUM",
            Category::LitStr => "LIT_STR",
            Category::LitBool => "LIT_BOOL",
            Category::Operator => "OPERATOR",
            Category::Other => "OTHER",
        }
    }

    /// Whether leaves of this category participate in path extraction.
    pub fn is_leaf_category(self) -> bool {
        LEAF_CATEGORIES.contains(&self)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = RptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_CATEGORIES
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| RptError::UnknownCategoryLabel(s.to_string()))
    }
}

impl TryFrom<String> for Category {
    type Error = RptError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Category> for String {
    fn from(c: Category) -> String {
        c.as_str().to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_all_labels() {
        for c in ALL_CATEGORIES {
            assert_eq!(c.as_str().parse::<Category>().unwrap(), c);
        }
    }

    #[test]
    fn unknown_label_rejected() {
        assert!("VARDECL".parse::<Category>().is_err());
    }

    #[test]
    fn leaf_set() {
        assert!(Category::Ident.is_leaf_category());
        assert!(!Category::VarDecl.is_leaf_category());
        assert!(!Category::Other.is_leaf_category());
    }
}
