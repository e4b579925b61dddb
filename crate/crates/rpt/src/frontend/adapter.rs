//! Tree-sitter backed parser adapters.
//!
//! Adapters materialize every named node plus the anonymous symbol tokens
//! (operators, punctuation). Anonymous keyword tokens are skipped: the kind
//! of their named parent already carries that information, and mapping
//! tables stay one order of magnitude shorter.

use tree_sitter::{Node, Parser};

use super::{Language, SourceUnit};
use crate::error::{Result, RptError};

/// Byte offsets into the source body, `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// Adapter-native concrete tree node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteNode {
    pub kind: String,
    pub children: Vec<ConcreteNode>,
    /// Source text, present iff the node has no children.
    pub token: Option<String>,
    pub span: Span,
}

impl ConcreteNode {
    pub fn leaf_count(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(ConcreteNode::leaf_count).sum()
        }
    }

    /// S-expression rendering, used by golden tests.
    pub fn to_sexp(&self) -> String {
        let mut out = String::new();
        self.write_sexp(&mut out);
        out
    }

    fn write_sexp(&self, out: &mut String) {
        if self.children.is_empty() {
            out.push('(');
            out.push_str(&self.kind);
            if let Some(tok) = &self.token {
                if !tok.is_empty() {
                    out.push_str(" \"");
                    out.push_str(tok);
                    out.push('"');
                }
            }
            out.push(')');
        } else {
            out.push('(');
            out.push_str(&self.kind);
            for c in &self.children {
                out.push(' ');
                c.write_sexp(out);
            }
            out.push(')');
        }
    }
}

fn grammar_for(language: Language) -> tree_sitter::Language {
    match language {
        Language::Java => tree_sitter_java::LANGUAGE.into(),
        Language::CSharp => tree_sitter_c_sharp::LANGUAGE.into(),
        Language::JavaScript => tree_sitter_javascript::LANGUAGE.into(),
    }
}

/// Anonymous tokens worth keeping: operators and punctuation. Alphabetic
/// anonymous tokens are keywords and are dropped at this stage.
fn keep_anonymous(kind: &str) -> bool {
    !kind.chars().all(|c| c.is_alphabetic() || c == '_' || c == '-')
}

fn materialize(node: Node<'_>, src: &str) -> Option<ConcreteNode> {
    if !node.is_named() && !keep_anonymous(node.kind()) {
        return None;
    }
    let children: Vec<ConcreteNode> = {
        let mut cursor = node.walk();
        node.children(&mut cursor)
            .filter_map(|c| materialize(c, src))
            .collect()
    };
    let span = Span {
        start: node.start_byte(),
        end: node.end_byte(),
    };
    let token = if children.is_empty() {
        Some(src[span.start..span.end].to_string())
    } else {
        None
    };
    Some(ConcreteNode {
        kind: node.kind().to_string(),
        children,
        token,
        span,
    })
}

fn first_error(node: Node<'_>) -> Option<Node<'_>> {
    if !node.has_error() {
        return None;
    }
    if node.is_error() || node.is_missing() {
        return Some(node);
    }
    let mut cursor = node.walk();
    for child in node.children(&mut cursor) {
        if let Some(found) = first_error(child) {
            return Some(found);
        }
    }
    // has_error set but no ERROR/MISSING descendant; report the node itself.
    Some(node)
}

/// Parse a source unit into its concrete tree.
pub fn parse(unit: &SourceUnit) -> Result<ConcreteNode> {
    let mut parser = Parser::new();
    parser
        .set_language(&grammar_for(unit.language))
        .expect("grammar ABI mismatch");
    let tree = parser
        .parse(&unit.body, None)
        .ok_or_else(|| RptError::UnsupportedLanguage(unit.language.to_string()))?;
    let root = tree.root_node();
    if root.has_error() {
        let err = first_error(root).unwrap_or(root);
        let pos = err.start_position();
        return Err(RptError::Syntax {
            line: pos.row + 1,
            column: pos.column + 1,
        });
    }
    Ok(materialize(root, &unit.body).expect("root node is named"))
}
