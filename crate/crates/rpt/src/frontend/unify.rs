//! Re-label a concrete tree into the unified category tree.

use serde::{Deserialize, Serialize};

use super::{CategoryMapping, ConcreteNode};
use crate::category::Category;
use crate::error::{Result, RptError};

/// Node of the language-agnostic tree. `token` is present iff the node has
/// no children and carried source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniNode {
    pub category: Category,
    pub children: Vec<UniNode>,
    pub token: Option<String>,
}

impl UniNode {
    pub fn leaf(category: Category, token: impl Into<String>) -> Self {
        UniNode {
            category,
            children: Vec::new(),
            token: Some(token.into()),
        }
    }

    pub fn branch(category: Category, children: Vec<UniNode>) -> Self {
        UniNode {
            category,
            children,
            token: None,
        }
    }

    pub fn leaf_count(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(UniNode::leaf_count).sum()
        }
    }

    pub fn to_sexp(&self) -> String {
        let mut out = String::new();
        self.write_sexp(&mut out);
        out
    }

    fn write_sexp(&self, out: &mut String) {
        out.push('(');
        out.push_str(self.category.as_str());
        if let Some(tok) = &self.token {
            if !tok.is_empty() {
                out.push_str(" \"");
                out.push_str(tok);
                out.push('"');
            }
        }
        for c in &self.children {
            out.push(' ');
            c.write_sexp(out);
        }
        out.push(')');
    }
}

/// Convert one concrete node. Returns the spliced-up children when the node
/// itself is dropped.
fn convert(
    node: &ConcreteNode,
    mapping: &CategoryMapping,
    strict: bool,
    out: &mut Vec<UniNode>,
) -> Result<()> {
    if mapping.is_pruned(&node.kind) {
        // Pruned leaves vanish; pruned interior nodes splice their children.
        for child in &node.children {
            convert(child, mapping, strict, out)?;
        }
        return Ok(());
    }
    let category = match mapping.lookup(&node.kind) {
        Some(c) => c,
        None if strict => return Err(RptError::UnmappedKind(node.kind.clone())),
        None => Category::Other,
    };
    let mut children = Vec::new();
    for child in &node.children {
        convert(child, mapping, strict, &mut children)?;
    }
    let token = if children.is_empty() {
        node.token.clone()
    } else {
        None
    };
    out.push(UniNode {
        category,
        children,
        token,
    });
    Ok(())
}

/// Re-label a concrete tree via the mapping table. The result is always
/// rooted at a PROGRAM node.
pub fn abstract_tree(
    cst: &ConcreteNode,
    mapping: &CategoryMapping,
    strict: bool,
) -> Result<UniNode> {
    let mut nodes = Vec::new();
    convert(cst, mapping, strict, &mut nodes)?;
    match nodes.as_slice() {
        [root] if root.category == Category::Program => Ok(nodes.pop().expect("checked")),
        _ => Ok(UniNode {
            category: Category::Program,
            token: None,
            children: nodes,
        }),
    }
}
