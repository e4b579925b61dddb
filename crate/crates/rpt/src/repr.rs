//! The comprehensive program representation: simplified tree -> abstract
//! paths -> canonical path types with frequencies -> structure-dependent
//! token bags.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::category::Category;
use crate::error::{Result, RptError};
use crate::frontend::{Language, UniNode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    /// Maximum edge count of a leaf-top-leaf walk.
    pub max_length: usize,
    /// Maximum number of paths kept per program (deterministic truncation).
    pub max_paths: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            max_length: 8,
            max_paths: 10_000,
        }
    }
}

/// A unified tree with unary chains collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplifiedTree(pub UniNode);

/// Collapse every maximal chain of single-child internal nodes to its lowest
/// node. The root and parents of lone leaves are kept, so leaf parent
/// categories survive for unary paths.
pub fn simplify(tree: &UniNode) -> SimplifiedTree {
    fn collapse(node: &UniNode) -> UniNode {
        if node.children.is_empty() {
            return node.clone();
        }
        let children: Vec<UniNode> = node.children.iter().map(collapse).collect();
        if children.len() == 1 && !children[0].children.is_empty() {
            return children.into_iter().next().expect("len checked");
        }
        UniNode {
            category: node.category,
            children,
            token: None,
        }
    }
    let children: Vec<UniNode> = tree.children.iter().map(collapse).collect();
    let token = if children.is_empty() {
        tree.token.clone()
    } else {
        None
    };
    SimplifiedTree(UniNode {
        category: tree.category,
        children,
        token,
    })
}

/// A leaf-top-leaf (or leaf-parent) walk with intermediate nodes dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractPath {
    pub top: Category,
    /// One or two (leaf category, leaf token) entries.
    pub leaves: Vec<(Category, String)>,
    /// Edge count of the original walk.
    pub length: usize,
}

impl AbstractPath {
    pub fn arity(&self) -> usize {
        self.leaves.len()
    }
}

/// Canonical key of an abstract path: top category plus unordered leaf
/// categories, token text discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PathType {
    pub top: Category,
    pub first: Category,
    pub second: Option<Category>,
}

impl PathType {
    pub fn unary(top: Category, leaf: Category) -> Self {
        PathType {
            top,
            first: leaf,
            second: None,
        }
    }

    pub fn pair(top: Category, a: Category, b: Category) -> Self {
        let (first, second) = if a.as_str() <= b.as_str() { (a, b) } else { (b, a) };
        PathType {
            top,
            first,
            second: Some(second),
        }
    }
}

impl fmt::Display for PathType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.second {
            Some(second) => write!(f, "{}/{}+{}", self.top, self.first, second),
            None => write!(f, "{}/{}", self.top, self.first),
        }
    }
}

impl FromStr for PathType {
    type Err = RptError;

    fn from_str(s: &str) -> Result<Self> {
        let (top, leaves) = s
            .split_once('/')
            .ok_or_else(|| RptError::UnknownCategoryLabel(s.to_string()))?;
        let top: Category = top.parse()?;
        match leaves.split_once('+') {
            Some((a, b)) => Ok(PathType::pair(top, a.parse()?, b.parse()?)),
            None => Ok(PathType::unary(top, leaves.parse()?)),
        }
    }
}

impl TryFrom<String> for PathType {
    type Error = RptError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PathType> for String {
    fn from(t: PathType) -> String {
        t.to_string()
    }
}

/// Canonicalize a path: leaf categories sorted, token text dropped.
pub fn canonical_type(path: &AbstractPath) -> PathType {
    match path.leaves.as_slice() {
        [(leaf, _)] => PathType::unary(path.top, *leaf),
        [(a, _), (b, _)] => PathType::pair(path.top, *a, *b),
        other => unreachable!("path arity {} out of range", other.len()),
    }
}

/// Token text -> positive count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenBag(pub BTreeMap<String, u32>);

impl TokenBag {
    pub fn add(&mut self, token: &str) {
        *self.0.entry(token.to_string()).or_insert(0) += 1;
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.values().map(|&c| c as u64).sum()
    }
}

/// Split a leaf token into textual features. Identifier-like text is split
/// at camelCase, snake_case and letter/digit boundaries and lowercased;
/// numeric literals are kept whole.
pub fn tokenize(category: Category, text: &str) -> Vec<String> {
    match category {
        Category::Ident | Category::TypeRef => split_identifier(text),
        Category::LitNum | Category::LitBool | Category::Operator => vec![text.to_string()],
        Category::LitStr => text
            .split_whitespace()
            .map(|w| w.to_lowercase())
            .filter(|w| !w.is_empty())
            .collect(),
        _ => vec![text.to_string()],
    }
}

fn split_identifier(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut parts = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            flush(&mut current, &mut parts);
            continue;
        }
        if !current.is_empty() {
            let prev = chars[i - 1];
            if prev.is_alphanumeric() {
                if (prev.is_lowercase() && c.is_uppercase())
                    || (prev.is_ascii_digit() != c.is_ascii_digit())
                {
                    // lower -> Upper, or letter <-> digit
                    flush(&mut current, &mut parts);
                } else if prev.is_uppercase()
                    && c.is_lowercase()
                    && current.chars().count() > 1
                {
                    // end of an uppercase run: the last upper starts the
                    // next word ("XMLHttp" -> "XML", "Http")
                    let last = current.pop().expect("non-empty");
                    flush(&mut current, &mut parts);
                    current.push(last);
                }
            }
        }
        current.push(c);
    }
    flush(&mut current, &mut parts);
    parts
}

fn flush(current: &mut String, parts: &mut Vec<String>) {
    if !current.is_empty() {
        parts.push(current.to_lowercase());
        current.clear();
    }
}

/// Per-program record: path-type frequencies plus per-path-type token bags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramRepr {
    pub program_id: String,
    pub language: Language,
    pub freq: BTreeMap<PathType, u32>,
    pub text: BTreeMap<PathType, TokenBag>,
    pub path_total: u64,
}

struct Collector {
    budget: usize,
    paths: Vec<AbstractPath>,
}

impl Collector {
    fn emit(&mut self, path: AbstractPath) -> bool {
        if self.paths.len() >= self.budget {
            return false;
        }
        self.paths.push(path);
        self.paths.len() < self.budget
    }
}

struct LeafRef {
    category: Category,
    token: String,
    depth: usize,
}

fn eligible_leaf(node: &UniNode) -> bool {
    node.children.is_empty()
        && node.category.is_leaf_category()
        && node.token.as_deref().is_some_and(|t| !t.is_empty())
}

/// Recursive extraction. Returns the eligible leaves of the subtree (with
/// depths relative to `depth`) in left-to-right order.
fn extract_node(
    node: &UniNode,
    depth: usize,
    cfg: &ExtractionConfig,
    out: &mut Collector,
) -> Vec<LeafRef> {
    if node.children.is_empty() {
        if eligible_leaf(node) {
            return vec![LeafRef {
                category: node.category,
                token: node.token.clone().expect("eligible leaf has token"),
                depth,
            }];
        }
        return Vec::new();
    }
    // Unary paths for direct leaf children, in position order.
    for child in &node.children {
        if eligible_leaf(child) {
            out.emit(AbstractPath {
                top: node.category,
                leaves: vec![(child.category, child.token.clone().expect("leaf token"))],
                length: 1,
            });
        }
    }
    // Leaves per child subtree; pairs across distinct subtrees have this
    // node as their lowest common ancestor.
    let per_child: Vec<Vec<LeafRef>> = node
        .children
        .iter()
        .map(|c| extract_node(c, depth + 1, cfg, out))
        .collect();
    if out.paths.len() < out.budget {
        for i in 0..per_child.len() {
            for j in (i + 1)..per_child.len() {
                for l1 in &per_child[i] {
                    for l2 in &per_child[j] {
                        let length = (l1.depth - depth) + (l2.depth - depth);
                        if length > cfg.max_length {
                            continue;
                        }
                        let path = AbstractPath {
                            top: node.category,
                            leaves: vec![
                                (l1.category, l1.token.clone()),
                                (l2.category, l2.token.clone()),
                            ],
                            length,
                        };
                        if !out.emit(path) {
                            return flatten(per_child);
                        }
                    }
                }
            }
        }
    }
    flatten(per_child)
}

fn flatten(per_child: Vec<Vec<LeafRef>>) -> Vec<LeafRef> {
    per_child.into_iter().flatten().collect()
}

/// Extract abstract paths from a simplified tree: pair paths for every
/// unordered leaf pair keyed by its lowest common ancestor, plus a unary
/// path per leaf keyed by its parent.
pub fn extract_paths(tree: &SimplifiedTree, cfg: &ExtractionConfig) -> Vec<AbstractPath> {
    let mut out = Collector {
        budget: cfg.max_paths,
        paths: Vec::new(),
    };
    extract_node(&tree.0, 0, cfg, &mut out);
    out.paths
}

/// Fold extracted paths into the per-program representation.
pub fn build_repr(
    id: impl Into<String>,
    language: Language,
    paths: &[AbstractPath],
) -> Result<ProgramRepr> {
    if paths.is_empty() {
        return Err(RptError::EmptyProgram);
    }
    let mut freq: BTreeMap<PathType, u32> = BTreeMap::new();
    let mut text: BTreeMap<PathType, TokenBag> = BTreeMap::new();
    for path in paths {
        let ty = canonical_type(path);
        *freq.entry(ty).or_insert(0) += 1;
        let bag = text.entry(ty).or_default();
        for (cat, tok) in &path.leaves {
            for piece in tokenize(*cat, tok) {
                bag.add(&piece);
            }
        }
    }
    Ok(ProgramRepr {
        program_id: id.into(),
        language,
        freq,
        text,
        path_total: paths.len() as u64,
    })
}

/// Full pipeline from a unified tree.
pub fn represent(
    id: impl Into<String>,
    language: Language,
    tree: &UniNode,
    cfg: &ExtractionConfig,
) -> Result<ProgramRepr> {
    let simplified = simplify(tree);
    let paths = extract_paths(&simplified, cfg);
    build_repr(id, language, &paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::UniNode;
    use Category::*;

    fn leaf(c: Category, t: &str) -> UniNode {
        UniNode::leaf(c, t)
    }

    fn branch(c: Category, children: Vec<UniNode>) -> UniNode {
        UniNode::branch(c, children)
    }

    /// Independent oracle: enumerate every unordered pair of eligible
    /// leaves, find the lowest common ancestor by comparing root paths,
    /// and count canonical pair types. Unary types counted per leaf.
    fn brute_force_types(tree: &UniNode, max_length: usize) -> BTreeMap<PathType, u32> {
        // (leaf node, path of ancestor categories from root to leaf's parent)
        fn collect<'a>(
            node: &'a UniNode,
            trail: &mut Vec<&'a UniNode>,
            out: &mut Vec<(&'a UniNode, Vec<&'a UniNode>)>,
        ) {
            if node.children.is_empty() {
                if eligible_leaf(node) {
                    out.push((node, trail.clone()));
                }
                return;
            }
            trail.push(node);
            for c in &node.children {
                collect(c, trail, out);
            }
            trail.pop();
        }
        let mut leaves = Vec::new();
        collect(tree, &mut Vec::new(), &mut leaves);
        let mut counts: BTreeMap<PathType, u32> = BTreeMap::new();
        for (l, trail) in &leaves {
            if let Some(parent) = trail.last() {
                *counts
                    .entry(PathType::unary(parent.category, l.category))
                    .or_insert(0) += 1;
            }
        }
        for i in 0..leaves.len() {
            for j in (i + 1)..leaves.len() {
                let (l1, t1) = &leaves[i];
                let (l2, t2) = &leaves[j];
                let mut common = 0;
                while common < t1.len()
                    && common < t2.len()
                    && std::ptr::eq(t1[common], t2[common])
                {
                    common += 1;
                }
                if common == 0 {
                    continue; // different roots cannot happen in one tree
                }
                let lca = t1[common - 1];
                let length = (t1.len() - common + 1) + (t2.len() - common + 1);
                if length > max_length {
                    continue;
                }
                *counts
                    .entry(PathType::pair(lca.category, l1.category, l2.category))
                    .or_insert(0) += 1;
            }
        }
        counts
    }

    fn big_cfg() -> ExtractionConfig {
        ExtractionConfig {
            max_length: 64,
            max_paths: 1_000_000,
        }
    }

    fn sample_tree() -> UniNode {
        branch(
            Program,
            vec![
                branch(
                    FuncDecl,
                    vec![
                        leaf(Ident, "main"),
                        branch(Param, vec![leaf(TypeRef, "int"), leaf(Ident, "argc")]),
                        branch(
                            Block,
                            vec![
                                branch(
                                    VarDecl,
                                    vec![
                                        leaf(TypeRef, "double"),
                                        leaf(Ident, "dataTypeExample"),
                                        leaf(LitNum, "0.1"),
                                    ],
                                ),
                                branch(Return, vec![leaf(Ident, "dataTypeExample")]),
                            ],
                        ),
                    ],
                ),
                branch(VarDecl, vec![leaf(TypeRef, "bool"), leaf(LitBool, "true")]),
            ],
        )
    }

    // --- simplify ---

    #[test]
    fn unary_chain_collapses_to_lowest_node() {
        let tree = branch(
            Program,
            vec![branch(
                Block,
                vec![branch(Return, vec![leaf(Ident, "x")])],
            )],
        );
        let s = simplify(&tree);
        assert_eq!(s.0.to_sexp(), "(PROGRAM (RETURN (IDENT \"x\")))");
    }

    #[test]
    fn branching_tree_is_fixpoint() {
        let tree = branch(
            Program,
            vec![
                branch(VarDecl, vec![leaf(Ident, "x"), leaf(LitNum, "1")]),
                branch(Return, vec![leaf(Ident, "x")]),
            ],
        );
        let s = simplify(&tree);
        assert_eq!(s.0, tree);
    }

    #[test]
    fn lone_root_unchanged() {
        let tree = UniNode::branch(Program, vec![]);
        assert_eq!(simplify(&tree).0, tree);
    }

    // --- extract_paths ---

    #[test]
    fn single_leaf_yields_one_unary_path() {
        let tree = branch(Program, vec![leaf(Ident, "x")]);
        let paths = extract_paths(&simplify(&tree), &big_cfg());
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].arity(), 1);
        assert_eq!(paths[0].top, Program);
        assert_eq!(paths[0].length, 1);
    }

    #[test]
    fn var_decl_three_leaves_oracle() {
        let tree = branch(
            Program,
            vec![branch(
                VarDecl,
                vec![
                    leaf(TypeRef, "int"),
                    leaf(Ident, "x"),
                    leaf(LitNum, "1"),
                ],
            )],
        );
        let s = simplify(&tree);
        let paths = extract_paths(&s, &big_cfg());
        // 3 pair paths (all unordered leaf pairs, LCA = VAR_DECL) + 3 unary.
        assert_eq!(paths.len(), 6);
        let pairs = paths.iter().filter(|p| p.arity() == 2).count();
        assert_eq!(pairs, 3);
        let mut from_paths: BTreeMap<PathType, u32> = BTreeMap::new();
        for p in &paths {
            *from_paths.entry(canonical_type(p)).or_insert(0) += 1;
        }
        assert_eq!(from_paths, brute_force_types(&s.0, 64));
    }

    #[test]
    fn sample_tree_matches_brute_force_oracle() {
        let s = simplify(&sample_tree());
        let paths = extract_paths(&s, &big_cfg());
        let mut from_paths: BTreeMap<PathType, u32> = BTreeMap::new();
        for p in &paths {
            *from_paths.entry(canonical_type(p)).or_insert(0) += 1;
        }
        assert_eq!(from_paths, brute_force_types(&s.0, 64));
    }

    #[test]
    fn max_length_suppresses_long_walks() {
        // Two leaves whose walk through PROGRAM has length 4.
        let tree = branch(
            Program,
            vec![
                branch(Block, vec![leaf(Ident, "a"), leaf(Ident, "b")]),
                branch(Block, vec![leaf(Ident, "c"), leaf(Ident, "d")]),
            ],
        );
        let short = ExtractionConfig {
            max_length: 2,
            max_paths: 1_000_000,
        };
        let paths = extract_paths(&SimplifiedTree(tree.clone()), &short);
        assert!(paths
            .iter()
            .all(|p| p.arity() == 1 || p.top != Program));
        let full = extract_paths(&SimplifiedTree(tree), &big_cfg());
        assert!(full.iter().any(|p| p.arity() == 2 && p.top == Program));
    }

    #[test]
    fn max_paths_truncates_deterministically() {
        let s = simplify(&sample_tree());
        let all = extract_paths(&s, &big_cfg());
        let capped = extract_paths(
            &s,
            &ExtractionConfig {
                max_length: 64,
                max_paths: 5,
            },
        );
        assert_eq!(capped.len(), 5);
        assert_eq!(capped[..], all[..5]);
    }

    // --- canonical_type ---

    #[test]
    fn canonical_type_is_order_insensitive() {
        let a = AbstractPath {
            top: Assign,
            leaves: vec![(Ident, "x".into()), (LitNum, "1".into())],
            length: 2,
        };
        let b = AbstractPath {
            top: Assign,
            leaves: vec![(LitNum, "1".into()), (Ident, "x".into())],
            length: 2,
        };
        assert_eq!(canonical_type(&a), canonical_type(&b));
        let u = AbstractPath {
            top: VarDecl,
            leaves: vec![(Ident, "x".into())],
            length: 1,
        };
        assert_eq!(canonical_type(&u), PathType::unary(VarDecl, Ident));
    }

    #[test]
    fn path_type_string_round_trip() {
        let pair = PathType::pair(Assign, LitNum, Ident);
        assert_eq!(pair.to_string(), "ASSIGN/IDENT+LIT_NUM");
        assert_eq!(pair.to_string().parse::<PathType>().unwrap(), pair);
        let unary = PathType::unary(VarDecl, Ident);
        assert_eq!(unary.to_string(), "VAR_DECL/IDENT");
        assert_eq!(unary.to_string().parse::<PathType>().unwrap(), unary);
    }

    // --- tokenize ---

    #[test]
    fn tokenize_camel_case() {
        assert_eq!(tokenize(Ident, "dataTypeExample"), ["data", "type", "example"]);
    }

    #[test]
    fn tokenize_snake_and_digits() {
        assert_eq!(tokenize(Ident, "utf8_string"), ["utf", "8", "string"]);
        assert_eq!(tokenize(Ident, "XMLHttpRequest"), ["xml", "http", "request"]);
    }

    #[test]
    fn tokenize_numeric_kept_whole() {
        assert_eq!(tokenize(LitNum, "0.1"), ["0.1"]);
        assert_eq!(tokenize(LitNum, "42"), ["42"]);
    }

    #[test]
    fn tokenize_single_letter() {
        assert_eq!(tokenize(Ident, "x"), ["x"]);
    }

    #[test]
    fn tokenize_string_splits_whitespace() {
        assert_eq!(tokenize(LitStr, "Real Number"), ["real", "number"]);
    }

    #[test]
    fn tokenize_operator_verbatim() {
        assert_eq!(tokenize(Operator, "+"), ["+"]);
        assert_eq!(tokenize(LitBool, "true"), ["true"]);
    }

    // --- build_repr ---

    #[test]
    fn single_unary_path_repr() {
        let paths = vec![AbstractPath {
            top: VarDecl,
            leaves: vec![(Ident, "x".into())],
            length: 1,
        }];
        let r = build_repr("p", Language::Java, &paths).unwrap();
        let ty = PathType::unary(VarDecl, Ident);
        assert_eq!(r.freq[&ty], 1);
        assert_eq!(r.text[&ty].0["x"], 1);
        assert_eq!(r.path_total, 1);
    }

    #[test]
    fn counts_accumulate_per_type() {
        let p = AbstractPath {
            top: VarDecl,
            leaves: vec![(Ident, "x".into())],
            length: 1,
        };
        let r = build_repr("p", Language::Java, &[p.clone(), p]).unwrap();
        let ty = PathType::unary(VarDecl, Ident);
        assert_eq!(r.freq[&ty], 2);
        assert_eq!(r.text[&ty].0["x"], 2);
    }

    #[test]
    fn empty_program_rejected() {
        assert!(matches!(
            build_repr("p", Language::Java, &[]),
            Err(RptError::EmptyProgram)
        ));
    }

    #[test]
    fn var_decl_repr_type_count_verified_by_oracle() {
        let tree = branch(
            Program,
            vec![branch(
                VarDecl,
                vec![
                    leaf(TypeRef, "int"),
                    leaf(Ident, "x"),
                    leaf(LitNum, "1"),
                ],
            )],
        );
        let s = simplify(&tree);
        let r = build_repr("p", Language::Java, &extract_paths(&s, &big_cfg())).unwrap();
        let oracle = brute_force_types(&s.0, 64);
        assert_eq!(r.freq, oracle);
        // 3 distinct pair types + 3 distinct unary types here.
        assert_eq!(r.freq.len(), 6);
        assert_eq!(r.path_total, 6);
    }

    #[test]
    fn mirroring_children_leaves_repr_unchanged() {
        fn mirror(n: &UniNode) -> UniNode {
            UniNode {
                category: n.category,
                children: n.children.iter().rev().map(mirror).collect(),
                token: n.token.clone(),
            }
        }
        let tree = sample_tree();
        let a = represent("p", Language::Java, &tree, &big_cfg()).unwrap();
        let b = represent("p", Language::Java, &mirror(&tree), &big_cfg()).unwrap();
        assert_eq!(a.freq, b.freq);
        assert_eq!(a.text, b.text);
    }

    #[test]
    fn every_leaf_token_covered_without_caps() {
        let s = simplify(&sample_tree());
        let r = build_repr(
            "p",
            Language::Java,
            &extract_paths(&s, &big_cfg()),
        )
        .unwrap();
        fn leaves(n: &UniNode, out: &mut Vec<(Category, String)>) {
            if n.children.is_empty() {
                if eligible_leaf(n) {
                    out.push((n.category, n.token.clone().unwrap()));
                }
            } else {
                n.children.iter().for_each(|c| leaves(c, out));
            }
        }
        let mut lv = Vec::new();
        leaves(&s.0, &mut lv);
        for (cat, tok) in lv {
            for piece in tokenize(cat, &tok) {
                assert!(
                    r.text.values().any(|bag| bag.0.contains_key(&piece)),
                    "token {piece} missing from every bag"
                );
            }
        }
    }

    #[test]
    fn path_total_equals_extracted_path_count() {
        let s = simplify(&sample_tree());
        let paths = extract_paths(&s, &big_cfg());
        let r = build_repr("p", Language::Java, &paths).unwrap();
        assert_eq!(r.path_total, paths.len() as u64);
        assert_eq!(r.path_total, r.freq.values().map(|&c| c as u64).sum::<u64>());
    }
}
