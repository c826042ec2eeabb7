//! The evolving search tree.
//!
//! The root routes a message by its token count. Every other internal node
//! routes on the token found at its pivot position. Leaves hold templates.
//! The tree starts as a lone root and grows in two ways: descent creates a
//! leaf when no child carries the wanted label, and a saturated leaf is
//! turned into an internal node whose children partition its templates.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::template::TemplateId;
use crate::token::Token;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Label of a non-root node: a token count for children of the root, a
/// token (possibly the wildcard) below that.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Length(usize),
    Token(Token),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Root {
        children: HashMap<usize, NodeId>,
    },
    /// Routes on the token at `pivot` (0-based).
    Internal {
        pivot: usize,
        children: HashMap<Token, NodeId>,
    },
    /// Template ids in creation order. A leaf whose templates agree at every
    /// usable position cannot be split and is allowed to exceed the
    /// saturation limit.
    Leaf {
        templates: Vec<TemplateId>,
        splittable: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub label: Option<Label>,
    pub parent: Option<NodeId>,
    /// Edges from the root.
    pub depth: usize,
    pub kind: NodeKind,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf { .. })
    }

    pub fn pivot(&self) -> Option<usize> {
        match self.kind {
            NodeKind::Internal { pivot, .. } => Some(pivot),
            _ => None,
        }
    }

    pub fn templates(&self) -> &[TemplateId] {
        match &self.kind {
            NodeKind::Leaf { templates, .. } => templates,
            _ => &[],
        }
    }

    pub fn is_splittable(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf { splittable: true, .. })
    }

    pub fn child_count(&self) -> usize {
        match &self.kind {
            NodeKind::Root { children } => children.len(),
            NodeKind::Internal { children, .. } => children.len(),
            NodeKind::Leaf { .. } => 0,
        }
    }

    /// Children in a deterministic order: by length under the root, by token
    /// (wildcard first) elsewhere.
    pub fn sorted_children(&self) -> Vec<(Label, NodeId)> {
        let mut out: Vec<(Label, NodeId)> = match &self.kind {
            NodeKind::Root { children } => {
                children.iter().map(|(len, id)| (Label::Length(*len), *id)).collect()
            }
            NodeKind::Internal { children, .. } => {
                children.iter().map(|(tok, id)| (Label::Token(tok.clone()), *id)).collect()
            }
            NodeKind::Leaf { .. } => Vec::new(),
        };
        out.sort_by(|a, b| match (&a.0, &b.0) {
            (Label::Length(x), Label::Length(y)) => x.cmp(y),
            (Label::Token(x), Label::Token(y)) => x.cmp(y),
            _ => std::cmp::Ordering::Equal,
        });
        out
    }
}

/// Where a descent ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Descent {
    pub leaf: NodeId,
    /// Edges followed or created from the root to the leaf.
    pub steps: usize,
    pub created_leaf: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchTree {
    nodes: Vec<Node>,
}

impl Default for SearchTree {
    fn default() -> Self {
        SearchTree::new()
    }
}

impl SearchTree {
    pub fn new() -> SearchTree {
        SearchTree {
            nodes: vec![Node {
                label: None,
                parent: None,
                depth: 0,
                kind: NodeKind::Root { children: HashMap::new() },
            }],
        }
    }

    pub(crate) fn from_nodes(nodes: Vec<Node>) -> SearchTree {
        SearchTree { nodes }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_leaf())
            .map(|(i, n)| (NodeId(i as u32), n))
    }

    /// Pivot positions of the internal nodes strictly above `id`.
    pub fn ancestor_pivots(&self, id: NodeId) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut cursor = self.node(id).parent;
        while let Some(p) = cursor {
            let node = self.node(p);
            pivots.extend(node.pivot());
            cursor = node.parent;
        }
        pivots
    }

    /// Path of labels from the root down to `id`.
    pub fn path(&self, id: NodeId) -> Vec<Label> {
        let mut labels = Vec::new();
        let mut cursor = Some(id);
        while let Some(c) = cursor {
            let node = self.node(c);
            labels.extend(node.label.clone());
            cursor = node.parent;
        }
        labels.reverse();
        labels
    }

    fn push_leaf(&mut self, parent: NodeId, label: Label, templates: Vec<TemplateId>) -> NodeId {
        let id = NodeId(u32::try_from(self.nodes.len()).expect("node arena overflow"));
        let depth = self.node(parent).depth + 1;
        self.nodes.push(Node {
            label: Some(label),
            parent: Some(parent),
            depth,
            kind: NodeKind::Leaf { templates, splittable: true },
        });
        id
    }

    /// Routes `message` from the root down to a leaf, creating the leaf when
    /// no child carries the required label.
    ///
    /// Below the root, an unknown token falls back to a wildcard-labelled
    /// sibling when one exists.
    pub fn descend(&mut self, message: &[Token]) -> Descent {
        let mut current = NodeId::ROOT;
        let mut steps = 0;
        loop {
            let next = match &self.node(current).kind {
                NodeKind::Leaf { .. } => {
                    return Descent { leaf: current, steps, created_leaf: false };
                }
                NodeKind::Root { children } => children.get(&message.len()).copied(),
                NodeKind::Internal { pivot, children } => {
                    let token = &message[*pivot];
                    children.get(token).or_else(|| children.get(&Token::Wildcard)).copied()
                }
            };
            steps += 1;
            match next {
                Some(child) => current = child,
                None => {
                    let leaf = self.attach_new_leaf(current, message);
                    return Descent { leaf, steps, created_leaf: true };
                }
            }
        }
    }

    fn attach_new_leaf(&mut self, parent: NodeId, message: &[Token]) -> NodeId {
        let label = match &self.node(parent).kind {
            NodeKind::Root { .. } => Label::Length(message.len()),
            NodeKind::Internal { pivot, .. } => Label::Token(message[*pivot].clone()),
            NodeKind::Leaf { .. } => unreachable!("leaves have no children"),
        };
        let leaf = self.push_leaf(parent, label.clone(), Vec::new());
        match (&mut self.nodes[parent.index()].kind, label) {
            (NodeKind::Root { children }, Label::Length(len)) => {
                children.insert(len, leaf);
            }
            (NodeKind::Internal { children, .. }, Label::Token(tok)) => {
                children.insert(tok, leaf);
            }
            _ => unreachable!(),
        }
        leaf
    }

    pub(crate) fn push_template(&mut self, leaf: NodeId, id: TemplateId) {
        match &mut self.nodes[leaf.index()].kind {
            NodeKind::Leaf { templates, .. } => templates.push(id),
            _ => panic!("{leaf} is not a leaf"),
        }
    }

    pub(crate) fn mark_unsplittable(&mut self, leaf: NodeId) {
        if let NodeKind::Leaf { splittable, .. } = &mut self.nodes[leaf.index()].kind {
            *splittable = false;
        }
    }

    /// Turns `leaf` into an internal node routing on `pivot`; its templates
    /// are distributed over new child leaves by their token at `pivot`.
    /// `token_at` looks up a template's token at the pivot.
    ///
    /// Returns the new children in creation order.
    pub(crate) fn split<'t>(
        &mut self,
        leaf: NodeId,
        pivot: usize,
        token_at: impl Fn(TemplateId) -> &'t Token,
    ) -> Vec<NodeId> {
        let templates = match &mut self.nodes[leaf.index()].kind {
            NodeKind::Leaf { templates, .. } => std::mem::take(templates),
            _ => panic!("{leaf} is not a leaf"),
        };
        let mut children: HashMap<Token, NodeId> = HashMap::new();
        let mut order = Vec::new();
        for id in templates {
            let token = token_at(id);
            let child = match children.get(token) {
                Some(child) => *child,
                None => {
                    let child = self.push_leaf(leaf, Label::Token(token.clone()), Vec::new());
                    children.insert(token.clone(), child);
                    order.push(child);
                    child
                }
            };
            self.push_template(child, id);
        }
        self.nodes[leaf.index()].kind = NodeKind::Internal { pivot, children };
        order
    }
}

/// Chooses the position with the most distinct tokens among `templates`,
/// skipping `excluded` positions. The wildcard counts as one distinct value.
/// Ties go to the lowest position.
///
/// Returns `None` when no usable position has at least two distinct values,
/// i.e. when a split could not separate anything.
pub fn select_pivot(templates: &[&[Token]], excluded: &[usize]) -> Option<usize> {
    let width = templates.first()?.len();
    debug_assert!(templates.iter().all(|t| t.len() == width));
    let mut best: Option<(usize, usize)> = None;
    let mut seen: HashSet<&Token> = HashSet::with_capacity(templates.len());
    for position in (0..width).filter(|p| !excluded.contains(p)) {
        seen.clear();
        seen.extend(templates.iter().map(|t| &t[position]));
        let diversity = seen.len();
        if diversity > 1 && best.map_or(true, |(_, d)| diversity > d) {
            best = Some((position, diversity));
        }
    }
    best.map(|(position, _)| position)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(line: &str) -> Vec<Token> {
        line.split_whitespace().map(Token::from_text).collect()
    }

    /// Column-by-column count done with sorted vectors, independent of the
    /// hash-set scan above.
    fn diversity_oracle(rows: &[Vec<Token>]) -> Vec<usize> {
        (0..rows[0].len())
            .map(|j| {
                let mut col: Vec<&Token> = rows.iter().map(|r| &r[j]).collect();
                col.sort();
                col.dedup();
                col.len()
            })
            .collect()
    }

    #[test]
    fn fresh_tree_creates_length_leaf() {
        let mut tree = SearchTree::new();
        let d = tree.descend(&toks("Send 500 bytes"));
        assert!(d.created_leaf);
        assert_eq!(d.steps, 1);
        assert_eq!(tree.node(d.leaf).label, Some(Label::Length(3)));
        assert_eq!(tree.len(), 2);
        let again = tree.descend(&toks("a b c"));
        assert_eq!(again.leaf, d.leaf);
        assert!(!again.created_leaf);
    }

    fn split_tree() -> (SearchTree, NodeId, Vec<Vec<Token>>) {
        let rows = vec![
            toks("Send <*> bytes"),
            toks("Send <*> packages"),
            toks("Send <*> packets"),
            toks("Recv <*> bytes"),
        ];
        let mut tree = SearchTree::new();
        let leaf = tree.descend(&rows[0]).leaf;
        for i in 0..rows.len() {
            tree.push_template(leaf, TemplateId(i as u64 + 1));
        }
        let children = tree.split(leaf, 2, |id| &rows[(id.0 - 1) as usize][2]);
        assert_eq!(children.len(), 3);
        (tree, leaf, rows)
    }

    #[test]
    fn descent_follows_pivot_token() {
        let (mut tree, internal, _) = split_tree();
        let d = tree.descend(&toks("Send 9 bytes"));
        assert!(!d.created_leaf);
        assert_eq!(d.steps, 2);
        assert_eq!(tree.path(d.leaf), [Label::Length(3), Label::Token(Token::from_text("bytes"))]);
        assert_eq!(tree.node(d.leaf).parent, Some(internal));
    }

    #[test]
    fn unknown_pivot_token_creates_leaf() {
        let (mut tree, internal, _) = split_tree();
        let before = tree.len();
        let d = tree.descend(&toks("Send 9 frames"));
        assert!(d.created_leaf);
        assert_eq!(tree.len(), before + 1);
        assert_eq!(tree.node(d.leaf).label, Some(Label::Token(Token::from_text("frames"))));
        assert_eq!(tree.node(internal).child_count(), 4);
    }

    #[test]
    fn unknown_pivot_token_falls_back_to_wildcard_child() {
        let rows = [toks("a x"), toks("a <*>"), toks("a y")];
        let mut tree = SearchTree::new();
        let leaf = tree.descend(&rows[0]).leaf;
        for i in 0..3 {
            tree.push_template(leaf, TemplateId(i + 1));
        }
        tree.split(leaf, 1, |id| &rows[(id.0 - 1) as usize][1]);
        let d = tree.descend(&toks("a zzz"));
        assert!(!d.created_leaf);
        assert_eq!(tree.node(d.leaf).label, Some(Label::Token(Token::Wildcard)));
        // Exact matches still win over the wildcard child.
        let d = tree.descend(&toks("a y"));
        assert_eq!(tree.node(d.leaf).label, Some(Label::Token(Token::from_text("y"))));
    }

    #[test]
    fn split_partitions_templates() {
        let (tree, internal, _) = split_tree();
        let node = tree.node(internal);
        assert_eq!(node.pivot(), Some(2));
        let by_label: Vec<(String, Vec<u64>)> = node
            .sorted_children()
            .into_iter()
            .map(|(label, id)| match label {
                Label::Token(t) => (t.to_string(), tree.node(id).templates().iter().map(|t| t.0).collect()),
                Label::Length(_) => unreachable!(),
            })
            .collect();
        assert_eq!(
            by_label,
            [
                ("bytes".to_string(), vec![1, 4]),
                ("packages".to_string(), vec![2]),
                ("packets".to_string(), vec![3])
            ]
        );
        assert_eq!(tree.ancestor_pivots(node.sorted_children()[0].1), [2]);
    }

    #[test]
    fn pivot_on_most_diverse_position() {
        let rows = vec![
            toks("Send <*> bytes"),
            toks("Send <*> packages"),
            toks("Send <*> packets"),
            toks("Recv <*> bytes"),
        ];
        let refs: Vec<&[Token]> = rows.iter().map(Vec::as_slice).collect();
        assert_eq!(diversity_oracle(&rows), [2, 1, 3]);
        assert_eq!(select_pivot(&refs, &[]), Some(2));
        assert_eq!(select_pivot(&refs, &[2]), Some(0));
    }

    #[test]
    fn pivot_three_by_two() {
        let rows = vec![toks("a x"), toks("a y"), toks("b z")];
        let refs: Vec<&[Token]> = rows.iter().map(Vec::as_slice).collect();
        assert_eq!(diversity_oracle(&rows), [2, 3]);
        assert_eq!(select_pivot(&refs, &[]), Some(1));
    }

    #[test]
    fn pivot_ties_pick_lowest_position() {
        let rows = [toks("a x q"), toks("b y q")];
        let refs: Vec<&[Token]> = rows.iter().map(Vec::as_slice).collect();
        assert_eq!(select_pivot(&refs, &[]), Some(0));
    }

    #[test]
    fn no_pivot_without_diversity() {
        let rows = [toks("a <*>"), toks("a <*>")];
        let refs: Vec<&[Token]> = rows.iter().map(Vec::as_slice).collect();
        assert_eq!(select_pivot(&refs, &[]), None);
        let only_excluded = [toks("a x"), toks("b x")];
        let refs: Vec<&[Token]> = only_excluded.iter().map(Vec::as_slice).collect();
        assert_eq!(select_pivot(&refs, &[0]), None);
        assert_eq!(select_pivot(&[], &[]), None);
    }

    #[test]
    fn wildcard_counts_as_one_value() {
        let rows = [toks("<*> a"), toks("<*> b"), toks("x c"), toks("y c")];
        let refs: Vec<&[Token]> = rows.iter().map(Vec::as_slice).collect();
        // Column 0: {<*>, x, y}; column 1: {a, b, c}; tie -> lowest.
        assert_eq!(select_pivot(&refs, &[]), Some(0));
    }
}
