use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use super::{jsonl_lines, parse_json_object, string_field};
use crate::error::{Error, Result};
use crate::model::Corpus;

/// Ordered labeled tree node. Leaves carry surface tokens as their label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeNode {
    pub label: String,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(token: impl Into<String>) -> Self {
        TreeNode {
            label: token.into(),
            children: Vec::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<TreeNode>) -> Self {
        TreeNode {
            label: label.into(),
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// A node whose children are all leaves, e.g. `(NOUN robot)`.
    pub fn is_preterminal(&self) -> bool {
        !self.children.is_empty() && self.children.iter().all(TreeNode::is_leaf)
    }

    /// `label -> child labels`; leaf children are marked so a token never
    /// collides with a same-named phrase label. `None` for leaves.
    pub fn production(&self) -> Option<String> {
        if self.is_leaf() {
            return None;
        }
        let mut s = self.label.clone();
        s.push_str(" ->");
        for c in &self.children {
            s.push(' ');
            if c.is_leaf() {
                s.push('\'');
                s.push_str(&c.label);
                s.push('\'');
            } else {
                s.push_str(&c.label);
            }
        }
        Some(s)
    }

    fn visit<'a>(&'a self, out: &mut Vec<&'a TreeNode>) {
        out.push(self);
        for c in &self.children {
            c.visit(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstituencyTree {
    pub root: TreeNode,
}

impl ConstituencyTree {
    pub fn new(root: TreeNode) -> Self {
        ConstituencyTree { root }
    }

    /// Preorder list of all nodes.
    pub fn nodes(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        self.root.visit(&mut out);
        out
    }

    /// Productions of every non-leaf node, preorder.
    pub fn productions(&self) -> Vec<String> {
        self.nodes().into_iter().filter_map(TreeNode::production).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes().iter().filter(|n| n.is_leaf()).count()
    }

    pub fn preterminal_count(&self) -> usize {
        self.nodes().iter().filter(|n| n.is_preterminal()).count()
    }

    /// Phrase-level nodes: non-leaf, non-preterminal.
    pub fn phrase_count(&self) -> usize {
        self.nodes()
            .iter()
            .filter(|n| !n.is_leaf() && !n.is_preterminal())
            .count()
    }

    pub fn to_ptb(&self) -> std::io::Result<String> {
        let mut s = String::new();
        write_node(&self.root, &mut s)?;
        Ok(s)
    }
}

fn write_node(node: &TreeNode, out: &mut String) -> std::io::Result<()> {
    if node.label.is_empty() || node.label.chars().any(|c| c == '(' || c == ')' || c.is_whitespace()) {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("label {:?} cannot be written in bracketed notation", node.label),
        ));
    }
    if node.is_leaf() {
        out.push_str(&node.label);
        return Ok(());
    }
    out.push('(');
    out.push_str(&node.label);
    for c in &node.children {
        out.push(' ');
        write_node(c, out)?;
    }
    out.push(')');
    Ok(())
}

fn tree_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Tree {
        offset,
        message: message.into(),
    }
}

/// Parses `(LABEL child ...)` notation. Offsets in errors count characters.
pub fn parse_ptb(input: &str) -> Result<ConstituencyTree> {
    let chars: Vec<char> = input.chars().collect();

    let mut depth = 0usize;
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => {
                if depth == 0 {
                    return Err(tree_err(i, "unbalanced"));
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(tree_err(chars.len(), "unbalanced"));
    }

    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let read_token = |pos: &mut usize| -> String {
        let start = *pos;
        while *pos < chars.len() && !chars[*pos].is_whitespace() && chars[*pos] != '(' && chars[*pos] != ')' {
            *pos += 1;
        }
        chars[start..*pos].iter().collect()
    };

    skip_ws(&mut pos);
    if pos >= chars.len() {
        return Err(tree_err(pos, "empty tree"));
    }
    if chars[pos] != '(' {
        return Err(tree_err(pos, "expected '('"));
    }

    // (label, children, offset of the opening paren)
    let mut stack: Vec<(String, Vec<TreeNode>, usize)> = Vec::new();
    let mut root = None;
    while pos < chars.len() {
        skip_ws(&mut pos);
        if pos >= chars.len() {
            break;
        }
        match chars[pos] {
            '(' => {
                if root.is_some() {
                    return Err(tree_err(pos, "trailing content after tree"));
                }
                let open = pos;
                pos += 1;
                skip_ws(&mut pos);
                let label = read_token(&mut pos);
                if label.is_empty() {
                    return Err(tree_err(pos, "empty label"));
                }
                stack.push((label, Vec::new(), open));
            }
            ')' => {
                let (label, children, open) = stack.pop().ok_or_else(|| tree_err(pos, "unbalanced"))?;
                if children.is_empty() {
                    return Err(tree_err(open, format!("node {label} has no children")));
                }
                let node = TreeNode { label, children };
                match stack.last_mut() {
                    Some(parent) => parent.1.push(node),
                    None => root = Some(node),
                }
                pos += 1;
            }
            _ => {
                if root.is_some() {
                    return Err(tree_err(pos, "trailing content after tree"));
                }
                let token = read_token(&mut pos);
                match stack.last_mut() {
                    Some(parent) => parent.1.push(TreeNode::leaf(token)),
                    None => return Err(tree_err(pos, "token outside brackets")),
                }
            }
        }
    }
    root.map(ConstituencyTree::new)
        .ok_or_else(|| tree_err(chars.len(), "unbalanced"))
}

/// Reads `{"id": .., "ptb": ".."}` lines; ids must belong to the corpus.
pub fn read_trees(path: &Path, corpus: &Corpus) -> Result<BTreeMap<String, ConstituencyTree>> {
    let ids = corpus.id_set();
    let mut out = BTreeMap::new();
    for line in jsonl_lines(path)? {
        let (line_no, line) = line?;
        let obj = parse_json_object(path, line_no, &line)?;
        let id = string_field(path, line_no, &obj, "id")?;
        let ptb = string_field(path, line_no, &obj, "ptb")?;
        if !ids.contains(id) {
            return Err(Error::syntax(path, line_no, format!("unknown id {id}")));
        }
        let tree = parse_ptb(ptb).map_err(|e| Error::syntax(path, line_no, e.to_string()))?;
        if out.insert(id.to_string(), tree).is_some() {
            return Err(Error::DuplicateId {
                id: id.to_string(),
                line: line_no,
            });
        }
    }
    Ok(out)
}

pub fn write_trees<'a, W, I>(trees: I, mut out: W) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a String, &'a ConstituencyTree)>,
{
    for (id, tree) in trees {
        let line = serde_json::json!({ "id": id, "ptb": tree.to_ptb()? });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_small_tree() {
        let t = parse_ptb("(S (NP (NOUN robot)) (VP (VERB move)))").unwrap();
        assert_eq!(t.phrase_count(), 3);
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.preterminal_count(), 2);
        assert_eq!(
            t.productions(),
            ["S -> NP VP", "NP -> NOUN", "NOUN -> 'robot'", "VP -> VERB", "VERB -> 'move'"]
        );
    }

    #[test]
    fn unbalanced_reports_offset() {
        assert_eq!(parse_ptb("(S (NP)").unwrap_err().to_string(), "unbalanced at offset 7");
        assert_eq!(parse_ptb("(S a))").unwrap_err().to_string(), "unbalanced at offset 5");
    }

    #[test]
    fn empty_label() {
        let err = parse_ptb("((X a))").unwrap_err().to_string();
        assert!(err.starts_with("empty label"), "{err}");
    }

    #[test]
    fn other_grammar_errors() {
        assert!(parse_ptb("(S (NP) (VP a))").unwrap_err().to_string().contains("no children"));
        assert!(parse_ptb("(S a) (T b)").unwrap_err().to_string().contains("trailing"));
        assert!(parse_ptb("robot").unwrap_err().to_string().contains("expected '('"));
        assert!(parse_ptb("   ").unwrap_err().to_string().contains("empty tree"));
    }

    fn arb_node(depth: u32) -> BoxedStrategy<TreeNode> {
        let leaf = "[a-z0-9]{1,4}".prop_map(TreeNode::leaf).boxed();
        if depth == 0 {
            return leaf;
        }
        prop_oneof![
            leaf,
            ("[A-Z]{1,3}", proptest::collection::vec(arb_node(depth - 1), 1..4))
                .prop_map(|(l, c)| TreeNode::node(l, c)),
        ]
        .boxed()
    }

    proptest! {
        #[test]
        fn ptb_round_trip(label in "[A-Z]{1,3}", children in proptest::collection::vec(arb_node(3), 1..4)) {
            let t = ConstituencyTree::new(TreeNode::node(label, children));
            let s = t.to_ptb().unwrap();
            prop_assert_eq!(parse_ptb(&s).unwrap(), t);
        }
    }
}
