//! Rooted merge trees and Newick text.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Rooted binary tree produced by agglomerative clustering.
#[derive(Debug, Clone, PartialEq)]
pub enum ClusterTree {
    Leaf(String),
    Merge {
        left: Box<ClusterTree>,
        right: Box<ClusterTree>,
        height: f64,
    },
}

impl ClusterTree {
    /// Merge height; zero for leaves.
    pub fn height(&self) -> f64 {
        match self {
            ClusterTree::Leaf(_) => 0.0,
            ClusterTree::Merge { height, .. } => *height,
        }
    }

    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ClusterTree::Leaf(l) => out.push(l),
            ClusterTree::Merge { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    /// Merge heights, children before parents.
    pub fn merge_heights(&self) -> Vec<f64> {
        let mut out = Vec::new();
        fn walk(t: &ClusterTree, out: &mut Vec<f64>) {
            if let ClusterTree::Merge { left, right, height } = t {
                walk(left, out);
                walk(right, out);
                out.push(*height);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Newick text. With heights, a merge at height `h` sits `h/2` above
    /// the leaves, so each branch is half the height difference.
    pub fn to_newick(&self, with_heights: bool) -> String {
        let mut out = String::new();
        self.write_newick(&mut out, with_heights, None);
        out.push(';');
        out
    }

    fn write_newick(&self, out: &mut String, with_heights: bool, parent: Option<f64>) {
        match self {
            ClusterTree::Leaf(l) => out.push_str(&quote_label(l)),
            ClusterTree::Merge { left, right, height } => {
                out.push('(');
                left.write_newick(out, with_heights, Some(*height));
                out.push(',');
                right.write_newick(out, with_heights, Some(*height));
                out.push(')');
            }
        }
        if let (true, Some(ph)) = (with_heights, parent) {
            let _ = write!(out, ":{}", (ph - self.height()) / 2.0);
        }
    }

    pub fn to_node(&self) -> NewickNode {
        match self {
            ClusterTree::Leaf(l) => NewickNode::leaf(l),
            ClusterTree::Merge { left, right, .. } => NewickNode {
                label: None,
                length: None,
                children: vec![left.to_node(), right.to_node()],
            },
        }
    }
}

fn quote_label(l: &str) -> String {
    if l.chars().any(|c| "()[]',:;".contains(c) || c.is_whitespace()) {
        format!("'{}'", l.replace('\'', "''"))
    } else {
        l.to_string()
    }
}

/// General Newick tree (any arity, optional labels and branch lengths).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NewickNode {
    pub label: Option<String>,
    pub length: Option<f64>,
    pub children: Vec<NewickNode>,
}

impl NewickNode {
    pub fn leaf(label: &str) -> Self {
        NewickNode {
            label: Some(label.to_string()),
            ..Default::default()
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn leaves(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_leaves(&mut |l| {
            out.insert(l.to_string());
        });
        out
    }

    fn visit_leaves(&self, f: &mut impl FnMut(&str)) {
        if self.is_leaf() {
            f(self.label.as_deref().unwrap_or(""));
        }
        for c in &self.children {
            c.visit_leaves(f);
        }
    }

    /// Leaf sets of every internal node (including the root).
    pub fn clades(&self) -> BTreeSet<BTreeSet<String>> {
        let mut out = BTreeSet::new();
        fn walk(n: &NewickNode, out: &mut BTreeSet<BTreeSet<String>>) -> BTreeSet<String> {
            if n.is_leaf() {
                return BTreeSet::from([n.label.clone().unwrap_or_default()]);
            }
            let mut all = BTreeSet::new();
            for c in &n.children {
                all.extend(walk(c, out));
            }
            out.insert(all.clone());
            all
        }
        walk(self, &mut out);
        out
    }

    /// Non-trivial bipartitions of the leaves, each represented by the side
    /// holding the lexicographically smallest leaf. Ignores rooting.
    pub fn splits(&self) -> BTreeSet<BTreeSet<String>> {
        let all = self.leaves();
        let Some(first) = all.iter().next().cloned() else {
            return BTreeSet::new();
        };
        let n = all.len();
        self.clades()
            .into_iter()
            .filter(|c| c.len() >= 2 && c.len() + 2 <= n)
            .map(|c| {
                if c.contains(&first) {
                    c
                } else {
                    all.difference(&c).cloned().collect()
                }
            })
            .collect()
    }

    pub fn same_unrooted_topology(&self, other: &NewickNode) -> bool {
        self.leaves() == other.leaves() && self.splits() == other.splits()
    }

    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out.push(';');
        out
    }

    fn write(&self, out: &mut String) {
        if !self.is_leaf() {
            out.push('(');
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.write(out);
            }
            out.push(')');
        }
        if let Some(l) = &self.label {
            out.push_str(&quote_label(l));
        }
        if let Some(len) = self.length {
            let _ = write!(out, ":{len}");
        }
    }
}

pub fn parse_newick(text: &str) -> Result<NewickNode> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let node = p.subtree()?;
    p.skip_ws();
    if p.next() != Some(';') {
        return Err(Error::Newick(format!("expected ';' at offset {}", p.pos)));
    }
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::Newick(format!("trailing text at offset {}", p.pos)));
    }
    Ok(node)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn subtree(&mut self) -> Result<NewickNode> {
        self.skip_ws();
        let mut node = NewickNode::default();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                node.children.push(self.subtree()?);
                self.skip_ws();
                match self.next() {
                    Some(',') => continue,
                    Some(')') => break,
                    other => {
                        return Err(Error::Newick(format!(
                            "expected ',' or ')' at offset {}, found {other:?}",
                            self.pos - 1
                        )))
                    }
                }
            }
        }
        self.skip_ws();
        node.label = self.label()?;
        self.skip_ws();
        if self.peek() == Some(':') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self
                .peek()
                .is_some_and(|c| c.is_ascii_digit() || "+-.eE".contains(c))
            {
                self.pos += 1;
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            node.length = Some(
                s.parse()
                    .map_err(|_| Error::Newick(format!("bad branch length {s:?} at offset {start}")))?,
            );
        }
        if node.is_leaf() && node.label.is_none() {
            return Err(Error::Newick(format!("unlabelled leaf at offset {}", self.pos)));
        }
        Ok(node)
    }

    fn label(&mut self) -> Result<Option<String>> {
        if self.peek() == Some('\'') {
            self.pos += 1;
            let mut s = String::new();
            loop {
                match self.next() {
                    Some('\'') if self.peek() == Some('\'') => {
                        self.pos += 1;
                        s.push('\'');
                    }
                    Some('\'') => return Ok(Some(s)),
                    Some(c) => s.push(c),
                    None => return Err(Error::Newick("unterminated quoted label".into())),
                }
            }
        }
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| !"(),:;'".contains(c) && !c.is_whitespace())
        {
            self.pos += 1;
        }
        Ok((self.pos > start).then(|| self.chars[start..self.pos].iter().collect()))
    }
}
