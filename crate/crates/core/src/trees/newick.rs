use num_traits::Signed;

use super::{Builder, PhyloTree};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

const RESERVED: &[u8] = b"(),:;";

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    tree: Builder,
}

impl Parser<'_> {
    fn syntax<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.pos, message: message.into() })
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    /// A run of non-reserved bytes, trimmed. Reserved bytes are ASCII, so
    /// the slice always falls on character boundaries.
    fn token(&mut self) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(|b| !RESERVED.contains(&b)) {
            self.pos += 1;
        }
        self.text[start..self.pos].trim()
    }

    fn subtree(&mut self, parent: Option<usize>) -> Result<usize> {
        self.skip_ws();
        let node = self.tree.add(None, parent, Rational::default());
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                self.subtree(Some(node))?;
                self.skip_ws();
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.syntax("expected ',' or ')'"),
                }
            }
            // Internal node names and support values are accepted and dropped.
            self.token();
        } else {
            let label = self.token().to_string();
            if label.is_empty() {
                return self.syntax("expected a leaf label or '('");
            }
            self.tree.labels[node] = Some(label);
        }
        self.skip_ws();
        if self.peek() == Some(b':') {
            self.pos += 1;
            let at = self.pos;
            let text = self.token().to_string();
            let length = parse_rational(&text)
                .map_err(|_| Error::Syntax { position: at, message: format!("invalid branch length {text:?}") })?;
            if length.is_negative() {
                return Err(Error::NegativeLength(at));
            }
            self.tree.lengths[node] = length;
        } else if parent.is_some() {
            return Err(Error::MissingLength(self.pos));
        }
        Ok(node)
    }
}

/// Parses one Newick string. Every non-root node needs a `:length`; a root
/// length is accepted and ignored, and the trailing `;` is optional.
pub fn parse_newick(text: &str) -> Result<PhyloTree> {
    let mut p = Parser { text, pos: 0, tree: Builder::default() };
    let root = p.subtree(None)?;
    p.skip_ws();
    if p.peek() == Some(b';') {
        p.pos += 1;
        p.skip_ws();
    }
    if p.pos != text.len() {
        return p.syntax("unexpected trailing input");
    }
    p.tree.finish(root)
}

/// One tree per non-empty line; text after `#` is a comment.
pub fn parse_tree_file(text: &str) -> Result<Vec<PhyloTree>> {
    let mut trees = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tree = parse_newick(line).map_err(|e| Error::Input(format!("line {}: {e}", lineno + 1)))?;
        trees.push(tree);
    }
    Ok(trees)
}

/// Canonical Newick: at each node the leaf children come first, sorted by
/// label, then the internal children ordered by their smallest leaf label.
pub fn emit_newick(t: &PhyloTree) -> String {
    let sets = t.leaf_sets();
    let smallest: Vec<&str> = sets.iter().map(|s| s.iter().filter_map(|&v| t.label(v)).min().unwrap_or("")).collect();
    let mut out = String::new();
    write_node(t, t.root(), &smallest, &mut out);
    out.push(';');
    out
}

fn write_node(t: &PhyloTree, v: usize, smallest: &[&str], out: &mut String) {
    if let Some(label) = t.label(v) {
        out.push_str(label);
    } else {
        let mut kids = t.children(v).to_vec();
        kids.sort_by_key(|&c| (!t.is_leaf(c), smallest[c]));
        out.push('(');
        for (k, &c) in kids.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write_node(t, c, smallest, out);
        }
        out.push(')');
    }
    if v != t.root() {
        out.push(':');
        out.push_str(&format_rational(&t.edge_length(v)));
    }
}
