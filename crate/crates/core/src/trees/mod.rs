//! Rooted equidistant trees, their ultrametrics, rooted triplets and the
//! pointwise-max consensus baseline.
//!
//! Heights: every node carries a height, leaves of an equidistant tree sit
//! at 0 and the root at half the largest leaf-to-leaf distance. An edge's
//! length is the parent's height minus the child's.

mod newick;
mod random;
mod triplets;
mod ultrametric;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use newick::{emit_newick, parse_newick, parse_tree_file};
pub use random::random_equidistant_tree;
pub use triplets::{
    check_pareto, pointwise_max_consensus, rooted_triplets, ParetoReport, Representative, RootedTriplet,
};
pub use ultrametric::{
    is_ultrametric, pair_count, pair_index, tree_to_ultrametric, ultrametric_to_tree, ultrametric_violation,
    Ultrametric, Violation,
};

#[derive(Debug, Clone)]
struct Node {
    label: Option<String>,
    parent: Option<usize>,
    children: Vec<usize>,
    height: Rational,
}

/// A rooted tree with labeled leaves and exact node heights.
///
/// Equality is equality of the canonical Newick strings, so child order
/// and node numbering do not matter.
#[derive(Debug, Clone)]
pub struct PhyloTree {
    nodes: Vec<Node>,
    root: usize,
}

impl PartialEq for PhyloTree {
    fn eq(&self, other: &Self) -> bool {
        emit_newick(self) == emit_newick(other)
    }
}

impl Eq for PhyloTree {}

impl std::fmt::Display for PhyloTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&emit_newick(self))
    }
}

/// Tree under construction: parents, labels and edge lengths. Heights are
/// derived once the shape is complete.
#[derive(Debug, Default)]
struct Builder {
    labels: Vec<Option<String>>,
    parents: Vec<Option<usize>>,
    lengths: Vec<Rational>,
}

impl Builder {
    fn add(&mut self, label: Option<String>, parent: Option<usize>, length: Rational) -> usize {
        self.labels.push(label);
        self.parents.push(parent);
        self.lengths.push(length);
        self.labels.len() - 1
    }

    /// Places the root at the largest root-to-leaf depth, so the deepest
    /// leaves end up at height 0 and none below it.
    fn finish(self, root: usize) -> Result<PhyloTree> {
        let count = self.labels.len();
        let mut children = vec![Vec::new(); count];
        for (v, p) in self.parents.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        let mut seen = BTreeSet::new();
        for label in self.labels.iter().enumerate().filter(|(v, _)| children[*v].is_empty()).map(|(_, l)| l) {
            let label = label.as_ref().ok_or_else(|| Error::Input("unlabeled leaf".into()))?;
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        let mut depth = vec![Rational::zero(); count];
        let mut order = vec![root];
        let mut k = 0;
        while k < order.len() {
            let v = order[k];
            for &c in &children[v] {
                depth[c] = &depth[v] + &self.lengths[c];
                order.push(c);
            }
            k += 1;
        }
        let top = order
            .iter()
            .filter(|&&v| children[v].is_empty())
            .map(|&v| &depth[v])
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero);
        let nodes = self
            .labels
            .into_iter()
            .zip(self.parents)
            .zip(children)
            .zip(depth)
            .map(|(((label, parent), children), depth)| Node {
                label: if children.is_empty() { label } else { None },
                parent,
                children,
                height: &top - depth,
            })
            .collect();
        Ok(PhyloTree { nodes, root })
    }
}

impl PhyloTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.nodes[v].children
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.nodes[v].parent
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.nodes[v].children.is_empty()
    }

    /// Leaf label; `None` for internal nodes.
    pub fn label(&self, v: usize) -> Option<&str> {
        self.nodes[v].label.as_deref()
    }

    pub fn height(&self, v: usize) -> &Rational {
        &self.nodes[v].height
    }

    pub fn root_height(&self) -> &Rational {
        self.height(self.root)
    }

    /// Length of the edge above `v`; zero at the root.
    pub fn edge_length(&self, v: usize) -> Rational {
        match self.nodes[v].parent {
            Some(p) => &self.nodes[p].height - &self.nodes[v].height,
            None => Rational::zero(),
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&v| self.is_leaf(v))
    }

    /// Leaf labels in sorted order.
    pub fn taxa(&self) -> Vec<String> {
        let mut taxa: Vec<String> = self.leaves().filter_map(|v| self.nodes[v].label.clone()).collect();
        taxa.sort();
        taxa
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves().count()
    }

    pub fn is_equidistant(&self) -> bool {
        self.leaves().all(|v| self.nodes[v].height.is_zero())
    }

    /// Labels of leaves strictly above height 0, sorted.
    pub fn raised_leaves(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .leaves()
            .filter(|&v| !self.nodes[v].height.is_zero())
            .filter_map(|v| self.nodes[v].label.clone())
            .collect();
        out.sort();
        out
    }

    /// Leaf label sets of all internal nodes except the root, each sorted.
    pub fn clusters(&self) -> BTreeSet<Vec<String>> {
        let mut below: Vec<Vec<String>> = vec![Vec::new(); self.nodes.len()];
        for v in self.postorder() {
            if let Some(label) = &self.nodes[v].label {
                below[v].push(label.clone());
            }
            let mut merged: Vec<String> = self.nodes[v].children.iter().flat_map(|&c| below[c].clone()).collect();
            below[v].append(&mut merged);
            below[v].sort();
        }
        (0..self.nodes.len())
            .filter(|&v| v != self.root && !self.is_leaf(v) && below[v].len() > 1)
            .map(|v| below[v].clone())
            .collect()
    }

    /// Renames leaves; labels missing from `map` are kept.
    pub fn relabel(&self, map: &HashMap<String, String>) -> Result<PhyloTree> {
        let mut out = self.clone();
        let mut seen = BTreeSet::new();
        for node in out.nodes.iter_mut() {
            if let Some(label) = node.label.as_mut() {
                if let Some(new) = map.get(label.as_str()) {
                    *label = new.clone();
                }
                if !seen.insert(label.clone()) {
                    return Err(Error::DuplicateLabel(label.clone()));
                }
            }
        }
        Ok(out)
    }

    fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(&self.nodes[v].children);
        }
        order.reverse();
        order
    }

    /// Leaf labels below each node.
    fn leaf_sets(&self) -> Vec<Vec<usize>> {
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for v in self.postorder() {
            if self.is_leaf(v) {
                below[v].push(v);
            } else {
                below[v] = self.nodes[v].children.iter().flat_map(|&c| below[c].clone()).collect();
            }
        }
        below
    }
}

/// Lowers every leaf to height 0 by lengthening its pendant edge. Interior
/// heights and the topology are unchanged.
pub fn make_equidistant(t: &PhyloTree) -> PhyloTree {
    let mut out = t.clone();
    for node in out.nodes.iter_mut().filter(|n| n.children.is_empty()) {
        node.height = Rational::zero();
    }
    out
}

/// Rejects taxa sets that differ from the first tree's.
pub(crate) fn common_taxa<'a>(mut sets: impl Iterator<Item = &'a [String]>) -> Result<Vec<String>> {
    let first = sets.next().ok_or_else(|| Error::Input("no inputs".into()))?.to_vec();
    for (k, other) in sets.enumerate() {
        if other != first.as_slice() {
            let a: BTreeSet<_> = first.iter().collect();
            let b: BTreeSet<_> = other.iter().collect();
            let diff: BTreeMap<_, _> = a
                .symmetric_difference(&b)
                .map(|s| (s.as_str(), if a.contains(s) { "missing" } else { "extra" }))
                .collect();
            let detail: Vec<String> = diff.iter().map(|(s, what)| format!("{s} ({what})")).collect();
            return Err(Error::TaxaMismatch(format!("input {} differs from input 0: {}", k + 1, detail.join(", "))));
        }
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn cherry_heights() {
        let t = parse_newick("(A:1,B:1)").unwrap();
        assert_eq!(t.root_height(), &int(1));
        assert!(t.is_equidistant());
        assert_eq!(t.taxa(), vec!["A", "B"]);
        assert!(t.clusters().is_empty());
    }

    #[test]
    fn make_equidistant_extends_short_leaves() {
        let t = parse_newick("(A:1,B:3)").unwrap();
        assert!(!t.is_equidistant());
        assert_eq!(t.raised_leaves(), vec!["A"]);
        let e = make_equidistant(&t);
        assert!(e.is_equidistant());
        assert_eq!(emit_newick(&e), "(A:3,B:3);");
    }

    #[test]
    fn make_equidistant_keeps_topology_and_internal_heights() {
        let t = parse_newick("((A:1,B:2):1,(C:0.5,D:4):2)").unwrap();
        let e = make_equidistant(&t);
        assert_eq!(t.clusters(), e.clusters());
        for v in 0..t.node_count() {
            if !t.is_leaf(v) {
                assert_eq!(t.height(v), e.height(v));
            }
        }
        let already = parse_newick("(D:10,(C:4,(B:2,A:2):2):6)").unwrap();
        assert_eq!(make_equidistant(&already), already);
    }

    #[test]
    fn clusters_of_t1() {
        let t = parse_newick("(D:10,(C:4,(B:2,A:2):2):6)").unwrap();
        let expected: BTreeSet<Vec<String>> =
            [vec!["A", "B"], vec!["A", "B", "C"]].iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect();
        assert_eq!(t.clusters(), expected);
    }

    #[test]
    fn relabel_renames_and_rejects_collisions() {
        let t = parse_newick("(A:1,B:1)").unwrap();
        let map: HashMap<String, String> = [("A".to_string(), "Z".to_string())].into();
        assert_eq!(emit_newick(&t.relabel(&map).unwrap()), "(B:1,Z:1);");
        let clash: HashMap<String, String> = [("A".to_string(), "B".to_string())].into();
        assert!(matches!(t.relabel(&clash), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn taxa_mismatch_is_reported() {
        let a = vec!["A".to_string(), "B".to_string()];
        let b = vec!["A".to_string(), "C".to_string()];
        let err = common_taxa([a.as_slice(), b.as_slice()].into_iter()).unwrap_err();
        assert!(matches!(err, Error::TaxaMismatch(ref s) if s.contains("B (missing)") && s.contains("C (extra)")));
    }
}
