use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use super::{Builder, PhyloTree};
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, Rational};
use crate::tropical::{TropicalPoint, UnionFind};

/// `C(n, 2)`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of the pair `{i, j}` (`i != j`) in lexicographic pair order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < n && i != j);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Why a vector fails to be an ultrametric. Indices refer to taxa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Length {
        expected: usize,
        got: usize,
    },
    Negative {
        pair: (usize, usize),
    },
    /// `(i, j, k)` with `i < j < k` whose two largest distances differ.
    Triple {
        triple: (usize, usize, usize),
    },
}

/// The first violation in lexicographic order, if any.
pub fn ultrametric_violation(n: usize, d: &[Rational]) -> Option<Violation> {
    if d.len() != pair_count(n) {
        return Some(Violation::Length { expected: pair_count(n), got: d.len() });
    }
    for i in 0..n {
        for j in i + 1..n {
            if d[pair_index(n, i, j)].is_negative() {
                return Some(Violation::Negative { pair: (i, j) });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut three = [&d[pair_index(n, i, j)], &d[pair_index(n, i, k)], &d[pair_index(n, j, k)]];
                three.sort();
                if three[1] != three[2] {
                    return Some(Violation::Triple { triple: (i, j, k) });
                }
            }
        }
    }
    None
}

/// Nonnegativity and `d_ik <= max(d_ij, d_jk)` over all triples.
pub fn is_ultrametric(n: usize, d: &[Rational]) -> bool {
    ultrametric_violation(n, d).is_none()
}

/// A validated ultrametric on sorted, distinct taxa, stored as the vector
/// of pairwise distances in lexicographic pair order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ultrametric {
    taxa: Vec<String>,
    d: Vec<Rational>,
}

impl Ultrametric {
    pub fn new(taxa: Vec<String>, d: Vec<Rational>) -> Result<Self> {
        if taxa.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("taxa must be sorted and distinct".into()));
        }
        if let Some(v) = ultrametric_violation(taxa.len(), &d) {
            return Err(Error::NotUltrametric(describe(&taxa, &d, &v)));
        }
        Ok(Ultrametric { taxa, d })
    }

    /// Builds from a label-keyed distance table; every pair must appear once.
    pub fn from_pairs(pairs: &BTreeMap<(String, String), Rational>) -> Result<Self> {
        let mut taxa: Vec<String> = pairs.keys().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
        taxa.sort();
        taxa.dedup();
        let n = taxa.len();
        let mut d: Vec<Option<Rational>> = vec![None; pair_count(n)];
        for ((a, b), value) in pairs {
            let i = taxa.binary_search(a).expect("collected above");
            let j = taxa.binary_search(b).expect("collected above");
            if i == j {
                return Err(Error::Input(format!("pair {a}|{b} repeats a taxon")));
            }
            let slot = &mut d[pair_index(n, i, j)];
            if slot.is_some() {
                return Err(Error::Input(format!("pair {a}|{b} given twice")));
            }
            *slot = Some(value.clone());
        }
        let d = d
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| Error::Input(format!("missing pair number {k}"))))
            .collect::<Result<Vec<_>>>()?;
        Ultrametric::new(taxa, d)
    }

    pub fn taxa(&self) -> &[String] {
        &self.taxa
    }

    pub fn n(&self) -> usize {
        self.taxa.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.d[pair_index(self.n(), i, j)]
    }

    pub fn distance(&self, a: &str, b: &str) -> Option<&Rational> {
        let i = self.taxa.binary_search_by(|t| t.as_str().cmp(a)).ok()?;
        let j = self.taxa.binary_search_by(|t| t.as_str().cmp(b)).ok()?;
        (i != j).then(|| self.get(i, j))
    }

    /// `A|B` headers in pair order.
    pub fn pair_labels(&self) -> Vec<String> {
        pair_labels(&self.taxa)
    }

    /// The vector as a point of the tropical torus (needs at least 3 taxa).
    pub fn to_point(&self) -> Result<TropicalPoint> {
        TropicalPoint::normalize(self.d.clone())
    }

    /// Zero distances mean two leaves coincide.
    pub fn zero_pairs(&self) -> Vec<(String, String)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.get(i, j).is_zero() {
                    out.push((self.taxa[i].clone(), self.taxa[j].clone()));
                }
            }
        }
        out
    }

    /// Reorders the vector after renaming taxa.
    pub fn relabel(&self, map: &std::collections::HashMap<String, String>) -> Result<Ultrametric> {
        let n = self.n();
        let mut pairs = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let a = map.get(&self.taxa[i]).unwrap_or(&self.taxa[i]).clone();
                let b = map.get(&self.taxa[j]).unwrap_or(&self.taxa[j]).clone();
                pairs.insert((a, b), self.get(i, j).clone());
            }
        }
        let out = Ultrametric::from_pairs(&pairs)?;
        if out.n() != n {
            return Err(Error::DuplicateLabel("relabeling merges taxa".into()));
        }
        Ok(out)
    }

    pub fn to_tree(&self) -> PhyloTree {
        build_tree(&self.taxa, &self.d)
    }

    /// CSV with a header of `A|B` labels and one row per ultrametric.
    pub fn write_csv(items: &[Ultrametric]) -> Result<String> {
        let first = items.first().ok_or_else(|| Error::Input("nothing to write".into()))?;
        super::common_taxa(items.iter().map(|u| u.taxa()))?;
        let mut out = first.pair_labels().join(",");
        out.push('\n');
        for u in items {
            let row: Vec<String> = u.d.iter().map(format_rational).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    /// Inverse of [`Ultrametric::write_csv`]; columns may come in any order.
    pub fn read_csv(text: &str) -> Result<Vec<Ultrametric>> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Input("empty ultrametric file".into()))?;
        let columns: Vec<(String, String)> = header
            .split(',')
            .map(|h| {
                let (a, b) = h.trim().split_once('|').ok_or_else(|| Error::Input(format!("bad pair header {h:?}")))?;
                Ok((a.trim().to_string(), b.trim().to_string()))
            })
            .collect::<Result<_>>()?;
        lines
            .enumerate()
            .map(|(row, line)| {
                let cells: Vec<&str> = line.split(',').collect();
                if cells.len() != columns.len() {
                    return Err(Error::Ragged { row, got: cells.len(), expected: columns.len() });
                }
                let mut pairs = BTreeMap::new();
                for ((a, b), cell) in columns.iter().zip(cells) {
                    pairs.insert((a.clone(), b.clone()), parse_rational(cell.trim())?);
                }
                Ultrametric::from_pairs(&pairs)
            })
            .collect()
    }
}

impl fmt::Display for Ultrametric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.pair_labels().into_iter().zip(&self.d).map(|(p, v)| format!("{p}={}", format_rational(v))).collect();
        f.write_str(&parts.join(" "))
    }
}

pub(crate) fn pair_labels(taxa: &[String]) -> Vec<String> {
    let n = taxa.len();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| format!("{}|{}", taxa[i], taxa[j]))).collect()
}

fn describe(taxa: &[String], d: &[Rational], v: &Violation) -> String {
    let n = taxa.len();
    match *v {
        Violation::Length { expected, got } => format!("expected {expected} distances, got {got}"),
        Violation::Negative { pair: (i, j) } => {
            format!("negative distance {}|{} = {}", taxa[i], taxa[j], format_rational(&d[pair_index(n, i, j)]))
        }
        Violation::Triple { triple: (i, j, k) } => format!(
            "triple ({}, {}, {}) has d = {}, {}, {}",
            taxa[i],
            taxa[j],
            taxa[k],
            format_rational(&d[pair_index(n, i, j)]),
            format_rational(&d[pair_index(n, i, k)]),
            format_rational(&d[pair_index(n, j, k)]),
        ),
    }
}

/// `d_ij = 2 · height(lca(i, j))`. The tree must be equidistant.
pub fn tree_to_ultrametric(t: &PhyloTree) -> Result<Ultrametric> {
    if !t.is_equidistant() {
        return Err(Error::NotEquidistant(t.raised_leaves()));
    }
    let taxa = t.taxa();
    let n = taxa.len();
    let index = |v: usize| taxa.binary_search_by(|s| s.as_str().cmp(t.label(v).expect("leaf"))).expect("leaf label");
    let sets = t.leaf_sets();
    let mut d = vec![Rational::zero(); pair_count(n)];
    for v in 0..t.node_count() {
        let kids = t.children(v);
        let twice = t.height(v) * int(2);
        for (a, &x) in kids.iter().enumerate() {
            for &y in &kids[a + 1..] {
                for &p in &sets[x] {
                    for &q in &sets[y] {
                        d[pair_index(n, index(p), index(q))] = twice.clone();
                    }
                }
            }
        }
    }
    Ultrametric::new(taxa, d)
}

/// Single-linkage reconstruction. All merges at the same distance `δ`
/// become one node at height `δ/2`, so ties give multifurcations and the
/// result has no zero-length interior edges.
pub fn ultrametric_to_tree(u: &Ultrametric) -> PhyloTree {
    u.to_tree()
}

fn build_tree(taxa: &[String], d: &[Rational]) -> PhyloTree {
    let n = taxa.len();
    let mut builder = Builder::default();
    let mut heights: Vec<Rational> = vec![Rational::zero(); n];
    // Top node of each cluster, keyed by its union-find representative.
    let mut tops: BTreeMap<usize, usize> =
        (0..n).map(|i| (i, builder.add(Some(taxa[i].clone()), None, Rational::zero()))).collect();
    let mut levels: BTreeMap<&Rational, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            levels.entry(&d[pair_index(n, i, j)]).or_default().push((i, j));
        }
    }
    let mut uf = UnionFind::new(n);
    for (delta, pairs) in levels {
        for (i, j) in pairs {
            uf.union(i, j);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (rep, node) in std::mem::take(&mut tops) {
            groups.entry(uf.find(rep)).or_default().push(node);
        }
        for (rep, members) in groups {
            let node = if members.len() == 1 {
                members[0]
            } else {
                let node = builder.add(None, None, Rational::zero());
                heights.push(delta / int(2));
                for c in members {
                    builder.parents[c] = Some(node);
                }
                node
            };
            tops.insert(rep, node);
        }
    }
    for v in 0..heights.len() {
        if let Some(p) = builder.parents[v] {
            builder.lengths[v] = &heights[p] - &heights[v];
        }
    }
    let root = tops.values().next().copied().unwrap_or(0);
    builder.finish(root).expect("taxa are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::trees::{emit_newick, parse_newick, random_equidistant_tree};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn pair_indexing_is_lexicographic() {
        let n = 5;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_index(n, j, i), k);
                k += 1;
            }
        }
        assert_eq!(k, pair_count(n));
    }

    #[test]
    fn t1_distances() {
        let t = parse_newick("(D:10,(C:4,(B:2,A:2):2):6)").unwrap();
        let u = tree_to_ultrametric(&t).unwrap();
        assert_eq!(u.taxa(), labels(&["A", "B", "C", "D"]).as_slice());
        let expect = [4, 8, 20, 8, 20, 20].map(int);
        assert_eq!(u.values(), &expect);
        assert_eq!(u.distance("C", "A"), Some(&int(8)));
        assert_eq!(emit_newick(&ultrametric_to_tree(&u)), "(D:10,(C:4,(A:2,B:2):2):6);");
    }

    #[test]
    fn cherry_and_star() {
        let u = tree_to_ultrametric(&parse_newick("(A:1,B:1)").unwrap()).unwrap();
        assert_eq!(u.values(), &[int(2)]);
        let star = tree_to_ultrametric(&parse_newick("((A:3,B:3):0,(C:3,D:3):0)").unwrap()).unwrap();
        assert!(star.values().iter().all(|v| *v == int(6)));
        assert_eq!(emit_newick(&star.to_tree()), "(A:3,B:3,C:3,D:3);");
        let flat = Ultrametric::new(labels(&["A", "B", "C"]), vec![int(2); 3]).unwrap();
        assert_eq!(emit_newick(&flat.to_tree()), "(A:1,B:1,C:1);");
    }

    #[test]
    fn violations() {
        let d = [int(1), int(2), int(3)];
        assert_eq!(ultrametric_violation(3, &d), Some(Violation::Triple { triple: (0, 1, 2) }));
        assert!(!is_ultrametric(3, &d));
        assert!(is_ultrametric(4, &vec![int(1); 6]));
        assert_eq!(ultrametric_violation(3, &[int(1), int(-1), int(1)]), Some(Violation::Negative { pair: (0, 2) }));
        assert_eq!(ultrametric_violation(3, &[int(1)]), Some(Violation::Length { expected: 3, got: 1 }));
        let err = Ultrametric::new(labels(&["A", "B", "C"]), d.to_vec()).unwrap_err();
        assert!(err.to_string().contains("(A, B, C)"));
    }

    #[test]
    fn non_equidistant_is_rejected() {
        let err = tree_to_ultrametric(&parse_newick("(A:1,(B:1,C:2):1)").unwrap()).unwrap_err();
        assert_eq!(err, Error::NotEquidistant(labels(&["A", "B"])));
    }

    #[test]
    fn zero_distances_build_a_zero_height_node() {
        let u = Ultrametric::new(labels(&["A", "B", "C"]), vec![int(0), int(4), int(4)]).unwrap();
        assert_eq!(u.zero_pairs(), vec![("A".to_string(), "B".to_string())]);
        assert_eq!(emit_newick(&u.to_tree()), "(C:2,(A:0,B:0):2);");
    }

    #[test]
    fn roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let n = rng.gen_range(2..9);
            let t = random_equidistant_tree(&mut rng, n);
            let u = tree_to_ultrametric(&t).unwrap();
            let back = ultrametric_to_tree(&u);
            assert_eq!(back, t);
            assert_eq!(tree_to_ultrametric(&back).unwrap(), u);
        }
    }

    #[test]
    fn roundtrip_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            // Few distinct heights so that multifurcations are common.
            let n = rng.gen_range(2..8);
            let taxa: Vec<String> = (0..n).map(|k| format!("X{k}")).collect();
            let heights: Vec<Rational> = (0..n).map(|_| ratio(rng.gen_range(0..3), 2)).collect();
            // Ultrametric from a random ranking: d_ij = max height on the path in a caterpillar.
            let mut d = vec![Rational::zero(); pair_count(n)];
            for i in 0..n {
                for j in i + 1..n {
                    d[pair_index(n, i, j)] = heights[i + 1..=j].iter().max().unwrap().clone() * int(2);
                }
            }
            let u = Ultrametric::new(taxa, d).unwrap();
            assert_eq!(tree_to_ultrametric(&u.to_tree()).unwrap(), u);
        }
    }

    #[test]
    fn csv_roundtrip_and_column_order() {
        let u = tree_to_ultrametric(&parse_newick("(D:10,(C:4,(B:2,A:2):2):6)").unwrap()).unwrap();
        let text = Ultrametric::write_csv(&[u.clone(), u.clone()]).unwrap();
        assert!(text.starts_with("A|B,A|C,A|D,B|C,B|D,C|D\n"));
        assert_eq!(Ultrametric::read_csv(&text).unwrap(), vec![u.clone(), u.clone()]);
        let shuffled = "D|C,B|A,C|A,D|A,C|B,D|B\n20,4,8,20,8,20\n";
        assert_eq!(Ultrametric::read_csv(shuffled).unwrap(), vec![u]);
        assert!(Ultrametric::read_csv("A|B,A|C\n1,2\n").is_err());
    }
}
