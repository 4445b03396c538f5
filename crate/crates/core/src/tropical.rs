//! Points of the tropical projective torus, site configurations, tropical
//! distances, covectors and the even-split predicate.
//!
//! The torus `R^n / R·1` is represented by the hyperplane where the
//! coordinates sum to zero. Every constructor normalizes onto it, so two
//! values compare equal exactly when they are the same torus point.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::flow;
use crate::rational::{format_rational, int, Rational};

/// Largest dimension for which `evenly_splits` enumerates all `2^n` subsets
/// instead of running the flow test.
pub const ENUMERATION_LIMIT: usize = 12;

/// A point of the torus in its sum-zero representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TropicalPoint {
    coords: Vec<Rational>,
}

impl TropicalPoint {
    /// Subtracts the mean so that the coordinates sum to zero.
    pub fn normalize(raw: Vec<Rational>) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::Dimension { min: 2, got: raw.len() });
        }
        Ok(TropicalPoint { coords: normalized(raw) })
    }

    pub fn from_ints(raw: &[i64]) -> Result<Self> {
        Self::normalize(raw.iter().map(|&v| int(v)).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.coords
    }
}

impl fmt::Display for TropicalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        f.write_str(&parts.join(" "))
    }
}

fn normalized(mut raw: Vec<Rational>) -> Vec<Rational> {
    let n = int(raw.len() as i64);
    let shift = raw.iter().sum::<Rational>() / n;
    for c in raw.iter_mut() {
        *c -= &shift;
    }
    raw
}

/// `m` sites in the torus, one per row, each with a positive integer
/// multiplicity. Rows are stored normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteMatrix {
    rows: Vec<Vec<Rational>>,
    weights: Vec<u64>,
    n: usize,
}

impl SiteMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let m = rows.len();
        Self::with_weights(rows, vec![1; m])
    }

    /// A weight-`w` row behaves exactly like `w` identical rows.
    pub fn with_weights(rows: Vec<Vec<Rational>>, weights: Vec<u64>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::NoSites);
        };
        let n = first.len();
        if n < 2 {
            return Err(Error::Dimension { min: 2, got: n });
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Ragged { row, got: r.len(), expected: n });
            }
        }
        if weights.len() != rows.len() {
            return Err(Error::Weights(format!("{} weights for {} sites", weights.len(), rows.len())));
        }
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(Error::Weights(format!("site {i} has weight 0")));
        }
        let rows = rows.into_iter().map(normalized).collect();
        Ok(SiteMatrix { rows, weights, n })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn from_points(points: &[TropicalPoint]) -> Result<Self> {
        Self::new(points.iter().map(|p| p.coords.clone()).collect())
    }

    /// Number of distinct rows (not counting multiplicity).
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn weight(&self, i: usize) -> u64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Number of sites counted with multiplicity.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn site(&self, i: usize) -> TropicalPoint {
        TropicalPoint { coords: self.rows[i].clone() }
    }

    fn check_point(&self, x: &TropicalPoint) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: x.dim() });
        }
        Ok(())
    }

    /// `sum_i w_i * d_asym(v_i, x)`, the Fermat–Weber objective.
    pub fn objective(&self, x: &TropicalPoint) -> Result<Rational> {
        self.check_point(x)?;
        let mut total = Rational::zero();
        for (row, &w) in self.rows.iter().zip(&self.weights) {
            total += d_asym_raw(row, x.coords())? * int(w as i64);
        }
        Ok(total)
    }
}

/// Asymmetric tropical distance `sum(b - a) - n * min(b - a)`.
pub fn d_asym(a: &TropicalPoint, b: &TropicalPoint) -> Result<Rational> {
    d_asym_raw(a.coords(), b.coords())
}

/// Same as [`d_asym`] on arbitrary (unnormalized) representatives.
pub fn d_asym_raw(a: &[Rational], b: &[Rational]) -> Result<Rational> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::Dimension { min: 1, got: 0 });
    }
    let diffs: Vec<Rational> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let min = diffs.iter().min().cloned().unwrap_or_default();
    let total: Rational = diffs.iter().sum();
    Ok(total - min * int(a.len() as i64))
}

/// Symmetric tropical distance `max(a - b) - min(a - b)`.
pub fn d_sym(a: &TropicalPoint, b: &TropicalPoint) -> Result<Rational> {
    d_sym_raw(a.coords(), b.coords())
}

pub fn d_sym_raw(a: &[Rational], b: &[Rational]) -> Result<Rational> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let diffs: Vec<Rational> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    match (diffs.iter().max(), diffs.iter().min()) {
        (Some(hi), Some(lo)) => Ok(hi - lo),
        _ => Err(Error::Dimension { min: 1, got: 0 }),
    }
}

/// Bipartite graph between site rows `0..m` and coordinates `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Covector {
    m: usize,
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Covector {
    pub fn from_edges(m: usize, n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges.into_iter().inspect(|&(i, j)| assert!(i < m && j < n)).collect();
        Covector { m, n, edges }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges `(row, column)` in lexicographic order, zero-based.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    pub fn row_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((i, 0)..(i + 1, 0)).map(|&(_, j)| j)
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.m];
        for &(i, _) in &self.edges {
            deg[i] += 1;
        }
        deg
    }

    pub fn is_subgraph_of(&self, other: &Covector) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// True when the edges form a spanning tree of `K_{m,n}`.
    pub fn is_spanning_tree(&self) -> bool {
        if self.edges.len() + 1 != self.m + self.n {
            return false;
        }
        let mut uf = UnionFind::new(self.m + self.n);
        self.edges.iter().all(|&(i, j)| uf.union(i, self.m + j))
    }
}

/// Tight pairs `(i, j)` with `v_ij - x_j = max_k (v_ik - x_k)`.
pub fn covector_of(x: &TropicalPoint, sites: &SiteMatrix) -> Result<Covector> {
    sites.check_point(x)?;
    let mut edges = BTreeSet::new();
    for (i, row) in sites.rows().iter().enumerate() {
        let slack: Vec<Rational> = row.iter().zip(x.coords()).map(|(v, xj)| v - xj).collect();
        let max = slack.iter().max().expect("n >= 2");
        for (j, s) in slack.iter().enumerate() {
            if s == max {
                edges.insert((i, j));
            }
        }
    }
    Ok(Covector { m: sites.m(), n: sites.n(), edges })
}

/// Degree of every coordinate node; the coarse type of the point.
pub fn column_degrees(c: &Covector) -> Vec<usize> {
    let mut deg = vec![0; c.n];
    for &(_, j) in &c.edges {
        deg[j] += 1;
    }
    deg
}

/// Whether `u` evenly splits the sites: for every coordinate subset `J`,
/// the sites lying in the sector union `S_J(u)` carry at least a
/// `|J| / n` share of the total weight.
pub fn evenly_splits(u: &TropicalPoint, sites: &SiteMatrix) -> Result<bool> {
    if sites.n() <= ENUMERATION_LIMIT {
        evenly_splits_by_enumeration(u, sites)
    } else {
        evenly_splits_by_flow(u, sites)
    }
}

/// Checks every nonempty `J` directly against sector membership
/// `max_{j in J}(s_j - u_j) >= max_{i not in J}(s_i - u_i)`.
pub fn evenly_splits_by_enumeration(u: &TropicalPoint, sites: &SiteMatrix) -> Result<bool> {
    sites.check_point(u)?;
    let n = sites.n();
    if n >= usize::BITS as usize - 1 {
        return Err(Error::Input(format!("cannot enumerate subsets of {n} coordinates")));
    }
    let offsets: Vec<Vec<Rational>> =
        sites.rows().iter().map(|row| row.iter().zip(u.coords()).map(|(s, uj)| s - uj).collect()).collect();
    let total = sites.total_weight() as u128;
    for mask in 1usize..(1 << n) {
        let size = mask.count_ones() as u128;
        let mut inside: u128 = 0;
        for (offset, &w) in offsets.iter().zip(sites.weights()) {
            let mut in_max: Option<&Rational> = None;
            let mut out_max: Option<&Rational> = None;
            for (j, value) in offset.iter().enumerate() {
                let slot = if mask & (1 << j) != 0 { &mut in_max } else { &mut out_max };
                if slot.is_none_or(|cur| value > cur) {
                    *slot = Some(value);
                }
            }
            let in_sector = match (in_max, out_max) {
                (Some(a), Some(b)) => a >= b,
                (Some(_), None) => true,
                (None, _) => false,
            };
            if in_sector {
                inside += w as u128;
            }
        }
        if (n as u128) * inside < total * size {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Feasibility of a transportation plan (row sums `n·w_i`, column sums
/// `sum w`) supported on the covector of `u`.
pub fn evenly_splits_by_flow(u: &TropicalPoint, sites: &SiteMatrix) -> Result<bool> {
    let cov = covector_of(u, sites)?;
    let n = sites.n() as u128;
    let supply: Vec<u128> = sites.weights().iter().map(|&w| w as u128 * n).collect();
    let demand = vec![sites.total_weight() as u128; sites.n()];
    Ok(flow::bipartite_saturates(&supply, &demand, cov.edges()))
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(size: usize) -> Self {
        UnionFind { parent: (0..size).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
