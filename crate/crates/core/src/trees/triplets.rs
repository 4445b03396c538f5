use std::collections::BTreeSet;
use std::fmt;

use super::common_taxa;
use super::ultrametric::{pair_count, Ultrametric};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tropical::TropicalPoint;

/// `ij|k`: taxa `i` and `j` (with `i < j`) are closer to each other than
/// either is to `k`. Indices refer to the sorted taxa list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootedTriplet {
    pub pair: (usize, usize),
    pub outgroup: usize,
}

impl RootedTriplet {
    pub fn display<'a>(&self, taxa: &'a [String]) -> impl fmt::Display + 'a {
        let t = *self;
        DisplayTriplet { t, taxa }
    }
}

struct DisplayTriplet<'a> {
    t: RootedTriplet,
    taxa: &'a [String],
}

impl fmt::Display for DisplayTriplet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.t.pair;
        write!(f, "{}{}|{}", self.taxa[i], self.taxa[j], self.taxa[self.t.outgroup])
    }
}

/// Every resolved triple: `ij|k` whenever `d_ij < d_ik`.
pub fn rooted_triplets(u: &Ultrametric) -> BTreeSet<RootedTriplet> {
    let n = u.n();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (ij, ik, jk) = (u.get(i, j), u.get(i, k), u.get(j, k));
                let found = if ij < ik && ij < jk {
                    Some(((i, j), k))
                } else if ik < ij && ik < jk {
                    Some(((i, k), j))
                } else if jk < ij && jk < ik {
                    Some(((j, k), i))
                } else {
                    None
                };
                if let Some((pair, outgroup)) = found {
                    out.insert(RootedTriplet { pair, outgroup });
                }
            }
        }
    }
    out
}

/// Outcome of the triplet Pareto checks with the offending triplets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoReport {
    pub pareto: bool,
    pub copareto: bool,
    /// Triplets shared by all inputs but missing from the output.
    pub lost_unanimous: Vec<RootedTriplet>,
    /// Output triplets present in no input.
    pub unsupported: Vec<RootedTriplet>,
}

pub fn check_pareto(inputs: &[Ultrametric], out: &Ultrametric) -> Result<ParetoReport> {
    common_taxa(inputs.iter().chain([out]).map(|u| u.taxa()))?;
    let sets: Vec<BTreeSet<RootedTriplet>> = inputs.iter().map(rooted_triplets).collect();
    let mine = rooted_triplets(out);
    let mut lost_unanimous = Vec::new();
    if let Some((first, rest)) = sets.split_first() {
        lost_unanimous =
            first.iter().filter(|t| rest.iter().all(|s| s.contains(t)) && !mine.contains(t)).copied().collect();
    }
    let unsupported: Vec<RootedTriplet> =
        mine.iter().filter(|t| !sets.iter().any(|s| s.contains(t))).copied().collect();
    Ok(ParetoReport {
        pareto: lost_unanimous.is_empty(),
        copareto: unsupported.is_empty(),
        lost_unanimous,
        unsupported,
    })
}

/// Which representative of each input's class `d + R·1` enters the max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Representative {
    /// Distances as given.
    #[default]
    Raw,
    /// Each vector shifted to coordinate sum zero; the maximum is shifted
    /// back so its largest entry equals the largest input distance.
    H,
}

/// Coordinatewise maximum of the inputs.
pub fn pointwise_max_consensus(inputs: &[Ultrametric], rep: Representative) -> Result<Ultrametric> {
    let taxa = common_taxa(inputs.iter().map(|u| u.taxa()))?;
    let len = pair_count(taxa.len());
    let vectors: Vec<Vec<Rational>> = match rep {
        Representative::Raw => inputs.iter().map(|u| u.values().to_vec()).collect(),
        Representative::H => {
            if len < 2 {
                return Err(Error::Dimension { min: 2, got: len });
            }
            inputs.iter().map(|u| u.to_point().map(TropicalPoint::into_coords)).collect::<Result<_>>()?
        }
    };
    let mut d = vectors[0].clone();
    for v in &vectors[1..] {
        for (a, b) in d.iter_mut().zip(v) {
            if b > a {
                *a = b.clone();
            }
        }
    }
    if rep == Representative::H {
        let target = inputs.iter().flat_map(|u| u.values()).max().expect("nonempty").clone();
        let shift = target - d.iter().max().expect("nonempty");
        for a in d.iter_mut() {
            *a += &shift;
        }
    }
    Ultrametric::new(taxa, d)
}
