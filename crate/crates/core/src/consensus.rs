//! Tropical median consensus: the ordinary average of the tropical
//! vertices of the asymmetric Fermat–Weber polytrope of the input
//! ultrametrics, read back as an equidistant tree.

use std::collections::HashMap;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fw::{dimension, fw_polytrope_with, tropical_vertices, FacetMethod};
use crate::rational::{format_rational, int, Rational};
use crate::trees::{
    common_taxa, make_equidistant, pair_count, tree_to_ultrametric, ultrametric_to_tree, PhyloTree, Ultrametric,
};
use crate::tropical::{d_asym_raw, SiteMatrix, TropicalPoint};

#[derive(Debug, Clone, Default)]
pub struct ConsensusOptions {
    /// Multiplicity of each input; all ones when absent.
    pub weights: Option<Vec<u64>>,
    /// Stretch pendant edges of non-equidistant inputs instead of failing.
    pub adjust_equidistant: bool,
    pub facet_method: FacetMethod,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusResult {
    pub tree: PhyloTree,
    pub ultrametric: Ultrametric,
    pub fw_dimension: usize,
    pub tropical_vertex_count: usize,
    /// Minimal weighted sum of asymmetric distances from the inputs.
    pub p_star: Rational,
    /// `d_asym(input_i, median)` for each input, unweighted.
    pub distances: Vec<Rational>,
    /// Deduplicated tropical vertices, normalized to coordinate sum zero.
    pub tropical_vertices: Vec<TropicalPoint>,
    /// Largest input distance; fixes the representative of every output.
    pub height_reference: Rational,
}

impl ConsensusResult {
    /// Tropical vertex `k` lifted to the same representative as the median.
    /// With two taxa the only vertex is the median itself.
    pub fn vertex_ultrametric(&self, k: usize) -> Result<Ultrametric> {
        match self.tropical_vertices.get(k) {
            Some(v) => lift(self.ultrametric.taxa().to_vec(), v.coords(), &self.height_reference),
            None if k == 0 && self.tropical_vertices.is_empty() => Ok(self.ultrametric.clone()),
            None => Err(Error::Input(format!("no tropical vertex {k}"))),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct UltrametricJson {
            pairs: Vec<String>,
            d: Vec<String>,
        }
        #[derive(Serialize)]
        struct ResultJson {
            tree: String,
            ultrametric: UltrametricJson,
            fw_dimension: usize,
            tropical_vertex_count: usize,
            p_star: String,
            distances: Vec<String>,
        }
        let json = ResultJson {
            tree: self.tree.to_string(),
            ultrametric: UltrametricJson {
                pairs: self.ultrametric.pair_labels(),
                d: self.ultrametric.values().iter().map(format_rational).collect(),
            },
            fw_dimension: self.fw_dimension,
            tropical_vertex_count: self.tropical_vertex_count,
            p_star: format_rational(&self.p_star),
            distances: self.distances.iter().map(format_rational).collect(),
        };
        serde_json::to_value(json).expect("plain data serializes")
    }
}

/// Shifts `coords` along `1` so the largest entry equals `top`.
fn lift(taxa: Vec<String>, coords: &[Rational], top: &Rational) -> Result<Ultrametric> {
    let shift = top - coords.iter().max().expect("nonempty");
    let d = coords.iter().map(|c| c + &shift).collect();
    Ultrametric::new(taxa, d).map_err(|e| Error::Invariant(format!("median left tree space: {e}")))
}

/// Equidistant inputs as ultrametrics on a common taxa set.
pub fn input_ultrametrics(trees: &[PhyloTree], adjust_equidistant: bool) -> Result<Vec<Ultrametric>> {
    let ultrametrics = trees
        .iter()
        .enumerate()
        .map(|(k, t)| {
            if t.is_equidistant() {
                tree_to_ultrametric(t)
            } else if adjust_equidistant {
                tree_to_ultrametric(&make_equidistant(t))
            } else {
                Err(Error::Input(format!("input {k}: {}", Error::NotEquidistant(t.raised_leaves()))))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    common_taxa(ultrametrics.iter().map(|u| u.taxa()))?;
    Ok(ultrametrics)
}

pub fn tropical_median(trees: &[PhyloTree], options: &ConsensusOptions) -> Result<ConsensusResult> {
    if trees.is_empty() {
        return Err(Error::NoSites);
    }
    let inputs = input_ultrametrics(trees, options.adjust_equidistant)?;
    median_of_ultrametrics(&inputs, options.weights.as_deref(), options.facet_method)
}

pub fn median_of_ultrametrics(
    inputs: &[Ultrametric],
    weights: Option<&[u64]>,
    method: FacetMethod,
) -> Result<ConsensusResult> {
    let taxa = common_taxa(inputs.iter().map(|u| u.taxa()))?;
    let weights = weights.map(<[u64]>::to_vec).unwrap_or_else(|| vec![1; inputs.len()]);
    if weights.len() != inputs.len() {
        return Err(Error::Weights(format!("{} weights for {} trees", weights.len(), inputs.len())));
    }
    let top = inputs.iter().flat_map(|u| u.values()).max().cloned().unwrap_or_else(Rational::zero);
    let len = pair_count(taxa.len());
    if len == 0 {
        return Err(Error::Input("consensus needs at least two taxa".into()));
    }
    if len == 1 {
        // One pairwise distance: the torus is a point.
        let ultrametric = Ultrametric::new(taxa, vec![top.clone()])?;
        return Ok(ConsensusResult {
            tree: ultrametric_to_tree(&ultrametric),
            ultrametric,
            fw_dimension: 0,
            tropical_vertex_count: 1,
            p_star: Rational::zero(),
            distances: vec![Rational::zero(); inputs.len()],
            tropical_vertices: Vec::new(),
            height_reference: top,
        });
    }
    let rows: Vec<Vec<Rational>> = inputs.iter().map(|u| u.values().to_vec()).collect();
    let sites = SiteMatrix::with_weights(rows, weights)?;
    let polytrope = fw_polytrope_with(&sites, method)?;
    let vertices = tropical_vertices(&polytrope);
    let mut sum = vec![Rational::zero(); len];
    for v in &vertices {
        for (s, c) in sum.iter_mut().zip(v.coords()) {
            *s += c;
        }
    }
    let count = int(vertices.len() as i64);
    let average: Vec<Rational> = sum.into_iter().map(|s| s / &count).collect();
    let ultrametric = lift(taxa, &average, &top)?;
    let distances = inputs.iter().map(|u| d_asym_raw(u.values(), ultrametric.values())).collect::<Result<Vec<_>>>()?;
    let attained: Rational = distances.iter().zip(sites.weights()).map(|(d, &w)| d * int(w as i64)).sum();
    if &attained != polytrope.optimal_value() {
        return Err(Error::Invariant("average of tropical vertices is not a Fermat–Weber point".into()));
    }
    Ok(ConsensusResult {
        tree: ultrametric_to_tree(&ultrametric),
        ultrametric,
        fw_dimension: dimension(&polytrope),
        tropical_vertex_count: vertices.len(),
        p_star: polytrope.optimal_value().clone(),
        distances,
        tropical_vertices: vertices,
        height_reference: top,
    })
}

/// Violations of unanimity (U), anonymity (A) and neutrality (N), each
/// described with the inputs that exposed it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegularityReport {
    pub unanimity: Vec<String>,
    pub anonymity: Vec<String>,
    pub neutrality: Vec<String>,
}

impl RegularityReport {
    pub fn holds(&self) -> bool {
        self.unanimity.is_empty() && self.anonymity.is_empty() && self.neutrality.is_empty()
    }
}

/// Re-runs the method on transformed inputs:
/// (U) `m` copies of each input return that input,
/// (A) `trials` shuffles of the inputs return the same median,
/// (N) `trials` random relabelings of the taxa commute with the method.
pub fn verify_regularity<R: Rng + ?Sized>(
    trees: &[PhyloTree],
    options: &ConsensusOptions,
    trials: usize,
    rng: &mut R,
) -> Result<RegularityReport> {
    let inputs = input_ultrametrics(trees, options.adjust_equidistant)?;
    let weights = options.weights.clone().unwrap_or_else(|| vec![1; inputs.len()]);
    let method = options.facet_method;
    let base = median_of_ultrametrics(&inputs, Some(&weights), method)?;
    let mut report = RegularityReport::default();

    for (k, u) in inputs.iter().enumerate() {
        let copies = vec![u.clone(); inputs.len()];
        let got = median_of_ultrametrics(&copies, None, method)?;
        if &got.ultrametric != u {
            report.unanimity.push(format!("{} copies of input {k} gave {}", inputs.len(), got.tree));
        }
    }

    let mut order: Vec<usize> = (0..inputs.len()).collect();
    for _ in 0..trials {
        order.shuffle(rng);
        let shuffled: Vec<Ultrametric> = order.iter().map(|&k| inputs[k].clone()).collect();
        let w: Vec<u64> = order.iter().map(|&k| weights[k]).collect();
        let got = median_of_ultrametrics(&shuffled, Some(&w), method)?;
        if got.ultrametric != base.ultrametric {
            report.anonymity.push(format!("order {order:?} gave {}", got.tree));
        }
    }

    let taxa = base.ultrametric.taxa().to_vec();
    for _ in 0..trials {
        let mut image = taxa.clone();
        image.shuffle(rng);
        let map: HashMap<String, String> = taxa.iter().cloned().zip(image).collect();
        let relabeled = inputs.iter().map(|u| u.relabel(&map)).collect::<Result<Vec<_>>>()?;
        let got = median_of_ultrametrics(&relabeled, Some(&weights), method)?;
        let expected = base.ultrametric.relabel(&map)?;
        if got.ultrametric != expected {
            report.neutrality.push(format!("relabeling {map:?} gave {} instead of {}", got.tree, expected.to_tree()));
        }
    }
    Ok(report)
}
