//! Fermat–Weber points and the full Fermat–Weber polytrope.
//!
//! The polytrope is described by its tight bounds `x_k - x_l <= a_kl`.
//! Two routes compute them:
//!
//! * [`FacetMethod::ShortestPaths`] (default): fix one optimal plan `y*`.
//!   By complementary slackness the optimal face is cut out of the
//!   feasible set by `t_i + x_j = v_ij` on the support of `y*`, which with
//!   `t_i + x_j >= v_ij` everywhere is a system of difference constraints
//!   on `m + n` nodes. Each `a_kl` is a shortest-path distance.
//! * [`FacetMethod::LinearPrograms`]: one exact LP per ordered pair,
//!   maximizing `x_k - x_l` over the optimal face with `sum w_i t_i = p*/n`.
//!   The `n² - n` programs run in parallel on the current rayon pool.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome, Relation, Sense};
use crate::rational::{format_rational, int, Rational};
use crate::transport::{recover_primal, solve_transportation, TransportPlan};
use crate::tropical::{SiteMatrix, TropicalPoint, UnionFind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FacetMethod {
    #[default]
    ShortestPaths,
    LinearPrograms,
}

/// `{x : x_k - x_l <= a_kl}` in the torus, with `a` shortest-path closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytrope {
    bounds: Vec<Vec<Rational>>,
    optimal_value: Rational,
}

impl Polytrope {
    /// Builds a polytrope from arbitrary finite bounds, closing them under
    /// `a_kl <= a_kj + a_jl`. Fails when the bounds describe an empty set.
    pub fn from_bounds(bounds: Vec<Vec<Rational>>, optimal_value: Rational) -> Result<Self> {
        let n = bounds.len();
        if n < 2 {
            return Err(Error::Dimension { min: 2, got: n });
        }
        if let Some(row) = bounds.iter().position(|r| r.len() != n) {
            return Err(Error::Ragged { row, got: bounds[row].len(), expected: n });
        }
        let mut a = bounds;
        for (k, row) in a.iter_mut().enumerate() {
            if row[k].is_positive() {
                row[k] = Rational::zero();
            }
        }
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let via = &a[k][j] + &a[j][l];
                    if via < a[k][l] {
                        a[k][l] = via;
                    }
                }
            }
        }
        if (0..n).any(|k| a[k][k].is_negative()) {
            return Err(Error::Input("bounds describe an empty polytrope".into()));
        }
        Ok(Polytrope { bounds: a, optimal_value })
    }

    /// The single point `x` as a polytrope.
    pub fn point(x: &TropicalPoint) -> Self {
        let c = x.coords();
        let bounds = c.iter().map(|xk| c.iter().map(|xl| xk - xl).collect()).collect();
        Polytrope { bounds, optimal_value: Rational::zero() }
    }

    pub fn n(&self) -> usize {
        self.bounds.len()
    }

    /// `a_kl`, the tight upper bound on `x_k - x_l`.
    pub fn bound(&self, k: usize, l: usize) -> &Rational {
        &self.bounds[k][l]
    }

    pub fn bounds(&self) -> &[Vec<Rational>] {
        &self.bounds
    }

    /// `p*`, the minimal weighted sum of distances from the sites.
    pub fn optimal_value(&self) -> &Rational {
        &self.optimal_value
    }

    pub fn is_closed(&self) -> bool {
        let n = self.n();
        (0..n).all(|k| {
            self.bounds[k][k].is_zero()
                && (0..n).all(|l| {
                    !(&self.bounds[k][l] + &self.bounds[l][k]).is_negative()
                        && (0..n).all(|j| self.bounds[k][l] <= &self.bounds[k][j] + &self.bounds[j][l])
                })
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct PolytropeJson {
            p_star: String,
            bounds: Vec<Vec<String>>,
            tropical_vertices: Vec<Vec<String>>,
            dimension: usize,
        }
        let json = PolytropeJson {
            p_star: format_rational(&self.optimal_value),
            bounds: self.bounds.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
            tropical_vertices: tropical_vertices(self)
                .iter()
                .map(|v| v.coords().iter().map(format_rational).collect())
                .collect(),
            dimension: dimension(self),
        };
        serde_json::to_value(json).expect("plain data serializes")
    }
}

/// One Fermat–Weber point: the dual potentials of an optimal basis.
pub fn fw_point(sites: &SiteMatrix) -> Result<TropicalPoint> {
    let plan = solve_transportation(sites)?;
    Ok(recover_primal(&plan, sites)?.x)
}

pub fn fw_polytrope(sites: &SiteMatrix) -> Result<Polytrope> {
    fw_polytrope_with(sites, FacetMethod::default())
}

pub fn fw_polytrope_with(sites: &SiteMatrix, method: FacetMethod) -> Result<Polytrope> {
    let plan = solve_transportation(sites)?;
    match method {
        FacetMethod::ShortestPaths => bounds_by_shortest_paths(sites, &plan),
        FacetMethod::LinearPrograms => bounds_by_linear_programs(sites, &plan),
    }
}

fn bounds_by_shortest_paths(sites: &SiteMatrix, plan: &TransportPlan) -> Result<Polytrope> {
    let (m, n) = (sites.m(), sites.n());
    let size = m + n;
    // Node i < m carries -t_i, node m + j carries x_j. dist[u][v] bounds v - u.
    let mut dist: Vec<Vec<Option<Rational>>> = vec![vec![None; size]; size];
    for (u, row) in dist.iter_mut().enumerate() {
        row[u] = Some(Rational::zero());
    }
    #[allow(clippy::needless_range_loop)]
    for i in 0..m {
        for j in 0..n {
            dist[m + j][i] = Some(-sites.entry(i, j).clone());
            if plan.flow()[i][j].is_positive() {
                dist[i][m + j] = Some(sites.entry(i, j).clone());
            }
        }
    }
    for via in 0..size {
        let through = dist[via].clone();
        for row in dist.iter_mut() {
            let Some(to_via) = row[via].clone() else {
                continue;
            };
            for (cell, onward) in row.iter_mut().zip(&through) {
                if let Some(onward) = onward {
                    let candidate = &to_via + onward;
                    if cell.as_ref().is_none_or(|cur| candidate < *cur) {
                        *cell = Some(candidate);
                    }
                }
            }
        }
    }
    if (0..size).any(|u| dist[u][u].as_ref().is_some_and(|d| d.is_negative())) {
        return Err(Error::Invariant("optimal face is empty: plan is not optimal".into()));
    }
    let mut bounds = vec![vec![Rational::zero(); n]; n];
    for (k, row) in bounds.iter_mut().enumerate() {
        for (l, slot) in row.iter_mut().enumerate() {
            *slot = dist[m + l][m + k]
                .clone()
                .ok_or_else(|| Error::Invariant("coordinate unreachable in constraint graph".into()))?;
        }
    }
    Ok(Polytrope { bounds, optimal_value: plan.objective().clone() })
}

/// The pool of constraints shared by every facet program, over variables
/// `t_0..t_m` followed by `x_0..x_n`.
fn facet_program(sites: &SiteMatrix, p_star: &Rational, k: usize, l: usize) -> Result<LinearProgram> {
    let (m, n) = (sites.m(), sites.n());
    let mut objective = vec![Rational::zero(); m + n];
    objective[m + k] = int(1);
    objective[m + l] = int(-1);
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for i in 0..m {
        for j in 0..n {
            lp.add_sparse(&[(i, int(1)), (m + j, int(1))], Relation::Ge, sites.entry(i, j).clone())?;
        }
    }
    let sum_x: Vec<_> = (0..n).map(|j| (m + j, int(1))).collect();
    lp.add_sparse(&sum_x, Relation::Eq, Rational::zero())?;
    let sum_t: Vec<_> = (0..m).map(|i| (i, int(sites.weight(i) as i64))).collect();
    lp.add_sparse(&sum_t, Relation::Eq, p_star / int(n as i64))?;
    Ok(lp)
}

fn bounds_by_linear_programs(sites: &SiteMatrix, plan: &TransportPlan) -> Result<Polytrope> {
    let n = sites.n();
    let p_star = plan.objective().clone();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (0..n).map(move |l| (k, l))).filter(|(k, l)| k != l).collect();
    let values: Vec<Result<Rational>> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let lp = facet_program(sites, &p_star, k, l)?;
            match lp::solve(&lp)? {
                LpOutcome::Optimal { value, .. } => Ok(value),
                other => Err(Error::Invariant(format!("facet program ({k},{l}) is {other:?}"))),
            }
        })
        .collect();
    let mut bounds = vec![vec![Rational::zero(); n]; n];
    for (&(k, l), value) in pairs.iter().zip(values) {
        bounds[k][l] = value?;
    }
    Ok(Polytrope { bounds, optimal_value: p_star })
}

/// `A_k = normalize(-a_k1, …, -a_kn)` for every `k`, duplicates removed
/// (first occurrence kept).
pub fn tropical_vertices(p: &Polytrope) -> Vec<TropicalPoint> {
    let mut out: Vec<TropicalPoint> = Vec::new();
    for row in &p.bounds {
        let v = TropicalPoint::normalize(row.iter().map(|a| -a.clone()).collect()).expect("n >= 2");
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Membership by the `n² - n` bound checks.
pub fn contains(p: &Polytrope, x: &TropicalPoint) -> Result<bool> {
    if x.dim() != p.n() {
        return Err(Error::DimensionMismatch { left: p.n(), right: x.dim() });
    }
    let c = x.coords();
    Ok((0..p.n()).all(|k| (0..p.n()).all(|l| &c[k] - &c[l] <= p.bounds[k][l])))
}

/// Dimension in the torus: coordinates whose difference is pinned
/// (`a_kl + a_lk = 0`) collapse into one class; dimension is classes − 1.
pub fn dimension(p: &Polytrope) -> usize {
    let n = p.n();
    let mut uf = UnionFind::new(n);
    let mut classes = n;
    for k in 0..n {
        for l in k + 1..n {
            if (&p.bounds[k][l] + &p.bounds[l][k]).is_zero() && uf.union(k, l) {
                classes -= 1;
            }
        }
    }
    classes - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{example_sites, random_sites, staircase};
    use crate::rational::ratio;
    use crate::tropical::evenly_splits;
    use num_integer::Integer;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(v: &[i64]) -> TropicalPoint {
        TropicalPoint::from_ints(v).unwrap()
    }

    #[test]
    fn example_is_a_point_polytrope() {
        let sites = example_sites();
        assert_eq!(fw_point(&sites).unwrap(), pt(&[9, -6, -3]));
        let p = fw_polytrope(&sites).unwrap();
        assert_eq!(p, Polytrope { bounds: Polytrope::point(&pt(&[9, -6, -3])).bounds, optimal_value: int(72) });
        assert_eq!(p.bound(0, 1), &int(15));
        assert_eq!(p.bound(1, 0), &int(-15));
        assert_eq!(dimension(&p), 0);
        assert_eq!(tropical_vertices(&p), vec![pt(&[9, -6, -3])]);
        assert_eq!(fw_polytrope_with(&sites, FacetMethod::LinearPrograms).unwrap(), p);
    }

    #[test]
    fn single_site_polytrope() {
        let sites = SiteMatrix::from_ints(&[&[1, 5, -3]]).unwrap();
        let p = fw_polytrope(&sites).unwrap();
        assert_eq!(p.bounds(), Polytrope::point(&sites.site(0)).bounds());
        assert_eq!(dimension(&p), 0);
        assert_eq!(fw_point(&sites).unwrap(), sites.site(0));
    }

    #[test]
    fn two_by_two_staircase_is_a_segment() {
        // Sites (0,0) and (0,1): any x with x_2 - x_1 in [0, 1] is a median.
        let p = fw_polytrope(&staircase(2, 2)).unwrap();
        assert_eq!(dimension(&p), 1);
        assert_eq!(p.bound(1, 0), &int(1));
        assert_eq!(p.bound(0, 1), &int(0));
        let verts = tropical_vertices(&p);
        assert_eq!(verts.len(), 2);
        assert!(verts.contains(&pt(&[0, 0])));
        assert!(verts.contains(&TropicalPoint::normalize(vec![int(0), int(1)]).unwrap()));
    }

    #[test]
    fn staircase_dimensions_and_vertices() {
        for (m, n) in [(2, 2), (4, 2), (3, 3), (6, 4), (6, 9), (4, 4)] {
            let p = fw_polytrope(&staircase(m, n)).unwrap();
            assert_eq!(dimension(&p), m.gcd(&n) - 1, "staircase {m}x{n}");
            let verts = tropical_vertices(&p);
            assert!(verts.len() <= n);
            for v in &verts {
                assert!(contains(&p, v).unwrap());
            }
        }
    }

    #[test]
    fn contains_examples() {
        let x = pt(&[9, -6, -3]);
        let p = Polytrope::point(&x);
        assert!(contains(&p, &x).unwrap());
        let moved = TropicalPoint::normalize(vec![int(10), int(-7), int(-3)]).unwrap();
        assert!(!contains(&p, &moved).unwrap());
        assert!(contains(&p, &pt(&[1, 2])).is_err());
    }

    #[test]
    fn average_of_tropical_vertices_is_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..60 {
            let m = rng.gen_range(1..7);
            let n = rng.gen_range(2..5);
            let sites = random_sites(&mut rng, m, n, 2, 1);
            let p = fw_polytrope(&sites).unwrap();
            assert!(p.is_closed());
            let verts = tropical_vertices(&p);
            let mut avg = vec![Rational::zero(); n];
            for v in &verts {
                for (a, c) in avg.iter_mut().zip(v.coords()) {
                    *a += c;
                }
            }
            let avg = TropicalPoint::normalize(avg.into_iter().map(|a| a / int(verts.len() as i64)).collect()).unwrap();
            assert!(contains(&p, &avg).unwrap());
            assert!(evenly_splits(&avg, &sites).unwrap());
            assert_eq!(sites.objective(&avg).unwrap(), *p.optimal_value());
        }
    }

    #[test]
    fn shortest_paths_agree_with_facet_programs() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..60 {
            let m = rng.gen_range(1..6);
            let n = rng.gen_range(2..5);
            let sites = random_sites(&mut rng, m, n, 2, 2);
            assert_eq!(
                fw_polytrope_with(&sites, FacetMethod::ShortestPaths).unwrap(),
                fw_polytrope_with(&sites, FacetMethod::LinearPrograms).unwrap()
            );
        }
    }

    #[test]
    fn weights_match_repeated_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..40 {
            let base = random_sites(&mut rng, 3, 4, 3, 1);
            let weights: Vec<u64> = (0..3).map(|_| rng.gen_range(1..4)).collect();
            let weighted = SiteMatrix::with_weights(base.rows().to_vec(), weights.clone()).unwrap();
            let repeated: Vec<Vec<Rational>> = base
                .rows()
                .iter()
                .zip(&weights)
                .flat_map(|(r, &w)| std::iter::repeat_n(r.clone(), w as usize))
                .collect();
            let repeated = SiteMatrix::new(repeated).unwrap();
            assert_eq!(fw_polytrope(&weighted).unwrap(), fw_polytrope(&repeated).unwrap());
            assert_eq!(
                fw_polytrope_with(&weighted, FacetMethod::LinearPrograms).unwrap(),
                fw_polytrope(&repeated).unwrap()
            );
        }
    }

    #[test]
    fn translation_equivariance_and_row_shift_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..40 {
            let sites = random_sites(&mut rng, 4, 3, 4, 2);
            let c = [ratio(1, 2), int(-3), int(7)];
            let shifted = SiteMatrix::new(
                sites.rows().iter().map(|r| r.iter().zip(&c).map(|(v, cj)| v + cj).collect()).collect(),
            )
            .unwrap();
            let p = fw_polytrope(&sites).unwrap();
            let q = fw_polytrope(&shifted).unwrap();
            for k in 0..3 {
                for l in 0..3 {
                    assert_eq!(q.bound(k, l), &(p.bound(k, l) + &c[k] - &c[l]));
                }
            }
            let row_shifted = SiteMatrix::new(
                sites
                    .rows()
                    .iter()
                    .enumerate()
                    .map(|(i, r)| r.iter().map(|v| v + int(i as i64 + 2)).collect())
                    .collect(),
            )
            .unwrap();
            assert_eq!(fw_polytrope(&row_shifted).unwrap(), p);
        }
    }

    #[test]
    fn fw_point_row_permutation_invariance_and_column_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        for _ in 0..40 {
            // gcd(5, 3) = 1 so the point is unique and pivot rules cannot matter.
            let sites = random_sites(&mut rng, 5, 3, 5, 2);
            let x = fw_point(&sites).unwrap();
            let mut rows = sites.rows().to_vec();
            rows.reverse();
            assert_eq!(fw_point(&SiteMatrix::new(rows).unwrap()).unwrap(), x);
            let perm = [2, 0, 1];
            let permuted: Vec<Vec<Rational>> =
                sites.rows().iter().map(|r| perm.iter().map(|&j| r[j].clone()).collect()).collect();
            let y = fw_point(&SiteMatrix::new(permuted).unwrap()).unwrap();
            let expected: Vec<Rational> = perm.iter().map(|&j| x.coords()[j].clone()).collect();
            assert_eq!(y.coords(), expected.as_slice());
        }
    }

    #[test]
    fn from_bounds_closes_and_rejects_empty() {
        let p = Polytrope::from_bounds(
            vec![vec![int(0), int(5), int(1)], vec![int(5), int(0), int(1)], vec![int(1), int(1), int(0)]],
            int(0),
        )
        .unwrap();
        assert_eq!(p.bound(0, 1), &int(2));
        assert!(p.is_closed());
        assert!(Polytrope::from_bounds(vec![vec![int(0), int(-1)], vec![int(0), int(0)]], int(0)).is_err());
    }
}
