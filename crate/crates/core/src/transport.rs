//! The central transportation problem
//!
//! ```text
//! maximize   sum_ij v_ij y_ij
//! subject to sum_j y_ij = n·w_i,   sum_i y_ij = W,   y >= 0
//! ```
//!
//! is the linear programming dual of the Fermat–Weber problem
//!
//! ```text
//! minimize   n · sum_i w_i t_i
//! subject to t_i + x_j >= v_ij,   sum_j x_j = 0.
//! ```
//!
//! It is solved by primal network simplex on `K_{m,n}` with exact
//! rationals. The basis is always a spanning tree, including degenerate
//! zero-flow arcs, and the dual potentials on that tree are the recovered
//! Fermat–Weber point.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};
use crate::tropical::{Covector, SiteMatrix, TropicalPoint};

/// A basic feasible transportation plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportPlan {
    flow: Vec<Vec<Rational>>,
    /// Spanning tree of `K_{m,n}` as `(row, column)` cells, sorted.
    basis: Vec<(usize, usize)>,
    objective: Rational,
}

impl TransportPlan {
    pub fn m(&self) -> usize {
        self.flow.len()
    }

    pub fn n(&self) -> usize {
        self.flow.first().map_or(0, Vec::len)
    }

    pub fn flow(&self) -> &[Vec<Rational>] {
        &self.flow
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn objective(&self) -> &Rational {
        &self.objective
    }

    /// Cells carrying positive flow.
    pub fn support(&self) -> Covector {
        let cells = self
            .flow
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, y)| y.is_positive()).map(move |(j, _)| (i, j)));
        Covector::from_edges(self.m(), self.n(), cells)
    }

    pub fn basis_graph(&self) -> Covector {
        Covector::from_edges(self.m(), self.n(), self.basis.iter().copied())
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.flow.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<Rational> {
        (0..self.n()).map(|j| self.flow.iter().map(|r| &r[j]).sum()).collect()
    }

    /// `{"flow": [[…]], "basis": [[i,j],…], "objective": "p/q"}`, zero-based
    /// indices, rationals as strings.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct PlanJson {
            flow: Vec<Vec<String>>,
            basis: Vec<[usize; 2]>,
            objective: String,
        }
        let json = PlanJson {
            flow: self.flow.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
            basis: self.basis.iter().map(|&(i, j)| [i, j]).collect(),
            objective: format_rational(&self.objective),
        };
        serde_json::to_value(json).expect("plain data serializes")
    }
}

/// Optimal `(t, x)` for the Fermat–Weber program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimalSolution {
    pub t: Vec<Rational>,
    pub x: TropicalPoint,
    /// `n · sum_i w_i t_i`
    pub value: Rational,
}

/// Staircase basis from the northwest corner rule. When a row and a column
/// are exhausted together the walk moves East, keeping a zero-flow cell in
/// the basis so that it stays a spanning tree.
pub fn northwest_corner(row_sums: &[Rational], col_sums: &[Rational]) -> Result<TransportPlan> {
    let (m, n) = (row_sums.len(), col_sums.len());
    if m == 0 || n == 0 {
        return Err(Error::Infeasible("empty marginals".into()));
    }
    if row_sums.iter().chain(col_sums).any(|v| !v.is_positive()) {
        return Err(Error::Infeasible("marginals must be positive".into()));
    }
    let rs: Rational = row_sums.iter().sum();
    let cs: Rational = col_sums.iter().sum();
    if rs != cs {
        return Err(Error::Infeasible(format!(
            "row total {} differs from column total {}",
            format_rational(&rs),
            format_rational(&cs)
        )));
    }
    let mut flow = vec![vec![Rational::zero(); n]; m];
    let mut basis = Vec::with_capacity(m + n - 1);
    let mut row_left = row_sums.to_vec();
    let mut col_left = col_sums.to_vec();
    let (mut i, mut j) = (0, 0);
    loop {
        let amount = row_left[i].clone().min(col_left[j].clone());
        row_left[i] -= &amount;
        col_left[j] -= &amount;
        flow[i][j] = amount;
        basis.push((i, j));
        if i == m - 1 && j == n - 1 {
            break;
        }
        if j < n - 1 && (col_left[j].is_zero() || i == m - 1) {
            j += 1;
        } else {
            i += 1;
        }
    }
    basis.sort_unstable();
    Ok(TransportPlan { flow, basis, objective: Rational::zero() })
}

struct Simplex<'a> {
    sites: &'a SiteMatrix,
    m: usize,
    n: usize,
    flow: Vec<Vec<Rational>>,
    in_basis: Vec<Vec<bool>>,
    basis: Vec<(usize, usize)>,
}

/// Node numbering: rows `0..m`, columns `m..m+n`.
impl Simplex<'_> {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for &(i, j) in &self.basis {
            adj[i].push(self.m + j);
            adj[self.m + j].push(i);
        }
        adj
    }

    /// Potentials `u_i + w_j = v_ij` on basis cells with `w_0 = 0`.
    fn potentials(&self, adj: &[Vec<usize>]) -> Result<(Vec<Rational>, Vec<Rational>)> {
        let (m, n) = (self.m, self.n);
        let mut pot: Vec<Option<Rational>> = vec![None; m + n];
        pot[m] = Some(Rational::zero());
        let mut queue = VecDeque::from([m]);
        while let Some(a) = queue.pop_front() {
            let pa = pot[a].clone().expect("visited");
            for &b in &adj[a] {
                if pot[b].is_some() {
                    continue;
                }
                let (i, j) = if a < m { (a, b - m) } else { (b, a - m) };
                pot[b] = Some(self.sites.entry(i, j) - &pa);
                queue.push_back(b);
            }
        }
        let mut out = Vec::with_capacity(m + n);
        for p in pot {
            out.push(p.ok_or_else(|| Error::Invariant("basis is not spanning".into()))?);
        }
        let x = out.split_off(m);
        Ok((out, x))
    }

    /// Tree path from node `from` to node `to`, as a node sequence.
    fn tree_path(adj: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; adj.len()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(a) = queue.pop_front() {
            if a == to {
                break;
            }
            for &b in &adj[a] {
                if prev[b] == usize::MAX {
                    prev[b] = a;
                    queue.push_back(b);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn run(&mut self) -> Result<()> {
        let (m, n) = (self.m, self.n);
        loop {
            let adj = self.adjacency();
            let (u, w) = self.potentials(&adj)?;
            // Bland: first nonbasic cell in row-major order with positive reduced profit.
            let entering = (0..m)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .find(|&(i, j)| !self.in_basis[i][j] && (self.sites.entry(i, j) - &u[i] - &w[j]).is_positive());
            let Some((ei, ej)) = entering else {
                return Ok(());
            };
            // Cycle: entering cell, then the tree path from column ej back to row ei.
            let path = Self::tree_path(&adj, m + ej, ei);
            let cells: Vec<(usize, usize)> =
                path.windows(2).map(|w| if w[0] < m { (w[0], w[1] - m) } else { (w[1], w[0] - m) }).collect();
            // Cells alternate -, +, -, ... starting next to the entering cell.
            let minus: Vec<(usize, usize)> = cells.iter().copied().step_by(2).collect();
            let theta = minus
                .iter()
                .map(|&(i, j)| self.flow[i][j].clone())
                .min()
                .ok_or_else(|| Error::Invariant("empty pivot cycle".into()))?;
            let leaving = minus
                .iter()
                .copied()
                .filter(|&(i, j)| self.flow[i][j] == theta)
                .min_by_key(|&(i, j)| i * n + j)
                .expect("theta attained");
            for (k, &(i, j)) in cells.iter().enumerate() {
                if k % 2 == 0 {
                    self.flow[i][j] -= &theta;
                } else {
                    self.flow[i][j] += &theta;
                }
            }
            self.flow[ei][ej] += &theta;
            self.in_basis[leaving.0][leaving.1] = false;
            self.in_basis[ei][ej] = true;
            let pos = self.basis.iter().position(|&c| c == leaving).expect("leaving is basic");
            self.basis[pos] = (ei, ej);
        }
    }
}

/// Optimal plan for the central transportation problem of `sites`
/// (row sums `n·w_i`, column sums `sum w`).
pub fn solve_transportation(sites: &SiteMatrix) -> Result<TransportPlan> {
    let (m, n) = (sites.m(), sites.n());
    let rows: Vec<Rational> = sites.weights().iter().map(|&w| int(w as i64) * int(n as i64)).collect();
    let cols = vec![int(sites.total_weight() as i64); n];
    let start = northwest_corner(&rows, &cols)?;
    let mut in_basis = vec![vec![false; n]; m];
    for &(i, j) in &start.basis {
        in_basis[i][j] = true;
    }
    let mut simplex = Simplex { sites, m, n, flow: start.flow, in_basis, basis: start.basis };
    simplex.run()?;
    let mut basis = simplex.basis;
    basis.sort_unstable();
    let objective =
        (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| sites.entry(i, j) * &simplex.flow[i][j]).sum();
    Ok(TransportPlan { flow: simplex.flow, basis, objective })
}

/// Recovers `(t, x)` from the basis tree of an optimal plan: start at
/// column 0 with `x_0 = 0`, propagate `t_i + x_j = v_ij` along the tree,
/// then move `x` onto the sum-zero hyperplane, compensating in `t`.
pub fn recover_primal(plan: &TransportPlan, sites: &SiteMatrix) -> Result<PrimalSolution> {
    let (m, n) = (sites.m(), sites.n());
    if plan.m() != m || plan.n() != n {
        return Err(Error::DimensionMismatch { left: m * n, right: plan.m() * plan.n() });
    }
    if !plan.basis_graph().is_spanning_tree() {
        return Err(Error::Invariant("basis is not a spanning tree".into()));
    }
    let mut in_basis = vec![vec![false; n]; m];
    for &(i, j) in &plan.basis {
        in_basis[i][j] = true;
    }
    let simplex = Simplex { sites, m, n, flow: Vec::new(), in_basis, basis: plan.basis.clone() };
    let (mut t, mut x) = simplex.potentials(&simplex.adjacency())?;
    let shift = x.iter().sum::<Rational>() / int(n as i64);
    for xj in x.iter_mut() {
        *xj -= &shift;
    }
    for ti in t.iter_mut() {
        *ti += &shift;
    }
    let weighted: Rational = t.iter().zip(sites.weights()).map(|(ti, &w)| ti * int(w as i64)).sum();
    let value = weighted * int(n as i64);
    let x = TropicalPoint::normalize(x)?;
    Ok(PrimalSolution { t, x, value })
}

impl PrimalSolution {
    /// `t_i + x_j >= v_ij` everywhere and `sum x = 0`.
    pub fn is_feasible(&self, sites: &SiteMatrix) -> bool {
        self.x.coords().iter().sum::<Rational>().is_zero()
            && (0..sites.m()).all(|i| (0..sites.n()).all(|j| &self.t[i] + &self.x.coords()[j] >= *sites.entry(i, j)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{example_sites, random_sites};
    use crate::rational::ratio;
    use crate::tropical::covector_of;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cells(list: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = list.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn northwest_corner_staircase_6_by_9() {
        let plan = northwest_corner(&vec![ratio(1, 6); 6], &vec![ratio(1, 9); 9]).unwrap();
        let expected = cells(&[
            (1, 1),
            (1, 2),
            (2, 2),
            (2, 3),
            (2, 4),
            (3, 4),
            (3, 5),
            (4, 5),
            (4, 6),
            (4, 7),
            (5, 7),
            (5, 8),
            (6, 8),
            (6, 9),
        ]);
        assert_eq!(plan.basis(), expected.as_slice());
        assert_eq!(plan.row_sums(), vec![ratio(1, 6); 6]);
        assert_eq!(plan.col_sums(), vec![ratio(1, 9); 9]);
        assert!(plan.basis_graph().is_spanning_tree());
    }

    #[test]
    fn northwest_corner_small_cases() {
        let plan = northwest_corner(&[int(5)], &[int(5)]).unwrap();
        assert_eq!(plan.basis(), &[(0, 0)]);
        assert_eq!(plan.flow()[0][0], int(5));

        let half = ratio(1, 2);
        let plan = northwest_corner(&[half.clone(), half.clone()], &[half.clone(), half]).unwrap();
        assert_eq!(plan.basis(), &[(0, 0), (0, 1), (1, 1)]);
        assert_eq!(plan.flow()[0][1], int(0));
    }

    #[test]
    fn northwest_corner_rejects_bad_marginals() {
        assert!(matches!(northwest_corner(&[int(1)], &[int(2)]), Err(Error::Infeasible(_))));
        assert!(northwest_corner(&[int(0), int(2)], &[int(2)]).is_err());
    }

    #[test]
    fn example_plan_and_recovery() {
        let sites = example_sites();
        let plan = solve_transportation(&sites).unwrap();
        assert_eq!(plan.objective(), &int(72));
        let transposed = [[3, 2, 0, 0, 0], [0, 0, 0, 3, 2], [0, 1, 3, 0, 1]];
        for (j, column) in transposed.iter().enumerate() {
            for (i, &f) in column.iter().enumerate() {
                assert_eq!(plan.flow()[i][j], int(f), "cell ({i},{j})");
            }
        }
        let primal = recover_primal(&plan, &sites).unwrap();
        assert_eq!(primal.t, [5, 4, 5, 7, 3].map(int).to_vec());
        assert_eq!(primal.x, TropicalPoint::from_ints(&[9, -6, -3]).unwrap());
        assert_eq!(primal.value, int(72));
    }

    #[test]
    fn single_site() {
        let sites = SiteMatrix::from_ints(&[&[7, 1, -2, 0]]).unwrap();
        let plan = solve_transportation(&sites).unwrap();
        assert_eq!(plan.flow()[0], vec![int(1); 4]);
        let primal = recover_primal(&plan, &sites).unwrap();
        assert_eq!(primal.x, sites.site(0));
        assert_eq!(primal.value, int(0));
        assert!(primal.t[0].is_zero());
    }

    #[test]
    fn non_spanning_basis_is_rejected() {
        let sites = example_sites();
        let mut plan = solve_transportation(&sites).unwrap();
        plan.basis.pop();
        assert!(matches!(recover_primal(&plan, &sites), Err(Error::Invariant(_))));
    }

    #[test]
    fn random_feasibility_and_complementary_slackness() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m = rng.gen_range(1..7);
            let n = rng.gen_range(2..5);
            let sites = random_sites(&mut rng, m, n, 4, 2);
            let plan = solve_transportation(&sites).unwrap();
            assert_eq!(plan.row_sums(), vec![int(n as i64); m]);
            assert_eq!(plan.col_sums(), vec![int(m as i64); n]);
            assert!(plan.flow().iter().flatten().all(|y| !y.is_negative() && y.is_integer()));
            assert!(plan.basis_graph().is_spanning_tree());
            assert!(plan.support().is_subgraph_of(&plan.basis_graph()));

            let primal = recover_primal(&plan, &sites).unwrap();
            assert!(primal.is_feasible(&sites));
            assert_eq!(&primal.value, plan.objective());
            for &(i, j) in plan.basis() {
                assert_eq!(&primal.t[i] + &primal.x.coords()[j], *sites.entry(i, j));
            }
            // Tight cells are exactly the covector at x; the support sits inside it.
            let cov = covector_of(&primal.x, &sites).unwrap();
            assert!(plan.support().is_subgraph_of(&cov));
            assert_eq!(sites.objective(&primal.x).unwrap(), primal.value);
        }
    }

    #[test]
    fn weak_duality_against_northwest_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let sites = random_sites(&mut rng, 4, 3, 5, 3);
            let rows = vec![int(3); 4];
            let cols = vec![int(4); 3];
            let start = northwest_corner(&rows, &cols).unwrap();
            let start_value: Rational = (0..4)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| sites.entry(i, j) * &start.flow()[i][j])
                .sum();
            let primal = recover_primal(&solve_transportation(&sites).unwrap(), &sites).unwrap();
            assert!(start_value <= primal.value);
        }
    }

    #[test]
    fn invariance_under_row_and_global_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let sites = random_sites(&mut rng, 5, 3, 6, 2);
            let plan = solve_transportation(&sites).unwrap();
            let x = recover_primal(&plan, &sites).unwrap().x;
            let shifted: Vec<Vec<Rational>> = sites
                .rows()
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().map(|v| v + int(i as i64 * 3 - 4)).collect())
                .collect();
            let shifted = SiteMatrix::new(shifted).unwrap();
            let plan2 = solve_transportation(&shifted).unwrap();
            assert_eq!(plan2.objective(), plan.objective());
            assert_eq!(recover_primal(&plan2, &shifted).unwrap().x, x);
        }
    }
}
