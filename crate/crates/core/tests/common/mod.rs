//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_traits::Zero;
use tropmedian::lp::{self, LinearProgram, LpOutcome, Relation, Sense};
use tropmedian::rational::{int, Rational};
use tropmedian::trees::{parse_newick, tree_to_ultrametric, PhyloTree, Ultrametric};
use tropmedian::tropical::{SiteMatrix, TropicalPoint};

pub const T1: &str = "(D:10,(C:4,(B:2,A:2):2):6)";
pub const T2: &str = "(A:10,(B:4,(C:2,D:2):2):6)";
pub const T3: &str = "(A:10,((B:4,C:4):3,D:7):3)";

pub const NINE_TAXA: [&str; 3] = [
    "(A:8,((B:2,(C:1,D:1):1):5,((E:1,F:1):3,(G:2,(H:1,I:1):1):2):3):1)",
    "((A:3,(C:2,(B:1,D:1):1):1):5,((E:1,F:1):3,(G:2,(H:1,I:1):1):2):4)",
    "((A:2,(C:1,D:1):1):6,(E:2,(F:1,B:1):1):6,(G:2,H:2,I:2):6)",
];

/// Known median of the three trees above, reproduced exactly by
/// the solver. It doubles as the regression baseline.
pub const NINE_TAXA_MEDIAN: &str = "(A:8,(B:7,(C:1,D:1):6,(E:1,F:1):6,(G:2,(H:1,I:1):1):5):1);";

pub fn trees(src: &[&str]) -> Vec<PhyloTree> {
    src.iter().map(|s| parse_newick(s).unwrap()).collect()
}

pub fn ultrametric(src: &str) -> Ultrametric {
    tree_to_ultrametric(&parse_newick(src).unwrap()).unwrap()
}

pub fn clusters(names: &[&str]) -> std::collections::BTreeSet<Vec<String>> {
    names.iter().map(|c| c.chars().map(|ch| ch.to_string()).collect()).collect()
}

/// Minimizes `n · Σ w_i t_i` subject to `t_i + x_j >= v_ij`, `Σ x = 0`
/// with the dense two-phase simplex.
pub fn primal_lp_value(sites: &SiteMatrix) -> Rational {
    let (m, n) = (sites.m(), sites.n());
    let mut objective: Vec<Rational> = (0..m).map(|i| int((n as u64 * sites.weight(i)) as i64)).collect();
    objective.extend(vec![Rational::zero(); n]);
    let mut program = LinearProgram::new(Sense::Minimize, objective);
    for i in 0..m {
        for j in 0..n {
            program.add_sparse(&[(i, int(1)), (m + j, int(1))], Relation::Ge, sites.entry(i, j).clone()).unwrap();
        }
    }
    let sum_x: Vec<_> = (0..n).map(|j| (m + j, int(1))).collect();
    program.add_sparse(&sum_x, Relation::Eq, Rational::zero()).unwrap();
    match lp::solve(&program).unwrap() {
        LpOutcome::Optimal { value, .. } => value,
        other => panic!("primal program: {other:?}"),
    }
}

/// Every point where `n - 1` independent breakpoints `x_j - x_k = v_ij - v_ik`
/// meet: one labeled spanning tree on the coordinates per candidate.
/// The objective is piecewise linear and convex, so its minimum is attained
/// at one of them.
pub fn pseudovertex_minimum(sites: &SiteMatrix) -> Rational {
    let (m, n) = (sites.m(), sites.n());
    let choices = n * m;
    let total = choices.pow((n - 1) as u32);
    let mut best: Option<Rational> = None;
    for code in 0..total {
        // Column j >= 1 hangs below parent[j] via row label[j].
        let mut rest = code;
        let mut parent = vec![0usize; n];
        let mut label = vec![0usize; n];
        for j in 1..n {
            let c = rest % choices;
            rest /= choices;
            parent[j] = c / m;
            label[j] = c % m;
        }
        let mut depth = vec![None; n];
        depth[0] = Some(0usize);
        let mut ok = true;
        for j in 1..n {
            let mut path = vec![];
            let mut k = j;
            while depth[k].is_none() && path.len() <= n {
                path.push(k);
                k = parent[k];
            }
            if depth[k].is_none() {
                ok = false;
                break;
            }
            for &p in path.iter().rev() {
                depth[p] = Some(depth[parent[p]].unwrap() + 1);
            }
        }
        if !ok {
            continue;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&j| depth[j]);
        let mut x = vec![Rational::zero(); n];
        for &j in order.iter().skip(1) {
            let (k, i) = (parent[j], label[j]);
            x[j] = &x[k] + sites.entry(i, j) - sites.entry(i, k);
        }
        let value = sites.objective(&TropicalPoint::normalize(x).unwrap()).unwrap();
        if best.as_ref().is_none_or(|b| value < *b) {
            best = Some(value);
        }
    }
    best.expect("at least one spanning tree")
}
