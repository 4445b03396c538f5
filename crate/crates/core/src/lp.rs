//! Dense two-phase primal simplex over exact rationals, Bland's rule
//! throughout. Meant for small programs: the facet programs of a
//! Fermat–Weber polytrope and cross-checks of the transportation solver.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Sparse coefficients, relation, right-hand side.
type SparseRow = (Vec<(usize, Rational)>, Relation, Rational);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `optimize objective·x` subject to linear constraints and optional
/// per-variable bounds. Variables are free unless bounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, constraints: Vec::new(), lower: vec![None; n], upper: vec![None; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::DimensionMismatch { left: self.num_vars(), right: coeffs.len() });
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    /// Sparse form of [`add_constraint`](Self::add_constraint).
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) -> Result<()> {
        let mut coeffs = vec![Rational::zero(); self.num_vars()];
        for (k, c) in terms {
            let slot = coeffs.get_mut(*k).ok_or(Error::DimensionMismatch { left: self.num_vars(), right: *k + 1 })?;
            *slot += c;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_nonnegative(&mut self, var: usize) {
        self.lower[var] = Some(Rational::zero());
    }

    /// Whether `point` satisfies every constraint and bound exactly.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        if point.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = point.iter().enumerate().all(|(k, x)| {
            self.lower[k].as_ref().is_none_or(|l| x >= l) && self.upper[k].as_ref().is_none_or(|u| x <= u)
        });
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }
}

/// How an original variable is expressed through nonnegative columns:
/// `x = offset + sum coef * z_col`.
struct VarMap {
    offset: Rational,
    cols: Vec<(usize, Rational)>,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
}

enum PivotResult {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        self.rhs[row] /= &p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for (v, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    fn reduced_costs(&self, costs: &[Rational]) -> Vec<Rational> {
        let mut d = costs.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (dj, a) in d.iter_mut().zip(&self.rows[r]) {
                if !a.is_zero() {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Minimizes `costs·z` from the current basic feasible solution.
    fn run(&mut self, costs: &[Rational]) -> PivotResult {
        loop {
            let d = self.reduced_costs(costs);
            let entering = (0..d.len()).find(|&j| self.allowed[j] && d[j].is_negative());
            let Some(col) = entering else {
                return PivotResult::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return PivotResult::Unbounded,
            }
        }
    }
}

/// Solves `lp` exactly. Infeasibility and unboundedness are outcomes, not
/// errors; `Err` is reserved for malformed programs.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let nv = lp.num_vars();
    for c in &lp.constraints {
        if c.coeffs.len() != nv {
            return Err(Error::DimensionMismatch { left: nv, right: c.coeffs.len() });
        }
    }

    // Substitute bounded/free variables by nonnegative columns.
    let mut maps = Vec::with_capacity(nv);
    let mut ncols = 0usize;
    let mut extra: Vec<SparseRow> = Vec::new();
    for k in 0..nv {
        let one = Rational::from_integer(1.into());
        let map = match (&lp.lower[k], &lp.upper[k]) {
            (Some(l), upper) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = upper {
                    extra.push((vec![(col, one.clone())], Relation::Le, u - l));
                }
                VarMap { offset: l.clone(), cols: vec![(col, one)] }
            }
            (None, Some(u)) => {
                let col = ncols;
                ncols += 1;
                VarMap { offset: u.clone(), cols: vec![(col, -one)] }
            }
            (None, None) => {
                let col = ncols;
                ncols += 2;
                VarMap { offset: Rational::zero(), cols: vec![(col, one.clone()), (col + 1, -one)] }
            }
        };
        maps.push(map);
    }

    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &lp.constraints {
        let mut coeffs = vec![Rational::zero(); ncols];
        let mut rhs = c.rhs.clone();
        for (a, map) in c.coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            rhs -= a * &map.offset;
            for (col, coef) in &map.cols {
                coeffs[*col] += a * coef;
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for (terms, rel, rhs) in extra {
        let mut coeffs = vec![Rational::zero(); ncols];
        for (col, coef) in terms {
            coeffs[col] = coef;
        }
        rows.push((coeffs, rel, rhs));
    }

    let nslack = rows.iter().filter(|(_, rel, _)| *rel != Relation::Eq).count();
    let mut tab_rows = Vec::with_capacity(rows.len());
    let mut tab_rhs = Vec::with_capacity(rows.len());
    let mut basis = Vec::with_capacity(rows.len());
    let mut needs_artificial = Vec::with_capacity(rows.len());
    let mut slack = ncols;
    for (mut coeffs, rel, mut rhs) in rows {
        coeffs.resize(ncols + nslack, Rational::zero());
        let slack_col = match rel {
            Relation::Le => Some((slack, 1)),
            Relation::Ge => Some((slack, -1)),
            Relation::Eq => None,
        };
        if let Some((col, sign)) = slack_col {
            coeffs[col] = Rational::from_integer(sign.into());
            slack += 1;
        }
        if rhs.is_negative() {
            for v in coeffs.iter_mut() {
                *v = -&*v;
            }
            rhs = -rhs;
        }
        let own_basis = slack_col.filter(|(col, _)| coeffs[*col].is_positive()).map(|(col, _)| col);
        needs_artificial.push(own_basis.is_none());
        basis.push(own_basis.unwrap_or(usize::MAX));
        tab_rows.push(coeffs);
        tab_rhs.push(rhs);
    }

    let structural = ncols + nslack;
    let nart = needs_artificial.iter().filter(|&&b| b).count();
    let total = structural + nart;
    let mut art = structural;
    for (r, row) in tab_rows.iter_mut().enumerate() {
        row.resize(total, Rational::zero());
        if needs_artificial[r] {
            row[art] = Rational::from_integer(1.into());
            basis[r] = art;
            art += 1;
        }
    }
    let mut tab = Tableau { rows: tab_rows, rhs: tab_rhs, basis, allowed: vec![true; total] };

    if nart > 0 {
        let mut phase1 = vec![Rational::zero(); total];
        for c in phase1.iter_mut().skip(structural) {
            *c = Rational::from_integer(1.into());
        }
        tab.run(&phase1);
        let infeasibility: Rational =
            tab.basis.iter().zip(&tab.rhs).filter(|(&b, _)| b >= structural).map(|(_, v)| v.clone()).sum();
        if infeasibility.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive zero-level artificials out; drop rows that are redundant.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= structural {
                match (0..structural).find(|&j| !tab.rows[r][j].is_zero()) {
                    Some(col) => tab.pivot(r, col),
                    None => {
                        tab.rows.remove(r);
                        tab.rhs.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for a in tab.allowed.iter_mut().skip(structural) {
            *a = false;
        }
    }

    let mut costs = vec![Rational::zero(); total];
    for (c, map) in lp.objective.iter().zip(&maps) {
        let c = match lp.sense {
            Sense::Minimize => c.clone(),
            Sense::Maximize => -c.clone(),
        };
        for (col, coef) in &map.cols {
            costs[*col] += &c * coef;
        }
    }
    if let PivotResult::Unbounded = tab.run(&costs) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut z = vec![Rational::zero(); total];
    for (&b, v) in tab.basis.iter().zip(&tab.rhs) {
        z[b] = v.clone();
    }
    let point: Vec<Rational> = maps
        .iter()
        .map(|map| {
            let mut x = map.offset.clone();
            for (col, coef) in &map.cols {
                x += coef * &z[*col];
            }
            x
        })
        .collect();
    let value = lp.evaluate(&point);
    Ok(LpOutcome::Optimal { value, point })
}
