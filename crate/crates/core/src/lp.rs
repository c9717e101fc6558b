//! Exact dense simplex and the strict-feasibility alternative built on it.
//!
//! Every pivot uses Bland's rule, so the solver terminates on degenerate
//! problems without any tolerances.

use num::{One, Signed, Zero};

use crate::matrix::{RMatrix, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `minimize objective·x` subject to the constraints; variables are
/// nonnegative unless marked free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    free: Vec<bool>,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub value: Rational,
    /// One multiplier per constraint, as written. `value == Σ duals[i] * rhs[i]`.
    pub duals: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            free: vec![false; num_vars],
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.free.len()
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn minimize(&mut self, objective: Vec<Rational>) -> &mut Self {
        assert_eq!(objective.len(), self.num_vars());
        self.objective = objective;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    /// Original variable (index, +1 or -1 for the negative part of a free var).
    Structural(usize, bool),
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// For every row, the column that started as the unit vector `e_row`.
    unit_col: Vec<usize>,
    /// Rows multiplied by -1 to make the right-hand side nonnegative.
    negated: Vec<bool>,
    reduced: Vec<Rational>,
    neg_value: Rational,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let mut kinds = Vec::new();
        for (v, &free) in lp.free.iter().enumerate() {
            kinds.push(ColumnKind::Structural(v, false));
            if free {
                kinds.push(ColumnKind::Structural(v, true));
            }
        }
        let structural = kinds.len();
        let slack_count = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let mut negated = Vec::with_capacity(m);
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut unit_col = vec![usize::MAX; m];
        let mut slack_at = structural;
        for (i, c) in lp.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            negated.push(flip);
            let sign = |v: &Rational| if flip { -v } else { v.clone() };
            let mut row = Vec::with_capacity(structural + slack_count + m);
            for kind in &kinds {
                if let ColumnKind::Structural(v, neg) = *kind {
                    let a = sign(&c.coeffs[v]);
                    row.push(if neg { -a } else { a });
                }
            }
            row.resize(structural + slack_count, Rational::zero());
            if c.relation != Relation::Eq {
                let mut s = if c.relation == Relation::Le { Rational::one() } else { -Rational::one() };
                if flip {
                    s = -s;
                }
                if s.is_positive() {
                    unit_col[i] = slack_at;
                }
                row[slack_at] = s;
                slack_at += 1;
            }
            rows.push(row);
            rhs.push(sign(&c.rhs));
        }
        for _ in 0..slack_count {
            kinds.push(ColumnKind::Slack);
        }
        // Artificial columns only where no slack can start in the basis.
        for (i, slot) in unit_col.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = kinds.len();
                kinds.push(ColumnKind::Artificial);
                for (k, row) in rows.iter_mut().enumerate() {
                    row.push(if k == i { Rational::one() } else { Rational::zero() });
                }
            }
        }
        let width = kinds.len();
        for row in &mut rows {
            row.resize(width, Rational::zero());
        }
        Self {
            basis: unit_col.clone(),
            rows,
            rhs,
            kinds,
            unit_col,
            negated,
            reduced: vec![Rational::zero(); width],
            neg_value: Rational::zero(),
        }
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        self.reduced = cost.to_vec();
        self.neg_value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.reduced.len() {
                if !self.rows[i][j].is_zero() {
                    let d = cb * &self.rows[i][j];
                    self.reduced[j] -= d;
                }
            }
            self.neg_value -= cb * &self.rhs[i];
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nonzero {
                let d = &f * &pivot_row[j];
                self.rows[i][j] -= d;
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !self.reduced[c].is_zero() {
            let f = self.reduced[c].clone();
            for &j in &nonzero {
                let d = &f * &pivot_row[j];
                self.reduced[j] -= d;
            }
            self.neg_value -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Bland's rule simplex on the current objective row. Returns `false`
    /// when unbounded.
    fn optimize(&mut self, allow_artificial: bool) -> bool {
        loop {
            let entering = (0..self.width()).find(|&j| {
                self.reduced[j].is_negative()
                    && (allow_artificial || self.kinds[j] != ColumnKind::Artificial)
            });
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let width = self.width();
        if self.kinds.contains(&ColumnKind::Artificial) {
            let phase1: Vec<Rational> = self
                .kinds
                .iter()
                .map(|k| if *k == ColumnKind::Artificial { Rational::one() } else { Rational::zero() })
                .collect();
            self.set_objective(&phase1);
            self.optimize(true);
            if !self.neg_value.is_zero() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining (zero-level) artificials out where possible.
            for r in 0..self.rows.len() {
                if self.kinds[self.basis[r]] != ColumnKind::Artificial {
                    continue;
                }
                if let Some(c) =
                    (0..width).find(|&j| self.kinds[j] != ColumnKind::Artificial && !self.rows[r][j].is_zero())
                {
                    self.pivot(r, c);
                }
            }
        }
        let cost: Vec<Rational> = self
            .kinds
            .iter()
            .map(|k| match *k {
                ColumnKind::Structural(v, neg) => {
                    if neg {
                        -&lp.objective[v]
                    } else {
                        lp.objective[v].clone()
                    }
                }
                _ => Rational::zero(),
            })
            .collect();
        self.set_objective(&cost);
        if !self.optimize(false) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); lp.num_vars()];
        for (i, &b) in self.basis.iter().enumerate() {
            if let ColumnKind::Structural(v, neg) = self.kinds[b] {
                if neg {
                    x[v] -= &self.rhs[i];
                } else {
                    x[v] += &self.rhs[i];
                }
            }
        }
        // Unit columns carry zero cost, so y_i = -reduced cost of e_i.
        let duals = (0..self.rows.len())
            .map(|i| {
                let y = -&self.reduced[self.unit_col[i]];
                if self.negated[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        LpOutcome::Optimal(LpSolution {
            x,
            value: -&self.neg_value,
            duals,
        })
    }
}

/// Strictly positive `λ` with `Mλ > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictWitness {
    pub lambda: Vec<Rational>,
}

/// Nonzero `y ≥ 0` with `Mᵀy ≤ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasWitness {
    pub y: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Strict(StrictWitness),
    Infeasible(FarkasWitness),
}

impl StrictWitness {
    pub fn verify(&self, m: &RMatrix) -> bool {
        self.lambda.len() == m.cols()
            && self.lambda.iter().all(Signed::is_positive)
            && m.mul_vec(&self.lambda).iter().all(Signed::is_positive)
    }
}

impl FarkasWitness {
    pub fn verify(&self, m: &RMatrix) -> bool {
        self.y.len() == m.rows()
            && self.y.iter().all(|v| !v.is_negative())
            && self.y.iter().any(|v| !v.is_zero())
            && m.transpose().mul_vec(&self.y).iter().all(|v| !v.is_positive())
    }
}

impl Feasibility {
    pub fn verify(&self, m: &RMatrix) -> bool {
        match self {
            Feasibility::Strict(w) => w.verify(m),
            Feasibility::Infeasible(c) => c.verify(m),
        }
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Feasibility::Strict(_))
    }
}

fn primitive_vec(v: Vec<Rational>) -> Vec<Rational> {
    RMatrix::column(v).primitive().col(0)
}

/// Decides which side of the alternative holds for `M` (q×p): either some
/// `λ > 0` has `Mλ > 0`, or some nonzero `y ≥ 0` has `Mᵀy ≤ 0`.
///
/// Solves `max t` over `Mλ ≥ t·1, 1ᵀλ ≤ 1, t ≤ 1, λ ≥ 0`. A positive
/// optimum yields the witness; an optimum of zero (the boundary counts as
/// infeasible) yields the certificate from the optimal duals.
pub fn strict_feasibility(m: &RMatrix) -> Feasibility {
    let (q, p) = m.shape();
    let t = p;
    let mut lp = LinearProgram::new(p + 1);
    lp.set_free(t);
    let mut objective = vec![Rational::zero(); p + 1];
    objective[t] = -Rational::one();
    lp.minimize(objective);
    for i in 0..q {
        let mut row: Vec<Rational> = m.row(i).iter().map(|v| -v).collect();
        row.push(Rational::one());
        lp.constrain(row, Relation::Le, Rational::zero());
    }
    let mut sum = vec![Rational::one(); p];
    sum.push(Rational::zero());
    lp.constrain(sum, Relation::Le, Rational::one());
    let mut cap = vec![Rational::zero(); p];
    cap.push(Rational::one());
    lp.constrain(cap, Relation::Le, Rational::one());

    let LpOutcome::Optimal(sol) = lp.solve() else {
        unreachable!("the normalized alternative LP is feasible and bounded");
    };
    let t_star = sol.x[t].clone();
    let result = if t_star.is_positive() {
        let mut lambda = sol.x[..p].to_vec();
        if lambda.iter().any(Zero::is_zero) {
            let max_row = (0..q)
                .map(|i| m.row(i).iter().fold(Rational::zero(), |acc, v| acc + v.abs()))
                .max()
                .unwrap_or_else(Rational::zero);
            let delta = &t_star / (Rational::from_integer(2.into()) * (Rational::one() + max_row));
            for v in &mut lambda {
                *v += &delta;
            }
        }
        Feasibility::Strict(StrictWitness { lambda: primitive_vec(lambda) })
    } else {
        let y = sol.duals[..q].iter().map(|d| -d).collect();
        Feasibility::Infeasible(FarkasWitness { y: primitive_vec(y) })
    };
    assert!(result.verify(m), "alternative certificate failed exact verification");
    result
}

/// Finds `Z ≥ 0` with `E·Z = F`, column by column, or `None` if any column
/// system is infeasible.
pub fn nonneg_solution(e: &RMatrix, f: &RMatrix) -> Option<RMatrix> {
    assert_eq!(e.rows(), f.rows(), "E and F need the same row count");
    let s = e.cols();
    let mut columns = Vec::with_capacity(f.cols());
    for k in 0..f.cols() {
        let mut lp = LinearProgram::new(s);
        for i in 0..e.rows() {
            lp.constrain(e.row(i).to_vec(), Relation::Eq, f[(i, k)].clone());
        }
        match lp.solve() {
            LpOutcome::Optimal(sol) => columns.push(sol.x),
            _ => return None,
        }
    }
    let z = RMatrix::from_columns(&columns).expect("nonempty solution");
    debug_assert!(z.is_nonnegative() && &(e * &z) == f);
    Some(z)
}

/// True when `v` is a nonnegative combination of the columns of `g`.
pub fn in_conic_hull(g: &RMatrix, v: &[Rational]) -> bool {
    nonneg_solution(g, &RMatrix::column(v.to_vec())).is_some()
}
