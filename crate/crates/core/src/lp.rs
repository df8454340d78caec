//! Exact rational feasibility LP (phase-I simplex with Bland's rule).
//!
//! Infeasible problems come back with a Farkas certificate that can be
//! checked independently of the solver with [`LpProblem::verify_certificate`].

use crate::linalg::Rat;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Free,
    NonNeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    /// Sparse coefficients `(variable, value)`.
    pub coeffs: Vec<(usize, Rat)>,
    pub rel: Relation,
    pub rhs: Rat,
}

#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    names: Vec<String>,
    kinds: Vec<VarKind>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    /// A point satisfying every constraint.
    Feasible(Vec<Rat>),
    /// Multipliers `y`, one per constraint, proving infeasibility.
    Infeasible(Vec<Rat>),
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind) -> usize {
        self.names.push(name.into());
        self.kinds.push(kind);
        self.names.len() - 1
    }

    pub fn var_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn num_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Panics if a coefficient references an undeclared variable.
    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rat)>, rel: Relation, rhs: Rat) {
        for (v, _) in &coeffs {
            assert!(*v < self.kinds.len(), "constraint references undeclared variable {v}");
        }
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    fn lhs(&self, c: &Constraint, x: &[Rat]) -> Rat {
        c.coeffs.iter().map(|(v, a)| a * &x[*v]).sum()
    }

    pub fn is_solution(&self, x: &[Rat]) -> bool {
        if x.len() != self.kinds.len() {
            return false;
        }
        if self
            .kinds
            .iter()
            .zip(x)
            .any(|(k, v)| *k == VarKind::NonNeg && v.is_negative())
        {
            return false;
        }
        self.constraints.iter().all(|c| {
            let l = self.lhs(c, x);
            match c.rel {
                Relation::Le => l <= c.rhs,
                Relation::Ge => l >= c.rhs,
                Relation::Eq => l == c.rhs,
            }
        })
    }

    /// Checks that `y` proves infeasibility: `y·A` vanishes on free variables
    /// and is `<= 0` on nonnegative ones, multipliers of `<=` rows are `<= 0`,
    /// of `>=` rows are `>= 0`, and `y·b > 0`.
    pub fn verify_certificate(&self, y: &[Rat]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        let mut ya = vec![Rat::zero(); self.kinds.len()];
        let mut yb = Rat::zero();
        for (c, yi) in self.constraints.iter().zip(y) {
            match c.rel {
                Relation::Le if yi.is_positive() => return false,
                Relation::Ge if yi.is_negative() => return false,
                _ => {}
            }
            for (v, a) in &c.coeffs {
                ya[*v] += a * yi;
            }
            yb += &c.rhs * yi;
        }
        let cols_ok = self.kinds.iter().zip(&ya).all(|(k, v)| match k {
            VarKind::Free => v.is_zero(),
            VarKind::NonNeg => !v.is_positive(),
        });
        cols_ok && yb.is_positive()
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

/// Standard form `A z = b`, `z >= 0`, `b >= 0`, solved by phase-I simplex.
struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    /// Column index of the unit column (slack or artificial) owned by each row.
    unit_col: Vec<usize>,
    /// Whether that unit column is artificial.
    unit_is_art: Vec<bool>,
    /// Whether the row was negated to make `b >= 0`.
    negated: Vec<bool>,
    /// Map from original variable to (positive column, optional negative column).
    var_cols: Vec<(usize, Option<usize>)>,
    ncols: usize,
    art_start: usize,
}

impl Tableau {
    fn build(p: &LpProblem) -> Self {
        let m = p.constraints.len();
        let mut var_cols = Vec::with_capacity(p.kinds.len());
        let mut ncols = 0;
        for k in &p.kinds {
            match k {
                VarKind::NonNeg => {
                    var_cols.push((ncols, None));
                    ncols += 1;
                }
                VarKind::Free => {
                    var_cols.push((ncols, Some(ncols + 1)));
                    ncols += 2;
                }
            }
        }
        let mut slack_col = vec![None; m];
        for (i, c) in p.constraints.iter().enumerate() {
            if c.rel != Relation::Eq {
                slack_col[i] = Some(ncols);
                ncols += 1;
            }
        }
        let mut negated = vec![false; m];
        let mut unit_from_slack = vec![false; m];
        for (i, c) in p.constraints.iter().enumerate() {
            negated[i] = c.rhs.is_negative();
            // Slack sign in the row after the optional negation.
            let slack_sign_pos = match c.rel {
                Relation::Le => !negated[i],
                Relation::Ge => negated[i],
                Relation::Eq => false,
            };
            unit_from_slack[i] = slack_sign_pos;
        }
        let art_start = ncols;
        let mut unit_col = vec![0; m];
        let mut unit_is_art = vec![false; m];
        for i in 0..m {
            if unit_from_slack[i] {
                unit_col[i] = slack_col[i].unwrap();
            } else {
                unit_col[i] = ncols;
                unit_is_art[i] = true;
                ncols += 1;
            }
        }
        let mut rows = vec![vec![Rat::zero(); ncols]; m];
        let mut rhs = vec![Rat::zero(); m];
        for (i, c) in p.constraints.iter().enumerate() {
            let s = if negated[i] { -Rat::one() } else { Rat::one() };
            for (v, a) in &c.coeffs {
                let (pc, nc) = var_cols[*v];
                rows[i][pc] += a * &s;
                if let Some(nc) = nc {
                    rows[i][nc] -= a * &s;
                }
            }
            if let Some(sc) = slack_col[i] {
                let base = if c.rel == Relation::Le { Rat::one() } else { -Rat::one() };
                rows[i][sc] = base * &s;
            }
            if unit_is_art[i] {
                rows[i][unit_col[i]] = Rat::one();
            }
            rhs[i] = &c.rhs * &s;
        }
        Tableau {
            rows,
            rhs,
            basis: unit_col.clone(),
            unit_col,
            unit_is_art,
            negated,
            var_cols,
            ncols,
            art_start,
        }
    }

    fn cost(&self, j: usize) -> Rat {
        if j >= self.art_start {
            Rat::one()
        } else {
            Rat::zero()
        }
    }

    fn reduced_costs(&self) -> Vec<Rat> {
        let mut rc: Vec<Rat> = (0..self.ncols).map(|j| self.cost(j)).collect();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.cost(b);
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                if !self.rows[i][j].is_zero() {
                    rc[j] -= &cb * &self.rows[i][j];
                }
            }
        }
        rc
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (j, pv) in prow.iter().enumerate() {
                if !pv.is_zero() {
                    let d = &f * pv;
                    self.rows[i][j] -= d;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    fn run(mut self, p: &LpProblem) -> LpOutcome {
        loop {
            let rc = self.reduced_costs();
            let Some(enter) = (0..self.ncols).find(|&j| rc[j].is_negative()) else {
                break;
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            // Phase-I is bounded below by zero, so a leaving row always exists.
            let (leave, _) = best.expect("phase-I simplex is bounded");
            self.pivot(leave, enter);
        }
        let objective: Rat = self
            .basis
            .iter()
            .zip(&self.rhs)
            .filter(|(b, _)| **b >= self.art_start)
            .map(|(_, v)| v.clone())
            .sum();
        if objective.is_zero() {
            let mut z = vec![Rat::zero(); self.ncols];
            for (i, &b) in self.basis.iter().enumerate() {
                z[b] = self.rhs[i].clone();
            }
            let x: Vec<Rat> = self
                .var_cols
                .iter()
                .map(|(pc, nc)| match nc {
                    Some(nc) => &z[*pc] - &z[*nc],
                    None => z[*pc].clone(),
                })
                .collect();
            debug_assert!(p.is_solution(&x));
            LpOutcome::Feasible(x)
        } else {
            let rc = self.reduced_costs();
            let y: Vec<Rat> = (0..self.rows.len())
                .map(|i| {
                    let r = &rc[self.unit_col[i]];
                    let yi = if self.unit_is_art[i] { Rat::one() - r } else { -r.clone() };
                    if self.negated[i] {
                        -yi
                    } else {
                        yi
                    }
                })
                .collect();
            debug_assert!(p.verify_certificate(&y));
            LpOutcome::Infeasible(y)
        }
    }
}
