//! Dense two-phase simplex for the small programs built by [`crate::pricing`].
//!
//! Rows are scaled to unit max coefficient before solving. Pricing uses
//! Dantzig's rule and falls back to Bland's rule for good after a run of
//! degenerate pivots, which guarantees termination.

use crate::error::{Error, Result};

/// Relative tolerance within which an optimal point satisfies every constraint.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-7;

const PIVOT_EPS: f64 = 1e-10;
const COST_EPS: f64 = 1e-10;
const DEGENERATE_RUN: usize = 50;
const MAX_PIVOTS: usize = 100_000;

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

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `optimize objective · x` subject to linear constraints and optional
/// per-variable bounds. Variables are free unless bounded.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Empty unless the status is optimal.
    pub solution: Vec<f64>,
    /// NaN when infeasible, infinite when unbounded.
    pub objective: f64,
}

impl LinearProgram {
    /// Feasibility problem (zero objective) over free variables.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            sense: Sense::Minimize,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            lower: vec![None; num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn minimize(mut self, objective: Vec<f64>) -> Self {
        self.sense = Sense::Minimize;
        self.objective = objective;
        self
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        self.sense = Sense::Maximize;
        self.objective = objective;
        self
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::MalformedLp(what));
        if self.objective.len() != self.num_vars {
            return bad(format!(
                "objective has {} coefficients, expected {}",
                self.objective.len(),
                self.num_vars
            ));
        }
        if self.lower.len() != self.num_vars || self.upper.len() != self.num_vars {
            return bad("bound vectors do not match num_vars".into());
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return bad("non-finite objective coefficient".into());
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return bad(format!(
                    "constraint {k} has {} coefficients, expected {}",
                    c.coeffs.len(),
                    self.num_vars
                ));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return bad(format!("constraint {k} has a non-finite entry"));
            }
        }
        for k in 0..self.num_vars {
            if self.lower[k].is_some_and(|b| !b.is_finite())
                || self.upper[k].is_some_and(|b| !b.is_finite())
            {
                return bad(format!("variable {k} has a non-finite bound"));
            }
        }
        Ok(())
    }

    /// Largest relative violation of any constraint or bound at `x`.
    /// Each row's violation is divided by `1 + |rhs| + sum |a_k x_k|`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let scale = 1.0
                + c.rhs.abs()
                + c.coeffs
                    .iter()
                    .zip(x)
                    .map(|(a, v)| (a * v).abs())
                    .sum::<f64>();
            let gap = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap / scale);
        }
        for (k, &v) in x.iter().enumerate() {
            if let Some(lo) = self.lower[k] {
                worst = worst.max((lo - v) / (1.0 + lo.abs()));
            }
            if let Some(hi) = self.upper[k] {
                worst = worst.max((v - hi) / (1.0 + hi.abs()));
            }
        }
        worst
    }
}

/// How an original variable is rebuilt from nonnegative columns.
enum Substitution {
    /// `x = offset + y`
    Shifted { col: usize, offset: f64 },
    /// `x = offset - y`
    Mirrored { col: usize, offset: f64 },
    /// `x = y_plus - y_minus`
    Split { plus: usize, minus: usize },
}

impl Substitution {
    fn offset(&self) -> f64 {
        match *self {
            Substitution::Shifted { offset, .. } | Substitution::Mirrored { offset, .. } => offset,
            Substitution::Split { .. } => 0.0,
        }
    }

    fn add_terms(&self, a: f64, row: &mut [f64]) {
        match *self {
            Substitution::Shifted { col, .. } => row[col] += a,
            Substitution::Mirrored { col, .. } => row[col] -= a,
            Substitution::Split { plus, minus } => {
                row[plus] += a;
                row[minus] -= a;
            }
        }
    }

    fn recover(&self, y: &[f64]) -> f64 {
        match *self {
            Substitution::Shifted { col, offset } => offset + y[col],
            Substitution::Mirrored { col, offset } => offset - y[col],
            Substitution::Split { plus, minus } => y[plus] - y[minus],
        }
    }
}

/// Standard form: `A y = b`, `y >= 0`, `b >= 0`, tableau rows carry `b` last.
struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [f64]) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = cost[c];
        if f != 0.0 {
            for (v, &pv) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            cost[c] = 0.0;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Minimizes over columns `< allowed`. `cost` holds reduced costs with
    /// minus the objective value in its last slot. Returns false if unbounded.
    fn optimize(&mut self, cost: &mut [f64], allowed: usize) -> Result<bool> {
        let mut bland = false;
        let mut degenerate = 0;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::LpIterationLimit(MAX_PIVOTS));
            }
            let entering = if bland {
                (0..allowed).find(|&j| cost[j] < -COST_EPS)
            } else {
                (0..allowed)
                    .filter(|&j| cost[j] < -COST_EPS)
                    .min_by(|&a, &b| cost[a].total_cmp(&cost[b]))
            };
            let Some(c) = entering else { return Ok(true) };

            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][c];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                        if ratio < bratio && !tie || tie && self.basis[r] < self.basis[br] {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leaving else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, c, cost);
        }
    }
}

struct Prepared {
    tableau: Tableau,
    subs: Vec<Substitution>,
    structural: usize,
    /// Phase-one infeasibility threshold.
    tol: f64,
}

enum Prep {
    Ready(Prepared),
    /// A zero row demands something impossible.
    Infeasible,
}

fn prepare(lp: &LinearProgram) -> Result<Prep> {
    lp.validate()?;
    let mut subs = Vec::with_capacity(lp.num_vars);
    let mut cols = 0;
    let mut range_rows = Vec::new();
    for k in 0..lp.num_vars {
        match (lp.lower[k], lp.upper[k]) {
            (Some(lo), hi) => {
                subs.push(Substitution::Shifted {
                    col: cols,
                    offset: lo,
                });
                if let Some(hi) = hi {
                    if hi < lo {
                        return Ok(Prep::Infeasible);
                    }
                    range_rows.push((cols, hi - lo));
                }
                cols += 1;
            }
            (None, Some(hi)) => {
                subs.push(Substitution::Mirrored {
                    col: cols,
                    offset: hi,
                });
                cols += 1;
            }
            (None, None) => {
                subs.push(Substitution::Split {
                    plus: cols,
                    minus: cols + 1,
                });
                cols += 2;
            }
        }
    }
    let structural = cols;

    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in &lp.constraints {
        let mut row = vec![0.0; structural];
        let mut rhs = c.rhs;
        for (k, &a) in c.coeffs.iter().enumerate() {
            if a != 0.0 {
                subs[k].add_terms(a, &mut row);
                rhs -= a * subs[k].offset();
            }
        }
        rows.push((row, c.relation, rhs));
    }
    for (col, width) in range_rows {
        let mut row = vec![0.0; structural];
        row[col] = 1.0;
        rows.push((row, Relation::Le, width));
    }

    let mut kept = Vec::with_capacity(rows.len());
    for (mut row, mut rel, mut rhs) in rows {
        let scale = row.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if scale == 0.0 {
            let tol = FEASIBILITY_TOLERANCE * (1.0 + rhs.abs());
            let ok = match rel {
                Relation::Le => rhs >= -tol,
                Relation::Ge => rhs <= tol,
                Relation::Eq => rhs.abs() <= tol,
            };
            if !ok {
                return Ok(Prep::Infeasible);
            }
            continue;
        }
        row.iter_mut().for_each(|a| *a /= scale);
        rhs /= scale;
        if rhs < 0.0 {
            row.iter_mut().for_each(|a| *a = -*a);
            rhs = -rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        kept.push((row, rel, rhs));
    }

    let slacks = kept
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let artificials = kept
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Le)
        .count();
    let first_artificial = structural + slacks;
    let width = first_artificial + artificials;
    let mut tab_rows = Vec::with_capacity(kept.len());
    let mut basis = Vec::with_capacity(kept.len());
    let (mut next_slack, mut next_art) = (structural, first_artificial);
    let mut max_rhs: f64 = 0.0;
    for (row, rel, rhs) in kept {
        let mut t = row;
        t.resize(width + 1, 0.0);
        t[width] = rhs;
        max_rhs = max_rhs.max(rhs);
        match rel {
            Relation::Le => {
                t[next_slack] = 1.0;
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                t[next_slack] = -1.0;
                next_slack += 1;
                t[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                t[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        tab_rows.push(t);
    }
    let tableau = Tableau {
        rows: tab_rows,
        basis,
        width,
        first_artificial,
        pivots: 0,
    };
    Ok(Prep::Ready(Prepared {
        tableau,
        subs,
        structural,
        tol: 1e-9 * (1.0 + max_rhs),
    }))
}

/// Phase one. On success the basis holds no artificial columns.
fn phase_one(p: &mut Prepared) -> Result<bool> {
    let t = &mut p.tableau;
    let mut cost = vec![0.0; t.width + 1];
    for c in cost.iter_mut().take(t.width).skip(t.first_artificial) {
        *c = 1.0;
    }
    for (r, &b) in t.basis.iter().enumerate() {
        if b >= t.first_artificial {
            for (c, v) in cost.iter_mut().zip(&t.rows[r]) {
                *c -= v;
            }
        }
    }
    t.optimize(&mut cost, t.width)?;
    if -cost[t.width] > p.tol {
        return Ok(false);
    }
    // drive remaining (zero-valued) artificials out, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] < t.first_artificial {
            r += 1;
            continue;
        }
        let col = (0..t.first_artificial)
            .filter(|&j| t.rows[r][j].abs() > 1e-9)
            .max_by(|&a, &b| t.rows[r][a].abs().total_cmp(&t.rows[r][b].abs()));
        match col {
            Some(c) => {
                t.pivot(r, c, &mut cost);
                r += 1;
            }
            None => {
                t.rows.remove(r);
                t.basis.remove(r);
            }
        }
    }
    Ok(true)
}

fn recover(p: &Prepared) -> Vec<f64> {
    let t = &p.tableau;
    let mut y = vec![0.0; t.width];
    for (r, &b) in t.basis.iter().enumerate() {
        y[b] = t.rhs(r).max(0.0);
    }
    p.subs.iter().map(|s| s.recover(&y)).collect()
}

/// Whether the constraint set (with bounds) has a feasible point.
pub fn check_feasible(lp: &LinearProgram) -> Result<bool> {
    match prepare(lp)? {
        Prep::Infeasible => Ok(false),
        Prep::Ready(mut p) => phase_one(&mut p),
    }
}

/// Solves the program. Optimal points satisfy every constraint within
/// [`FEASIBILITY_TOLERANCE`] (relative, as in [`LinearProgram::max_violation`]).
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    let infeasible = LpOutcome {
        status: LpStatus::Infeasible,
        solution: Vec::new(),
        objective: f64::NAN,
    };
    let mut p = match prepare(lp)? {
        Prep::Infeasible => return Ok(infeasible),
        Prep::Ready(p) => p,
    };
    if !phase_one(&mut p)? {
        return Ok(infeasible);
    }

    let sign = if lp.sense == Sense::Maximize {
        -1.0
    } else {
        1.0
    };
    let t = &mut p.tableau;
    let mut cost = vec![0.0; t.width + 1];
    for (k, s) in p.subs.iter().enumerate() {
        s.add_terms(sign * lp.objective[k], &mut cost[..p.structural]);
    }
    for (r, &b) in t.basis.iter().enumerate() {
        let f = cost[b];
        if f != 0.0 {
            for (c, v) in cost.iter_mut().zip(&t.rows[r]) {
                *c -= f * v;
            }
        }
    }
    let allowed = t.first_artificial;
    if !t.optimize(&mut cost, allowed)? {
        let objective = if lp.sense == Sense::Maximize {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        return Ok(LpOutcome {
            status: LpStatus::Unbounded,
            solution: Vec::new(),
            objective,
        });
    }
    let solution = recover(&p);
    let objective = lp.objective.iter().zip(&solution).map(|(c, x)| c * x).sum();
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        solution,
        objective,
    })
}

/// Any feasible point, or `None` when the constraints are infeasible.
pub fn find_feasible_point(lp: &LinearProgram) -> Result<Option<Vec<f64>>> {
    let mut p = match prepare(lp)? {
        Prep::Infeasible => return Ok(None),
        Prep::Ready(p) => p,
    };
    Ok(phase_one(&mut p)?.then(|| recover(&p)))
}
