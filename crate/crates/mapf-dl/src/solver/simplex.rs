//! Bounded-variable primal simplex with a product-form inverse.
//!
//! Solves  max c'x  s.t.  Ax {<=,=} b,  l <= x <= u  over sparse columns.
//! Slack variables back <= rows; equality rows get fixed [0,0] logicals.
//! A composite phase 1 drives an infeasible starting basis (which arises
//! when branch-and-bound fixes variables to 1) to feasibility. Dantzig
//! pricing with a Bland's-rule fallback after a degeneracy streak.

use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
}

#[derive(Debug, Clone, Copy)]
pub struct LpRow {
    pub kind: RowKind,
    pub rhs: f64,
}

/// Sparse column-major LP data; `columns[j]` lists `(row, coefficient)`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub columns: Vec<Vec<(usize, f64)>>,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
}

/// A simplex basis: one variable per row plus the at-upper flags of every
/// variable (structural and logical). Reusable as a warm-start hint.
#[derive(Debug, Clone)]
pub struct Basis {
    pub basic: Vec<usize>,
    pub at_upper: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    /// Structural variable values.
    pub values: Vec<f64>,
    pub iterations: u64,
    pub basis: Basis,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible { iterations: u64 },
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum LpError {
    #[error("numerical failure in simplex: {0}")]
    Numerical(String),
    #[error("simplex hit the time limit")]
    TimedOut,
    #[error("simplex hit the iteration limit")]
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub max_iterations: u64,
    pub deadline: Option<Instant>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            max_iterations: 5_000_000,
            deadline: None,
        }
    }
}

const PIVOT_TOL: f64 = 1e-8;
const DROP_TOL: f64 = 1e-12;
const DEGENERACY_STREAK: u32 = 60;
const REFACTOR_INTERVAL: u64 = 512;
const MAX_ETA_ENTRIES: usize = 30_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Eta {
    row: usize,
    inv_pivot: f64,
    /// `(row, alpha_row)` for rows other than the pivot row.
    entries: Vec<(usize, f64)>,
}

struct Simplex<'a> {
    lp: &'a LinearProgram,
    n: usize,
    m: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<VarState>,
    basic: Vec<usize>,
    xb: Vec<f64>,
    etas: Vec<Eta>,
    eta_entries: usize,
    iterations: u64,
    degenerate_streak: u32,
    bland: bool,
    opts: SimplexOptions,
}

/// Solves the LP under the given structural bounds. `hint`, when valid,
/// seeds the starting basis (phase 1 repairs any resulting infeasibility).
pub fn solve_lp(
    lp: &LinearProgram,
    lower: &[f64],
    upper: &[f64],
    hint: Option<&Basis>,
    opts: &SimplexOptions,
) -> Result<LpOutcome, LpError> {
    assert_eq!(lp.columns.len(), lp.num_vars);
    assert_eq!(lower.len(), lp.num_vars);
    assert_eq!(upper.len(), lp.num_vars);
    let mut simplex = Simplex::new(lp, lower, upper, opts.clone());
    simplex.install_basis(hint);
    simplex.run()
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a LinearProgram, lower: &[f64], upper: &[f64], opts: SimplexOptions) -> Self {
        let n = lp.num_vars;
        let m = lp.rows.len();
        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        for row in &lp.rows {
            match row.kind {
                RowKind::Le => {
                    lo.push(0.0);
                    up.push(f64::INFINITY);
                }
                RowKind::Eq => {
                    lo.push(0.0);
                    up.push(0.0);
                }
            }
        }
        Simplex {
            lp,
            n,
            m,
            lower: lo,
            upper: up,
            state: vec![VarState::AtLower; n + m],
            basic: Vec::new(),
            xb: vec![0.0; m],
            etas: Vec::new(),
            eta_entries: 0,
            iterations: 0,
            degenerate_streak: 0,
            bland: false,
            opts,
        }
    }

    fn total(&self) -> usize {
        self.n + self.m
    }

    fn column(&self, j: usize) -> ColumnIter<'_> {
        if j < self.n {
            ColumnIter::Sparse(self.lp.columns[j].iter())
        } else {
            ColumnIter::Unit(Some(j - self.n))
        }
    }

    fn ftran(&self, v: &mut [f64]) {
        for eta in &self.etas {
            let t = v[eta.row];
            if t != 0.0 {
                let s = t * eta.inv_pivot;
                v[eta.row] = s;
                for &(i, a) in &eta.entries {
                    v[i] -= a * s;
                }
            }
        }
    }

    fn btran(&self, v: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut acc = v[eta.row];
            for &(i, a) in &eta.entries {
                acc -= a * v[i];
            }
            v[eta.row] = acc * eta.inv_pivot;
        }
    }

    /// FTRAN of a structural or logical column into dense row space.
    fn solved_column(&self, j: usize) -> Vec<f64> {
        let mut alpha = vec![0.0; self.m];
        for (r, a) in self.column(j) {
            alpha[r] = a;
        }
        self.ftran(&mut alpha);
        alpha
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Basic(_) => unreachable!(),
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
        }
    }

    /// Installs the hinted basis if it is structurally valid and invertible,
    /// otherwise the all-logical basis.
    fn install_basis(&mut self, hint: Option<&Basis>) {
        if let Some(b) = hint {
            if self.try_install(b) {
                return;
            }
        }
        self.install_logical();
    }

    fn install_logical(&mut self) {
        self.etas.clear();
        self.eta_entries = 0;
        self.basic = (self.n..self.total()).collect();
        self.state = vec![VarState::AtLower; self.total()];
        for r in 0..self.m {
            self.state[self.n + r] = VarState::Basic(r);
        }
        self.compute_xb();
    }

    fn try_install(&mut self, hint: &Basis) -> bool {
        if hint.basic.len() != self.m || hint.at_upper.len() != self.total() {
            return false;
        }
        let mut seen = vec![false; self.total()];
        for &j in &hint.basic {
            if j >= self.total() || seen[j] {
                return false;
            }
            seen[j] = true;
        }
        self.basic = hint.basic.clone();
        for j in 0..self.total() {
            self.state[j] = if hint.at_upper[j] && self.upper[j].is_finite() {
                VarState::AtUpper
            } else {
                VarState::AtLower
            };
        }
        for (r, &j) in self.basic.iter().enumerate() {
            self.state[j] = VarState::Basic(r);
        }
        if self.refactorize().is_err() {
            self.install_logical();
            return true;
        }
        self.compute_xb();
        true
    }

    /// Rebuilds the eta file by Gaussian elimination over the basic columns
    /// with partial pivoting. The basic set is treated as unordered: each
    /// column may claim any still-free row, so the row assignment can
    /// change. Callers must recompute `xb` afterwards.
    fn refactorize(&mut self) -> Result<(), LpError> {
        self.etas.clear();
        self.eta_entries = 0;
        let old_basic = std::mem::take(&mut self.basic);
        let mut new_basic = vec![usize::MAX; self.m];
        let mut assigned = vec![false; self.m];
        // Slacks sitting on their own row first: they pivot without etas.
        let mut order: Vec<usize> = (0..self.m).collect();
        order.sort_unstable_by_key(|&r| (old_basic[r] != self.n + r, old_basic[r]));
        for &slot in &order {
            let j = old_basic[slot];
            let alpha = self.solved_column(j);
            let mut best: Option<usize> = None;
            for r in 0..self.m {
                if !assigned[r]
                    && best.is_none_or(|b: usize| alpha[r].abs() > alpha[b].abs())
                {
                    best = Some(r);
                }
            }
            let r = best.expect("one free row per unprocessed column");
            if alpha[r].abs() <= PIVOT_TOL {
                self.basic = old_basic;
                return Err(LpError::Numerical("singular basis in refactorization".into()));
            }
            assigned[r] = true;
            new_basic[r] = j;
            if alpha[r] != 1.0 || alpha.iter().enumerate().any(|(i, &a)| i != r && a != 0.0) {
                self.push_eta(r, &alpha);
            }
        }
        self.basic = new_basic;
        for (r, &j) in self.basic.iter().enumerate() {
            self.state[j] = VarState::Basic(r);
        }
        Ok(())
    }

    fn push_eta(&mut self, row: usize, alpha: &[f64]) {
        let entries: Vec<(usize, f64)> = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != row && a.abs() > DROP_TOL)
            .map(|(i, &a)| (i, a))
            .collect();
        self.eta_entries += entries.len() + 1;
        self.etas.push(Eta {
            row,
            inv_pivot: 1.0 / alpha[row],
            entries,
        });
    }

    /// xb = B^{-1} (b - A_N x_N).
    fn compute_xb(&mut self) {
        let mut rhs: Vec<f64> = self.lp.rows.iter().map(|r| r.rhs).collect();
        for j in 0..self.total() {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let xj = self.nonbasic_value(j);
            if xj != 0.0 {
                for (r, a) in self.column(j) {
                    rhs[r] -= a * xj;
                }
            }
        }
        self.ftran(&mut rhs);
        self.xb = rhs;
    }

    fn infeasibility(&self) -> f64 {
        let tol = self.opts.feasibility_tol;
        let mut total = 0.0;
        for r in 0..self.m {
            let j = self.basic[r];
            if self.xb[r] < self.lower[j] - tol {
                total += self.lower[j] - self.xb[r];
            } else if self.xb[r] > self.upper[j] + tol {
                total += self.xb[r] - self.upper[j];
            }
        }
        total
    }

    fn run(&mut self) -> Result<LpOutcome, LpError> {
        loop {
            let feasible = self.infeasibility() <= 1e-7;
            let done = if feasible {
                self.iterate(Phase::Two)?
            } else {
                self.iterate(Phase::One)?
            };
            match done {
                Step::Pivoted => continue,
                Step::OptimalPhase => {
                    if feasible {
                        return Ok(LpOutcome::Optimal(self.finish()?));
                    }
                    return Ok(LpOutcome::Infeasible {
                        iterations: self.iterations,
                    });
                }
            }
        }
    }

    /// Objective coefficient of variable `j` in the given phase.
    fn cost(&self, phase: Phase, j: usize) -> f64 {
        match phase {
            Phase::Two => {
                if j < self.n {
                    self.lp.objective[j]
                } else {
                    0.0
                }
            }
            Phase::One => 0.0, // phase-1 costs live on infeasible basics only
        }
    }

    fn basic_cost(&self, phase: Phase, r: usize) -> f64 {
        let j = self.basic[r];
        match phase {
            Phase::Two => self.cost(Phase::Two, j),
            Phase::One => {
                let tol = self.opts.feasibility_tol;
                if self.xb[r] < self.lower[j] - tol {
                    1.0 // below its bound: increasing the value helps
                } else if self.xb[r] > self.upper[j] + tol {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn iterate(&mut self, phase: Phase) -> Result<Step, LpError> {
        self.iterations += 1;
        if self.iterations > self.opts.max_iterations {
            return Err(LpError::IterationLimit);
        }
        if self.iterations.is_multiple_of(128) {
            if let Some(deadline) = self.opts.deadline {
                if Instant::now() >= deadline {
                    return Err(LpError::TimedOut);
                }
            }
        }
        if self.iterations.is_multiple_of(REFACTOR_INTERVAL) || self.eta_entries > MAX_ETA_ENTRIES {
            self.refactorize()?;
            self.compute_xb();
        }

        // Duals for the phase costs, then Dantzig (or Bland) pricing.
        let mut y: Vec<f64> = (0..self.m).map(|r| self.basic_cost(phase, r)).collect();
        self.btran(&mut y);

        let tol = self.opts.optimality_tol;
        let mut entering: Option<(usize, f64, bool)> = None; // (j, |d|, from_lower)
        for j in 0..self.total() {
            let from_lower = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLower => true,
                VarState::AtUpper => false,
            };
            if self.lower[j] >= self.upper[j] {
                continue; // fixed
            }
            let mut d = self.cost(phase, j);
            for (r, a) in self.column(j) {
                d -= y[r] * a;
            }
            let improving = if from_lower { d > tol } else { d < -tol };
            if !improving {
                continue;
            }
            if self.bland {
                entering = Some((j, d.abs(), from_lower));
                break;
            }
            match entering {
                Some((_, best, _)) if d.abs() <= best => {}
                _ => entering = Some((j, d.abs(), from_lower)),
            }
        }

        let Some((j_in, _, from_lower)) = entering else {
            return Ok(Step::OptimalPhase);
        };

        let alpha = self.solved_column(j_in);
        let sigma = if from_lower { 1.0 } else { -1.0 };

        // Ratio test: smallest blocking step; ties prefer larger |alpha|
        // then lower basic variable index for determinism.
        let ftol = self.opts.feasibility_tol;
        let own_range = self.upper[j_in] - self.lower[j_in];
        let mut t_best = own_range;
        let mut blocking: Option<(usize, bool)> = None; // (row, leaves_at_upper)
        for r in 0..self.m {
            if alpha[r].abs() <= PIVOT_TOL {
                continue;
            }
            let rate = -sigma * alpha[r];
            let jb = self.basic[r];
            let (lb, ub) = (self.lower[jb], self.upper[jb]);
            let v = self.xb[r];
            let (t_r, at_upper) = if v < lb - ftol {
                if rate > 0.0 {
                    ((lb - v) / rate, false)
                } else {
                    continue;
                }
            } else if v > ub + ftol {
                if rate < 0.0 {
                    ((v - ub) / -rate, true)
                } else {
                    continue;
                }
            } else if rate > 0.0 {
                if ub.is_finite() {
                    (((ub - v) / rate).max(0.0), true)
                } else {
                    continue;
                }
            } else {
                (((v - lb) / -rate).max(0.0), false)
            };
            let better = match blocking {
                None => t_r < t_best - 1e-12 || (t_best.is_infinite() && t_r.is_finite()),
                Some((prev_row, _)) => {
                    t_r < t_best - 1e-12
                        || (t_r < t_best + 1e-12
                            && (alpha[r].abs() > alpha[prev_row].abs() + 1e-12
                                || (alpha[r].abs() > alpha[prev_row].abs() - 1e-12
                                    && self.basic[r] < self.basic[prev_row])))
                }
            };
            if better {
                t_best = t_r.max(0.0);
                blocking = Some((r, at_upper));
            }
        }

        if t_best.is_infinite() {
            return Err(LpError::Numerical("unbounded direction".into()));
        }
        let t = t_best.max(0.0);

        for (r, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                self.xb[r] += -sigma * a * t;
            }
        }

        match blocking {
            None => {
                // Entering variable runs to its opposite bound.
                self.state[j_in] = if from_lower {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
            }
            Some((r, leaves_at_upper)) => {
                let j_out = self.basic[r];
                let entering_value = self.nonbasic_value(j_in) + sigma * t;
                self.state[j_out] = if leaves_at_upper {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
                // Snap the leaving variable exactly onto its bound.
                self.xb[r] = entering_value;
                self.basic[r] = j_in;
                self.state[j_in] = VarState::Basic(r);
                self.push_eta(r, &alpha);
            }
        }

        if t <= 1e-10 {
            self.degenerate_streak += 1;
            if self.degenerate_streak >= DEGENERACY_STREAK {
                self.bland = true;
            }
        } else {
            self.degenerate_streak = 0;
            self.bland = false;
        }
        Ok(Step::Pivoted)
    }

    fn finish(&mut self) -> Result<LpSolution, LpError> {
        // Recompute basic values from scratch and re-check feasibility.
        self.refactorize()?;
        self.compute_xb();
        if self.infeasibility() > 1e-6 {
            return Err(LpError::Numerical(format!(
                "residual infeasibility {:.3e} after solve",
                self.infeasibility()
            )));
        }
        let values: Vec<f64> = (0..self.n)
            .map(|j| match self.state[j] {
                VarState::Basic(r) => self.xb[r],
                VarState::AtLower => self.lower[j],
                VarState::AtUpper => self.upper[j],
            })
            .collect();
        let objective = values
            .iter()
            .zip(&self.lp.objective)
            .map(|(&x, &c)| x * c)
            .sum();
        let mut at_upper = vec![false; self.total()];
        for (j, flag) in at_upper.iter_mut().enumerate() {
            *flag = self.state[j] == VarState::AtUpper;
        }
        Ok(LpSolution {
            objective,
            values,
            iterations: self.iterations,
            basis: Basis {
                basic: self.basic.clone(),
                at_upper,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Step {
    Pivoted,
    OptimalPhase,
}

enum ColumnIter<'a> {
    Sparse(std::slice::Iter<'a, (usize, f64)>),
    Unit(Option<usize>),
}

impl<'a> Iterator for ColumnIter<'a> {
    type Item = (usize, f64);
    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            ColumnIter::Sparse(it) => it.next().copied(),
            ColumnIter::Unit(r) => r.take().map(|r| (r, 1.0)),
        }
    }
}
