//! Exact 0/1 ILP solver: LP relaxation by simplex plus depth-first
//! branch-and-bound.
//!
//! Branching picks the most fractional variable (ties broken by lowest
//! index) and explores the 1-branch first, so the search is deterministic.
//! Every incumbent is re-verified against the model in exact integer
//! arithmetic before it is accepted.

pub mod simplex;

use crate::ilp::{Comparator, IlpModel};
use simplex::{
    solve_lp, Basis, LinearProgram, LpError, LpOutcome, LpRow, RowKind, SimplexOptions,
};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub time_limit: Option<Duration>,
    /// A relaxation value within this distance of an integer counts as
    /// integral.
    pub integrality_tol: f64,
    /// Feasibility and optimality tolerance of the LP subproblems.
    pub lp_tol: f64,
    pub node_limit: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_limit: None,
            integrality_tol: 1e-6,
            lp_tol: 1e-9,
            node_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub nodes: u64,
    pub lp_iterations: u64,
    pub wall_time: Duration,
    /// Largest observed increase of a child LP bound over its parent's;
    /// stays at numerical noise level when the relaxation behaves.
    pub max_bound_increase: f64,
}

#[derive(Debug, Clone)]
pub struct IlpSolution {
    pub status: SolveStatus,
    /// Best objective found; on `Optimal` this is the true maximum.
    pub objective: i64,
    /// 0/1 values per variable for the best solution, absent only if the
    /// search was cut off before the root relaxation finished.
    pub assignment: Option<Vec<i64>>,
    pub stats: SolveStats,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("LP relaxation is infeasible")]
    Infeasible,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone)]
pub struct LpRelaxation {
    pub objective: f64,
    pub values: Vec<f64>,
    pub iterations: u64,
    pub basis: Basis,
}

/// Converts the integer model to sparse column-major LP data.
fn lp_from_model(model: &IlpModel) -> LinearProgram {
    let n = model.num_variables();
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut rows = Vec::with_capacity(model.constraints.len());
    for (r, c) in model.constraints.iter().enumerate() {
        for &(j, coef) in &c.terms {
            columns[j].push((r, coef as f64));
        }
        rows.push(LpRow {
            kind: match c.comparator {
                Comparator::Le => RowKind::Le,
                Comparator::Eq => RowKind::Eq,
            },
            rhs: c.rhs as f64,
        });
    }
    LinearProgram {
        num_vars: n,
        columns,
        objective: model.objective.iter().map(|&c| c as f64).collect(),
        rows,
    }
}

/// Solves the LP relaxation over the 0/1 box, optionally warm-started.
pub fn solve_lp_relaxation(
    model: &IlpModel,
    basis_hint: Option<&Basis>,
) -> Result<LpRelaxation, SolverError> {
    let lp = lp_from_model(model);
    let n = model.num_variables();
    let opts = SimplexOptions::default();
    match solve_lp(&lp, &vec![0.0; n], &vec![1.0; n], basis_hint, &opts) {
        Ok(LpOutcome::Optimal(s)) => Ok(LpRelaxation {
            objective: s.objective,
            values: s.values,
            iterations: s.iterations,
            basis: s.basis,
        }),
        Ok(LpOutcome::Infeasible { .. }) => Err(SolverError::Infeasible),
        Err(e) => Err(SolverError::Numerical(e.to_string())),
    }
}

struct Node {
    /// `(variable, value)` fixings along the path from the root.
    fixings: Vec<(usize, i64)>,
    /// Parent relaxation bound, used for pruning before solving the node.
    parent_bound: f64,
    basis: Basis,
}

/// Depth-first branch and bound. Returns the best 0/1 solution found; the
/// all-zero assignment seeds the incumbent whenever the model admits it.
pub fn solve_ilp(model: &IlpModel, config: &SolverConfig) -> Result<IlpSolution, SolverError> {
    let begin = Instant::now();
    let deadline = config.time_limit.map(|d| begin + d);
    let lp = lp_from_model(model);
    let n = model.num_variables();
    let mut stats = SolveStats::default();

    let mut incumbent: Option<(i64, Vec<i64>)> = None;
    let zeros = vec![0i64; n];
    if model.check_assignment(&zeros).is_ok() {
        incumbent = Some((model.objective_value(&zeros), zeros));
    }

    let lp_opts = SimplexOptions {
        feasibility_tol: config.lp_tol,
        optimality_tol: config.lp_tol,
        deadline,
        ..SimplexOptions::default()
    };

    let root = solve_lp_relaxation_inner(&lp, n, &[], None, &lp_opts, &mut stats)?;
    let mut cut_off = SolveStatus::Optimal;

    let mut stack: Vec<Node> = Vec::new();
    if let Some(root) = root {
        match check_integral(model, &root.values, config.integrality_tol) {
            Ok(assignment) => {
                let obj = model.objective_value(&assignment);
                if incumbent.as_ref().is_none_or(|(best, _)| obj > *best) {
                    incumbent = Some((obj, assignment));
                }
            }
            Err(_) => stack.push(Node {
                fixings: Vec::new(),
                parent_bound: root.objective,
                basis: root.basis,
            }),
        }
    } else {
        return Err(SolverError::Infeasible);
    }

    'search: while let Some(node) = stack.pop() {
        if let Some(d) = deadline {
            if Instant::now() >= d {
                cut_off = SolveStatus::TimeLimit;
                break;
            }
        }
        if let Some(limit) = config.node_limit {
            if stats.nodes >= limit {
                cut_off = SolveStatus::NodeLimit;
                break;
            }
        }
        let best = incumbent.as_ref().map_or(i64::MIN, |(obj, _)| *obj);
        if prune(node.parent_bound, best, config.integrality_tol) {
            continue;
        }
        stats.nodes += 1;

        // Branch on the most fractional variable of the parent relaxation,
        // re-solving the parent LP under this node's fixings.
        let relax = match solve_lp_relaxation_inner(
            &lp,
            n,
            &node.fixings,
            Some(&node.basis),
            &lp_opts,
            &mut stats,
        ) {
            Ok(r) => r,
            Err(SolverError::Numerical(msg)) if msg.contains("time limit") => {
                cut_off = SolveStatus::TimeLimit;
                break 'search;
            }
            Err(e) => return Err(e),
        };
        let Some(relax) = relax else {
            continue; // infeasible under these fixings
        };
        stats.max_bound_increase = stats
            .max_bound_increase
            .max(relax.objective - node.parent_bound);
        if prune(relax.objective, best, config.integrality_tol) {
            continue;
        }
        match check_integral(model, &relax.values, config.integrality_tol) {
            Ok(assignment) => {
                let obj = model.objective_value(&assignment);
                if incumbent.as_ref().is_none_or(|(b, _)| obj > *b) {
                    incumbent = Some((obj, assignment));
                }
            }
            Err(branch_var) => {
                // Push the 0-branch first so the 1-branch is explored first.
                for value in [0, 1] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((branch_var, value));
                    stack.push(Node {
                        fixings,
                        parent_bound: relax.objective,
                        basis: relax.basis.clone(),
                    });
                }
            }
        }
    }

    let (objective, assignment) = incumbent.ok_or(SolverError::Infeasible)?;
    stats.wall_time = begin.elapsed();
    Ok(IlpSolution {
        status: cut_off,
        objective,
        assignment: Some(assignment),
        stats,
    })
}

fn prune(bound: f64, best: i64, tol: f64) -> bool {
    ((bound + tol).floor() as i64) <= best
}

/// Solves the relaxation under fixings. `Ok(None)` means infeasible.
fn solve_lp_relaxation_inner(
    lp: &LinearProgram,
    n: usize,
    fixings: &[(usize, i64)],
    hint: Option<&Basis>,
    opts: &SimplexOptions,
    stats: &mut SolveStats,
) -> Result<Option<LpRelaxation>, SolverError> {
    let mut lower = vec![0.0; n];
    let mut upper = vec![1.0; n];
    for &(j, v) in fixings {
        lower[j] = v as f64;
        upper[j] = v as f64;
    }
    match solve_lp(lp, &lower, &upper, hint, opts) {
        Ok(LpOutcome::Optimal(s)) => {
            stats.lp_iterations += s.iterations;
            Ok(Some(LpRelaxation {
                objective: s.objective,
                values: s.values,
                iterations: s.iterations,
                basis: s.basis,
            }))
        }
        Ok(LpOutcome::Infeasible { iterations }) => {
            stats.lp_iterations += iterations;
            Ok(None)
        }
        Err(LpError::TimedOut) => Err(SolverError::Numerical("time limit".into())),
        Err(e) => Err(SolverError::Numerical(e.to_string())),
    }
}

/// Rounds an integral relaxation to 0/1 values and verifies it exactly.
/// Returns the most fractional variable index otherwise (ties: lowest).
fn check_integral(model: &IlpModel, values: &[f64], tol: f64) -> Result<Vec<i64>, usize> {
    let mut worst: Option<(usize, f64)> = None;
    for (j, &x) in values.iter().enumerate() {
        let frac = (x - x.round()).abs();
        if frac > tol {
            let score = (x.fract() - 0.5).abs();
            match worst {
                Some((_, best)) if score >= best => {}
                _ => worst = Some((j, score)),
            }
        }
    }
    if let Some((j, _)) = worst {
        return Err(j);
    }
    let assignment: Vec<i64> = values.iter().map(|&x| x.round() as i64).collect();
    match model.check_assignment(&assignment) {
        Ok(()) => Ok(assignment),
        // Rounding noise broke a row: refuse the incumbent and branch on
        // the variable with the largest residual instead.
        Err(_) => {
            let j = values
                .iter()
                .enumerate()
                .max_by(|a, b| {
                    let fa = (a.1 - a.1.round()).abs();
                    let fb = (b.1 - b.1.round()).abs();
                    fa.partial_cmp(&fb).unwrap()
                })
                .map_or(0, |(j, _)| j);
            Err(j)
        }
    }
}
