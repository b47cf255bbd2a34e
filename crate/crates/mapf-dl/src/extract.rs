//! Turns ILP solutions back into plans, and plans back into assignments.
//!
//! Also hosts `solve_instance`, the end-to-end pipeline: network
//! construction, optional reduction, model building, branch-and-bound, plan
//! extraction and validation.

use crate::ilp::{build_compact_ilp, build_full_ilp, IlpModel};
use crate::instance::{count_successful, validate_plan, Instance, Plan};
use crate::network::{
    build_abstracted_network, build_full_network, commodity_edge_sets, reduce_network,
    FlowNetwork, NetworkForm, NodeTag, SplitSide,
};
use crate::solver::{solve_ilp, SolveStats, SolveStatus, SolverConfig, SolverError};
use std::collections::HashMap;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Follows each commodity's unit flow from its supply node and records the
/// vertex occupied at each time step. Works on all three network forms; on
/// the full form, gadget-internal and `in` nodes are traversal detail and
/// only `out` nodes mark occupancy.
///
/// The assignment must already satisfy the model exactly; inconsistent flow
/// (no unique next edge, or a walk that misses the demand node) panics.
pub fn extract_plan(
    network: &FlowNetwork,
    model: &IlpModel,
    assignment: &[i64],
    instance: &Instance,
) -> Plan {
    assert_eq!(assignment.len(), model.num_variables());
    let t_end = instance.deadline;
    let mut plan = Plan::empty(t_end, instance.num_agents());

    // Per commodity: node -> edge carrying its flow out of that node.
    let mut next: Vec<HashMap<usize, usize>> = vec![HashMap::new(); instance.num_agents()];
    for (j, var) in model.variables.iter().enumerate() {
        if assignment[j] == 1 {
            let from = network.edges[var.edge].0;
            let prev = next[var.commodity].insert(from, var.edge);
            assert!(
                prev.is_none(),
                "commodity {} sends two units out of node {}",
                var.commodity,
                from
            );
        }
    }

    for (i, next) in next.iter().enumerate() {
        let supply = network.supply[i];
        if !next.contains_key(&supply) {
            continue; // no outflow: agent unsuccessful
        }
        let mut path = Vec::with_capacity(t_end + 1);
        let mut node = supply;
        let step_limit = network.edges.len() + 1;
        for _ in 0..step_limit {
            match network.nodes[node] {
                NodeTag::Layer { vertex, .. } => path.push(vertex),
                NodeTag::Split {
                    vertex,
                    side: SplitSide::Out,
                    ..
                } => path.push(vertex),
                _ => {}
            }
            if node == network.demand[i] {
                break;
            }
            let &edge = next
                .get(&node)
                .unwrap_or_else(|| panic!("commodity {i} flow stops at node {node}"));
            node = network.edges[edge].1;
        }
        assert_eq!(node, network.demand[i], "commodity {i} never reaches demand");
        assert_eq!(path.len(), t_end + 1);
        plan.paths[i] = Some(path);
    }
    plan
}

/// Re-encodes a plan as a 0/1 assignment over a compact model's variables.
/// Only abstracted and reduced networks are supported; every traversed edge
/// must have a variable for that commodity.
pub fn plan_to_assignment(
    network: &FlowNetwork,
    model: &IlpModel,
    instance: &Instance,
    plan: &Plan,
) -> Vec<i64> {
    assert!(matches!(
        network.form,
        NetworkForm::Abstracted | NetworkForm::Reduced
    ));
    assert_eq!(plan.deadline, instance.deadline);
    let mut node_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (id, tag) in network.nodes.iter().enumerate() {
        let NodeTag::Layer { vertex, time } = *tag else {
            unreachable!()
        };
        node_of.insert((vertex, time), id);
    }

    let mut values = vec![0i64; model.num_variables()];
    for (i, path) in plan.paths.iter().enumerate() {
        let Some(path) = path else { continue };
        assert_eq!(path.len(), plan.deadline + 1);
        for t in 0..plan.deadline {
            let from = node_of[&(path[t], t)];
            let to = node_of[&(path[t + 1], t + 1)];
            let edge = network
                .out_edges(from)
                .iter()
                .copied()
                .find(|&e| network.edges[e].1 == to)
                .unwrap_or_else(|| panic!("no edge {} -> {} at time {t}", path[t], path[t + 1]));
            let j = model
                .variable_index(i, edge)
                .unwrap_or_else(|| panic!("no variable for commodity {i} on edge {edge}"));
            values[j] = 1;
        }
    }
    values
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Gadget network with per-edge capacities only.
    Full,
    /// Compact model with explicit collision constraints.
    Abstracted,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Prune the network to deadline-feasible nodes and edges.
    pub use_reduction: bool,
    /// Restrict each commodity's variables to its feasible edges.
    pub per_commodity: bool,
    pub formulation: Formulation,
    pub solver: SolverConfig,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            use_reduction: true,
            per_commodity: true,
            formulation: Formulation::Abstracted,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct StageTimings {
    pub build: Duration,
    pub solve: Duration,
    pub extract: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Number of successful agents; the true optimum iff status is Optimal.
    pub successful: usize,
    pub plan: Plan,
    pub num_variables: usize,
    pub num_constraints: usize,
    pub stats: SolveStats,
    pub timings: StageTimings,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("extracted plan failed validation: {0}")]
    BadPlan(String),
}

/// Builds the network and model exactly as `solve_instance` would.
pub fn build_model(instance: &Instance, options: &SolveOptions) -> (FlowNetwork, IlpModel) {
    match options.formulation {
        Formulation::Full => {
            let network = build_full_network(instance);
            let model = build_full_ilp(&network, instance);
            (network, model)
        }
        Formulation::Abstracted => {
            let (abstracted, pairs) = build_abstracted_network(instance);
            let (network, pairs) = if options.use_reduction {
                let (reduced, rpairs, _) = reduce_network(&abstracted, &pairs, instance);
                (reduced, rpairs)
            } else {
                (abstracted, pairs)
            };
            let sets = options
                .per_commodity
                .then(|| commodity_edge_sets(&network, instance));
            let model = build_compact_ilp(&network, &pairs, instance, sets.as_deref());
            (network, model)
        }
    }
}

/// Solves an instance end to end and returns a validated plan.
pub fn solve_instance(instance: &Instance, options: &SolveOptions) -> Result<SolveReport, SolveError> {
    // With no time steps there are no flow variables; an agent succeeds
    // exactly when it already stands on its goal.
    if instance.deadline == 0 {
        let mut plan = Plan::empty(0, instance.num_agents());
        for (i, a) in instance.agents.iter().enumerate() {
            if a.start == a.goal {
                plan.paths[i] = Some(vec![a.start]);
            }
        }
        return Ok(SolveReport {
            status: SolveStatus::Optimal,
            successful: count_successful(&plan),
            plan,
            num_variables: 0,
            num_constraints: 0,
            stats: SolveStats::default(),
            timings: StageTimings::default(),
        });
    }

    let build_begin = Instant::now();
    let (network, model) = build_model(instance, options);
    let build = build_begin.elapsed();

    // No variables means no agent can move at all; skip the solver.
    if model.num_variables() == 0 {
        return Ok(SolveReport {
            status: SolveStatus::Optimal,
            successful: 0,
            plan: Plan::empty(instance.deadline, instance.num_agents()),
            num_variables: 0,
            num_constraints: model.constraints.len(),
            stats: SolveStats::default(),
            timings: StageTimings {
                build,
                ..StageTimings::default()
            },
        });
    }

    let solve_begin = Instant::now();
    let solution = solve_ilp(&model, &options.solver)?;
    let solve = solve_begin.elapsed();

    let extract_begin = Instant::now();
    let assignment = solution.assignment.expect("solver always returns a solution");
    model
        .check_assignment(&assignment)
        .map_err(|v| SolveError::BadPlan(format!("assignment violates {:?}", v.family)))?;
    let plan = extract_plan(&network, &model, &assignment, instance);
    match validate_plan(instance, &plan) {
        Ok(violations) if violations.is_empty() => {}
        Ok(violations) => {
            return Err(SolveError::BadPlan(format!("{:?}", violations[0])));
        }
        Err(shape) => return Err(SolveError::BadPlan(shape.to_string())),
    }
    let successful = count_successful(&plan);
    if successful as i64 != solution.objective {
        return Err(SolveError::BadPlan(format!(
            "plan success count {successful} disagrees with objective {}",
            solution.objective
        )));
    }
    let extract = extract_begin.elapsed();

    Ok(SolveReport {
        status: solution.status,
        successful,
        plan,
        num_variables: model.num_variables(),
        num_constraints: model.constraints.len(),
        stats: solution.stats,
        timings: StageTimings {
            build,
            solve,
            extract,
        },
    })
}
