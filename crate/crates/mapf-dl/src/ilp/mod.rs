//! Compact 0/1 ILP over an abstracted or reduced flow network, plus the
//! standard multi-commodity formulation over the full gadget network.
//!
//! All coefficients and right-hand sides are integers; no floating point
//! enters model construction.

mod lp_text;
mod mps;

pub use lp_text::export_lp;
pub use mps::export_mps;

use crate::instance::Instance;
use crate::network::{EdgePairIndex, FlowNetwork, NetworkForm};

/// The paper's δ notation is unusual: δ⁻(v) is the set of *outgoing* edges
/// of v and δ⁺(v) the set of *incoming* edges. The model builders go
/// through this wrapper so the mapping is spelled out exactly once.
pub struct DeltaConvention<'a> {
    network: &'a FlowNetwork,
}

impl<'a> DeltaConvention<'a> {
    pub fn new(network: &'a FlowNetwork) -> Self {
        DeltaConvention { network }
    }

    /// δ⁻(v): outgoing edges.
    pub fn out_edges(&self, node: usize) -> &[usize] {
        self.network.out_edges(node)
    }

    /// δ⁺(v): incoming edges.
    pub fn in_edges(&self, node: usize) -> &[usize] {
        self.network.in_edges(node)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Le,
    Eq,
}

/// Which constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintFamily {
    /// Flow conservation for one commodity at one node.
    Conservation { commodity: usize, node: usize },
    /// Start outflow equals goal inflow for one commodity.
    Coupling { commodity: usize },
    /// At most one unit of total outflow per node (layers 0..T_end-1).
    VertexCapacityOut { node: usize },
    /// At most one unit of total inflow per node (layers 1..T_end).
    VertexCapacityIn { node: usize },
    /// At most one traversal of a graph edge per time step, either direction.
    AntiSwap { pair: usize },
    /// At most one commodity per edge (full gadget formulation).
    EdgeCapacity { edge: usize },
}

#[derive(Debug, Clone)]
pub struct Constraint {
    /// `(variable index, coefficient)`, variable indices strictly increasing.
    pub terms: Vec<(usize, i64)>,
    pub comparator: Comparator,
    pub rhs: i64,
    pub family: ConstraintFamily,
}

/// A 0/1 variable `x_i[e]`: commodity `i` flow on network edge `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variable {
    pub commodity: usize,
    pub edge: usize,
}

/// 0/1 maximization model. Variables are ordered by (commodity, edge id);
/// constraints by family then index, so serialization is deterministic.
#[derive(Debug, Clone)]
pub struct IlpModel {
    pub variables: Vec<Variable>,
    /// Objective coefficients to maximize, one per variable.
    pub objective: Vec<i64>,
    pub constraints: Vec<Constraint>,
    pub num_commodities: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintViolation {
    pub constraint: usize,
    pub family: ConstraintFamily,
    pub lhs: i64,
    pub comparator: Comparator,
    pub rhs: i64,
}

impl IlpModel {
    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Looks up the variable index for `x_commodity[edge]`, if present.
    pub fn variable_index(&self, commodity: usize, edge: usize) -> Option<usize> {
        self.variables
            .binary_search_by_key(&(commodity, edge), |v| (v.commodity, v.edge))
            .ok()
    }

    pub fn objective_value(&self, values: &[i64]) -> i64 {
        self.objective
            .iter()
            .zip(values)
            .map(|(&c, &x)| c * x)
            .sum()
    }

    /// Re-evaluates every constraint and the 0/1 bounds in exact integer
    /// arithmetic.
    pub fn check_assignment(&self, values: &[i64]) -> Result<(), ConstraintViolation> {
        assert_eq!(values.len(), self.variables.len());
        for (j, &x) in values.iter().enumerate() {
            if x != 0 && x != 1 {
                return Err(ConstraintViolation {
                    constraint: usize::MAX,
                    family: ConstraintFamily::Coupling { commodity: j },
                    lhs: x,
                    comparator: Comparator::Le,
                    rhs: 1,
                });
            }
        }
        for (idx, c) in self.constraints.iter().enumerate() {
            let lhs: i64 = c.terms.iter().map(|&(j, coef)| coef * values[j]).sum();
            let ok = match c.comparator {
                Comparator::Le => lhs <= c.rhs,
                Comparator::Eq => lhs == c.rhs,
            };
            if !ok {
                return Err(ConstraintViolation {
                    constraint: idx,
                    family: c.family,
                    lhs,
                    comparator: c.comparator,
                    rhs: c.rhs,
                });
            }
        }
        Ok(())
    }
}

/// Maps (commodity, edge) to a variable index during construction.
struct VariableTable {
    variables: Vec<Variable>,
    /// Per commodity: edge id -> variable index, `usize::MAX` when absent.
    index: Vec<Vec<usize>>,
}

impl VariableTable {
    fn new(num_commodities: usize, num_edges: usize, per_commodity: Option<&[Vec<usize>]>) -> Self {
        let mut variables = Vec::new();
        let mut index = vec![vec![usize::MAX; num_edges]; num_commodities];
        for i in 0..num_commodities {
            match per_commodity {
                Some(sets) => {
                    for &e in &sets[i] {
                        index[i][e] = variables.len();
                        variables.push(Variable { commodity: i, edge: e });
                    }
                }
                None => {
                    for (e, slot) in index[i].iter_mut().enumerate() {
                        *slot = variables.len();
                        variables.push(Variable { commodity: i, edge: e });
                    }
                }
            }
        }
        VariableTable { variables, index }
    }

    fn get(&self, commodity: usize, edge: usize) -> Option<usize> {
        let idx = self.index[commodity][edge];
        (idx != usize::MAX).then_some(idx)
    }
}

/// Builds the compact ILP over an abstracted or reduced network:
/// maximize total start outflow subject to per-commodity conservation and
/// coupling, per-node vertex-capacity constraints, and per-pair anti-swap
/// constraints. The per-edge capacity `sum_i x_i[e] <= 1` is subsumed by
/// the vertex-capacity rows and therefore not emitted.
///
/// When `per_commodity` is given, `x_i[e]` exists only for edges in
/// commodity i's feasible set.
pub fn build_compact_ilp(
    network: &FlowNetwork,
    pairs: &EdgePairIndex,
    instance: &Instance,
    per_commodity: Option<&[Vec<usize>]>,
) -> IlpModel {
    assert!(matches!(
        network.form,
        NetworkForm::Abstracted | NetworkForm::Reduced
    ));
    let delta = DeltaConvention::new(network);
    let num_agents = instance.num_agents();
    let t_end = instance.deadline;
    let table = VariableTable::new(num_agents, network.edges.len(), per_commodity);

    let mut objective = vec![0i64; table.variables.len()];
    for i in 0..num_agents {
        for &e in delta.out_edges(network.supply[i]) {
            if let Some(j) = table.get(i, e) {
                objective[j] = 1;
            }
        }
    }

    let mut constraints = Vec::new();
    let mut push = |terms: Vec<(usize, i64)>, comparator, rhs, family| {
        if !terms.is_empty() {
            constraints.push(Constraint {
                terms,
                comparator,
                rhs,
                family,
            });
        }
    };

    // Conservation: inflow minus outflow is zero at every node except the
    // commodity's own supply and demand.
    for i in 0..num_agents {
        for node in 0..network.nodes.len() {
            if node == network.supply[i] || node == network.demand[i] {
                continue;
            }
            let mut terms = Vec::new();
            for &e in delta.in_edges(node) {
                if let Some(j) = table.get(i, e) {
                    terms.push((j, 1));
                }
            }
            for &e in delta.out_edges(node) {
                if let Some(j) = table.get(i, e) {
                    terms.push((j, -1));
                }
            }
            terms.sort_unstable_by_key(|&(j, _)| j);
            push(
                terms,
                Comparator::Eq,
                0,
                ConstraintFamily::Conservation { commodity: i, node },
            );
        }
    }

    // Coupling: start outflow equals goal inflow.
    for i in 0..num_agents {
        let mut terms = Vec::new();
        for &e in delta.out_edges(network.supply[i]) {
            if let Some(j) = table.get(i, e) {
                terms.push((j, 1));
            }
        }
        for &e in delta.in_edges(network.demand[i]) {
            if let Some(j) = table.get(i, e) {
                terms.push((j, -1));
            }
        }
        terms.sort_unstable_by_key(|&(j, _)| j);
        push(terms, Comparator::Eq, 0, ConstraintFamily::Coupling { commodity: i });
    }

    // Vertex capacity on outgoing flow (vacuous at the last layer) and,
    // to also constrain final-layer occupancy, on incoming flow.
    for node in 0..network.nodes.len() {
        if network.layer_time(node) >= t_end {
            continue;
        }
        let mut terms = Vec::new();
        for i in 0..num_agents {
            for &e in delta.out_edges(node) {
                if let Some(j) = table.get(i, e) {
                    terms.push((j, 1));
                }
            }
        }
        terms.sort_unstable_by_key(|&(j, _)| j);
        push(terms, Comparator::Le, 1, ConstraintFamily::VertexCapacityOut { node });
    }
    for node in 0..network.nodes.len() {
        if network.layer_time(node) == 0 {
            continue;
        }
        let mut terms = Vec::new();
        for i in 0..num_agents {
            for &e in delta.in_edges(node) {
                if let Some(j) = table.get(i, e) {
                    terms.push((j, 1));
                }
            }
        }
        terms.sort_unstable_by_key(|&(j, _)| j);
        push(terms, Comparator::Le, 1, ConstraintFamily::VertexCapacityIn { node });
    }

    // Anti-swap: the two opposing directions of one graph edge at one time
    // step carry at most one unit in total.
    for (p, pair) in pairs.0.iter().enumerate() {
        let mut terms = Vec::new();
        for i in 0..num_agents {
            for e in [pair.forward, pair.backward].into_iter().flatten() {
                if let Some(j) = table.get(i, e) {
                    terms.push((j, 1));
                }
            }
        }
        terms.sort_unstable_by_key(|&(j, _)| j);
        push(terms, Comparator::Le, 1, ConstraintFamily::AntiSwap { pair: p });
    }

    IlpModel {
        variables: table.variables,
        objective,
        constraints,
        num_commodities: num_agents,
    }
}

/// Standard multi-commodity ILP over the full gadget network: conservation,
/// coupling, and per-edge capacity. The gadgets themselves enforce the
/// collision rules, so no extra constraint families are needed.
pub fn build_full_ilp(network: &FlowNetwork, instance: &Instance) -> IlpModel {
    assert_eq!(network.form, NetworkForm::Full);
    let delta = DeltaConvention::new(network);
    let num_agents = instance.num_agents();
    let table = VariableTable::new(num_agents, network.edges.len(), None);

    let mut objective = vec![0i64; table.variables.len()];
    for i in 0..num_agents {
        for &e in delta.out_edges(network.supply[i]) {
            objective[table.get(i, e).unwrap()] = 1;
        }
    }

    let mut constraints = Vec::new();
    for i in 0..num_agents {
        for node in 0..network.nodes.len() {
            if node == network.supply[i] || node == network.demand[i] {
                continue;
            }
            let mut terms = Vec::new();
            for &e in delta.in_edges(node) {
                terms.push((table.get(i, e).unwrap(), 1));
            }
            for &e in delta.out_edges(node) {
                terms.push((table.get(i, e).unwrap(), -1));
            }
            if terms.is_empty() {
                continue;
            }
            terms.sort_unstable_by_key(|&(j, _)| j);
            constraints.push(Constraint {
                terms,
                comparator: Comparator::Eq,
                rhs: 0,
                family: ConstraintFamily::Conservation { commodity: i, node },
            });
        }
    }
    for i in 0..num_agents {
        let mut terms = Vec::new();
        for &e in delta.out_edges(network.supply[i]) {
            terms.push((table.get(i, e).unwrap(), 1));
        }
        for &e in delta.in_edges(network.demand[i]) {
            terms.push((table.get(i, e).unwrap(), -1));
        }
        if terms.is_empty() {
            continue;
        }
        terms.sort_unstable_by_key(|&(j, _)| j);
        constraints.push(Constraint {
            terms,
            comparator: Comparator::Eq,
            rhs: 0,
            family: ConstraintFamily::Coupling { commodity: i },
        });
    }
    for e in 0..network.edges.len() {
        let terms: Vec<(usize, i64)> = (0..num_agents)
            .filter_map(|i| table.get(i, e).map(|j| (j, 1)))
            .collect();
        if terms.is_empty() {
            continue;
        }
        constraints.push(Constraint {
            terms,
            comparator: Comparator::Le,
            rhs: 1,
            family: ConstraintFamily::EdgeCapacity { edge: e },
        });
    }

    IlpModel {
        variables: table.variables,
        objective,
        constraints,
        num_commodities: num_agents,
    }
}
