//! Brute-force optimal MAPF-DL solver for small instances.
//!
//! Enumerates agent subsets in decreasing size order and, for each subset,
//! searches the joint configuration space breadth-first, expanding all
//! joint moves that respect the wait/move, vertex-collision and
//! edge-collision conditions. Exhaustive and exact within the limits; it
//! shares no code with the flow/ILP pipeline and serves as its independent
//! ground truth.

use crate::instance::{Instance, Plan};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_agents: usize,
    pub max_states: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_agents: 4,
            max_states: 2_000_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {found} agents, oracle limit is {limit}")]
    TooManyAgents { found: usize, limit: usize },
    #[error("joint search exceeded the state limit of {limit}")]
    StateLimit { limit: usize },
}

/// Returns the maximum number of successful agents and a witness plan.
pub fn brute_force_optimal(
    instance: &Instance,
    limits: &OracleLimits,
) -> Result<(usize, Plan), OracleError> {
    let num_agents = instance.num_agents();
    if num_agents > limits.max_agents {
        return Err(OracleError::TooManyAgents {
            found: num_agents,
            limit: limits.max_agents,
        });
    }

    let goal_dist: Vec<Vec<usize>> = instance
        .agents
        .iter()
        .map(|a| instance.graph.bfs_distances(a.goal))
        .collect();

    for size in (1..=num_agents).rev() {
        for subset in combinations(num_agents, size) {
            // Exact per-agent reachability prune: an agent that cannot reach
            // its goal alone cannot reach it jointly either.
            if subset
                .iter()
                .any(|&a| goal_dist[a][instance.agents[a].start] > instance.deadline)
            {
                continue;
            }
            if let Some(paths) = joint_search(instance, &subset, &goal_dist, limits)? {
                let mut plan = Plan::empty(instance.deadline, num_agents);
                for (slot, &a) in subset.iter().enumerate() {
                    plan.paths[a] = Some(paths[slot].clone());
                }
                return Ok((size, plan));
            }
        }
    }
    Ok((0, Plan::empty(instance.deadline, num_agents)))
}

/// All size-k subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for v in start..n {
            if n - v < k - current.len() {
                break;
            }
            current.push(v);
            rec(n, k, v + 1, current, out);
            current.pop();
        }
    }
    rec(n, k, 0, &mut current, &mut out);
    out
}

/// Layered BFS over joint configurations. Returns per-subset-agent paths on
/// success.
fn joint_search(
    instance: &Instance,
    subset: &[usize],
    goal_dist: &[Vec<usize>],
    limits: &OracleLimits,
) -> Result<Option<Vec<Vec<usize>>>, OracleError> {
    let t_end = instance.deadline;
    let k = subset.len();
    let start: Vec<usize> = subset.iter().map(|&a| instance.agents[a].start).collect();

    // Arena of (config, parent index); parent usize::MAX for roots.
    let mut arena: Vec<(Vec<usize>, usize)> = vec![(start, usize::MAX)];
    let mut frontier: Vec<usize> = vec![0];

    for t in 0..t_end {
        let mut next: Vec<usize> = Vec::new();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for &state_idx in &frontier {
            let config = arena[state_idx].0.clone();
            let mut scratch = vec![0usize; k];
            expand(
                instance,
                subset,
                goal_dist,
                &config,
                t,
                0,
                &mut scratch,
                &mut |joint: &[usize]| {
                    if seen.insert(joint.to_vec()) {
                        arena.push((joint.to_vec(), state_idx));
                        next.push(arena.len() - 1);
                    }
                },
            );
            if arena.len() > limits.max_states {
                return Err(OracleError::StateLimit {
                    limit: limits.max_states,
                });
            }
        }
        if next.is_empty() {
            return Ok(None);
        }
        frontier = next;
    }

    // Goal-distance pruning guarantees any surviving state at t_end is the
    // joint goal configuration.
    let mut idx = frontier[0];
    debug_assert!(arena[idx]
        .0
        .iter()
        .zip(subset)
        .all(|(&v, &a)| v == instance.agents[a].goal));
    let mut configs = Vec::new();
    while idx != usize::MAX {
        configs.push(arena[idx].0.clone());
        idx = arena[idx].1;
    }
    configs.reverse();
    let paths = (0..k)
        .map(|slot| configs.iter().map(|c| c[slot]).collect())
        .collect();
    Ok(Some(paths))
}

/// Recursively assigns a move to each agent, checking vertex and swap
/// conflicts against already-placed agents and pruning moves from which the
/// goal is no longer reachable in the remaining time.
#[allow(clippy::too_many_arguments)]
fn expand(
    instance: &Instance,
    subset: &[usize],
    goal_dist: &[Vec<usize>],
    config: &[usize],
    t: usize,
    slot: usize,
    joint: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if slot == config.len() {
        emit(joint);
        return;
    }
    let here = config[slot];
    let agent = subset[slot];
    let remaining = instance.deadline - t - 1;
    let mut moves: Vec<usize> = Vec::with_capacity(5);
    moves.push(here);
    moves.extend_from_slice(instance.graph.neighbors(here));
    moves.sort_unstable();
    'moves: for target in moves {
        if goal_dist[agent][target] > remaining {
            continue;
        }
        for prev in 0..slot {
            if joint[prev] == target {
                continue 'moves; // vertex collision
            }
            if joint[prev] == here && config[prev] == target {
                continue 'moves; // edge collision (swap)
            }
        }
        joint[slot] = target;
        expand(instance, subset, goal_dist, config, t, slot + 1, joint, emit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{count_successful, validate_plan, Agent, Graph, Instance};

    fn limits() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn single_agent_within_deadline() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(g, 2, vec![Agent { start: 0, goal: 2 }]).unwrap();
        let (m, plan) = brute_force_optimal(&inst, &limits()).unwrap();
        assert_eq!(m, 1);
        assert!(validate_plan(&inst, &plan).unwrap().is_empty());
        assert_eq!(count_successful(&plan), 1);
    }

    #[test]
    fn swap_on_a_single_edge_is_impossible() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        for t_end in 1..=4 {
            let inst = Instance::new(
                g.clone(),
                t_end,
                vec![Agent { start: 0, goal: 1 }, Agent { start: 1, goal: 0 }],
            )
            .unwrap();
            let (m, plan) = brute_force_optimal(&inst, &limits()).unwrap();
            assert_eq!(m, 1, "t_end={t_end}");
            assert!(validate_plan(&inst, &plan).unwrap().is_empty());
        }
    }

    #[test]
    fn opposing_agents_on_three_vertex_path() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(
            g,
            2,
            vec![Agent { start: 0, goal: 2 }, Agent { start: 2, goal: 0 }],
        )
        .unwrap();
        let (m, _) = brute_force_optimal(&inst, &limits()).unwrap();
        assert_eq!(m, 1);
    }

    #[test]
    fn deadline_zero_counts_agents_already_home() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = Instance::new(
            g,
            0,
            vec![Agent { start: 0, goal: 0 }, Agent { start: 1, goal: 2 }],
        )
        .unwrap();
        let (m, plan) = brute_force_optimal(&inst, &limits()).unwrap();
        assert_eq!(m, 1);
        assert_eq!(plan.paths[0], Some(vec![0]));
        assert_eq!(plan.paths[1], None);
    }

    #[test]
    fn result_invariant_under_agent_reordering() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let agents = vec![
            Agent { start: 0, goal: 3 },
            Agent { start: 3, goal: 0 },
            Agent { start: 1, goal: 2 },
        ];
        let inst = Instance::new(g.clone(), 3, agents.clone()).unwrap();
        let (m, _) = brute_force_optimal(&inst, &limits()).unwrap();
        let mut reversed = agents;
        reversed.reverse();
        let inst2 = Instance::new(g, 3, reversed).unwrap();
        let (m2, _) = brute_force_optimal(&inst2, &limits()).unwrap();
        assert_eq!(m, m2);
    }

    #[test]
    fn monotone_in_deadline() {
        let g = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let agents = vec![Agent { start: 0, goal: 3 }, Agent { start: 3, goal: 0 }];
        let mut last = 0;
        for t_end in 0..=6 {
            let inst = Instance::new(g.clone(), t_end, agents.clone()).unwrap();
            let (m, _) = brute_force_optimal(&inst, &limits()).unwrap();
            assert!(m >= last, "t_end={t_end}: {m} < {last}");
            last = m;
        }
        assert_eq!(last, 2);
    }

    #[test]
    fn agent_limit_is_enforced() {
        let g = Graph::new(6, (0..5).map(|i| (i, i + 1)).collect()).unwrap();
        let agents: Vec<Agent> = (0..5)
            .map(|i| Agent {
                start: i,
                goal: (i + 1) % 6,
            })
            .collect();
        let inst = Instance::new(g, 3, agents).unwrap();
        assert!(matches!(
            brute_force_optimal(&inst, &limits()),
            Err(OracleError::TooManyAgents { .. })
        ));
    }
}
