//! Seeded random instance generation on 4-neighbor grids.
//!
//! The generator is deterministic for a fixed seed and uses ChaCha8
//! (`rand_chacha::ChaCha8Rng` seeded with `seed_from_u64`), so seeds are
//! portable across platforms and releases of this crate.

use super::{grid, Agent, Instance, InstanceError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct GenerateParams {
    pub width: usize,
    pub height: usize,
    /// Probability that a cell is blocked, independently per cell.
    pub block_probability: f64,
    pub num_agents: usize,
    /// Inclusive bounds on the start-goal shortest-path distance.
    pub distance_range: (usize, usize),
    pub deadline: usize,
    pub seed: u64,
}

const PLACEMENT_ATTEMPTS: usize = 2000;

/// Generates an instance on the largest connected component of a randomly
/// blocked grid. Start and goal cells are drawn uniformly subject to
/// pairwise-distinct starts, pairwise-distinct goals, and the distance range.
///
/// Cells outside the largest component are marked blocked in the grid
/// metadata, so serializing and re-parsing the instance round-trips exactly.
pub fn generate_random_instance(params: &GenerateParams) -> Result<Instance, InstanceError> {
    let (lo, hi) = params.distance_range;
    if lo > hi {
        return Err(InstanceError::BadParameter(format!(
            "distance range [{lo},{hi}] is empty"
        )));
    }
    if hi > params.deadline {
        return Err(InstanceError::DistanceRangeExceedsDeadline {
            lo,
            hi,
            deadline: params.deadline,
        });
    }
    if !(0.0..=1.0).contains(&params.block_probability) {
        return Err(InstanceError::BadParameter(format!(
            "block probability {} outside [0,1]",
            params.block_probability
        )));
    }
    if params.width == 0 || params.height == 0 {
        return Err(InstanceError::BadParameter("empty grid".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let cells = params.width * params.height;
    let mut blocked: Vec<bool> = (0..cells)
        .map(|_| rng.random::<f64>() < params.block_probability)
        .collect();

    // Restrict to the largest connected component of unblocked cells.
    let initial = grid::grid_graph(params.width, params.height, &blocked)?;
    let component = initial.largest_component();
    if !component.is_empty() {
        let meta = initial.grid().unwrap();
        let keep: std::collections::HashSet<usize> = component.iter().copied().collect();
        for (v, &(x, y)) in meta.vertex_to_cell.iter().enumerate() {
            if !keep.contains(&v) {
                blocked[y * params.width + x] = true;
            }
        }
    }
    let graph = grid::grid_graph(params.width, params.height, &blocked)?;

    let free: Vec<usize> = (0..graph.num_vertices()).collect();
    let mut starts: Vec<usize> = Vec::with_capacity(params.num_agents);
    let mut goals: Vec<usize> = Vec::with_capacity(params.num_agents);
    let mut agents = Vec::with_capacity(params.num_agents);

    for agent in 0..params.num_agents {
        let mut placed = false;
        for _ in 0..PLACEMENT_ATTEMPTS {
            if free.is_empty() {
                break;
            }
            let start = free[rng.random_range(0..free.len())];
            if starts.contains(&start) {
                continue;
            }
            let dist = graph.bfs_distances(start);
            let candidates: Vec<usize> = (0..graph.num_vertices())
                .filter(|&v| dist[v] >= lo && dist[v] <= hi && !goals.contains(&v))
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let goal = candidates[rng.random_range(0..candidates.len())];
            starts.push(start);
            goals.push(goal);
            agents.push(Agent { start, goal });
            placed = true;
            break;
        }
        if !placed {
            return Err(InstanceError::PlacementFailed {
                agent,
                attempts: PLACEMENT_ATTEMPTS,
            });
        }
    }

    Instance::new(graph, params.deadline, agents)
}
