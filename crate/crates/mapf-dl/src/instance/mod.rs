//! Problem representation: graphs, instances, plans, and plan verification.

mod generate;
mod grid;
mod plan;

pub use generate::{generate_random_instance, GenerateParams};
pub use grid::{parse_grid_map, parse_map_text, parse_scenario_text};
pub use plan::{parse_plan_text, plan_to_text};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: unknown cell character '{ch}'")]
    UnknownCell { line: usize, ch: char },
    #[error("line {line}: map row has {found} cells, expected {expected}")]
    BadRowWidth {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("map has {found} rows, expected {expected}")]
    BadRowCount { found: usize, expected: usize },
    #[error("line {line}: agent {agent} on blocked cell ({x},{y})")]
    AgentOnBlockedCell {
        line: usize,
        agent: usize,
        x: usize,
        y: usize,
    },
    #[error("line {line}: agent {agent} cell ({x},{y}) out of bounds")]
    AgentOutOfBounds {
        line: usize,
        agent: usize,
        x: i64,
        y: i64,
    },
    #[error("line {line}: malformed scenario entry: {reason}")]
    MalformedScenario { line: usize, reason: String },
    #[error("line {line}: duplicate start cell for agent {agent}")]
    DuplicateStart { line: usize, agent: usize },
    #[error("line {line}: duplicate goal cell for agent {agent}")]
    DuplicateGoal { line: usize, agent: usize },
    #[error("graph edge ({u},{v}) is invalid: {reason}")]
    BadEdge { u: usize, v: usize, reason: String },
    #[error("agent {agent} vertex {vertex} out of range (|V| = {num_vertices})")]
    VertexOutOfRange {
        agent: usize,
        vertex: usize,
        num_vertices: usize,
    },
    #[error("agents {a} and {b} share a start vertex")]
    SharedStart { a: usize, b: usize },
    #[error("agents {a} and {b} share a goal vertex")]
    SharedGoal { a: usize, b: usize },
    #[error("failed to place agent {agent} after {attempts} attempts (graph too small or distance range unsatisfiable)")]
    PlacementFailed { agent: usize, attempts: usize },
    #[error("distance range [{lo},{hi}] exceeds deadline {deadline}")]
    DistanceRangeExceedsDeadline {
        lo: usize,
        hi: usize,
        deadline: usize,
    },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("instance has no grid metadata")]
    NoGridMetadata,
    #[error("line {line}: malformed plan entry: {reason}")]
    MalformedPlan { line: usize, reason: String },
}

/// Grid provenance of a graph: cell layout and the cell/vertex mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMeta {
    pub width: usize,
    pub height: usize,
    /// Row-major (y * width + x); `None` for blocked cells.
    pub cell_to_vertex: Vec<Option<usize>>,
    /// Per vertex: (x, y), i.e. (column, row).
    pub vertex_to_cell: Vec<(usize, usize)>,
}

/// Undirected graph over vertex ids `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    grid: Option<GridMeta>,
}

impl Graph {
    /// Builds a graph, normalizing each edge to `(min, max)` and sorting.
    /// Rejects self-loops, duplicates and out-of-range endpoints.
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, InstanceError> {
        Self::with_grid(num_vertices, edges, None)
    }

    pub fn with_grid(
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        grid: Option<GridMeta>,
    ) -> Result<Self, InstanceError> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(InstanceError::BadEdge {
                    u,
                    v,
                    reason: "self-loop".into(),
                });
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(InstanceError::BadEdge {
                    u,
                    v,
                    reason: format!("endpoint out of range (|V| = {num_vertices})"),
                });
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            let dup = normalized
                .windows(2)
                .find(|w| w[0] == w[1])
                .map(|w| w[0])
                .unwrap();
            return Err(InstanceError::BadEdge {
                u: dup.0,
                v: dup.1,
                reason: "duplicate edge".into(),
            });
        }
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            num_vertices,
            edges: normalized,
            adjacency,
            grid,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Undirected edges, normalized `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = (u.min(v), u.max(v));
        self.edges.binary_search(&(a, b)).is_ok()
    }

    pub fn grid(&self) -> Option<&GridMeta> {
        self.grid.as_ref()
    }

    /// Unweighted distances from `source`; `usize::MAX` marks unreachable.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_vertices];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices of the largest connected component, sorted. Ties break in
    /// favor of the component containing the smallest vertex id.
    pub fn largest_component(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_vertices];
        let mut best: Vec<usize> = Vec::new();
        for start in 0..self.num_vertices {
            if seen[start] {
                continue;
            }
            let mut component = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < component.len() {
                let v = component[head];
                head += 1;
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        component.push(w);
                    }
                }
            }
            if component.len() > best.len() {
                component.sort_unstable();
                best = component;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Agent {
    pub start: usize,
    pub goal: usize,
}

/// A MAPF-DL instance: graph, deadline and agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub deadline: usize,
    pub agents: Vec<Agent>,
}

impl Instance {
    /// Validates vertex ranges and the distinct-starts / distinct-goals
    /// requirement.
    pub fn new(graph: Graph, deadline: usize, agents: Vec<Agent>) -> Result<Self, InstanceError> {
        let n = graph.num_vertices();
        for (i, a) in agents.iter().enumerate() {
            for (name, v) in [("start", a.start), ("goal", a.goal)] {
                if v >= n {
                    let _ = name;
                    return Err(InstanceError::VertexOutOfRange {
                        agent: i,
                        vertex: v,
                        num_vertices: n,
                    });
                }
            }
        }
        for i in 0..agents.len() {
            for j in i + 1..agents.len() {
                if agents[i].start == agents[j].start {
                    return Err(InstanceError::SharedStart { a: i, b: j });
                }
                if agents[i].goal == agents[j].goal {
                    return Err(InstanceError::SharedGoal { a: i, b: j });
                }
            }
        }
        Ok(Instance {
            graph,
            deadline,
            agents,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    /// Serializes a grid-backed instance back to map text.
    pub fn to_map_text(&self) -> Result<String, InstanceError> {
        grid::map_to_text(self.graph.grid().ok_or(InstanceError::NoGridMetadata)?)
    }

    /// Serializes the agents of a grid-backed instance to scenario text.
    pub fn to_scenario_text(&self) -> Result<String, InstanceError> {
        let meta = self.graph.grid().ok_or(InstanceError::NoGridMetadata)?;
        let mut out = String::from("# start_x start_y goal_x goal_y\n");
        for a in &self.agents {
            let (sx, sy) = meta.vertex_to_cell[a.start];
            let (gx, gy) = meta.vertex_to_cell[a.goal];
            out.push_str(&format!("{sx} {sy} {gx} {gy}\n"));
        }
        Ok(out)
    }
}

/// Per-agent optional paths; an absent path marks an unsuccessful agent,
/// removed at time step zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub deadline: usize,
    pub paths: Vec<Option<Vec<usize>>>,
}

impl Plan {
    pub fn empty(deadline: usize, num_agents: usize) -> Self {
        Plan {
            deadline,
            paths: vec![None; num_agents],
        }
    }
}

/// Returns the number of agents with a present path.
pub fn count_successful(plan: &Plan) -> usize {
    plan.paths.iter().filter(|p| p.is_some()).count()
}

/// A collision between two successful agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collision {
    /// `vertex = l_i(time) = l_j(time)`.
    Vertex {
        agents: (usize, usize),
        vertex: usize,
        time: usize,
    },
    /// `from = l_i(time) = l_j(time+1)` and `to = l_j(time) = l_i(time+1)`.
    Edge {
        agents: (usize, usize),
        from: usize,
        to: usize,
        time: usize,
    },
}

/// A violated solution condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Condition 1: the path does not start at the agent's start vertex.
    WrongStart {
        agent: usize,
        expected: usize,
        found: usize,
    },
    /// Condition 2: a step is neither a wait nor a move along an edge.
    IllegalMove {
        agent: usize,
        time: usize,
        from: usize,
        to: usize,
    },
    /// A present path must end at the agent's goal.
    GoalNotReached {
        agent: usize,
        expected: usize,
        found: usize,
    },
    /// Condition 3 or 4.
    Collision(Collision),
}

/// Structural problems reported before any semantic check runs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanShapeError {
    #[error("plan has {found} paths, instance has {expected} agents")]
    AgentCountMismatch { found: usize, expected: usize },
    #[error("plan deadline {found} does not match instance deadline {expected}")]
    DeadlineMismatch { found: usize, expected: usize },
    #[error("agent {agent}: path has {found} entries, expected {expected}")]
    PathLength {
        agent: usize,
        found: usize,
        expected: usize,
    },
    #[error("agent {agent}: path visits vertex {vertex} out of range")]
    VertexOutOfRange { agent: usize, vertex: usize },
}

/// Checks conditions 1-4 plus goal arrival for every successful agent.
/// Returns every violation found; an empty list means the plan is valid.
pub fn validate_plan(instance: &Instance, plan: &Plan) -> Result<Vec<Violation>, PlanShapeError> {
    let t_end = instance.deadline;
    if plan.paths.len() != instance.agents.len() {
        return Err(PlanShapeError::AgentCountMismatch {
            found: plan.paths.len(),
            expected: instance.agents.len(),
        });
    }
    if plan.deadline != t_end {
        return Err(PlanShapeError::DeadlineMismatch {
            found: plan.deadline,
            expected: t_end,
        });
    }
    for (i, path) in plan.paths.iter().enumerate() {
        if let Some(p) = path {
            if p.len() != t_end + 1 {
                return Err(PlanShapeError::PathLength {
                    agent: i,
                    found: p.len(),
                    expected: t_end + 1,
                });
            }
            if let Some(&v) = p.iter().find(|&&v| v >= instance.graph.num_vertices()) {
                return Err(PlanShapeError::VertexOutOfRange { agent: i, vertex: v });
            }
        }
    }

    let mut violations = Vec::new();
    let successful: Vec<(usize, &Vec<usize>)> = plan
        .paths
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.as_ref().map(|p| (i, p)))
        .collect();

    for &(i, path) in &successful {
        if path[0] != instance.agents[i].start {
            violations.push(Violation::WrongStart {
                agent: i,
                expected: instance.agents[i].start,
                found: path[0],
            });
        }
        if path[t_end] != instance.agents[i].goal {
            violations.push(Violation::GoalNotReached {
                agent: i,
                expected: instance.agents[i].goal,
                found: path[t_end],
            });
        }
        for t in 1..=t_end {
            let (from, to) = (path[t - 1], path[t]);
            if from != to && !instance.graph.has_edge(from, to) {
                violations.push(Violation::IllegalMove {
                    agent: i,
                    time: t,
                    from,
                    to,
                });
            }
        }
    }

    for a in 0..successful.len() {
        for b in a + 1..successful.len() {
            let (i, pi) = successful[a];
            let (j, pj) = successful[b];
            for t in 0..=t_end {
                if pi[t] == pj[t] {
                    violations.push(Violation::Collision(Collision::Vertex {
                        agents: (i, j),
                        vertex: pi[t],
                        time: t,
                    }));
                }
                if t < t_end && pi[t] == pj[t + 1] && pj[t] == pi[t + 1] && pi[t] != pj[t] {
                    violations.push(Violation::Collision(Collision::Edge {
                        agents: (i, j),
                        from: pi[t],
                        to: pj[t],
                        time: t,
                    }));
                }
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap()
    }

    #[test]
    fn graph_rejects_self_loops_and_duplicates() {
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn instance_requires_distinct_starts_and_goals() {
        let g = path_graph(3);
        let shared_start = vec![
            Agent { start: 0, goal: 1 },
            Agent { start: 0, goal: 2 },
        ];
        assert!(matches!(
            Instance::new(g.clone(), 2, shared_start),
            Err(InstanceError::SharedStart { .. })
        ));
        let shared_goal = vec![
            Agent { start: 0, goal: 2 },
            Agent { start: 1, goal: 2 },
        ];
        assert!(matches!(
            Instance::new(g, 2, shared_goal),
            Err(InstanceError::SharedGoal { .. })
        ));
    }

    #[test]
    fn count_successful_examples() {
        let plan = Plan {
            deadline: 1,
            paths: vec![None, Some(vec![1, 2])],
        };
        assert_eq!(count_successful(&plan), 1);
        assert_eq!(count_successful(&Plan::empty(1, 3)), 0);
        let all = Plan {
            deadline: 0,
            paths: vec![Some(vec![0]), Some(vec![1]), Some(vec![2])],
        };
        assert_eq!(count_successful(&all), 3);
    }

    #[test]
    fn validate_accepts_wait_at_goal() {
        // Deadline 0: agent successful iff already at its goal.
        let g = path_graph(2);
        let inst = Instance::new(g, 0, vec![Agent { start: 0, goal: 0 }]).unwrap();
        let plan = Plan {
            deadline: 0,
            paths: vec![Some(vec![0])],
        };
        assert!(validate_plan(&inst, &plan).unwrap().is_empty());
    }

    #[test]
    fn validate_reports_vertex_collisions_for_identical_paths() {
        let g = path_graph(2);
        let inst = Instance::new(
            g,
            1,
            vec![Agent { start: 0, goal: 1 }, Agent { start: 1, goal: 0 }],
        )
        .unwrap();
        // Both agents glued to vertex 0 at both steps: collisions at t=0 and t=1,
        // plus start/goal condition violations for agent 1.
        let plan = Plan {
            deadline: 1,
            paths: vec![Some(vec![0, 0]), Some(vec![0, 0])],
        };
        let violations = validate_plan(&inst, &plan).unwrap();
        let vertex_collisions: Vec<_> = violations
            .iter()
            .filter(|v| matches!(v, Violation::Collision(Collision::Vertex { .. })))
            .collect();
        assert_eq!(vertex_collisions.len(), 2);
    }

    #[test]
    fn validate_reports_the_canonical_swap() {
        let g = path_graph(2);
        let inst = Instance::new(
            g,
            1,
            vec![Agent { start: 0, goal: 1 }, Agent { start: 1, goal: 0 }],
        )
        .unwrap();
        let plan = Plan {
            deadline: 1,
            paths: vec![Some(vec![0, 1]), Some(vec![1, 0])],
        };
        let violations = validate_plan(&inst, &plan).unwrap();
        assert_eq!(
            violations,
            vec![Violation::Collision(Collision::Edge {
                agents: (0, 1),
                from: 0,
                to: 1,
                time: 0,
            })]
        );
    }

    #[test]
    fn validate_reports_structural_errors_first() {
        let g = path_graph(3);
        let inst = Instance::new(g, 2, vec![Agent { start: 0, goal: 2 }]).unwrap();
        let plan = Plan {
            deadline: 2,
            paths: vec![Some(vec![0, 1])],
        };
        assert_eq!(
            validate_plan(&inst, &plan),
            Err(PlanShapeError::PathLength {
                agent: 0,
                found: 2,
                expected: 3,
            })
        );
    }

    #[test]
    fn validate_checks_condition_2() {
        let g = Graph::new(3, vec![(0, 1)]).unwrap();
        let inst = Instance::new(g, 1, vec![Agent { start: 0, goal: 2 }]).unwrap();
        let plan = Plan {
            deadline: 1,
            paths: vec![Some(vec![0, 2])],
        };
        let violations = validate_plan(&inst, &plan).unwrap();
        assert!(violations.contains(&Violation::IllegalMove {
            agent: 0,
            time: 1,
            from: 0,
            to: 2,
        }));
    }

    #[test]
    fn largest_component_prefers_bigger_then_lower_ids() {
        let g = Graph::new(6, vec![(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(g.largest_component(), vec![2, 3, 4]);
    }

    #[test]
    fn bfs_distances_mark_unreachable() {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let d = g.bfs_distances(0);
        assert_eq!(d[1], 1);
        assert_eq!(d[2], usize::MAX);
    }
}
