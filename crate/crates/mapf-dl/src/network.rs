//! Time-expanded multi-commodity flow networks.
//!
//! Three forms of the same construction:
//! - full: split nodes `v_t^in -> v_t^out` enforce vertex capacity and a
//!   merge-split gadget per (graph edge, time step) makes opposing
//!   simultaneous traversals infeasible by capacity alone;
//! - abstracted: split nodes contracted to a single `v_t` and each gadget
//!   replaced by the pair of directed edges `(u_t, v_{t+1})`, `(v_t, u_{t+1})`
//!   (collision rules are restored by explicit ILP constraints);
//! - reduced: the abstracted network pruned to nodes and edges on some
//!   start-to-goal path that fits within the deadline.

use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkForm {
    Full,
    Abstracted,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSide {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetSide {
    /// The merge node (`w1`): both endpoints feed into it.
    Merge,
    /// The split node (`w2`): feeds both endpoints at the next step.
    Split,
}

/// Identity of a network node: the original vertex (or graph edge for
/// gadget-internal nodes), the time step, and the structural role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeTag {
    /// `v_t` in the abstracted/reduced forms.
    Layer { vertex: usize, time: usize },
    /// `v_t^in` / `v_t^out` in the full form.
    Split {
        vertex: usize,
        time: usize,
        side: SplitSide,
    },
    /// Gadget-internal node for graph edge index `edge` between `time` and
    /// `time + 1`.
    Gadget {
        edge: usize,
        time: usize,
        side: GadgetSide,
    },
}

impl NodeTag {
    pub fn label(&self) -> String {
        match *self {
            NodeTag::Layer { vertex, time } => format!("v{vertex}_t{time}"),
            NodeTag::Split { vertex, time, side } => format!(
                "v{vertex}_t{time}_{}",
                match side {
                    SplitSide::In => "in",
                    SplitSide::Out => "out",
                }
            ),
            NodeTag::Gadget { edge, time, side } => format!(
                "e{edge}_t{time}_{}",
                match side {
                    GadgetSide::Merge => "w1",
                    GadgetSide::Split => "w2",
                }
            ),
        }
    }
}

/// Directed, layered, unit-capacity network with one commodity per agent.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub form: NetworkForm,
    pub nodes: Vec<NodeTag>,
    /// Directed edges `(from, to)` as node indices; all capacities are 1.
    pub edges: Vec<(usize, usize)>,
    /// Per commodity: node with supply 1.
    pub supply: Vec<usize>,
    /// Per commodity: node with demand 1.
    pub demand: Vec<usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn build(
        form: NetworkForm,
        nodes: Vec<NodeTag>,
        edges: Vec<(usize, usize)>,
        supply: Vec<usize>,
        demand: Vec<usize>,
    ) -> Self {
        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut in_edges = vec![Vec::new(); nodes.len()];
        for (id, &(from, to)) in edges.iter().enumerate() {
            out_edges[from].push(id);
            in_edges[to].push(id);
        }
        FlowNetwork {
            form,
            nodes,
            edges,
            supply,
            demand,
            out_edges,
            in_edges,
        }
    }

    /// Edge ids leaving `node` (the paper writes this set `δ⁻`).
    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    /// Edge ids entering `node` (the paper writes this set `δ⁺`).
    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    /// Time step of a `Layer` node; panics on full-form tags.
    pub fn layer_time(&self, node: usize) -> usize {
        match self.nodes[node] {
            NodeTag::Layer { time, .. } => time,
            other => panic!("layer_time on non-layer node {other:?}"),
        }
    }

    /// Debug dump in DOT format.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph flow {\n  rankdir=LR;\n");
        for (i, tag) in self.nodes.iter().enumerate() {
            let mut attrs = String::new();
            if let Some(c) = self.supply.iter().position(|&s| s == i) {
                attrs = format!(" [shape=box,label=\"{} +a{}\"]", tag.label(), c);
            } else if let Some(c) = self.demand.iter().position(|&d| d == i) {
                attrs = format!(" [shape=box,label=\"{} -a{}\"]", tag.label(), c);
            }
            out.push_str(&format!("  n{i}{attrs};\n"));
        }
        for &(from, to) in &self.edges {
            out.push_str(&format!("  n{from} -> n{to};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// For each undirected graph edge and time step, the two opposing
/// abstracted edges. In the reduced form one side may have been pruned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgePair {
    pub graph_edge: usize,
    pub time: usize,
    /// Edge id of `(u_t, v_{t+1})` with `u < v`.
    pub forward: Option<usize>,
    /// Edge id of `(v_t, u_{t+1})`.
    pub backward: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct EdgePairIndex(pub Vec<EdgePair>);

/// Builds the full gadget network.
///
/// Per time step: wait edges `v_t^out -> v_{t+1}^in`, split edges
/// `v_{t+1}^in -> v_{t+1}^out`, and per graph edge (u,v) a gadget
/// `u_t^out, v_t^out -> w1 -> w2 -> u_{t+1}^in, v_{t+1}^in` whose shared
/// unit-capacity edge `w1 -> w2` admits at most one traversal of (u,v) per
/// time step in either direction.
pub fn build_full_network(instance: &Instance) -> FlowNetwork {
    let n = instance.graph.num_vertices();
    let t_end = instance.deadline;
    let graph_edges = instance.graph.edges();

    let mut nodes = Vec::new();
    // out(v, 0) = v; in(v, t) and out(v, t) for t >= 1 via offsets.
    let out_id = |v: usize, t: usize| -> usize {
        if t == 0 {
            v
        } else {
            n + (t - 1) * 2 * n + 2 * v + 1
        }
    };
    let in_id = |v: usize, t: usize| -> usize {
        debug_assert!(t >= 1);
        n + (t - 1) * 2 * n + 2 * v
    };
    for v in 0..n {
        nodes.push(NodeTag::Split {
            vertex: v,
            time: 0,
            side: SplitSide::Out,
        });
    }
    for t in 1..=t_end {
        for v in 0..n {
            nodes.push(NodeTag::Split {
                vertex: v,
                time: t,
                side: SplitSide::In,
            });
            nodes.push(NodeTag::Split {
                vertex: v,
                time: t,
                side: SplitSide::Out,
            });
        }
    }
    let gadget_base = nodes.len();
    let merge_id = |k: usize, t: usize| gadget_base + 2 * (t * graph_edges.len() + k);
    let split_id = |k: usize, t: usize| merge_id(k, t) + 1;
    for t in 0..t_end {
        for k in 0..graph_edges.len() {
            nodes.push(NodeTag::Gadget {
                edge: k,
                time: t,
                side: GadgetSide::Merge,
            });
            nodes.push(NodeTag::Gadget {
                edge: k,
                time: t,
                side: GadgetSide::Split,
            });
        }
    }

    let mut edges = Vec::new();
    for t in 0..t_end {
        for v in 0..n {
            edges.push((out_id(v, t), in_id(v, t + 1)));
        }
        for (k, &(u, v)) in graph_edges.iter().enumerate() {
            let (w1, w2) = (merge_id(k, t), split_id(k, t));
            edges.push((out_id(u, t), w1));
            edges.push((out_id(v, t), w1));
            edges.push((w1, w2));
            edges.push((w2, in_id(u, t + 1)));
            edges.push((w2, in_id(v, t + 1)));
        }
        for v in 0..n {
            edges.push((in_id(v, t + 1), out_id(v, t + 1)));
        }
    }

    let supply = instance.agents.iter().map(|a| out_id(a.start, 0)).collect();
    let demand = instance
        .agents
        .iter()
        .map(|a| out_id(a.goal, t_end))
        .collect();
    FlowNetwork::build(NetworkForm::Full, nodes, edges, supply, demand)
}

/// Builds the abstracted network: nodes `v_t`, wait edges `(v_t, v_{t+1})`,
/// and per graph edge the opposing pair `(u_t, v_{t+1})`, `(v_t, u_{t+1})`.
pub fn build_abstracted_network(instance: &Instance) -> (FlowNetwork, EdgePairIndex) {
    let n = instance.graph.num_vertices();
    let t_end = instance.deadline;
    let graph_edges = instance.graph.edges();

    let node_id = |v: usize, t: usize| v * (t_end + 1) + t;
    let mut nodes = Vec::with_capacity(n * (t_end + 1));
    for v in 0..n {
        for t in 0..=t_end {
            nodes.push(NodeTag::Layer { vertex: v, time: t });
        }
    }

    let mut edges = Vec::new();
    let mut pairs = Vec::new();
    for t in 0..t_end {
        for v in 0..n {
            edges.push((node_id(v, t), node_id(v, t + 1)));
        }
        for (k, &(u, v)) in graph_edges.iter().enumerate() {
            let forward = edges.len();
            edges.push((node_id(u, t), node_id(v, t + 1)));
            let backward = edges.len();
            edges.push((node_id(v, t), node_id(u, t + 1)));
            pairs.push(EdgePair {
                graph_edge: k,
                time: t,
                forward: Some(forward),
                backward: Some(backward),
            });
        }
    }

    let supply = instance.agents.iter().map(|a| node_id(a.start, 0)).collect();
    let demand = instance
        .agents
        .iter()
        .map(|a| node_id(a.goal, t_end))
        .collect();
    (
        FlowNetwork::build(NetworkForm::Abstracted, nodes, edges, supply, demand),
        EdgePairIndex(pairs),
    )
}

/// Prunes the abstracted network with one forward BFS per start vertex and
/// one backward BFS per goal vertex.
///
/// Node `v_t` is kept iff for at least one agent i,
/// `dist(s_i, v) <= t` and `dist(v, g_i) <= T_end - t`; an edge is kept iff
/// the analogous two-sided condition holds for at least one agent. Supply
/// and demand nodes are always kept so every commodity stays addressable.
///
/// Also returns, per commodity, the sorted edge ids (in the reduced
/// network) that commodity can use on some start-to-goal path of length
/// `T_end` — the optional variable-restriction sets for the ILP.
pub fn reduce_network(
    abstracted: &FlowNetwork,
    pairs: &EdgePairIndex,
    instance: &Instance,
) -> (FlowNetwork, EdgePairIndex, Vec<Vec<usize>>) {
    assert_eq!(abstracted.form, NetworkForm::Abstracted);
    let t_end = instance.deadline;
    let num_agents = instance.num_agents();

    let from_start: Vec<Vec<usize>> = instance
        .agents
        .iter()
        .map(|a| instance.graph.bfs_distances(a.start))
        .collect();
    let to_goal: Vec<Vec<usize>> = instance
        .agents
        .iter()
        .map(|a| instance.graph.bfs_distances(a.goal))
        .collect();

    // ds <= t && dg <= T - t, with usize::MAX as unreachable.
    let node_ok = |i: usize, v: usize, t: usize| -> bool {
        from_start[i][v] <= t && to_goal[i][v] != usize::MAX && to_goal[i][v] + t <= t_end
    };

    let mut keep_node = vec![false; abstracted.nodes.len()];
    for (id, tag) in abstracted.nodes.iter().enumerate() {
        let NodeTag::Layer { vertex, time } = *tag else {
            unreachable!()
        };
        keep_node[id] = (0..num_agents).any(|i| node_ok(i, vertex, time));
    }
    for i in 0..num_agents {
        keep_node[abstracted.supply[i]] = true;
        keep_node[abstracted.demand[i]] = true;
    }

    let mut keep_edge = vec![false; abstracted.edges.len()];
    let mut commodity_edges: Vec<Vec<usize>> = vec![Vec::new(); num_agents];
    let mut edge_feasible: Vec<Vec<usize>> = vec![Vec::new(); abstracted.edges.len()];
    for (id, &(a, b)) in abstracted.edges.iter().enumerate() {
        let (NodeTag::Layer { vertex: va, time: ta }, NodeTag::Layer { vertex: vb, .. }) =
            (abstracted.nodes[a], abstracted.nodes[b])
        else {
            unreachable!()
        };
        for i in 0..num_agents {
            if from_start[i][va] <= ta
                && to_goal[i][vb] != usize::MAX
                && to_goal[i][vb] + ta < t_end
            {
                keep_edge[id] = true;
                edge_feasible[id].push(i);
            }
        }
    }

    let mut node_map = vec![usize::MAX; abstracted.nodes.len()];
    let mut nodes = Vec::new();
    for (id, tag) in abstracted.nodes.iter().enumerate() {
        if keep_node[id] {
            node_map[id] = nodes.len();
            nodes.push(*tag);
        }
    }
    let mut edge_map = vec![usize::MAX; abstracted.edges.len()];
    let mut edges = Vec::new();
    for (id, &(a, b)) in abstracted.edges.iter().enumerate() {
        if keep_edge[id] {
            debug_assert!(keep_node[a] && keep_node[b]);
            edge_map[id] = edges.len();
            for &i in &edge_feasible[id] {
                commodity_edges[i].push(edges.len());
            }
            edges.push((node_map[a], node_map[b]));
        }
    }

    let reduced_pairs: Vec<EdgePair> = pairs
        .0
        .iter()
        .filter_map(|p| {
            let map = |side: Option<usize>| {
                side.and_then(|id| (edge_map[id] != usize::MAX).then_some(edge_map[id]))
            };
            let (forward, backward) = (map(p.forward), map(p.backward));
            (forward.is_some() || backward.is_some()).then_some(EdgePair {
                graph_edge: p.graph_edge,
                time: p.time,
                forward,
                backward,
            })
        })
        .collect();

    let supply = abstracted.supply.iter().map(|&s| node_map[s]).collect();
    let demand = abstracted.demand.iter().map(|&d| node_map[d]).collect();
    (
        FlowNetwork::build(NetworkForm::Reduced, nodes, edges, supply, demand),
        EdgePairIndex(reduced_pairs),
        commodity_edges,
    )
}

/// Per-commodity sorted edge ids usable on some start-to-goal path within
/// the deadline. Works on abstracted and reduced networks alike; this is
/// the variable-restriction input for the compact ILP.
pub fn commodity_edge_sets(network: &FlowNetwork, instance: &Instance) -> Vec<Vec<usize>> {
    assert!(matches!(
        network.form,
        NetworkForm::Abstracted | NetworkForm::Reduced
    ));
    let t_end = instance.deadline;
    let from_start: Vec<Vec<usize>> = instance
        .agents
        .iter()
        .map(|a| instance.graph.bfs_distances(a.start))
        .collect();
    let to_goal: Vec<Vec<usize>> = instance
        .agents
        .iter()
        .map(|a| instance.graph.bfs_distances(a.goal))
        .collect();
    let mut sets = vec![Vec::new(); instance.num_agents()];
    for (id, &(a, b)) in network.edges.iter().enumerate() {
        let (NodeTag::Layer { vertex: va, time: ta }, NodeTag::Layer { vertex: vb, .. }) =
            (network.nodes[a], network.nodes[b])
        else {
            unreachable!()
        };
        for (i, set) in sets.iter_mut().enumerate() {
            if from_start[i][va] <= ta
                && to_goal[i][vb] != usize::MAX
                && to_goal[i][vb] + ta < t_end
            {
                set.push(id);
            }
        }
    }
    sets
}
