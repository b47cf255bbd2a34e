//! Grid map and scenario file parsing (MovingAI-style grid format).

use super::{Agent, Graph, GridMeta, Instance, InstanceError};

/// Parses the grid map text into a graph over the unblocked cells,
/// connected by 4-neighbor adjacency.
///
/// Format: `type octile` (value ignored), `height H`, `width W`, `map`,
/// then `H` rows of `W` characters. `.` and `G` are free; `@` and `T`
/// are blocked.
pub fn parse_map_text(map_text: &str) -> Result<Graph, InstanceError> {
    let mut lines = map_text.lines().enumerate();

    let mut header_field = |key: &str| -> Result<(usize, String), InstanceError> {
        match lines.next() {
            Some((idx, line)) => {
                let line = line.trim();
                let mut parts = line.split_whitespace();
                let found_key = parts.next().unwrap_or("");
                if found_key != key {
                    return Err(InstanceError::MalformedHeader {
                        line: idx + 1,
                        reason: format!("expected '{key} ...', found '{line}'"),
                    });
                }
                Ok((idx + 1, parts.collect::<Vec<_>>().join(" ")))
            }
            None => Err(InstanceError::MalformedHeader {
                line: 0,
                reason: format!("missing '{key}' line"),
            }),
        }
    };

    header_field("type")?;
    let (hline, hval) = header_field("height")?;
    let height: usize = hval.parse().map_err(|_| InstanceError::MalformedHeader {
        line: hline,
        reason: format!("bad height '{hval}'"),
    })?;
    let (wline, wval) = header_field("width")?;
    let width: usize = wval.parse().map_err(|_| InstanceError::MalformedHeader {
        line: wline,
        reason: format!("bad width '{wval}'"),
    })?;
    let (mline, _) = header_field("map")?;

    let mut blocked = vec![true; width * height];
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line = line.trim_end();
        if line.is_empty() && rows == height {
            continue;
        }
        if rows == height {
            return Err(InstanceError::BadRowCount {
                found: rows + 1,
                expected: height,
            });
        }
        let chars: Vec<char> = line.chars().collect();
        if chars.len() != width {
            return Err(InstanceError::BadRowWidth {
                line: idx + 1,
                found: chars.len(),
                expected: width,
            });
        }
        for (x, &ch) in chars.iter().enumerate() {
            let free = match ch {
                '.' | 'G' => true,
                '@' | 'T' => false,
                _ => return Err(InstanceError::UnknownCell { line: idx + 1, ch }),
            };
            blocked[rows * width + x] = !free;
        }
        rows += 1;
    }
    if rows != height {
        return Err(InstanceError::BadRowCount {
            found: rows,
            expected: height,
        });
    }
    let _ = mline;
    grid_graph(width, height, &blocked)
}

/// Builds the 4-neighbor graph of unblocked cells. `blocked` is row-major.
pub(super) fn grid_graph(
    width: usize,
    height: usize,
    blocked: &[bool],
) -> Result<Graph, InstanceError> {
    let mut cell_to_vertex = vec![None; width * height];
    let mut vertex_to_cell = Vec::new();
    for y in 0..height {
        for x in 0..width {
            if !blocked[y * width + x] {
                cell_to_vertex[y * width + x] = Some(vertex_to_cell.len());
                vertex_to_cell.push((x, y));
            }
        }
    }
    let mut edges = Vec::new();
    for y in 0..height {
        for x in 0..width {
            if let Some(v) = cell_to_vertex[y * width + x] {
                if x + 1 < width {
                    if let Some(w) = cell_to_vertex[y * width + x + 1] {
                        edges.push((v, w));
                    }
                }
                if y + 1 < height {
                    if let Some(w) = cell_to_vertex[(y + 1) * width + x] {
                        edges.push((v, w));
                    }
                }
            }
        }
    }
    let meta = GridMeta {
        width,
        height,
        cell_to_vertex,
        vertex_to_cell,
    };
    Graph::with_grid(meta.vertex_to_cell.len(), edges, Some(meta))
}

/// Parses scenario text (`start_x start_y goal_x goal_y` per line, `#`
/// comments) against the grid graph.
pub fn parse_scenario_text(graph: &Graph, scenario_text: &str) -> Result<Vec<Agent>, InstanceError> {
    let meta = graph.grid().ok_or(InstanceError::NoGridMetadata)?;
    let mut agents: Vec<Agent> = Vec::new();
    for (idx, raw) in scenario_text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse::<i64>).collect();
        let nums = nums.map_err(|e| InstanceError::MalformedScenario {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        if nums.len() != 4 {
            return Err(InstanceError::MalformedScenario {
                line: idx + 1,
                reason: format!("expected 4 fields, found {}", nums.len()),
            });
        }
        let agent = agents.len();
        let resolve = |x: i64, y: i64| -> Result<usize, InstanceError> {
            if x < 0 || y < 0 || x as usize >= meta.width || y as usize >= meta.height {
                return Err(InstanceError::AgentOutOfBounds {
                    line: idx + 1,
                    agent,
                    x,
                    y,
                });
            }
            meta.cell_to_vertex[y as usize * meta.width + x as usize].ok_or(
                InstanceError::AgentOnBlockedCell {
                    line: idx + 1,
                    agent,
                    x: x as usize,
                    y: y as usize,
                },
            )
        };
        let start = resolve(nums[0], nums[1])?;
        let goal = resolve(nums[2], nums[3])?;
        if let Some(prev) = agents.iter().position(|a| a.start == start) {
            let _ = prev;
            return Err(InstanceError::DuplicateStart {
                line: idx + 1,
                agent,
            });
        }
        if agents.iter().any(|a| a.goal == goal) {
            return Err(InstanceError::DuplicateGoal {
                line: idx + 1,
                agent,
            });
        }
        agents.push(Agent { start, goal });
    }
    Ok(agents)
}

/// Parses a map and a scenario into an instance with the given deadline.
pub fn parse_grid_map(
    map_text: &str,
    scenario_text: &str,
    deadline: usize,
) -> Result<Instance, InstanceError> {
    let graph = parse_map_text(map_text)?;
    let agents = parse_scenario_text(&graph, scenario_text)?;
    Instance::new(graph, deadline, agents)
}

/// Serializes grid metadata back to map text. Blocked cells become `@`.
pub(super) fn map_to_text(meta: &GridMeta) -> Result<String, InstanceError> {
    let mut out = format!(
        "type octile\nheight {}\nwidth {}\nmap\n",
        meta.height, meta.width
    );
    for y in 0..meta.height {
        for x in 0..meta.width {
            out.push(if meta.cell_to_vertex[y * meta.width + x].is_some() {
                '.'
            } else {
                '@'
            });
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAP_1X2: &str = "type octile\nheight 1\nwidth 2\nmap\n..\n";

    #[test]
    fn smallest_connected_map() {
        let inst = parse_grid_map(MAP_1X2, "0 0 1 0\n", 1).unwrap();
        assert_eq!(inst.graph.num_vertices(), 2);
        assert_eq!(inst.graph.edges(), &[(0, 1)]);
        assert_eq!(inst.agents.len(), 1);
        assert_eq!(inst.deadline, 1);
    }

    #[test]
    fn agent_on_blocked_cell_is_an_error() {
        let map = "type octile\nheight 2\nwidth 2\nmap\n.@\n..\n";
        let err = parse_grid_map(map, "1 0 0 0\n", 1).unwrap_err();
        assert!(matches!(
            err,
            InstanceError::AgentOnBlockedCell { line: 1, x: 1, y: 0, .. }
        ));
    }

    #[test]
    fn three_by_three_open_grid_has_twelve_edges() {
        let map = "type octile\nheight 3\nwidth 3\nmap\n...\n...\n...\n";
        let graph = parse_map_text(map).unwrap();
        assert_eq!(graph.num_vertices(), 9);
        assert_eq!(graph.edges().len(), 12);
    }

    #[test]
    fn header_errors_carry_line_numbers() {
        let err = parse_map_text("type octile\nheight x\nwidth 2\nmap\n..\n").unwrap_err();
        assert!(matches!(err, InstanceError::MalformedHeader { line: 2, .. }));
    }

    #[test]
    fn trees_and_swamps_block() {
        let map = "type octile\nheight 1\nwidth 3\nmap\nGT.\n";
        let graph = parse_map_text(map).unwrap();
        assert_eq!(graph.num_vertices(), 2);
        assert_eq!(graph.edges().len(), 0);
    }

    #[test]
    fn duplicate_start_and_goal_rejected() {
        let err = parse_grid_map(MAP_1X2, "0 0 1 0\n0 0 0 0\n", 1).unwrap_err();
        assert!(matches!(err, InstanceError::DuplicateStart { line: 2, .. }));
        let err = parse_grid_map(MAP_1X2, "0 0 1 0\n1 0 1 0\n", 1).unwrap_err();
        assert!(matches!(err, InstanceError::DuplicateGoal { line: 2, .. }));
    }

    #[test]
    fn map_round_trip() {
        let map = "type octile\nheight 2\nwidth 3\nmap\n.@.\n...\n";
        let inst = parse_grid_map(map, "0 0 2 0\n", 3).unwrap();
        let text = inst.to_map_text().unwrap();
        assert_eq!(text, "type octile\nheight 2\nwidth 3\nmap\n.@.\n...\n");
        let reparsed = parse_grid_map(&text, &inst.to_scenario_text().unwrap(), 3).unwrap();
        assert_eq!(reparsed, inst);
    }
}
