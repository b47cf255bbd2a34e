//! Plan file serialization.
//!
//! Line 1 is `deadline T`; each following line is either
//! `agent i: unsuccessful` or `agent i: v(0) v(1) ... v(T)`, where vertices
//! are written as `x,y` cell coordinates for grid instances and as plain
//! vertex ids otherwise.

use super::{Instance, InstanceError, Plan};

pub fn plan_to_text(instance: &Instance, plan: &Plan) -> String {
    let meta = instance.graph.grid();
    let mut out = format!("deadline {}\n", plan.deadline);
    for (i, path) in plan.paths.iter().enumerate() {
        match path {
            None => out.push_str(&format!("agent {i}: unsuccessful\n")),
            Some(p) => {
                let cells: Vec<String> = p
                    .iter()
                    .map(|&v| match meta {
                        Some(m) => {
                            let (x, y) = m.vertex_to_cell[v];
                            format!("{x},{y}")
                        }
                        None => v.to_string(),
                    })
                    .collect();
                out.push_str(&format!("agent {i}: {}\n", cells.join(" ")));
            }
        }
    }
    out
}

pub fn parse_plan_text(instance: &Instance, text: &str) -> Result<Plan, InstanceError> {
    let mut lines = text.lines().enumerate();
    let deadline = match lines.next() {
        Some((_, line)) if line.trim().starts_with("deadline ") => line
            .trim()
            .trim_start_matches("deadline ")
            .trim()
            .parse::<usize>()
            .map_err(|e| InstanceError::MalformedPlan {
                line: 1,
                reason: e.to_string(),
            })?,
        _ => {
            return Err(InstanceError::MalformedPlan {
                line: 1,
                reason: "expected 'deadline T'".into(),
            })
        }
    };
    let mut paths: Vec<Option<Vec<usize>>> = vec![None; instance.num_agents()];
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rest = line
            .strip_prefix("agent ")
            .ok_or_else(|| InstanceError::MalformedPlan {
                line: idx + 1,
                reason: "expected 'agent i: ...'".into(),
            })?;
        let (id_str, body) = rest.split_once(':').ok_or_else(|| InstanceError::MalformedPlan {
            line: idx + 1,
            reason: "missing ':'".into(),
        })?;
        let agent: usize = id_str
            .trim()
            .parse()
            .map_err(|e: std::num::ParseIntError| InstanceError::MalformedPlan {
                line: idx + 1,
                reason: e.to_string(),
            })?;
        if agent >= paths.len() {
            return Err(InstanceError::MalformedPlan {
                line: idx + 1,
                reason: format!("agent {agent} out of range"),
            });
        }
        let body = body.trim();
        if body == "unsuccessful" {
            paths[agent] = None;
            continue;
        }
        let mut path = Vec::new();
        for token in body.split_whitespace() {
            let v = parse_vertex(instance, token).map_err(|reason| InstanceError::MalformedPlan {
                line: idx + 1,
                reason,
            })?;
            path.push(v);
        }
        paths[agent] = Some(path);
    }
    Ok(Plan { deadline, paths })
}

fn parse_vertex(instance: &Instance, token: &str) -> Result<usize, String> {
    match instance.graph.grid() {
        Some(meta) => {
            let (x, y) = token
                .split_once(',')
                .ok_or_else(|| format!("expected 'x,y', found '{token}'"))?;
            let x: usize = x.parse().map_err(|_| format!("bad x in '{token}'"))?;
            let y: usize = y.parse().map_err(|_| format!("bad y in '{token}'"))?;
            if x >= meta.width || y >= meta.height {
                return Err(format!("cell ({x},{y}) out of bounds"));
            }
            meta.cell_to_vertex[y * meta.width + x].ok_or_else(|| format!("cell ({x},{y}) is blocked"))
        }
        None => token.parse().map_err(|_| format!("bad vertex id '{token}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_grid_map, Plan};
    use super::*;

    #[test]
    fn plan_round_trip_on_grid() {
        let map = "type octile\nheight 1\nwidth 3\nmap\n...\n";
        let inst = parse_grid_map(map, "0 0 2 0\n1 0 0 0\n", 2).unwrap();
        let plan = Plan {
            deadline: 2,
            paths: vec![Some(vec![0, 1, 2]), None],
        };
        let text = plan_to_text(&inst, &plan);
        assert_eq!(text, "deadline 2\nagent 0: 0,0 1,0 2,0\nagent 1: unsuccessful\n");
        assert_eq!(parse_plan_text(&inst, &text).unwrap(), plan);
    }
}
