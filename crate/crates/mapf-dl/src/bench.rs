//! Benchmark harness: seeded instance batches per agent count, solved under
//! a per-instance wall-clock limit that includes model construction.
//!
//! "Solved" means proven optimal within the limit. Timeouts count as
//! unsolved, but their incumbent success counts are still recorded. Every
//! returned plan is validated; a validation failure aborts the whole run.
//! Runs are sequential, so a fixed seed gives identical results; emitted
//! solve times can be suppressed (`report_times = off`) when byte-identical
//! output across machines is needed.

use crate::extract::{solve_instance, SolveError, SolveOptions};
use crate::instance::{generate_random_instance, GenerateParams, InstanceError};
use crate::solver::{SolveStatus, SolverConfig};
use std::fmt::Write as _;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub width: usize,
    pub height: usize,
    pub block_probability: f64,
    pub agent_counts: Vec<usize>,
    pub instances_per_point: usize,
    pub distance_range: (usize, usize),
    pub deadline: usize,
    pub time_limit: Duration,
    pub seed: u64,
    /// Emit real solve times; turn off for byte-identical output.
    pub report_times: bool,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config line {line}: {reason}")]
    BadConfig { line: usize, reason: String },
    #[error("config is missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("instance generation failed (agents={agents}, index={index}): {source}")]
    Generation {
        agents: usize,
        index: usize,
        source: InstanceError,
    },
    #[error("solve failed (agents={agents}, index={index}): {source}")]
    Solve {
        agents: usize,
        index: usize,
        source: SolveError,
    },
}

/// Parses the flat `key = value` config format. `#` starts a comment.
///
/// Keys: width, height, block_probability, agents (comma-separated),
/// instances, distance_min, distance_max, deadline, time_limit (seconds),
/// seed, report_times (on|off, default on).
pub fn parse_bench_config(text: &str) -> Result<BenchConfig, BenchError> {
    let mut width = None;
    let mut height = None;
    let mut block_probability = None;
    let mut agent_counts = None;
    let mut instances = None;
    let mut distance_min = None;
    let mut distance_max = None;
    let mut deadline = None;
    let mut time_limit = None;
    let mut seed = None;
    let mut report_times = true;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: String| BenchError::BadConfig {
            line: idx + 1,
            reason,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad("expected 'key = value'".into()))?;
        let (key, value) = (key.trim(), value.trim());
        let parse_usize =
            |v: &str| v.parse::<usize>().map_err(|e| bad(format!("{key}: {e}")));
        match key {
            "width" => width = Some(parse_usize(value)?),
            "height" => height = Some(parse_usize(value)?),
            "block_probability" => {
                block_probability =
                    Some(value.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")))?)
            }
            "agents" => {
                let counts: Result<Vec<usize>, _> = value
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect();
                agent_counts = Some(counts.map_err(|e| bad(format!("{key}: {e}")))?);
            }
            "instances" => instances = Some(parse_usize(value)?),
            "distance_min" => distance_min = Some(parse_usize(value)?),
            "distance_max" => distance_max = Some(parse_usize(value)?),
            "deadline" => deadline = Some(parse_usize(value)?),
            "time_limit" => {
                let secs = value.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")))?;
                if !secs.is_finite() || secs <= 0.0 {
                    return Err(bad("time_limit must be positive".into()));
                }
                time_limit = Some(Duration::from_secs_f64(secs));
            }
            "seed" => seed = Some(value.parse::<u64>().map_err(|e| bad(format!("{key}: {e}")))?),
            "report_times" => {
                report_times = match value {
                    "on" => true,
                    "off" => false,
                    other => return Err(bad(format!("report_times: expected on|off, found '{other}'"))),
                }
            }
            other => return Err(bad(format!("unknown key '{other}'"))),
        }
    }

    Ok(BenchConfig {
        width: width.ok_or(BenchError::MissingKey("width"))?,
        height: height.ok_or(BenchError::MissingKey("height"))?,
        block_probability: block_probability.ok_or(BenchError::MissingKey("block_probability"))?,
        agent_counts: agent_counts.ok_or(BenchError::MissingKey("agents"))?,
        instances_per_point: instances.ok_or(BenchError::MissingKey("instances"))?,
        distance_range: (
            distance_min.ok_or(BenchError::MissingKey("distance_min"))?,
            distance_max.ok_or(BenchError::MissingKey("distance_max"))?,
        ),
        deadline: deadline.ok_or(BenchError::MissingKey("deadline"))?,
        time_limit: time_limit.ok_or(BenchError::MissingKey("time_limit"))?,
        seed: seed.ok_or(BenchError::MissingKey("seed"))?,
        report_times,
    })
}

/// One table row: aggregate results for one agent count.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub agents: usize,
    pub instances: usize,
    pub solved: usize,
    /// Percentage of instances proven optimal within the limit.
    pub success_rate: f64,
    pub mean_time: Duration,
    pub median_time: Duration,
    /// Incumbent success counts of the timed-out instances.
    pub timeout_incumbents: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct BenchResults {
    pub rows: Vec<BenchRow>,
    pub report_times: bool,
}

/// Deterministic per-instance generation seed.
fn instance_seed(base: u64, agents: usize, index: usize) -> u64 {
    base.wrapping_add((agents as u64) << 32)
        .wrapping_add(index as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs the benchmark sequentially, one row per agent count, row order
/// following the config's agent list, instances in index order.
pub fn run_bench(
    config: &BenchConfig,
    mut progress: Option<&mut dyn FnMut(usize, usize, bool)>,
) -> Result<BenchResults, BenchError> {
    let mut rows = Vec::new();
    for &agents in &config.agent_counts {
        let mut solved = 0usize;
        let mut times = Vec::with_capacity(config.instances_per_point);
        let mut timeout_incumbents = Vec::new();
        for index in 0..config.instances_per_point {
            // Bump the seed on placement failure so one unlucky grid does
            // not kill the run; the retry sequence is still deterministic.
            let mut instance = None;
            let mut last_err = None;
            for bump in 0..50u64 {
                let params = GenerateParams {
                    width: config.width,
                    height: config.height,
                    block_probability: config.block_probability,
                    num_agents: agents,
                    distance_range: config.distance_range,
                    deadline: config.deadline,
                    seed: instance_seed(config.seed, agents, index).wrapping_add(bump),
                };
                match generate_random_instance(&params) {
                    Ok(inst) => {
                        instance = Some(inst);
                        break;
                    }
                    Err(e @ InstanceError::PlacementFailed { .. }) => last_err = Some(e),
                    Err(e) => {
                        return Err(BenchError::Generation {
                            agents,
                            index,
                            source: e,
                        })
                    }
                }
            }
            let instance = instance.ok_or_else(|| BenchError::Generation {
                agents,
                index,
                source: last_err.unwrap(),
            })?;

            let options = SolveOptions {
                solver: SolverConfig {
                    time_limit: Some(config.time_limit),
                    ..SolverConfig::default()
                },
                ..SolveOptions::default()
            };
            let begin = Instant::now();
            // solve_instance validates the plan; a BadPlan error aborts.
            let report = solve_instance(&instance, &options).map_err(|e| BenchError::Solve {
                agents,
                index,
                source: e,
            })?;
            let elapsed = begin.elapsed();
            times.push(elapsed);
            let ok = report.status == SolveStatus::Optimal && elapsed <= config.time_limit;
            if ok {
                solved += 1;
            } else {
                timeout_incumbents.push(report.successful);
            }
            if let Some(cb) = progress.as_deref_mut() {
                cb(agents, index, ok);
            }
        }
        let instances = config.instances_per_point;
        let mean_time = if times.is_empty() {
            Duration::ZERO
        } else {
            times.iter().sum::<Duration>() / times.len() as u32
        };
        let median_time = median(&mut times);
        rows.push(BenchRow {
            agents,
            instances,
            solved,
            success_rate: if instances == 0 {
                100.0
            } else {
                100.0 * solved as f64 / instances as f64
            },
            mean_time,
            median_time,
            timeout_incumbents,
        });
    }
    Ok(BenchResults {
        rows,
        report_times: config.report_times,
    })
}

fn median(times: &mut [Duration]) -> Duration {
    if times.is_empty() {
        return Duration::ZERO;
    }
    times.sort_unstable();
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        (times[n / 2 - 1] + times[n / 2]) / 2
    }
}

fn format_secs(results: &BenchResults, d: Duration) -> String {
    if results.report_times {
        format!("{:.3}", d.as_secs_f64())
    } else {
        "-".to_string()
    }
}

pub fn to_csv(results: &BenchResults) -> String {
    let mut out =
        String::from("agents,instances,solved,success_rate,mean_time,median_time,timeout_msucc\n");
    for row in &results.rows {
        let incumbents: Vec<String> = row
            .timeout_incumbents
            .iter()
            .map(usize::to_string)
            .collect();
        writeln!(
            out,
            "{},{},{},{:.1},{},{},{}",
            row.agents,
            row.instances,
            row.solved,
            row.success_rate,
            format_secs(results, row.mean_time),
            format_secs(results, row.median_time),
            incumbents.join(";"),
        )
        .unwrap();
    }
    out
}

/// Human-readable table; every number also appears in the CSV.
pub fn to_table(results: &BenchResults) -> String {
    let mut out = format!(
        "{:>6}  {:>9}  {:>6}  {:>12}  {:>9}  {:>11}\n",
        "agents", "instances", "solved", "success_rate", "mean_time", "median_time"
    );
    for row in &results.rows {
        writeln!(
            out,
            "{:>6}  {:>9}  {:>6}  {:>11.1}%  {:>9}  {:>11}",
            row.agents,
            row.instances,
            row.solved,
            row.success_rate,
            format_secs(results, row.mean_time),
            format_secs(results, row.median_time),
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_CONFIG: &str = "\
# tiny smoke benchmark
width = 5
height = 5
block_probability = 0.1
agents = 1,2
instances = 2
distance_min = 2
distance_max = 4
deadline = 6
time_limit = 10
seed = 9
report_times = off
";

    #[test]
    fn parses_full_config() {
        let c = parse_bench_config(SMALL_CONFIG).unwrap();
        assert_eq!(c.width, 5);
        assert_eq!(c.agent_counts, vec![1, 2]);
        assert_eq!(c.distance_range, (2, 4));
        assert_eq!(c.time_limit, Duration::from_secs(10));
        assert!(!c.report_times);
    }

    #[test]
    fn unknown_key_is_rejected_with_line_number() {
        let err = parse_bench_config("width = 3\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, BenchError::BadConfig { line: 2, .. }));
    }

    #[test]
    fn missing_key_is_reported() {
        let err = parse_bench_config("width = 3\n").unwrap_err();
        assert!(matches!(err, BenchError::MissingKey("height")));
    }

    #[test]
    fn smoke_run_solves_everything() {
        let config = parse_bench_config(SMALL_CONFIG).unwrap();
        let results = run_bench(&config, None).unwrap();
        assert_eq!(results.rows.len(), 2);
        for row in &results.rows {
            assert_eq!(row.instances, 2);
            assert_eq!(row.solved, 2);
            assert_eq!(row.success_rate, 100.0);
            assert!(row.timeout_incumbents.is_empty());
        }
    }

    #[test]
    fn csv_is_deterministic_without_times() {
        let config = parse_bench_config(SMALL_CONFIG).unwrap();
        let a = to_csv(&run_bench(&config, None).unwrap());
        let b = to_csv(&run_bench(&config, None).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with("agents,instances,solved"));
    }

    #[test]
    fn zero_agent_config_is_all_success() {
        let text = SMALL_CONFIG.replace("agents = 1,2", "agents = 0");
        let config = parse_bench_config(&text).unwrap();
        let results = run_bench(&config, None).unwrap();
        assert_eq!(results.rows[0].success_rate, 100.0);
    }

    #[test]
    fn table_numbers_match_csv() {
        let config = parse_bench_config(SMALL_CONFIG).unwrap();
        let results = run_bench(&config, None).unwrap();
        let table = to_table(&results);
        let csv = to_csv(&results);
        for row in &results.rows {
            assert!(table.contains(&format!("{:.1}", row.success_rate)));
            assert!(csv.contains(&format!(",{:.1},", row.success_rate)));
        }
    }
}
