//! Command-line front end: solve, generate, verify, bench, export.
//!
//! Exit codes: 0 success (proven optimal for `solve`), 2 time or node limit
//! hit, 1 input or internal error. `MAPFDL_TIME_LIMIT` (seconds) sets the
//! default time limit when `--time-limit` is absent.

use clap::{Parser, Subcommand, ValueEnum};
use mapf_dl::bench::{parse_bench_config, run_bench, to_csv, to_table};
use mapf_dl::extract::{build_model, solve_instance, Formulation, SolveOptions};
use mapf_dl::ilp::export_mps;
use mapf_dl::instance::{
    count_successful, generate_random_instance, parse_grid_map, parse_plan_text, plan_to_text,
    GenerateParams, Instance,
};
use mapf_dl::solver::{SolveStatus, SolverConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(
    name = "mapfdl",
    about = "Exact solver for multi-agent path finding with deadlines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a map + scenario and write the resulting plan.
    Solve(SolveArgs),
    /// Generate a random instance and write map + scenario files.
    Generate(GenerateArgs),
    /// Check a plan file against an instance.
    Verify(VerifyArgs),
    /// Run a benchmark config and emit a table plus CSV.
    Bench(BenchArgs),
    /// Export the ILP model as an MPS file without solving.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    Full,
    Abstracted,
}

#[derive(Parser)]
struct ModelFlags {
    /// Skip the deadline-based network reduction.
    #[arg(long)]
    no_reduction: bool,
    /// Restrict each agent's variables to its feasible edges.
    #[arg(long, value_enum, default_value = "on")]
    per_commodity: OnOff,
    #[arg(long, value_enum, default_value = "abstracted")]
    formulation: FormulationArg,
}

impl ModelFlags {
    fn to_options(&self, solver: SolverConfig) -> SolveOptions {
        SolveOptions {
            use_reduction: !self.no_reduction,
            per_commodity: matches!(self.per_commodity, OnOff::On),
            formulation: match self.formulation {
                FormulationArg::Full => Formulation::Full,
                FormulationArg::Abstracted => Formulation::Abstracted,
            },
            solver,
        }
    }
}

#[derive(Parser)]
struct SolveArgs {
    map: PathBuf,
    scenario: PathBuf,
    #[arg(long)]
    deadline: usize,
    /// Wall-clock limit in seconds, model construction included.
    #[arg(long)]
    time_limit: Option<f64>,
    #[command(flatten)]
    model: ModelFlags,
    /// Also write the model in MPS format.
    #[arg(long, value_name = "PATH")]
    export_mps: Option<PathBuf>,
    /// Plan output path; defaults to the scenario path with a .plan suffix.
    #[arg(long, value_name = "PATH")]
    plan_out: Option<PathBuf>,
    /// Print a machine-readable solver statistics line.
    #[arg(long)]
    verbose: bool,
}

#[derive(Parser)]
struct GenerateArgs {
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long)]
    block_probability: f64,
    #[arg(long)]
    agents: usize,
    #[arg(long)]
    distance_min: usize,
    #[arg(long)]
    distance_max: usize,
    #[arg(long)]
    deadline: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    map_out: PathBuf,
    #[arg(long, value_name = "PATH")]
    scen_out: PathBuf,
}

#[derive(Parser)]
struct VerifyArgs {
    map: PathBuf,
    scenario: PathBuf,
    plan: PathBuf,
}

#[derive(Parser)]
struct BenchArgs {
    config: PathBuf,
    /// CSV output path; defaults to the config path with a .csv suffix.
    #[arg(long, value_name = "PATH")]
    csv_out: Option<PathBuf>,
    /// Print per-instance progress to standard error.
    #[arg(long)]
    verbose: bool,
}

#[derive(Parser)]
struct ExportArgs {
    map: PathBuf,
    scenario: PathBuf,
    #[arg(long)]
    deadline: usize,
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long, value_name = "PATH")]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Export(args) => cmd_export(&args),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, content: &str) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_instance(map: &Path, scenario: &Path, deadline: usize) -> Result<Instance, String> {
    let map_text = read(map)?;
    let scen_text = read(scenario)?;
    parse_grid_map(&map_text, &scen_text, deadline).map_err(|e| e.to_string())
}

fn default_time_limit() -> Result<Option<Duration>, String> {
    match std::env::var("MAPFDL_TIME_LIMIT") {
        Ok(v) => {
            let secs: f64 = v
                .parse()
                .map_err(|_| format!("MAPFDL_TIME_LIMIT: bad value '{v}'"))?;
            if secs <= 0.0 {
                return Err("MAPFDL_TIME_LIMIT must be positive".into());
            }
            Ok(Some(Duration::from_secs_f64(secs)))
        }
        Err(_) => Ok(None),
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, String> {
    let instance = load_instance(&args.map, &args.scenario, args.deadline)?;
    let time_limit = match args.time_limit {
        Some(secs) if secs > 0.0 => Some(Duration::from_secs_f64(secs)),
        Some(_) => return Err("--time-limit must be positive".into()),
        None => default_time_limit()?,
    };
    let options = args.model.to_options(SolverConfig {
        time_limit,
        ..SolverConfig::default()
    });

    if let Some(mps_path) = &args.export_mps {
        let (_, model) = build_model(&instance, &options);
        write(mps_path, &export_mps(&model))?;
    }

    let report = solve_instance(&instance, &options).map_err(|e| e.to_string())?;
    let status = match report.status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::TimeLimit => "timeout",
        SolveStatus::NodeLimit => "node_limit",
    };
    println!("M_succ = {}", report.successful);
    println!("status = {status}");
    println!(
        "time: build {:.3}s, solve {:.3}s, extract {:.3}s",
        report.timings.build.as_secs_f64(),
        report.timings.solve.as_secs_f64(),
        report.timings.extract.as_secs_f64(),
    );
    if args.verbose {
        println!(
            "nodes={} lp_iterations={} wall_time_s={:.6} variables={} constraints={}",
            report.stats.nodes,
            report.stats.lp_iterations,
            report.stats.wall_time.as_secs_f64(),
            report.num_variables,
            report.num_constraints,
        );
    }

    let plan_path = args
        .plan_out
        .clone()
        .unwrap_or_else(|| args.scenario.with_extension("plan"));
    write(&plan_path, &plan_to_text(&instance, &report.plan))?;

    Ok(match report.status {
        SolveStatus::Optimal => ExitCode::from(0),
        _ => ExitCode::from(2),
    })
}

fn cmd_generate(args: &GenerateArgs) -> Result<ExitCode, String> {
    let params = GenerateParams {
        width: args.width,
        height: args.height,
        block_probability: args.block_probability,
        num_agents: args.agents,
        distance_range: (args.distance_min, args.distance_max),
        deadline: args.deadline,
        seed: args.seed,
    };
    let instance = generate_random_instance(&params).map_err(|e| e.to_string())?;
    write(&args.map_out, &instance.to_map_text().map_err(|e| e.to_string())?)?;
    write(
        &args.scen_out,
        &instance.to_scenario_text().map_err(|e| e.to_string())?,
    )?;
    println!(
        "wrote {} and {} ({} agents, deadline {})",
        args.map_out.display(),
        args.scen_out.display(),
        instance.num_agents(),
        instance.deadline,
    );
    Ok(ExitCode::from(0))
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, String> {
    // The deadline comes from the plan file itself.
    let probe = load_instance(&args.map, &args.scenario, 0)?;
    let plan_text = read(&args.plan)?;
    let plan = parse_plan_text(&probe, &plan_text).map_err(|e| e.to_string())?;
    let instance = load_instance(&args.map, &args.scenario, plan.deadline)?;
    let violations =
        mapf_dl::instance::validate_plan(&instance, &plan).map_err(|e| e.to_string())?;
    println!("M_succ = {}", count_successful(&plan));
    if violations.is_empty() {
        println!("plan is valid");
        Ok(ExitCode::from(0))
    } else {
        for v in &violations {
            println!("violation: {v:?}");
        }
        Ok(ExitCode::from(1))
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode, String> {
    let config = parse_bench_config(&read(&args.config)?).map_err(|e| e.to_string())?;
    let mut progress = |agents: usize, index: usize, ok: bool| {
        if args.verbose {
            eprintln!(
                "agents={agents} instance={index} {}",
                if ok { "solved" } else { "unsolved" }
            );
        }
    };
    let results = run_bench(&config, Some(&mut progress)).map_err(|e| e.to_string())?;
    print!("{}", to_table(&results));
    let csv_path = args
        .csv_out
        .clone()
        .unwrap_or_else(|| args.config.with_extension("csv"));
    write(&csv_path, &to_csv(&results))?;
    println!("csv written to {}", csv_path.display());
    Ok(ExitCode::from(0))
}

fn cmd_export(args: &ExportArgs) -> Result<ExitCode, String> {
    let instance = load_instance(&args.map, &args.scenario, args.deadline)?;
    let options = args.model.to_options(SolverConfig::default());
    let (_, model) = build_model(&instance, &options);
    write(&args.output, &export_mps(&model))?;
    println!(
        "wrote {} ({} variables, {} constraints)",
        args.output.display(),
        model.num_variables(),
        model.constraints.len(),
    );
    Ok(ExitCode::from(0))
}
