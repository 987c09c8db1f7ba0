use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stein_nbhd::scenario::{
    run_scenario, to_json, to_text, RecipeRef, RecipeSpec, Report, RunOptions, Scenario, Task,
    TaskDetail, SCHEMA_VERSION,
};
use stein_nbhd::suites::{Suite, SuiteParams};
use stein_nbhd::surgery::PlanTarget;

#[derive(Parser)]
#[command(
    version,
    about = "Stein neighborhood checks for immersed real surfaces"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Include wall-clock times in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a scenario file.
    Check { scenario: PathBuf },
    /// Plan a surface in the projective plane.
    Plan {
        #[arg(long, required_unless_present = "unorientable")]
        degree: Option<i64>,
        #[arg(long)]
        genus: i64,
        #[arg(long, default_value_t = 0)]
        dplus: i64,
        #[arg(long, conflicts_with_all = ["degree", "dplus"])]
        unorientable: bool,
        /// Also write the recipe to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a recipe file and check its expected class.
    Replay { recipe: PathBuf },
    /// Run a suite of local numerical certificates.
    VerifyLocal {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e| {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("{e}; expected one of {}", names.join(", "))
    })
}

fn single(task: Task) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        surfaces: Default::default(),
        ambients: Default::default(),
        recipes: Default::default(),
        tasks: vec![task],
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn build(command: &Command) -> Result<Scenario, String> {
    match command {
        Command::Check { scenario } => {
            Scenario::from_json(&read(scenario)?).map_err(|e| e.to_string())
        }
        Command::Plan {
            degree,
            genus,
            dplus,
            unorientable,
            ..
        } => {
            let target = if *unorientable {
                PlanTarget::unoriented(*genus)
            } else {
                PlanTarget::oriented(degree.expect("clap requires a degree"), *genus, *dplus)
            };
            Ok(single(Task::Plan { target, name: None }))
        }
        Command::Replay { recipe } => {
            let spec: RecipeSpec = serde_json::from_str(&read(recipe)?)
                .map_err(|e| format!("{}: {e}", recipe.display()))?;
            Ok(single(Task::Replay {
                recipe: RecipeRef::Inline(spec),
            }))
        }
        Command::VerifyLocal {
            suite,
            grid_step,
            tol,
            seed,
            samples,
            epsilon,
            delta,
        } => Ok(single(Task::VerifyLocal {
            suite: *suite,
            params: SuiteParams {
                grid_step: *grid_step,
                tol: *tol,
                seed: *seed,
                samples: *samples,
                epsilon: *epsilon,
                delta: *delta,
            },
        })),
    }
}

fn write_recipe(report: &Report, out: &Path) -> Result<(), String> {
    let Some(TaskDetail::Plan { recipe, .. }) = report.tasks.first().map(|t| &t.detail) else {
        return Ok(());
    };
    let json = serde_json::to_string_pretty(recipe).map_err(|e| e.to_string())?;
    fs::write(out, json + "\n").map_err(|e| format!("{}: {e}", out.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let scenario = match build(&cli.command) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = run_scenario(&scenario, &RunOptions { timing: cli.timing });
    if let Command::Plan { out: Some(out), .. } = &cli.command {
        if let Err(e) = write_recipe(&report, out) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let text = match cli.format {
        Format::Json => to_json(&report) + "\n",
        Format::Text => to_text(&report),
    };
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
