use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fracmat_core::certify::Certificate;
use fracmat_core::error::Error;
use fracmat_core::instance::{solve, Instance, InstanceFile, Problem, ResultFile};
use fracmat_core::matroid::DEFAULT_FLAT_BUDGET;
use fracmat_core::polytope::MatchingPolytope;
use fracmat_core::rational;
use fracmat_core::sweep::{run_sweep, SweepConfig};

/// Exact maximum-weight fractional matroid matching.
#[derive(Parser)]
#[command(name = "fracmat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the result with its certificates.
    Solve(SolveArgs),
    /// Recheck a result file against its instance.
    Verify { instance: PathBuf, result: PathBuf },
    /// Print the flat lattice, constraint system or dominant cover.
    Inspect(InspectArgs),
    /// Run the seeded random sweep against the brute-force oracle.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Maximum-weight perfect matching; exit code 2 if none exists.
    #[arg(long, conflicts_with = "max_size")]
    perfect: bool,
    /// Maximum-size matching, ignoring weights.
    #[arg(long)]
    max_size: bool,
    /// Accepted for reproducible scripts; the solver itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on enumerated flats (overrides FRACMAT_BUDGET).
    #[arg(long)]
    budget: Option<usize>,
    /// Also print iteration records to stderr as JSON lines.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    instance: PathBuf,
    #[arg(long)]
    flats: bool,
    #[arg(long)]
    dominant_cover: bool,
    #[arg(long)]
    constraints: bool,
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 10)]
    max_elements: usize,
    #[arg(long, default_value_t = 8)]
    max_lines: usize,
    /// Full per-instance report; stdout only gets the summary.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    budget: Option<usize>,
}

enum Failure {
    Error(Error),
    Io(PathBuf, std::io::Error),
    Rejected,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = Result<(), Failure>;

fn budget(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("FRACMAT_BUDGET") {
        Ok(text) => text.trim().parse().map_err(|_| {
            Failure::Error(Error::Parse(format!(
                "FRACMAT_BUDGET is not a count: {text:?}"
            )))
        }),
        Err(_) => Ok(DEFAULT_FLAT_BUDGET),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    let file = InstanceFile::parse(&text).map_err(|e| with_path(e, path))?;
    Ok(file.build()?)
}

fn with_path(e: Error, path: &Path) -> Failure {
    match e {
        Error::Parse(msg) => Failure::Error(Error::Parse(format!("{}: {msg}", path.display()))),
        other => Failure::Error(other),
    }
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json value serializes")
}

fn cmd_solve(args: SolveArgs) -> Outcome {
    let budget = budget(args.budget)?;
    let instance = load_instance(&args.instance)?;
    let problem = if args.perfect {
        Problem::Perfect
    } else if args.max_size {
        Problem::MaxSize
    } else {
        Problem::MaxWeight
    };
    let result = solve(&instance, problem, budget)?;
    if args.trace {
        for record in &result.trace {
            eprintln!(
                "{}",
                serde_json::to_string(record).expect("record serializes")
            );
        }
    }
    let text = result.to_json();
    match &args.out {
        Some(path) => write(path, &text)?,
        None => println!("{text}"),
    }
    if result.certificates.iter().all(Certificate::passed) {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn cmd_verify(instance: &Path, result: &Path) -> Outcome {
    let budget = budget(None)?;
    let inst = load_instance(instance)?;
    let parsed = ResultFile::parse(&read(result)?).map_err(|e| with_path(e, result))?;
    let certificates = parsed.verify(&inst, budget)?;
    let passed = certificates.iter().all(Certificate::passed);
    println!(
        "{}",
        pretty(&json!({"passed": passed, "certificates": certificates}))
    );
    if passed {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn cmd_inspect(args: InspectArgs) -> Outcome {
    let budget = budget(args.budget)?;
    let inst = load_instance(&args.instance)?;
    let polytope = MatchingPolytope::new(&inst.matroid, &inst.lines, budget)?;
    let mut report = serde_json::Map::new();
    report.insert("ground".into(), json!(inst.matroid.ground_size()));
    report.insert("rank".into(), json!(inst.matroid.full_rank()));
    report.insert("lines".into(), json!(inst.lines.len()));
    if args.flats {
        report.insert("flats".into(), json!(polytope.flats()));
    }
    if args.constraints {
        let rows: Vec<Value> = polytope
            .constraints()
            .rows
            .iter()
            .map(|row| json!({"flat": row.flat.elements, "rank": row.flat.rank, "degrees": row.degrees.0}))
            .collect();
        report.insert("constraints".into(), Value::Array(rows));
    }
    if args.dominant_cover {
        let cover = polytope.dominant_cover()?;
        report.insert(
            "dominant_cover".into(),
            json!({
                "lower": cover.lower.elements,
                "upper": cover.upper.elements,
                "value": rational::format(&cover.value()),
            }),
        );
    }
    if !(args.flats || args.constraints || args.dominant_cover) {
        let (_, nu) = polytope.max_size_matching()?;
        report.insert("nu".into(), json!(rational::format(&nu)));
        report.insert("flat_count".into(), json!(polytope.flats().len()));
    }
    println!("{}", pretty(&Value::Object(report)));
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Outcome {
    let config = SweepConfig {
        seed: args.seed,
        count: args.count,
        max_elements: args.max_elements,
        max_lines: args.max_lines,
        budget: budget(args.budget)?,
        ..SweepConfig::default()
    };
    let report = run_sweep(&config);
    if let Some(path) = &args.report {
        write(
            path,
            &serde_json::to_string_pretty(&report).expect("report serializes"),
        )?;
    }
    let failures: Vec<usize> = report
        .instances
        .iter()
        .filter(|o| !o.passed())
        .map(|o| o.index)
        .collect();
    println!(
        "{}",
        pretty(&json!({
            "seed": config.seed,
            "count": config.count,
            "passed": report.passed,
            "failed": report.failed,
            "oracle_equal": report.oracle_equal,
            "failures": failures,
        }))
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify { instance, result } => cmd_verify(&instance, &result),
        Command::Inspect(args) => cmd_inspect(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(1),
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(1)
        }
        Err(Failure::Error(Error::NoPerfectMatching)) => {
            eprintln!("error: {}", Error::NoPerfectMatching);
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
