//! `painleve`: command-line driver for the verification suite.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use painleve_core::algebra::{Point, RationalExpression, Var};
use painleve_core::holomorphy::{charts, probe_assumption_a, ChartSet};
use painleve_core::numerics::{residual, Benchmark, CompiledField};
use painleve_core::report::{Mode, Status};
use painleve_core::suite::{run_suite, Suite, SuiteConfig, SuiteReport};
use painleve_core::systems::{first_integral_search, make_system, Family};
use painleve_core::transforms::{equivalence_labels, generator, generator_labels, BirationalMap};

/// Exit code for usage and configuration errors.
const USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "painleve", version, about = "Exact verification of coupled Painlevé III Hamiltonian systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List families, generators, charts, equivalences and suites.
    List,
    /// Export a system: Hamiltonian, parameters and vector field.
    Show {
        family: String,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Apply a word in the generators, symbolically or at a rational point.
    Apply {
        family: String,
        /// Generator labels separated by commas or dots; the last letter acts first.
        word: String,
        /// Assignments such as `x=1/2,y=3,alpha1=1/5`.
        #[arg(long)]
        point: Option<String>,
    },
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Suites to run (`all` or any of the suite names).
        #[arg(long = "suite", value_delimiter = ',', default_value = "all")]
        suites: Vec<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Random)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Restrict family-specific checks to these families.
        #[arg(long = "family", value_delimiter = ',')]
        families: Vec<String>,
    },
    /// Check the confluence from the D5(1) system to the D4(1) system.
    Degenerate {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Integrate a benchmark description numerically.
    Integrate {
        benchmark: PathBuf,
        /// Write the samples as JSON lines to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search for polynomial first integrals.
    SearchIntegrals {
        family: String,
        #[arg(long = "deg")]
        degree: u32,
        /// Window `A,B` of powers of t.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2, 2])]
        twin: Vec<i32>,
    },
    /// Run the extra chart list against a system and report the outcome.
    ProbeAssumptionA {
        family: String,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Worker threads.
    #[arg(long, env = "PAINLEVE_JOBS")]
    jobs: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Random,
}

/// Errors that end the run.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn family(name: &str) -> Result<Family, Failure> {
    name.parse().map_err(|e: painleve_core::systems::UnknownFamily| usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
    }
}

/// Runs one subcommand; `Ok(false)` means at least one check failed.
fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::List => list(),
        Command::Show { family: f, format } => show(family(&f)?, format),
        Command::Apply { family: f, word, point } => apply(family(&f)?, &word, point.as_deref()),
        Command::Verify {
            run,
            suites,
            mode,
            seed,
            samples,
            families,
        } => {
            let config = suite_config(&suites, mode, seed, samples, &families)?;
            emit(&run_suite(&config, jobs(&run)), &run)
        }
        Command::Degenerate { run } => {
            let config = SuiteConfig {
                suites: vec![Suite::Confluence],
                mode: Mode::Exact,
                families: None,
            };
            emit(&run_suite(&config, jobs(&run)), &run)
        }
        Command::Integrate { benchmark, output } => integrate(&benchmark, output.as_deref()),
        Command::SearchIntegrals { family: f, degree, twin } => match twin[..] {
            [a, b] => search_integrals(family(&f)?, degree, (a, b)),
            _ => Err(usage("--twin expects two integers A,B")),
        },
        Command::ProbeAssumptionA { family: f, format } => {
            let reports = probe_assumption_a(&make_system(family(&f)?));
            match format {
                Format::Json => println!("{}", to_json(&reports)),
                Format::Human => {
                    for r in &reports {
                        println!("{}", r.summary());
                    }
                }
            }
            Ok(true)
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialisable")
}

fn jobs(run: &RunArgs) -> usize {
    run.jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn suite_config(suites: &[String], mode: ModeArg, seed: u64, samples: usize, families: &[String]) -> Result<SuiteConfig, Failure> {
    let mut selected = Vec::new();
    for s in suites {
        if s.trim() == "all" {
            selected.extend(Suite::ALL);
        } else {
            selected.push(s.parse::<Suite>().map_err(|e| usage(e.to_string()))?);
        }
    }
    selected.sort();
    selected.dedup();
    let mode = match mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Random if samples == 0 => return Err(usage("--samples must be at least 1")),
        ModeArg::Random => Mode::Random { seed, samples },
    };
    let families = if families.is_empty() {
        None
    } else {
        Some(families.iter().map(|f| family(f)).collect::<Result<Vec<_>, _>>()?)
    };
    Ok(SuiteConfig {
        suites: selected,
        mode,
        families,
    })
}

fn emit(report: &SuiteReport, run: &RunArgs) -> Result<bool, Failure> {
    let text = match run.format {
        Format::Json => to_json(report) + "\n",
        Format::Human => {
            let mut s = String::new();
            for c in &report.checks {
                s.push_str(&c.summary());
                s.push('\n');
            }
            s.push_str(&format!(
                "{} checks: {} pass, {} fail, {} inconclusive\n",
                report.checks.len(),
                report.count(Status::Pass),
                report.count(Status::Fail),
                report.count(Status::Inconclusive)
            ));
            s
        }
    };
    match &run.output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(!report.any_failed())
}

fn list() -> Result<bool, Failure> {
    println!("families:");
    for f in Family::ALL {
        println!("  {:<10} {}", f.slug(), f.name());
    }
    println!("generators:");
    for f in Family::WEYL {
        println!("  {:<10} {}", f.slug(), generator_labels(f).join(" "));
    }
    println!("charts:");
    for f in [Family::D4, Family::B4First, Family::B4Second, Family::D52] {
        let set = ChartSet::Family(f);
        let labels: Vec<String> = charts(set).iter().map(|c| c.label()).collect();
        println!("  {:<10} {}", set.name(), labels.join(" "));
    }
    println!("equivalences:");
    for label in equivalence_labels() {
        println!("  {label}");
    }
    println!("suites:");
    println!("  {}", Suite::ALL.map(|s| s.name()).join(" "));
    Ok(true)
}

fn show(f: Family, format: Format) -> Result<bool, Failure> {
    let system = make_system(f);
    let field = system.vector_field();
    match format {
        Format::Json => {
            let components: serde_json::Map<String, serde_json::Value> = field
                .iter()
                .map(|(v, e)| (v.name().to_string(), json!(e)))
                .collect();
            println!("{}", to_json(&json!({ "system": system, "field": components })));
        }
        Format::Human => {
            println!("{} ({})", f.name(), f.slug());
            println!("parameters: {}", system.params.describe());
            println!("H = {}", system.hamiltonian);
            for (v, e) in field.iter() {
                println!("d{v}/dt = {e}");
            }
        }
    }
    Ok(true)
}

fn parse_word(f: Family, word: &str) -> Result<Vec<BirationalMap>, Failure> {
    let letters: Vec<&str> = word
        .split(|c: char| c == ',' || c == '.' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if letters.is_empty() {
        return Err(usage("empty word"));
    }
    letters
        .into_iter()
        .map(|l| generator(f, l).map_err(|e| usage(e.to_string())))
        .collect()
}

fn parse_point(text: &str) -> Result<Point, Failure> {
    let mut pt = Point::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("expected name=value, got `{item}`")))?;
        let var: Var = name.trim().parse().map_err(|e: painleve_core::algebra::var::UnknownVariable| usage(e.to_string()))?;
        let expr: RationalExpression = value.trim().parse().map_err(|e| usage(format!("{e}")))?;
        let value = expr
            .eval(&Point::new())
            .map_err(|_| usage(format!("value of {name} is not a rational constant")))?;
        pt.set(var, value);
    }
    Ok(pt)
}

fn apply(f: Family, word: &str, point: Option<&str>) -> Result<bool, Failure> {
    let letters = parse_word(f, word)?;
    let refs: Vec<&BirationalMap> = letters.iter().collect();
    let map = BirationalMap::compose_word(&refs).map_err(|e| usage(e.to_string()))?;
    match point {
        None => {
            let images: serde_json::Map<String, serde_json::Value> =
                map.images().iter().map(|(v, e)| (v.name().to_string(), json!(e))).collect();
            println!("{}", to_json(&json!({ "word": word, "family": f, "images": images })));
            Ok(true)
        }
        Some(text) => {
            let mut pt = parse_point(text)?;
            let params = make_system(f).params;
            if let Some(&first) = params.symbols().first() {
                if pt.get(first).is_none() {
                    if let Some(value) = params.solve_first(&pt) {
                        pt.set(first, value);
                    }
                }
            }
            match map.apply_point(&pt) {
                Ok(image) => {
                    let values: serde_json::Map<String, serde_json::Value> =
                        image.iter().map(|(v, q)| (v.name().to_string(), json!(q.to_string()))).collect();
                    println!("{}", to_json(&json!({ "word": word, "family": f, "image": values })));
                    Ok(true)
                }
                Err(e) => {
                    eprintln!("map is undefined at this point: {e}");
                    Ok(false)
                }
            }
        }
    }
}

fn integrate(path: &Path, output: Option<&Path>) -> Result<bool, Failure> {
    let text = fs::read_to_string(path)?;
    let bench: Benchmark = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let system = bench.system().map_err(|e| usage(e.to_string()))?;
    let traj = match bench.run() {
        Ok(traj) => traj,
        Err(e) => {
            eprintln!("integration failed: {e}");
            return Ok(false);
        }
    };
    if let Some(out) = output {
        traj.write_json_lines(io::BufWriter::new(fs::File::create(out)?))?;
    }
    let field = CompiledField::new(&system.vector_field(), Var::T);
    let defect = residual(&field, &traj).map_err(|e| usage(e.to_string()))?;
    println!(
        "{}",
        to_json(&json!({
            "family": bench.family,
            "samples": traj.len(),
            "stats": traj.stats,
            "final_time": traj.times.last(),
            "final_state": traj.last_state(),
            "max_defect": defect.max,
        }))
    );
    Ok(true)
}

fn search_integrals(f: Family, degree: u32, window: (i32, i32)) -> Result<bool, Failure> {
    let basis = first_integral_search(&make_system(f), degree, window).map_err(|e| usage(e.to_string()))?;
    let verdict = if basis.iter().all(|b| b.constant_value().is_some()) {
        "constants only"
    } else {
        "non-constant integrals found"
    };
    println!(
        "{}",
        to_json(&json!({
            "family": f,
            "degree": degree,
            "window": [window.0, window.1],
            "basis": basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "verdict": verdict,
        }))
    );
    Ok(true)
}
