use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use semioval::galois::{FieldSpec, FieldTables};
use semioval::report::emit::Runtime;
use semioval::report::{self, compare_golden, emit_tables, group_structure_label, parse_tables, seven_secant};
use semioval::report::{Format, GoldenError, GoldenTable, OutputDocument};
use semioval::search::{self, CheckpointTarget, Mode, SearchConfig, Status};
use semioval::{group, PointSet, ProjectivePlane};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_INCOMPLETE: u8 = 5;

#[derive(Parser)]
#[command(name = "semioval", version, about = "Classify semiovals in PG(2,q) up to collineation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify semiovals of the given sizes.
    Classify(ClassifyArgs),
    /// Report predicates, spectrum and stabilizer of a set of points.
    VerifySet(VerifyArgs),
    /// Compare a run document with embedded reference data.
    Compare(CompareArgs),
    /// Plane utilities.
    Plane {
        #[command(subcommand)]
        command: PlaneCommand,
    },
    /// Check the four listed 20-point semiovals of PG(2,8) with a 7-secant
    /// under every candidate naming of GF(8).
    SevenSecant,
}

#[derive(Subcommand)]
enum PlaneCommand {
    /// Print points, lines and incidences as JSON.
    Dump {
        #[arg(long)]
        q: u32,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FieldArg {
    /// Reduction polynomial coefficients, constant term first (e.g. 1,1,0,1).
    #[arg(long = "field-poly", env = "SEMIOVAL_FIELD_POLY")]
    field_poly: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    q: u32,
    /// Size range `a..b` (inclusive) or a single size.
    #[arg(long, value_parser = parse_range)]
    sizes: (usize, usize),
    /// Size of the admissible sets generated before backtracking (default q+1).
    #[arg(long)]
    threshold: Option<usize>,
    #[arg(long, default_value = "all")]
    mode: Mode,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Record completed seeds in this JSON-lines file.
    #[arg(long, conflicts_with = "resume")]
    checkpoint: Option<PathBuf>,
    /// Continue a run from its checkpoint file, appending to it.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Stop after about this many backtracking nodes.
    #[arg(long)]
    budget: Option<u64>,
    /// Only extend these seeds (comma-separated indices).
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<usize>>,
    /// Leave timing data out of the manifest.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    field: FieldArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    q: u32,
    /// File with one homogeneous coordinate triple per line.
    file: PathBuf,
    #[command(flatten)]
    field: FieldArg,
}

#[derive(Args)]
struct CompareArgs {
    /// Run document (JSON or CSV).
    #[arg(long)]
    run: PathBuf,
    /// Reference data: pg2_8 or pg2_9.
    #[arg(long)]
    golden: String,
    /// Restrict the comparison to `a..b`.
    #[arg(long, value_parser = parse_range)]
    sizes: Option<(usize, usize)>,
}

struct Failure {
    code: u8,
    category: &'static str,
    message: String,
}

impl Failure {
    fn new(code: u8, category: &'static str, message: impl ToString) -> Self {
        Failure { code, category, message: message.to_string() }
    }

    fn usage(message: impl ToString) -> Self {
        Self::new(EXIT_USAGE, "usage", message)
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::new(EXIT_FAILURE, "io", format!("{}: {e}", path.display()))
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected a size or a range a..b, got {s:?}");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(format!("empty size range {s:?}"));
    }
    Ok((a, b))
}

fn build_plane(q: u32, field: &FieldArg) -> Result<ProjectivePlane, Failure> {
    let spec = match &field.field_poly {
        Some(text) => FieldSpec::parse(q, text),
        None => FieldSpec::default_for(q),
    }
    .map_err(Failure::usage)?;
    let tables = FieldTables::build(spec).map_err(Failure::usage)?;
    ProjectivePlane::build(tables).map_err(|e| Failure::new(EXIT_FAILURE, "plane", e))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn classify(args: ClassifyArgs) -> Result<u8, Failure> {
    let plane = build_plane(args.q, &args.field)?;
    let mut config = SearchConfig::new(args.q, args.sizes.0, args.sizes.1);
    config.threshold = args.threshold;
    config.mode = args.mode;
    config.workers = args.jobs;
    config.node_budget = args.budget;
    config.seed_filter = args.seeds.map(|s| s.into_iter().collect());
    let checkpoint = match (args.checkpoint, args.resume) {
        (Some(p), _) => Some(CheckpointTarget::Create(p)),
        (None, Some(p)) => Some(CheckpointTarget::Resume(p)),
        (None, None) => None,
    };
    let start = Instant::now();
    let outcome = search::classify_with_checkpoint(&plane, &config, checkpoint.as_ref()).map_err(|e| match e {
        search::SearchError::Config(m) => Failure::usage(m),
        search::SearchError::Checkpoint(c) => Failure::new(EXIT_FAILURE, "checkpoint", c),
        other => Failure::new(EXIT_FAILURE, "search", other),
    })?;
    let workers = if args.jobs == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        args.jobs
    };
    let runtime = (!args.no_timing).then(|| Runtime { wall_clock_seconds: start.elapsed().as_secs_f64(), workers });
    let doc = OutputDocument::from_outcome(&plane, &config, outcome, runtime);
    let text = emit_tables(&doc, args.format).map_err(|e| Failure::new(EXIT_FAILURE, "output", e))?;
    write_output(args.out.as_deref(), &text)?;
    if doc.manifest.status == Status::BudgetExhausted {
        return Err(Failure::new(
            EXIT_BUDGET,
            "budget",
            format!("node budget exhausted after {} of {} seeds", doc.manifest.seeds_done, doc.manifest.seeds_total),
        ));
    }
    Ok(0)
}

fn read_points(plane: &ProjectivePlane, path: &Path) -> Result<PointSet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let cleaned: String = line.chars().map(|c| if "(),;[]".contains(c) { ' ' } else { c }).collect();
        let fields: Vec<&str> = cleaned.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let bad = |m: String| Failure::new(EXIT_USAGE, "input", format!("{}:{}: {m}", path.display(), i + 1));
        let coords: Vec<u32> = fields
            .iter()
            .map(|f| f.parse().map_err(|_| bad(format!("not an integer: {f:?}"))))
            .collect::<Result<_, _>>()?;
        let p = plane.point_from_coords(&coords).map_err(|e| bad(e.to_string()))?;
        points.push(p);
    }
    if points.is_empty() {
        return Err(Failure::new(EXIT_USAGE, "input", format!("{}: no points", path.display())));
    }
    PointSet::from_points(plane, &points).map_err(|e| Failure::new(EXIT_USAGE, "input", e))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verify_set(args: VerifyArgs) -> Result<u8, Failure> {
    let plane = build_plane(args.q, &args.field)?;
    let set = read_points(&plane, &args.file)?;
    let stab = group::set_stabilizer(&plane, &set).map_err(|e| Failure::new(EXIT_FAILURE, "group", e))?;
    let label = group_structure_label(&plane, stab.order, &stab.generators);
    let spectrum = set.spectrum();
    println!("points: {}", set.len());
    println!("admissible: {}", yes(set.is_admissible().unwrap_or(false)));
    println!("semioval: {}", yes(set.is_semioval().unwrap_or(false)));
    println!("blocking semioval: {}", yes(set.is_blocking_semioval().unwrap_or(false)));
    println!("spectrum: {}", spectrum.iter().map(u32::to_string).collect::<Vec<_>>().join(" "));
    println!(
        "support: {}",
        report::spectrum_support(&spectrum).iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
    );
    println!("stabilizer order: {}", stab.order);
    println!("stabilizer group: {label}");
    Ok(0)
}

fn compare(args: CompareArgs) -> Result<u8, Failure> {
    let text = fs::read_to_string(&args.run).map_err(|e| Failure::io(&args.run, e))?;
    let doc = parse_tables(&text).map_err(|e| Failure::new(EXIT_USAGE, "input", format!("{}: {e}", args.run.display())))?;
    let golden = GoldenTable::embedded(&args.golden).map_err(|e| match e {
        GoldenError::Unknown(_) => Failure::usage(e),
        other => Failure::new(EXIT_FAILURE, "golden", other),
    })?;
    let diff = compare_golden(&doc, &golden, args.sizes).map_err(|e| match e {
        GoldenError::Incomplete(_) => Failure::new(EXIT_INCOMPLETE, "incomplete", e),
        other => Failure::usage(other),
    })?;
    let sizes: Vec<String> = diff.sizes.iter().map(usize::to_string).collect();
    print!("{diff}");
    if diff.is_empty() {
        println!("match: sizes {}", sizes.join(" "));
        Ok(0)
    } else {
        Err(Failure::new(EXIT_MISMATCH, "mismatch", format!("{} differences from {}", diff.mismatches.len(), args.golden)))
    }
}

fn plane_dump(q: u32, field: FieldArg, out: Option<PathBuf>) -> Result<u8, Failure> {
    let plane = build_plane(q, &field)?;
    let mut text = serde_json::to_string_pretty(&plane.dump()).map_err(|e| Failure::new(EXIT_FAILURE, "output", e))?;
    text.push('\n');
    write_output(out.as_deref(), &text)?;
    Ok(0)
}

fn seven_secant() -> Result<u8, Failure> {
    let report = seven_secant::verify_seven_secant_sets().map_err(|e| Failure::new(EXIT_FAILURE, "group", e))?;
    print!("{report}");
    if report.validating().is_empty() {
        return Err(Failure::new(EXIT_MISMATCH, "mismatch", "no labeling validates all four sets"));
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let message = rendered.trim().trim_start_matches("error: ");
            eprintln!("semioval: error: usage: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match cli.command {
        Command::Classify(a) => classify(a),
        Command::VerifySet(a) => verify_set(a),
        Command::Compare(a) => compare(a),
        Command::Plane { command: PlaneCommand::Dump { q, field, out } } => plane_dump(q, field, out),
        Command::SevenSecant => seven_secant(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("semioval: error: {}: {}", f.category, f.message);
            ExitCode::from(f.code)
        }
    }
}
