use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rtmml::parser::ParseError;
use rtmml::reasoner::Conflict;
use rtmml::{
    build_graph, close, event_order, import_timeml, parse_rtmml_with, query_relation, serialize_rtmml, validate,
    AnnotatedDocument, BuildError, ClosureResult, ParseOptions, TimePointId, ValidationReport,
};

const OK: u8 = 0;
const INVALID: u8 = 1;
const IO: u8 = 2;
const INCONSISTENT: u8 = 3;

#[derive(Parser)]
#[command(name = "rtmml", version, about = "Validate and reason over RTMML tense annotation")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a document; the report goes to stderr (stdout with --json).
    Validate {
        path: PathBuf,
        /// Reject unknown elements, unknown attributes and unordered targets.
        #[arg(long)]
        strict: bool,
    },
    /// Print the closed constraint graph.
    Close {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
    },
    /// Print equivalence classes and the Hasse diagram of event points.
    Order {
        path: PathBuf,
        /// Include timerefx points alongside event points.
        #[arg(long)]
        include_times: bool,
        #[arg(long, value_enum, default_value_t = OrderFormat::Text)]
        format: OrderFormat,
    },
    /// Print the closed relation between two points (SD, v1.e, t1, named:x).
    Query { path: PathBuf, a: String, b: String },
    /// Convert TimeML EVENT/MAKEINSTANCE/TIMEX3 markup to RTMML.
    FromTimeml { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderFormat {
    Text,
    Json,
    Dot,
}

type Outcome = Result<(), u8>;

fn read(path: &Path) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        IO
    })
}

fn print_report(report: &ValidationReport, json: bool) {
    if json {
        println!("{}", report.to_json());
    } else {
        eprint!("{}", report.to_text());
    }
}

/// Parses and validates; anything short of a clean document ends the command.
fn load(path: &Path, strict: bool, json: bool) -> Result<(AnnotatedDocument, ValidationReport), u8> {
    let text = read(path)?;
    let parsed = match parse_rtmml_with(&text, ParseOptions { strict }) {
        Ok(p) => p,
        Err(e @ ParseError::Invalid { .. }) => {
            if json {
                println!("{}", json!({ "valid": false, "error": e.to_string() }));
            } else {
                eprintln!("error: {}: {e}", path.display());
            }
            return Err(INVALID);
        }
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return Err(IO);
        }
    };
    let mut report = validate(&parsed.document);
    report.issues.splice(0..0, parsed.warnings);
    Ok((parsed.document, report))
}

fn load_valid(path: &Path, json: bool) -> Result<AnnotatedDocument, u8> {
    let (doc, report) = load(path, false, json)?;
    if !report.is_valid() {
        print_report(&report, json);
        return Err(INVALID);
    }
    Ok(doc)
}

fn print_conflict(c: &Conflict) {
    let [a, b, d] = &c.triangle;
    let prov: Vec<&str> = c.provenance.iter().map(String::as_str).collect();
    eprintln!("inconsistent: conflict in triangle {a}, {b}, {d} from {}", prov.join(", "));
}

fn closed(path: &Path, json: bool) -> Result<ClosureResult, u8> {
    let doc = load_valid(path, json)?;
    let graph = match build_graph(&doc) {
        Ok(g) => g,
        Err(BuildError::Inconsistent(i)) => {
            let prov: Vec<&str> = i.provenance.iter().map(String::as_str).collect();
            eprintln!(
                "inconsistent: {} {} {} cannot also be {} (from {})",
                i.a,
                i.existing,
                i.b,
                i.added,
                prov.join(", ")
            );
            return Err(INCONSISTENT);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Err(INVALID);
        }
    };
    let res = close(&graph);
    if let Some(c) = &res.conflict {
        if json {
            println!("{}", res.to_json());
        }
        print_conflict(c);
        return Err(INCONSISTENT);
    }
    Ok(res)
}

fn parse_point(res: &ClosureResult, name: &str) -> Result<TimePointId, u8> {
    let p: TimePointId = name.parse().map_err(|e| {
        eprintln!("error: {e}");
        IO
    })?;
    if res.graph.contains(&p) {
        return Ok(p);
    }
    // Bare names that are not timerefx ids may still be shared labels.
    let named = TimePointId::Named(name.to_string());
    if matches!(p, TimePointId::Timex(_)) && res.graph.contains(&named) {
        return Ok(named);
    }
    eprintln!("error: unknown time point {name:?}");
    Err(IO)
}

fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    match cli.command {
        Command::Validate { path, strict } => {
            let (_, report) = load(&path, strict, json)?;
            print_report(&report, json);
            if report.is_valid() {
                Ok(())
            } else {
                Err(INVALID)
            }
        }
        Command::Close { path, format } => {
            let res = closed(&path, json)?;
            match format {
                GraphFormat::Dot if !json => print!("{}", res.graph.to_dot()),
                _ => println!("{}", serde_json::to_string_pretty(&res.to_json()).expect("JSON")),
            }
            Ok(())
        }
        Command::Order { path, include_times, format } => {
            let res = closed(&path, json)?;
            let order = event_order(&res, include_times).map_err(|e| {
                eprintln!("error: {e}");
                INCONSISTENT
            })?;
            match (json, format) {
                (true, _) | (false, OrderFormat::Json) => {
                    println!("{}", serde_json::to_string_pretty(&order.to_json()).expect("JSON"))
                }
                (false, OrderFormat::Dot) => print!("{}", order.to_dot()),
                (false, OrderFormat::Text) => print!("{}", order.to_text()),
            }
            Ok(())
        }
        Command::Query { path, a, b } => {
            let res = closed(&path, json)?;
            let (pa, pb) = (parse_point(&res, &a)?, parse_point(&res, &b)?);
            let rel = query_relation(&res, &pa, &pb).map_err(|e| {
                eprintln!("error: {e}");
                IO
            })?;
            if json {
                println!("{}", json!({ "a": pa, "b": pb, "rel": rel }));
            } else {
                println!("{rel}");
            }
            Ok(())
        }
        Command::FromTimeml { path } => {
            let text = read(&path)?;
            let imported = import_timeml(&text).map_err(|e| {
                eprintln!("error: {}: {e}", path.display());
                IO
            })?;
            for w in &imported.warnings {
                eprintln!("{w}");
            }
            print!("{}", serialize_rtmml(&imported.document));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(match run(cli) {
        Ok(()) => OK,
        Err(code) => code,
    })
}
