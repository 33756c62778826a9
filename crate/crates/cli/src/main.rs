use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use toricmorph::checks::{run_many, CheckReport, Status, CHECK_IDS};
use toricmorph::fixtures::{self, Fixture};

#[derive(Parser)]
#[command(name = "toricmorph", version, about = "Exact verification of the toric constructions in the bundled data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks by id (V1..V14) or `all`.
    Verify {
        #[arg(required = true)]
        ids: Vec<String>,
        /// Write a JSON report to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Run checks one after another.
        #[arg(long)]
        serial: bool,
        /// Omit the timestamp and timings so reports are reproducible.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Print a bundled fixture.
    Show {
        fixture: String,
        /// Enumerate the lattice points of a polytope.
        #[arg(long)]
        lattice_points: bool,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// List the available checks.
    ListChecks,
}

const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            ids,
            json,
            serial,
            no_timestamp,
        } => verify(ids, json, serial, no_timestamp),
        Command::Show {
            fixture,
            lattice_points,
            json,
        } => show(&fixture, lattice_points, json),
        Command::ListChecks => {
            for c in fixtures::list_checks() {
                println!("{:<4} {:<18} {}", c.id, c.slug, c.title);
                println!("     {}", c.anchor);
            }
            ExitCode::SUCCESS
        }
    }
}

fn resolve_ids(ids: &[String]) -> Result<Vec<String>, String> {
    if ids.iter().any(|i| i.eq_ignore_ascii_case("all")) {
        return Ok(CHECK_IDS.iter().map(|s| s.to_string()).collect());
    }
    let mut out: Vec<String> = Vec::new();
    for id in ids {
        let id = id.to_ascii_uppercase();
        if !CHECK_IDS.contains(&id.as_str()) {
            return Err(format!("unknown check id {id:?}; expected one of {} or all", CHECK_IDS.join(", ")));
        }
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out.sort_by_key(|id| CHECK_IDS.iter().position(|c| c == id));
    Ok(out)
}

fn verify(ids: Vec<String>, path: Option<PathBuf>, serial: bool, no_timestamp: bool) -> ExitCode {
    let ids = match resolve_ids(&ids) {
        Ok(ids) => ids,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprintln!("usage: toricmorph verify <ids|all> [--json PATH] [--serial] [--no-timestamp]");
            return ExitCode::from(USAGE);
        }
    };
    let mut reports = match run_many(&ids, serial) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    };
    if no_timestamp {
        for r in &mut reports {
            r.elapsed_ms = 0;
        }
    }
    for r in &reports {
        println!("{}", line(r));
    }
    let pass = reports.iter().filter(|r| r.status == Status::Pass).count();
    let fail = reports.len() - pass;
    println!("{pass} passed, {fail} failed");
    if let Some(path) = path {
        let mut report = json!({ "checks": reports, "summary": { "pass": pass, "fail": fail } });
        if !no_timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            report["generated_at_unix"] = json!(secs);
        }
        let text = serde_json::to_string_pretty(&report).expect("serializable report");
        if let Err(e) = std::fs::write(&path, text + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(USAGE);
        }
    }
    if fail == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn line(r: &CheckReport) -> String {
    let mark = match r.status {
        Status::Pass => "PASS ",
        Status::Fail => "FAIL ",
        Status::Error => "ERROR",
    };
    let mut s = format!("{mark} {:<4} {:>7} ms  {}", r.check_id, r.elapsed_ms, r.paper_anchor);
    if r.status != Status::Pass {
        s.push_str(&format!("\n      {}", r.witness));
    }
    s
}

fn show(name: &str, lattice_points: bool, as_json: bool) -> ExitCode {
    let loaded = match fixtures::load(name) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("known fixtures: {}", fixtures::names().join(", "));
            return ExitCode::from(USAGE);
        }
    };
    let raw: Value = serde_json::from_str(fixtures::raw(name).expect("loaded fixture")).expect("valid JSON");
    let points = match (&loaded, lattice_points) {
        (Fixture::Polytope(p), true) => Some(p.lattice_points()),
        _ => None,
    };
    if as_json {
        let mut out = raw;
        if let Some(pts) = &points {
            out["lattice_point_count"] = json!(pts.len());
            out["lattice_points"] = json!(pts.iter().map(|p| p.to_i64s()).collect::<Vec<_>>());
        }
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        return ExitCode::SUCCESS;
    }
    match &loaded {
        Fixture::Polytope(p) => {
            println!("polytope {name}: {} vertices, dim {}", p.vertices().len(), p.dim());
            for v in p.vertices() {
                println!("  {v}");
            }
            println!("{} facets, reflexive: {}", p.facets().len(), p.is_reflexive());
        }
        Fixture::Fan(f) => {
            println!("fan {name}: {} rays, {} maximal cones", f.rays().len(), f.maximal_cones().len());
            for (i, r) in f.rays().iter().enumerate() {
                println!("  r{i} = {r}");
            }
            for c in f.maximal_cones() {
                let labels: Vec<String> = c.iter().map(|i| format!("r{i}")).collect();
                println!("  cone {}", labels.join(" "));
            }
        }
        Fixture::Map(m) => {
            println!("map {name}: {} -> {}, {}x{}", m.source, m.target, m.target_dim(), m.source_dim());
            for r in m.matrix.row_vectors() {
                println!("  {r}");
            }
        }
        _ => println!("{}", serde_json::to_string_pretty(&raw).expect("serializable")),
    }
    if let Some(pts) = points {
        println!("lattice points: {}", pts.len());
        for p in &pts {
            println!("  {p}");
        }
    }
    ExitCode::SUCCESS
}
