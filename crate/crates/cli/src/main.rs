//! `pdt`: validate seeds, flip ridges and explore adjacency graphs of perfect
//! lattice Delaunay polytopes.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input, 2 failed
//! certificate (not perfect, not empty, qrank of a ridge not 2), 3 runtime
//! failure during exploration, 130 interrupted (state saved).

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use pdt_core::cvp::closest_vectors;
use pdt_core::delaunay::PolytopeRecord;
use pdt_core::exact::{Mat, Rat};
use pdt_core::explore::{export_gap, export_json, validate_seed, Control, Diagnostic, Exploration, Limits, SeedFile, StopReason, CAVEAT};
use pdt_core::hinge::{flip, ridge_generator, HingeError};
use pdt_core::qfunc::{parse_rat, qrank};
use pdt_core::seeds;
use serde::Deserialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

const EXIT_INPUT: u8 = 1;
const EXIT_CERTIFICATE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_INTERRUPTED: u8 = 130;

#[derive(Parser)]
#[command(name = "pdt", version, about = "Perfect lattice Delaunay polytopes by ridge flips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExportKind {
    Gap,
    Json,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BuiltinSeed {
    Segment,
    Gosset221,
    Gosset321,
    Perfect72,
}

#[derive(Subcommand)]
enum Command {
    /// Re-certify a seed file: emptiness, qrank 1, boundedness.
    Validate { seed: PathBuf },
    /// Breadth-first exploration of the adjacency graph from seeds.
    Explore {
        /// Dimension; without --seed, selects the built-in seed (1, 6, 7 or 8).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long = "seed")]
        seeds: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long)]
        max_flips: Option<usize>,
        /// Seconds.
        #[arg(long)]
        wall_clock: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        /// Continue from a saved state file (seeds are then ignored).
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        export: ExportKind,
    },
    /// Flip a seed across one ridge, given as a JSON list of vertices.
    Flip {
        seed: PathBuf,
        #[arg(long)]
        ridge: String,
    },
    /// Quadratic rank of a point set (JSON list of integer vectors).
    Qrank { points: PathBuf },
    /// Closest lattice vectors to a center under a positive definite form.
    Cvp {
        /// JSON matrix; entries may be numbers or rational strings.
        form: PathBuf,
        /// Comma separated rationals, e.g. 1/2,1/2.
        #[arg(long, allow_hyphen_values = true)]
        center: String,
    },
    /// Print a built-in seed as a seed file.
    Seed {
        #[arg(value_enum)]
        name: BuiltinSeed,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { seed } => cmd_validate(&seed),
        Command::Explore { dim, seeds, out, max_nodes, max_flips, wall_clock, threads, resume, export } => {
            let limits = Limits { max_nodes, max_flips, wall_clock };
            cmd_explore(dim, &seeds, &out, &limits, threads, resume.as_deref(), export)
        }
        Command::Flip { seed, ridge } => cmd_flip(&seed, &ridge),
        Command::Qrank { points } => cmd_qrank(&points),
        Command::Cvp { form, center } => cmd_cvp(&form, &center),
        Command::Seed { name } => cmd_seed(name),
    };
    ExitCode::from(code)
}

fn input_error(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}

fn diagnostic_code(d: &Diagnostic) -> u8 {
    eprintln!("error: {d}");
    if d.is_parse_error() {
        EXIT_INPUT
    } else {
        EXIT_CERTIFICATE
    }
}

fn cmd_validate(path: &Path) -> u8 {
    match validate_seed(path) {
        Ok(p) => {
            println!("ok: dim {}, {} vertices, qrank {}, empty", p.dim, p.vertices.len(), p.qrank());
            0
        }
        Err(d) => diagnostic_code(&d),
    }
}

fn builtin(name: BuiltinSeed) -> PolytopeRecord {
    match name {
        BuiltinSeed::Segment => seeds::unit_segment(),
        BuiltinSeed::Gosset221 => seeds::gosset_221(),
        BuiltinSeed::Gosset321 => seeds::gosset_321(),
        BuiltinSeed::Perfect72 => seeds::perfect_72(),
    }
}

fn builtin_for_dim(n: usize) -> Option<PolytopeRecord> {
    Some(builtin(match n {
        1 => BuiltinSeed::Segment,
        6 => BuiltinSeed::Gosset221,
        7 => BuiltinSeed::Gosset321,
        8 => BuiltinSeed::Perfect72,
        _ => return None,
    }))
}

fn cmd_seed(name: BuiltinSeed) -> u8 {
    let p = builtin(name);
    let seed = SeedFile { dim: p.dim, vertices: Some(p.vertices), function: Some(p.function) };
    println!("{}", serde_json::to_string_pretty(&seed).expect("serializable"));
    0
}

/// Writes through a temporary file so readers never see a partial state.
fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}

fn write_outputs(ex: &Exploration, out: &Path, export: ExportKind) -> std::io::Result<()> {
    fs::create_dir_all(out.join("polytopes"))?;
    write_atomic(&out.join("state.json"), &ex.to_json())?;
    if export != ExportKind::Json {
        write_atomic(&out.join("graph.gap.txt"), &export_gap(&ex.graph))?;
    }
    if export != ExportKind::Gap {
        write_atomic(&out.join("graph.json"), &export_json(ex))?;
    }
    for node in &ex.graph.nodes {
        let path = out.join("polytopes").join(format!("{}.json", node.certificate));
        if !path.exists() {
            write_atomic(&path, &(serde_json::to_string_pretty(&node.record).expect("serializable") + "\n"))?;
        }
    }
    Ok(())
}

fn cmd_explore(
    dim: Option<usize>,
    seed_paths: &[PathBuf],
    out: &Path,
    limits: &Limits,
    threads: Option<usize>,
    resume: Option<&Path>,
    export: ExportKind,
) -> u8 {
    if let Some(t) = threads {
        if t == 0 {
            return input_error("--threads must be positive");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            warn!("thread pool: {e}");
        }
    }
    if limits.max_nodes == Some(0) {
        return input_error("--max-nodes must be positive");
    }
    let mut ex = if let Some(state) = resume {
        let text = match fs::read_to_string(state) {
            Ok(t) => t,
            Err(e) => return input_error(format!("{}: {e}", state.display())),
        };
        match Exploration::from_json(&text) {
            Ok(ex) if ex.check_version().is_ok() => ex,
            Ok(ex) => return input_error(format!("unsupported state version {:?}", ex.version)),
            Err(e) => return input_error(format!("{}: {e}", state.display())),
        }
    } else {
        let mut records = Vec::new();
        for path in seed_paths {
            match validate_seed(path) {
                Ok(p) => records.push(p),
                Err(d) => return diagnostic_code(&d),
            }
        }
        if records.is_empty() {
            match dim.and_then(builtin_for_dim) {
                Some(p) => records.push(p),
                None => return input_error("no seeds: pass --seed, or --dim 1, 6, 7 or 8 for a built-in seed"),
            }
        }
        match Exploration::new(&records) {
            Ok(ex) => ex,
            Err(e) => return input_error(e),
        }
    };
    if dim.is_some_and(|n| n != ex.graph.dim) {
        return input_error(format!("seeds have dimension {}, not {}", ex.graph.dim, dim.unwrap_or_default()));
    }

    let stop = Arc::new(AtomicBool::new(false));
    {
        let stop = Arc::clone(&stop);
        if let Err(e) = ctrlc::set_handler(move || stop.store(true, Ordering::SeqCst)) {
            warn!("cannot install interrupt handler: {e}");
        }
    }
    if let Err(e) = fs::create_dir_all(out) {
        return input_error(format!("{}: {e}", out.display()));
    }
    let state_path = out.join("state.json");
    let mut save_error: Option<std::io::Error> = None;
    let mut checkpoint = |ex: &Exploration| {
        if let Err(e) = write_atomic(&state_path, &ex.to_json()) {
            save_error.get_or_insert(e);
        }
    };
    let result = ex.run(limits, &mut Control { stop: Some(&stop), checkpoint: Some(&mut checkpoint) });
    if let Some(e) = save_error {
        return input_error(format!("{}: {e}", state_path.display()));
    }
    if let Err(e) = write_outputs(&ex, out, export) {
        return input_error(format!("{}: {e}", out.display()));
    }
    let bounded = ex.graph.bounded_nodes().len();
    match result {
        Ok(reason) => {
            info!("stopped: {reason:?}");
            println!(
                "{}: {} bounded, {} unbounded, {} edges, {} flips",
                match reason {
                    StopReason::Complete => "complete",
                    StopReason::MaxNodes => "stopped at --max-nodes",
                    StopReason::MaxFlips => "stopped at --max-flips",
                    StopReason::WallClock => "stopped at --wall-clock",
                    StopReason::Interrupted => "interrupted",
                },
                bounded,
                ex.graph.nodes.len() - bounded,
                ex.graph.edges.len(),
                ex.state.flips.len()
            );
            println!("note: {CAVEAT}");
            println!("state: {}", state_path.display());
            if reason == StopReason::Interrupted {
                EXIT_INTERRUPTED
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn cmd_flip(seed: &Path, ridge: &str) -> u8 {
    let p = match validate_seed(seed) {
        Ok(p) => p,
        Err(d) => return diagnostic_code(&d),
    };
    let s: Vec<Vec<i64>> = match serde_json::from_str(ridge) {
        Ok(s) => s,
        Err(e) => return input_error(format!("ridge: {e}")),
    };
    if s.iter().any(|v| v.len() != p.dim) {
        return input_error(format!("ridge vertices must have length {}", p.dim));
    }
    let pencil = match ridge_generator(&p, &s) {
        Ok(pen) => pen,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CERTIFICATE;
        }
    };
    match flip(&pencil, &p.vertices) {
        Ok(r) => {
            println!("rho_m = {}", r.rho_m);
            println!("witness = {:?}", r.witness);
            println!("bounded = {}", r.new_record.bounded);
            println!("qrank = {}", r.new_record.qrank());
            println!("vertices = {}", serde_json::to_string(&r.new_record.vertices).expect("serializable"));
            0
        }
        Err(e @ (HingeError::UnboundedRidge | HingeError::IrrationalBoundary)) => {
            println!("{e}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsFile {
    List(Vec<Vec<i64>>),
    Seed { dim: usize, vertices: Vec<Vec<i64>> },
}

fn cmd_qrank(path: &Path) -> u8 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", path.display())),
    };
    let (n, points) = match serde_json::from_str::<PointsFile>(&text) {
        Ok(PointsFile::List(v)) if !v.is_empty() => (v[0].len(), v),
        Ok(PointsFile::Seed { dim, vertices }) => (dim, vertices),
        Ok(_) => return input_error("empty point list"),
        Err(e) => return input_error(format!("{}: {e}", path.display())),
    };
    if points.iter().any(|v| v.len() != n) {
        return input_error("points have different lengths");
    }
    println!("qrank = {}", qrank(&points, n));
    0
}

fn parse_entry(v: &serde_json::Value) -> Option<Rat> {
    match v {
        serde_json::Value::Number(x) => x.as_i64().map(pdt_core::exact::rat),
        serde_json::Value::String(s) => parse_rat(s).ok(),
        _ => None,
    }
}

fn cmd_cvp(path: &Path, center: &str) -> u8 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", path.display())),
    };
    let rows: Vec<Vec<serde_json::Value>> = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return input_error(format!("{}: {e}", path.display())),
    };
    let n = rows.len();
    let mut entries = Vec::with_capacity(n * n);
    for row in &rows {
        if row.len() != n {
            return input_error("form must be a square matrix");
        }
        for v in row {
            match parse_entry(v) {
                Some(x) => entries.push(x),
                None => return input_error(format!("bad matrix entry {v}")),
            }
        }
    }
    let c: Result<Vec<Rat>, _> = center.split(',').map(parse_rat).collect();
    let c = match c {
        Ok(c) if c.len() == n => c,
        Ok(_) => return input_error(format!("center must have {n} coordinates")),
        Err(e) => return input_error(e),
    };
    let q = Mat::from_vec(n, n, entries);
    match closest_vectors(&q, &c) {
        Ok(r) => {
            println!("dist2 = {}", r.squared_distance);
            println!("minimizers = {}", r.minimizers.len());
            for m in &r.minimizers {
                println!("{}", serde_json::to_string(m).expect("serializable"));
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CERTIFICATE
        }
    }
}
