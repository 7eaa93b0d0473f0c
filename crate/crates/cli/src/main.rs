//! Command-line front end: verify the trap claims, inspect orbits and
//! functional graphs, enumerate extension-field periodic points, and run
//! the sorting-map search.
//!
//! Exit codes: 0 = everything checked holds, 1 = some claim failed,
//! 2 = invalid input, 3 = a work budget was exceeded.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use trapmaps::dynamics::{build_graph, orbit, periodic_points_ext};
use trapmaps::modfield::{is_prime, primes_in_range, ExtField};
use trapmaps::poly::{parse, BuiltinMap, Point, PolyMap};
use trapmaps::search::{run_search_streaming, SearchConfig};
use trapmaps::traps::{
    verify_builtin_with, verify_origin_attractor_with, SuiteEntry, VerifyOptions,
    DEFAULT_SAMPLE_SEED,
};
use trapmaps::Error as LibError;

const EXIT_HELP: &str = "exit codes:\n  \
    0  success; every checked claim holds\n  \
    1  at least one claim failed\n  \
    2  invalid input (unknown map, non-prime modulus, malformed config)\n  \
    3  a work budget was exceeded";

const REPORT_SCHEMA: &str = "report rows (one JSON object per claim and prime):\n  \
    {\"map\": str, \"p\": u64, \"claim\": str, \"holds\": bool,\n   \
    \"nilpotency_index\": u64|null, \"witness\": [u64,..]|null,\n   \
    \"predicted_untrapped\": u64, \"observed_untrapped\": u64,\n   \
    \"mode\": \"exhaustive\"|\"sampled\", \"elapsed_ms\": u64}\n\
    faulty primes yield {\"p\": u64, \"error\": str} instead.";

#[derive(Parser)]
#[command(
    name = "trapmaps",
    version,
    about = "Dynamics of three integer polynomial trap maps modulo primes",
    after_help = EXIT_HELP
)]
struct Cli {
    /// Worker threads (default: all cores; also env TRAPMAPS_JOBS)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Byte-reproducible output: zero timings, omit timestamps
    #[arg(long, global = true)]
    reproducible: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify trap claims at the given primes
    #[command(after_help = REPORT_SCHEMA)]
    Verify {
        /// Builtin name (additive_trap | multiplicative_trap | power_trap),
        /// "all", or a map file (one component polynomial per line)
        map: String,
        /// Primes: a comma list "2,3,7" (each must be prime) or an
        /// inclusive range "2..50" (non-primes are skipped)
        #[arg(long)]
        primes: String,
        /// Force seeded sampling even when exhaustive checking fits
        #[arg(long)]
        sampled: bool,
        /// Seed for sampled mode
        #[arg(long)]
        seed: Option<u64>,
        /// Points drawn per sampled claim
        #[arg(long)]
        samples: Option<u64>,
        /// Write the full JSON report (manifest + rows) here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print one forward orbit until its cycle closes
    Orbit {
        /// Builtin name or map file
        map: String,
        p: u64,
        x: u64,
        y: u64,
        /// Orbit length budget (default p^2)
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Build the full functional graph of a map mod p
    Graph {
        /// Builtin name or map file
        map: String,
        p: u64,
        /// Emit the edge list instead of the JSON summary
        #[arg(long)]
        edges: bool,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Periodic points of a map over the extension field GF(p^k)
    Ext {
        /// Builtin name or map file
        map: String,
        p: u64,
        k: usize,
    },
    /// Search for a sorting map within configured bounds
    Search {
        /// Key = value config file; see the library docs for the keys
        config: PathBuf,
        /// Write verdict lines and the run manifest here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    init_threads(cli.jobs);
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(exit_code_for(&e));
        }
    }
}

fn init_threads(jobs: Option<usize>) {
    let jobs = jobs.or_else(|| {
        std::env::var("TRAPMAPS_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = jobs.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<LibError>() {
        Some(LibError::BudgetExceeded(_)) | Some(LibError::SizeBoundExceeded { .. }) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let reproducible = cli.reproducible;
    match cli.command {
        Command::Verify { map, primes, sampled, seed, samples, json } => {
            cmd_verify(&map, &primes, sampled, seed, samples, json, reproducible)
        }
        Command::Orbit { map, p, x, y, max_steps } => cmd_orbit(&map, p, x, y, max_steps),
        Command::Graph { map, p, edges, out } => cmd_graph(&map, p, edges, out),
        Command::Ext { map, p, k } => cmd_ext(&map, p, k),
        Command::Search { config, out } => cmd_search(&config, out, reproducible),
    }
}

/// A map argument: builtin name first, then a file of component lines.
fn load_map(arg: &str) -> anyhow::Result<PolyMap> {
    if let Ok(builtin) = arg.parse::<BuiltinMap>() {
        return Ok(builtin.map());
    }
    let path = Path::new(arg);
    if !path.exists() {
        bail!(
            "unknown map `{arg}`: not a builtin (additive_trap, multiplicative_trap, \
             power_trap) and no such file"
        );
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if lines.is_empty() {
        bail!("map file {arg} has no component lines");
    }
    let num_vars = lines.len();
    let components = lines
        .iter()
        .map(|l| parse(l, num_vars))
        .collect::<Result<Vec<_>, _>>()?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| arg.to_string());
    Ok(PolyMap::new(components, Some(name))?)
}

/// "2,3,7" (all must be prime) or inclusive "2..50" (composites skipped).
fn parse_primes(spec: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().context("bad range start")?;
        let hi: u64 = hi.trim().parse().context("bad range end")?;
        let primes = primes_in_range(lo, hi);
        if primes.is_empty() {
            bail!("no primes in {lo}..{hi}");
        }
        return Ok(primes);
    }
    let mut primes = Vec::new();
    for part in spec.split(',') {
        let p: u64 = part.trim().parse().with_context(|| format!("bad prime `{part}`"))?;
        if !is_prime(p) {
            return Err(anyhow!(LibError::NonPrimeModulus(p)));
        }
        primes.push(p);
    }
    Ok(primes)
}

fn cmd_verify(
    map_arg: &str,
    primes_spec: &str,
    sampled: bool,
    seed: Option<u64>,
    samples: Option<u64>,
    json_path: Option<PathBuf>,
    reproducible: bool,
) -> anyhow::Result<i32> {
    let primes = parse_primes(primes_spec)?;
    let opts = VerifyOptions {
        force_sampled: sampled,
        seed: seed.unwrap_or(DEFAULT_SAMPLE_SEED),
        samples: samples.unwrap_or_else(|| VerifyOptions::default().samples),
        ..Default::default()
    };
    let started = now_rfc3339();

    let entries: Vec<SuiteEntry> = if map_arg == "all" {
        trapmaps::traps::verify_all_with(&primes, &opts)
    } else if let Ok(builtin) = map_arg.parse::<BuiltinMap>() {
        primes
            .par_iter()
            .map(|&p| match verify_builtin_with(builtin, p, &opts) {
                Ok(reports) => reports.into_iter().map(SuiteEntry::Report).collect(),
                Err(e) => vec![SuiteEntry::Failure { p, error: e.to_string() }],
            })
            .collect::<Vec<Vec<SuiteEntry>>>()
            .into_iter()
            .flatten()
            .collect()
    } else {
        let map = load_map(map_arg)?;
        primes
            .par_iter()
            .map(|&p| match verify_origin_attractor_with(&map, p, &opts) {
                Ok(report) => SuiteEntry::Report(report),
                Err(e) => SuiteEntry::Failure { p, error: e.to_string() },
            })
            .collect()
    };

    print_report_table(&entries);

    let total = entries.len();
    let holds = entries.iter().filter(|e| e.holds()).count();
    let errors = entries
        .iter()
        .filter(|e| matches!(e, SuiteEntry::Failure { .. }))
        .count();
    let failed = total - holds - errors;
    println!("{total} reports: {holds} hold, {failed} fail, {errors} errors");

    if let Some(path) = json_path {
        let rows: Vec<Value> = entries.iter().map(|e| e.to_json(reproducible)).collect();
        let doc = json!({
            "manifest": manifest(
                "verify",
                Some(opts.seed),
                json!({"total": total, "holds": holds, "failed": failed, "errors": errors}),
                &started,
                reproducible,
            ),
            "reports": rows,
        });
        fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        println!("report written to {}", path.display());
    }

    Ok(if errors > 0 {
        2
    } else if failed > 0 {
        1
    } else {
        0
    })
}

fn print_report_table(entries: &[SuiteEntry]) {
    println!(
        "{:<20} {:>6}  {:<18} {:<6} {:>6} {:>10} {:>10}  {:<10} note",
        "map", "p", "claim", "holds", "index", "predicted", "observed", "mode"
    );
    for entry in entries {
        match entry {
            SuiteEntry::Report(r) => {
                let index = r
                    .nilpotency_index
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| "-".into());
                let mode = match r.mode {
                    trapmaps::traps::VerifyMode::Exhaustive => "exhaustive",
                    trapmaps::traps::VerifyMode::Sampled => "sampled",
                };
                let mut notes: Vec<String> = Vec::new();
                if r.degenerate {
                    notes.push("degenerate".into());
                }
                if let Some(o) = &r.orientation {
                    notes.push(if o.first_over_second {
                        "u/v agrees".into()
                    } else {
                        "u/v disagrees".into()
                    });
                }
                if let Some(f) = &r.fermat {
                    notes.push(format!(
                        "Fermat k={}, k alone {}",
                        f.k,
                        if f.k_suffices == Some(true) { "suffices" } else { "insufficient" }
                    ));
                }
                if let Some(w) = &r.witness {
                    notes.push(format!("witness {w}"));
                }
                println!(
                    "{:<20} {:>6}  {:<18} {:<6} {:>6} {:>10} {:>10}  {:<10} {}",
                    r.map_name,
                    r.p,
                    r.claim.as_str(),
                    if r.holds { "yes" } else { "NO" },
                    index,
                    r.predicted_untrapped,
                    r.observed_untrapped,
                    mode,
                    notes.join("; ")
                );
            }
            SuiteEntry::Failure { p, error } => {
                println!("{:<20} {:>6}  error: {error}", "-", p);
            }
        }
    }
}

fn cmd_orbit(map_arg: &str, p: u64, x: u64, y: u64, max_steps: Option<u64>) -> anyhow::Result<i32> {
    let map = load_map(map_arg)?;
    if map.num_vars() != 2 {
        bail!("orbit takes x y coordinates, so the map must have two variables");
    }
    let start = Point::new(vec![x, y], p);
    let budget = max_steps.unwrap_or_else(|| p.saturating_mul(p));
    let summary = orbit(&map, &start, budget)?;
    let total = summary.tail_length + summary.cycle_length;

    println!(
        "orbit of {start} under {} mod {p}:",
        map.name().unwrap_or("map")
    );
    const PRINT_CAP: u64 = 48;
    let mut cur = start.clone();
    for step in 0..=total.min(PRINT_CAP) {
        let mark = if step == summary.tail_length && summary.cycle_length > 0 {
            if summary.cycle_length == 1 && map.evaluate(&cur)? == cur {
                "  <- fixed point"
            } else {
                "  <- enters cycle"
            }
        } else {
            ""
        };
        println!("  step {step}: {cur}{mark}");
        if step < total.min(PRINT_CAP) {
            cur = map.evaluate(&cur)?;
        }
    }
    if total > PRINT_CAP {
        println!("  .. {} more steps omitted", total - PRINT_CAP);
    }
    println!(
        "tail length {}, cycle length {}",
        summary.tail_length, summary.cycle_length
    );
    match summary.steps_to_origin {
        Some(s) => println!("reaches the origin at step {s}"),
        None => println!("never reaches the origin"),
    }
    Ok(0)
}

fn cmd_graph(map_arg: &str, p: u64, edges: bool, out: Option<PathBuf>) -> anyhow::Result<i32> {
    let map = load_map(map_arg)?;
    let graph = build_graph(&map, p)?;
    let mut sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    if edges {
        graph.write_edges(&mut sink)?;
    } else {
        serde_json::to_writer_pretty(&mut sink, &graph.summary())?;
        writeln!(sink)?;
    }
    sink.flush()?;
    if let Some(path) = out {
        eprintln!(
            "{} written to {}",
            if edges { "edge list" } else { "summary" },
            path.display()
        );
    }
    Ok(0)
}

fn cmd_ext(map_arg: &str, p: u64, k: usize) -> anyhow::Result<i32> {
    let map = load_map(map_arg)?;
    let field = ExtField::new(p, k, None)?;
    let points = periodic_points_ext(&map, &field)?;
    println!("{field}");
    println!(
        "periodic points of {} over GF({}^{}): {}",
        map.name().unwrap_or("map"),
        p,
        k,
        points.len()
    );
    for (point, period) in &points {
        let coords: Vec<String> = point.iter().map(|e| e.to_string()).collect();
        println!("  ({}) period {period}", coords.join(", "));
    }
    let nonzero = points
        .iter()
        .filter(|(pt, _)| pt.iter().any(|e| !e.is_zero()))
        .count();
    if nonzero > 0 {
        println!("{nonzero} periodic points besides the origin: the trap does not extend");
    } else {
        println!("only the origin is periodic");
    }
    Ok(0)
}

fn cmd_search(config: &Path, out: Option<PathBuf>, reproducible: bool) -> anyhow::Result<i32> {
    let text =
        fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = SearchConfig::parse(&text)?;
    let started = now_rfc3339();
    let clock = Instant::now();

    let mut file_sink: Option<BufWriter<fs::File>> = match &out {
        Some(path) => Some(BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => None,
    };
    let stdout = io::stdout();
    let mut stdout_lock = stdout.lock();

    let outcome = run_search_streaming(&cfg, |verdict| {
        let line = serde_json::to_string(verdict).expect("verdict serializes");
        match file_sink.as_mut() {
            Some(f) => {
                let _ = writeln!(f, "{line}");
            }
            None => {
                let _ = writeln!(stdout_lock, "{line}");
            }
        }
    })?;
    let summary_json = serde_json::to_value(&outcome.summary)?;

    match file_sink.as_mut() {
        Some(f) => {
            let doc = json!({
                "manifest": manifest(
                    "search",
                    None,
                    json!({
                        "enumerated": outcome.summary.enumerated,
                        "passes": outcome.summary.passes,
                    }),
                    &started,
                    reproducible,
                ),
                "config": cfg,
                "summary": summary_json,
            });
            writeln!(f, "{}", serde_json::to_string(&doc)?)?;
            f.flush()?;
        }
        None => {
            writeln!(stdout_lock, "{}", json!({ "summary": summary_json }))?;
            stdout_lock.flush()?;
        }
    }

    let s = &outcome.summary;
    eprintln!(
        "searched {} of {} candidates: {} fixed over Z, {} rejected exact, {} overflowed",
        s.enumerated, s.candidate_space, s.fixed_over_z, s.rejected_not_fixed, s.exact_overflows
    );
    for (p, n) in &s.rejected_at_prime {
        eprintln!("  mod {p}: {n} candidates rejected");
    }
    if s.no_effective_primes {
        eprintln!("warning: no configured prime distinguishes the two attractors");
    }
    if !s.degenerate_primes.is_empty() {
        eprintln!("degenerate primes (A = B there): {:?}", s.degenerate_primes);
    }
    eprintln!(
        "{} candidates sort at every prime ({} ms)",
        s.passes,
        if reproducible { 0 } else { clock.elapsed().as_millis() }
    );
    if let Some(path) = out {
        eprintln!("verdicts written to {}", path.display());
    }
    Ok(0)
}

fn manifest(
    command: &str,
    seed: Option<u64>,
    outcomes: Value,
    started: &str,
    reproducible: bool,
) -> Value {
    let arguments: Vec<String> = std::env::args().skip(1).collect();
    let mut m = json!({
        "command": command,
        "arguments": arguments,
        "versions": { "trapmaps": env!("CARGO_PKG_VERSION") },
        "outcomes": outcomes,
    });
    if let Some(seed) = seed {
        m["seed"] = json!(seed);
    }
    if !reproducible {
        m["started"] = json!(started);
        m["finished"] = json!(now_rfc3339());
    }
    m
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
