//! End-to-end checks of the trapmaps binary: exit codes, output shapes,
//! and byte-level reproducibility.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapmaps"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_all_small_primes_holds() {
    let out = run(&["verify", "all", "--primes", "2..13"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("35 reports: 35 hold, 0 fail, 0 errors"), "{text}");
    assert!(text.contains("additive_trap"));
    assert!(text.contains("ratio_recurrence"));
}

#[test]
fn listed_composite_is_rejected_up_front() {
    let out = run(&["verify", "all", "--primes", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("4 is not prime"), "{}", stderr(&out));
}

#[test]
fn range_spec_skips_composites_silently() {
    let out = run(&["verify", "additive_trap", "--primes", "8..11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("2 reports: 2 hold"), "{text}");
    assert!(!text.contains(" 9 "), "9 must not be verified: {text}");
}

#[test]
fn unknown_map_is_an_input_error() {
    let out = run(&["verify", "nosuchmap", "--primes", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown map"));
}

#[test]
fn short_builtin_aliases_work() {
    let out = run(&["verify", "mt", "--primes", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("multiplicative_trap"));
}

#[test]
fn failing_map_file_exits_one() {
    let path = tmp("untrapped.map");
    fs::write(&path, "x^2*y\nx*y^2\n").unwrap();
    let out = run(&["verify", path.to_str().unwrap(), "--primes", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("origin_attractor"));
    assert!(text.contains("NO"), "{text}");
    assert!(text.contains("witness (1, 1)"), "{text}");
}

#[test]
fn nilpotent_map_file_holds() {
    let path = tmp("nilpotent.map");
    fs::write(&path, "# drops one coordinate each step\ny\n0\n").unwrap();
    let out = run(&["verify", path.to_str().unwrap(), "--primes", "5,7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("2 reports: 2 hold"));
}

#[test]
fn oversized_graph_is_a_budget_error() {
    let out = run(&["graph", "additive_trap", "104729"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("exceeds"), "{}", stderr(&out));
}

#[test]
fn oversized_field_is_a_budget_error() {
    let out = run(&["ext", "additive_trap", "2", "21"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn orbit_prints_the_nine_cycle() {
    let out = run(&["orbit", "multiplicative_trap", "7", "1", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("tail length 0, cycle length 9"), "{text}");
    assert!(text.contains("never reaches the origin"));
    assert!(text.contains("step 2: (5, 4)"), "{text}");
}

#[test]
fn orbit_reports_steps_to_origin() {
    let out = run(&["orbit", "additive_trap", "7", "2", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("reaches the origin at step 3"), "{text}");
    assert!(text.contains("step 1: (5, 2)"), "{text}");
}

#[test]
fn orbit_budget_exhaustion_is_exit_three() {
    let out = run(&["orbit", "multiplicative_trap", "7", "1", "3", "--max-steps", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn graph_summary_is_well_formed_json() {
    let out = run(&["graph", "multiplicative_trap", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["size"], 49);
    assert_eq!(v["cycle_spectrum"], serde_json::json!([1, 9]));
    let basins: u64 = v["basin_sizes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b.as_u64().unwrap())
        .sum();
    assert_eq!(basins, 49);
}

#[test]
fn graph_edges_lists_every_point() {
    let path = tmp("edges.txt");
    let out = run(&["graph", "additive_trap", "3", "--edges", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert!(lines.contains(&"0,0 -> 0,0"));
    assert!(lines.contains(&"1,1 -> 1,2"));
}

#[test]
fn ext_lists_the_gf4_two_cycle() {
    let out = run(&["ext", "additive_trap", "2", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("GF(2^2) with modulus t^2+t+1"), "{text}");
    assert!(text.contains("(t, 1) period 2"), "{text}");
    assert!(text.contains("(t+1, 1) period 2"), "{text}");
    assert!(text.contains("the trap does not extend"));
}

#[test]
fn ext_over_prime_field_sees_only_the_origin_when_trapped() {
    // additive trap mod 3: every point reaches the origin, so the only
    // periodic point of GF(3^1) is the origin itself
    let out = run(&["ext", "additive_trap", "3", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("only the origin is periodic"));
}

#[test]
fn reproducible_json_reports_are_byte_identical() {
    let path = tmp("report.json");
    let args = [
        "--reproducible",
        "verify",
        "power_trap",
        "--primes",
        "13,17",
        "--json",
        path.to_str().unwrap(),
    ];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    let bytes_a = fs::read(&path).unwrap();
    let second = run(&args);
    assert_eq!(second.status.code(), Some(0));
    let bytes_b = fs::read(&path).unwrap();
    assert_eq!(bytes_a, bytes_b, "reproducible runs must match exactly");

    let doc: serde_json::Value = serde_json::from_slice(&bytes_a).unwrap();
    assert!(doc["manifest"]["started"].is_null(), "no timestamps when reproducible");
    assert_eq!(doc["manifest"]["versions"]["trapmaps"], env!("CARGO_PKG_VERSION"));
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 4);
    for row in reports {
        let obj = row.as_object().unwrap();
        assert_eq!(obj.len(), 10, "stable schema: exactly ten keys");
        assert_eq!(obj["elapsed_ms"], 0);
    }
}

#[test]
fn timestamps_appear_without_reproducible() {
    let path = tmp("timed.json");
    let out = run(&["verify", "at", "--primes", "5", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    assert!(doc["manifest"]["started"].is_string());
    assert!(doc["manifest"]["finished"].is_string());
    assert_eq!(doc["manifest"]["outcomes"]["holds"], 2);
}

#[test]
fn sampled_flag_forces_sampling() {
    let out = run(&["verify", "power_trap", "--primes", "11", "--sampled", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("sampled"));
}

#[test]
fn search_stdout_is_deterministic_and_finds_the_identity() {
    let conf = tmp("tiny.conf");
    fs::write(
        &conf,
        "max_degree = 1\ncoeff_min = -1\ncoeff_max = 1\nmax_terms = 1\n\
         primes = 2\npoint_a = 0,0\npoint_b = 1,1\n",
    )
    .unwrap();
    let first = run(&["search", conf.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr(&first));
    let second = run(&["search", conf.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout, "search output must be stable");

    let text = stdout(&first);
    let verdicts: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let passing: Vec<&serde_json::Value> = verdicts
        .iter()
        .filter(|v| v["overall"] == true)
        .collect();
    assert_eq!(passing.len(), 1);
    assert_eq!(passing[0]["index"], 48);
    assert_eq!(passing[0]["map"], serde_json::json!(["x", "x"]));
    // last line is the summary
    let last: &serde_json::Value = verdicts.last().unwrap();
    assert_eq!(last["summary"]["passes"], 1);
    assert_eq!(last["summary"]["candidate_space"], 49);
}

#[test]
fn search_out_file_carries_manifest_and_config() {
    let conf = tmp("tiny2.conf");
    fs::write(
        &conf,
        "max_degree = 1\ncoeff_min = 0\ncoeff_max = 1\nmax_terms = 1\n\
         primes = 2,3\npoint_a = 0,0\npoint_b = 1,1\n",
    )
    .unwrap();
    let outfile = tmp("verdicts.jsonl");
    let out = run(&[
        "--reproducible",
        "search",
        conf.to_str().unwrap(),
        "--out",
        outfile.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = fs::read_to_string(&outfile).unwrap();
    let last = text.lines().last().unwrap();
    let doc: serde_json::Value = serde_json::from_str(last).unwrap();
    assert_eq!(doc["manifest"]["command"], "search");
    assert!(doc["manifest"]["started"].is_null());
    assert_eq!(doc["config"]["primes"], serde_json::json!([2, 3]));
    assert!(doc["summary"]["enumerated"].is_u64());
}

#[test]
fn malformed_search_config_is_exit_two() {
    let conf = tmp("broken.conf");
    fs::write(&conf, "max_degree = -3\n").unwrap();
    let out = run(&["search", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_exit_codes() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("exit codes"));
}

#[test]
fn jobs_flag_and_env_are_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_trapmaps"))
        .env("TRAPMAPS_JOBS", "2")
        .args(["verify", "at", "--primes", "3..7", "--jobs", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
