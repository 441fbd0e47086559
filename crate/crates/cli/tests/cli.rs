use std::path::Path;
use std::process::{Command, Output};

use tfp_core::analysis::verify_maximal_triangle_free;
use tfp_core::bits::BitMatrix;
use tfp_core::process::parse_graph_export;

fn tfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfp")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = tfp(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn simulate_is_deterministic_across_processes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        ok(&["simulate", "--n", "300", "--seed", "9", "--record-every", "50", "--out", p.to_str().unwrap()]);
    }
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&dir.path().join("a.summary.json")), read(&dir.path().join("b.summary.json")));
    assert!(dir.path().join("a.snapshot.jsonl").exists());
    let stdout = ok(&["simulate", "--n", "300", "--seed", "9", "--record-every", "50"]).stdout;
    assert_eq!(String::from_utf8(stdout).unwrap(), read(&a));
}

#[test]
fn until_t_stops_at_first_crossing() {
    let out = ok(&["simulate", "--n", "400", "--seed", "2", "--until-t", "0.3", "--record-every", "1000000"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    let m: u64 = fields[1].parse().unwrap();
    let t: f64 = fields[2].parse().unwrap();
    assert!(t >= 0.3);
    // t(m) = m / n^1.5, so the step before is below 0.3.
    assert!(((m - 1) as f64) / 400f64.powf(1.5) < 0.3);
}

#[test]
fn resume_reproduces_the_rest_of_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    let part = dir.path().join("part.csv");
    let rest = dir.path().join("rest.csv");
    let common = ["--n", "250", "--seed", "4", "--record-every", "100"];
    let mut args = vec!["simulate", "--out", full.to_str().unwrap()];
    args.extend(common);
    ok(&args);
    let mut args = vec!["simulate", "--out", part.to_str().unwrap(), "--until-m", "700", "--snapshot-every", "300"];
    args.extend(common);
    ok(&args);
    let snap = dir.path().join("part.snapshot.jsonl");
    assert_eq!(read(&snap).lines().count(), 3);
    let mut args = vec!["simulate", "--out", rest.to_str().unwrap(), "--resume", snap.to_str().unwrap()];
    args.extend(common);
    ok(&args);
    let full = read(&full);
    let rest = read(&rest);
    let mut rest_lines = rest.lines();
    let header = rest_lines.next().unwrap();
    assert_eq!(header, full.lines().next().unwrap());
    let tail: Vec<&str> = rest_lines.filter(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap() > 700).collect();
    assert!(!tail.is_empty());
    assert!(full.ends_with(&format!("{}\n", tail.join("\n"))));
}

#[test]
fn ensemble_writes_runs_and_jobs_do_not_matter() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one");
    let four = dir.path().join("four");
    for (d, jobs) in [(&one, "1"), (&four, "4")] {
        ok(&["ensemble", "--n", "200", "--seed", "10", "--runs", "8", "--jobs", jobs, "--out-dir", d.to_str().unwrap()]);
    }
    for seed in 10..18 {
        let name = format!("run_{seed}.csv");
        assert_eq!(read(&one.join(&name)), read(&four.join(&name)));
        assert!(four.join(format!("run_{seed}.summary.json")).exists());
    }
    assert_eq!(read(&one.join("aggregate.csv")), read(&four.join("aggregate.csv")));
    assert_eq!(read(&one.join("ensemble.json")), read(&four.join("ensemble.json")));
    let single = dir.path().join("s.csv");
    ok(&["simulate", "--n", "200", "--seed", "13", "--out", single.to_str().unwrap()]);
    assert_eq!(read(&single), read(&four.join("run_13.csv")));
}

#[test]
fn structure_reports() {
    let dir = tempfile::tempdir().unwrap();
    let open = dir.path().join("open.txt");
    std::fs::write(&open, "v: a b\nA: a\nO: a-b\n").unwrap();
    let out = ok(&["structure", open.to_str().unwrap(), "--json", "-"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["rho_star"], "1/4");
    assert_eq!(json["c"], "2");
    assert_eq!(json["length"], 1);

    let w = dir.path().join("w.txt");
    std::fs::write(&w, "v: a b x y\nA: a b\nE: x-y\nO: a-x b-y\n").unwrap();
    let out = ok(&["structure", w.to_str().unwrap(), "--families", "minus"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for case in ["(a)", "(b)", "(c)", "(d)", "(e)", "(f)"] {
        assert!(text.contains(case), "{case} missing:\n{text}");
    }

    let tri = dir.path().join("tri.txt");
    std::fs::write(&tri, "v: a b c\nA: a\nE: a-b b-c a-c\n").unwrap();
    let out = ok(&["structure", tri.to_str().unwrap(), "--json", "-"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["permissible"], false);

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "v: a b\nA: z\n").unwrap();
    assert_eq!(tfp(&["structure", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn ygraph_reports_walks() {
    let out = ok(&["ygraph", "--n", "60", "--seed", "1", "--until-t", "0.4", "--sigma", "L", "--sigma", "R", "--sigma", "-", "--json", "-"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let walks = json["walks"].as_array().unwrap();
    let u = |i: usize| walks[i]["u"].as_str().unwrap().parse::<u64>().unwrap();
    assert_eq!(u(0) + u(1), json["y_e"].as_u64().unwrap());
    assert_eq!(u(2), 1);

    let out = ok(&["ygraph", "--n", "60", "--seed", "1", "--until-t", "0.4", "--sigma", "LR", "--sigma", "-"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "edge,sigma,u,v");
    assert_eq!(lines.len(), 3);
    let empty: Vec<&str> = lines[2].split(',').collect();
    assert_eq!((empty[1], empty[2]), ("-", "1"));
}

#[test]
fn witness_small_exact_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("w.json");
    let export = dir.path().join("w.txt");
    ok(&["witness", "--n", "5", "--seed", "3", "--out", cert.to_str().unwrap(), "--export", export.to_str().unwrap()]);
    let json: serde_json::Value = serde_json::from_str(&read(&cert)).unwrap();
    assert_eq!(json["alpha_kind"], "exact");
    let alpha = json["alpha_value"].as_u64().unwrap();
    assert_eq!(json["claim"], format!("R(3, {}) > 5", alpha + 1));
    let (n, edges) = parse_graph_export(&read(&export)).unwrap();
    let mut g = BitMatrix::new(n);
    for (u, v) in edges {
        g.set_sym(u, v);
    }
    verify_maximal_triangle_free(&g).unwrap();
}

#[test]
fn witness_above_guard_is_labelled_heuristic() {
    let out = ok(&["witness", "--n", "500", "--seed", "1", "--restarts", "1", "--iterations", "200"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["alpha_kind"], "heuristic_lower_bound");
    assert!(json.get("claim").is_none());
}

#[test]
fn verify_quick_and_fault() {
    let out = ok(&["verify", "--quick"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 7);
    let out = tfp(&["verify", "--quick", "--inject-fault", "skip-y-decrement"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL") && l.contains("oracle equivalence")));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(tfp(&["simulate", "--n", "1"]).status.code(), Some(2));
    assert_eq!(tfp(&["simulate", "--n", "10", "--eps", "0.5"]).status.code(), Some(2));
    assert_eq!(tfp(&["bogus"]).status.code(), Some(2));
    assert_eq!(tfp(&["ensemble", "--n", "10", "--jobs", "0", "--out-dir", "/tmp/x"]).status.code(), Some(2));
}
