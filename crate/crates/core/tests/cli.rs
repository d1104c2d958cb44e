//! End-to-end runs of the `reachnet` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reachnet::io::{NetworkJson, Schedule};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name))
        .unwrap()
}

fn reachnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reachnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn schedule_args<'a>(acts: &'a Path, deps: &'a Path) -> Vec<&'a str> {
    vec!["-a", acts.to_str().unwrap(), "-d", deps.to_str().unwrap()]
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).expect("valid json")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn validate_reports_path_stats() {
    let (a, d) = (fixture("path_activities.csv"), fixture("path_dependencies.csv"));
    let mut args = vec!["validate"];
    args.extend(schedule_args(&a, &d));
    let out = reachnet(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&out.stdout);
    assert_eq!(report["stats"]["nodes"], 3);
    assert_eq!(report["stats"]["dependencies"], 2);
    assert_eq!(report["stats"]["wcc_count"], 1);
    assert_eq!(report["stats"]["largest_wcc"], 3);
}

#[test]
fn cycle_exits_3_and_names_it() {
    let (a, d) = (fixture("path_activities.csv"), fixture("cycle_dependencies.csv"));
    let mut args = vec!["validate"];
    args.extend(schedule_args(&a, &d));
    let out = reachnet(&args);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("cycle") && err.contains("p1") && err.contains("p3"), "{err}");
}

#[test]
fn unknown_id_exits_2_with_line() {
    let (a, d) = (fixture("path_activities.csv"), fixture("unknown_dependencies.csv"));
    let mut args = vec!["validate"];
    args.extend(schedule_args(&a, &d));
    let out = reachnet(&args);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("unknown_dependencies.csv:3") && err.contains("p9"), "{err}");
}

#[test]
fn empty_after_pruning_exits_4() {
    let (a, d) = (fixture("lonely_activities.csv"), fixture("empty_dependencies.csv"));
    let mut args = vec!["validate"];
    args.extend(schedule_args(&a, &d));
    assert_eq!(reachnet(&args).status.code(), Some(4));
}

#[test]
fn missing_file_exits_2() {
    let a = fixture("path_activities.csv");
    let d = fixture("no_such_file.csv");
    let mut args = vec!["validate"];
    args.extend(schedule_args(&a, &d));
    assert_eq!(reachnet(&args).status.code(), Some(2));
}

#[test]
fn analyze_without_actuals_skips_performance() {
    let dir = tempfile::tempdir().unwrap();
    let (a, d) = (fixture("path_activities.csv"), fixture("path_dependencies.csv"));
    let mut args = vec!["analyze", "--out", dir.path().to_str().unwrap()];
    args.extend(schedule_args(&a, &d));
    let out = reachnet(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&out.stdout);
    let warnings = report["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].as_str().unwrap().contains("skipped"));
    assert!(stderr(&out).contains("skipped"));
    assert!(dir.path().join("rh.json").exists());
    assert!(dir.path().join("metrics.csv").exists());
    assert!(!dir.path().join("benchmark.csv").exists());
    assert!(!dir.path().join("bins.csv").exists());
    assert!((report["global_rh"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn metric_flag_switches_target() {
    let (a, d) = (fixture("diamond_activities.csv"), fixture("diamond_dependencies.csv"));
    let run = |metric: &str| {
        let mut args = vec!["bins", "--bins", "2", "--metric", metric, "--format", "json"];
        args.extend(schedule_args(&a, &d));
        let out = reachnet(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        json(&out.stdout)
    };
    let start = run("start");
    let end = run("end_delay");
    assert_eq!(start["delay"], "start");
    assert_eq!(end["delay"], "end");
    assert_ne!(start["bins"], end["bins"]);
}

#[test]
fn metrics_match_golden() {
    let (a, d) = (fixture("diamond_activities.csv"), fixture("diamond_dependencies.csv"));
    let mut args = vec!["metrics"];
    args.extend(schedule_args(&a, &d));
    let first = reachnet(&args);
    let second = reachnet(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(String::from_utf8(first.stdout).unwrap(), golden("diamond_metrics.csv"));
}

#[test]
fn diamond_golden_values_are_the_hand_values() {
    let text = golden("diamond_metrics.csv");
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    for (k, row) in rows.records().enumerate() {
        let row = row.unwrap();
        let v = |c: usize| row[c].parse::<f64>().unwrap();
        let third = 1.0 / 3.0;
        assert!((v(8) - third).abs() < 1e-12, "local rh");
        let expected_between = if k == 1 || k == 2 { 0.5 } else { 0.0 };
        assert_eq!(v(3), expected_between);
        let expected_close = [0.75, third, third, 0.0][k];
        assert!((v(4) - expected_close).abs() < 1e-12);
    }
}

#[test]
fn seed_42_run_matches_golden_digests() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    let output = dir.path().join("out");
    let gen = reachnet(&["generate", "--seed", "42", "--out", input.to_str().unwrap()]);
    assert!(gen.status.success(), "{}", stderr(&gen));
    let (a, d) = (input.join("activities.csv"), input.join("dependencies.csv"));
    let mut args = vec!["analyze", "--out", output.to_str().unwrap()];
    args.extend(schedule_args(&a, &d));
    let out = reachnet(&args);
    assert!(out.status.success(), "{}", stderr(&out));

    let manifest = json(&fs::read(output.join("manifest.json")).unwrap());
    let mut listed = String::new();
    for entry in manifest["inputs"].as_array().unwrap().iter().chain(manifest["artifacts"].as_array().unwrap()) {
        listed.push_str(&format!(
            "{} {}\n",
            entry["path"].as_str().unwrap(),
            entry["sha256"].as_str().unwrap()
        ));
    }
    assert_eq!(listed, golden("seed42_digests.txt"));
    for entry in manifest["artifacts"].as_array().unwrap() {
        let bytes = fs::read(output.join(entry["path"].as_str().unwrap())).unwrap();
        assert_eq!(reachnet::report::sha256_hex(&bytes), entry["sha256"].as_str().unwrap());
    }
}

#[test]
fn emitted_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    let gen = reachnet(&[
        "generate", "--seed", "7", "--layers", "6", "--width", "5", "--edge-probability", "0.3",
        "--out", input.to_str().unwrap(),
    ]);
    assert!(gen.status.success(), "{}", stderr(&gen));
    let (a, d) = (input.join("activities.csv"), input.join("dependencies.csv"));
    let net = Schedule::read(&a, &d).unwrap().build().unwrap();
    let again = Schedule::parse(
        &reachnet::io::activities_csv(net.nodes()),
        "a",
        &reachnet::io::dependencies_csv(&net.dependencies()),
        "d",
    )
    .unwrap()
    .build()
    .unwrap();
    assert_eq!(net, again);
    assert_eq!(fs::read_to_string(&a).unwrap(), reachnet::io::activities_csv(net.nodes()));

    let output = dir.path().join("out");
    let mut args = vec!["analyze", "--out", output.to_str().unwrap()];
    args.extend(schedule_args(&a, &d));
    assert!(reachnet(&args).status.success());
    let exported: NetworkJson =
        serde_json::from_str(&fs::read_to_string(output.join("network.json")).unwrap()).unwrap();
    assert_eq!(exported.into_network().unwrap(), net);

    for name in ["metrics.csv", "bins.csv", "benchmark.csv", "rh.csv", "delays.csv", "reachability.csv"] {
        let text = fs::read_to_string(output.join(name)).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let width = rdr.headers().unwrap().len();
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(rdr.headers().unwrap()).unwrap();
        for rec in rdr.records() {
            let rec = rec.unwrap();
            assert_eq!(rec.len(), width, "{name}");
            wtr.write_record(&rec).unwrap();
        }
        assert_eq!(String::from_utf8(wtr.into_inner().unwrap()).unwrap(), text, "{name}");
    }
    let metrics = fs::read_to_string(output.join("metrics.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(metrics.as_bytes());
    let ids: Vec<String> = rdr.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(ids, net.ids().map(str::to_string).collect::<Vec<_>>());
}

#[test]
fn analyze_requires_out() {
    let (a, d) = (fixture("path_activities.csv"), fixture("path_dependencies.csv"));
    let mut args = vec!["analyze"];
    args.extend(schedule_args(&a, &d));
    assert_eq!(reachnet(&args).status.code(), Some(2));
}
