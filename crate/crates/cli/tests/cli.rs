use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_primegap");

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("PRIMEGAP_MEM_MB")
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    run_in(Path::new(env!("CARGO_TARGET_TMPDIR")), args)
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn assert_schema(name: &str, value: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn assert_usage_error(out: &Output, kind: &str) {
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    let line: Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(line["error"], kind);
    assert_eq!(line["exit_code"], 2);
    assert_schema("error", &line);
}

#[test]
fn gaps_json_ends_at_89() {
    let v = json_ok(&["gaps", "--limit", "100", "--format", "json"]);
    assert_schema("gaps", &v);
    let gaps = v.as_array().unwrap();
    assert_eq!(gaps.len(), 24);
    assert_eq!(gaps.last().unwrap(), &serde_json::json!({"start": 89, "gap": 8}));
    let records = json_ok(&["gaps", "--limit", "100", "--records", "--merits"]);
    assert_schema("gaps", &records);
    let starts: Vec<u64> = records
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["start"].as_u64().unwrap())
        .collect();
    assert_eq!(starts, [2, 3, 7, 23, 89]);
}

#[test]
fn gaps_csv_columns_are_stable() {
    let out = run(&["gaps", "--limit", "30", "--format", "csv", "--merits"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("start,gap,merit,merit2"));
    assert!(lines.next().unwrap().starts_with("2,1,"));
    let out = run(&["gaps", "--limit", "30", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next(), Some("start,gap"));
}

#[test]
fn ycover_three_is_three() {
    let v = json_ok(&["ycover", "--x", "3", "--mode", "exact"]);
    assert_schema("ycover", &v);
    assert_eq!(v["y"], 3);
    assert_eq!(v["verified"], true);
    let classes = v["witness"]["classes"].as_array().unwrap();
    for t in 1..=3u64 {
        assert!(classes
            .iter()
            .any(|c| t % c["p"].as_u64().unwrap() == c["a"].as_u64().unwrap()));
    }
    let greedy = json_ok(&["ycover", "--x", "13", "--mode", "greedy"]);
    assert_schema("ycover", &greedy);
    assert_eq!(greedy["optimal"], Value::Null);
}

#[test]
fn construct_report_is_byte_identical() {
    let dir = scratch("construct_twice");
    let a = run_in(
        &dir,
        &[
            "construct",
            "--r",
            "2",
            "--x",
            "30",
            "--y",
            "20",
            "--z",
            "4",
            "--seed",
            "7",
            "--report",
            "one.json",
        ],
    );
    let b = run_in(
        &dir,
        &[
            "construct",
            "--r",
            "2",
            "--x",
            "30",
            "--y",
            "20",
            "--z",
            "4",
            "--seed",
            "7",
            "--report",
            "two.json",
        ],
    );
    assert!(a.status.success() && b.status.success());
    let one = fs::read(dir.join("one.json")).unwrap();
    assert_eq!(one, fs::read(dir.join("two.json")).unwrap());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(one, a.stdout);
    let report: Value = serde_json::from_slice(&one).unwrap();
    assert_schema("construct", &report);
    assert_eq!(report["params"]["seed"], 7);
}

#[test]
fn construct_default_seed_is_stated() {
    let v = json_ok(&["construct", "--r", "2", "--x", "30", "--y", "20", "--z", "4"]);
    assert_eq!(v["params"]["seed"], 0);
    let mc = json_ok(&[
        "stats",
        "montecarlo",
        "--target",
        "pair_survival",
        "--trials",
        "200",
        "--primes",
        "5,7",
    ]);
    assert_eq!(mc["seed"], 0);
}

#[test]
fn assemble_and_check_round_trip() {
    let dir = scratch("assemble");
    let out = run_in(
        &dir,
        &[
            "construct",
            "--r",
            "2",
            "--x",
            "30",
            "--y",
            "20",
            "--z",
            "4",
            "--seed",
            "3",
            "--emit",
            "a.json",
        ],
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let assignment: Value = serde_json::from_str(&fs::read_to_string(dir.join("a.json")).unwrap()).unwrap();
    assert_schema("assignment", &assignment);
    let y = report["covered_prefix"].as_u64().unwrap().to_string();
    let out = run_in(
        &dir,
        &["assemble", "--input", "a.json", "--y", &y, "--out", "cert.json"],
    );
    assert!(out.status.success());
    let cert: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema("certificate", &cert);
    let out = run_in(&dir, &["check", "--cert", "cert.json"]);
    assert_eq!(out.status.code(), Some(0));
    let check: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema("check", &check);
    assert_eq!(check["valid"], true);

    let mut bad = cert.clone();
    bad["m"] = Value::String("1".into());
    fs::write(dir.join("bad.json"), bad.to_string()).unwrap();
    let out = run_in(&dir, &["check", "--cert", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    let check: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(check["valid"], false);

    fs::write(
        dir.join("small.json"),
        r#"{"x": 3, "classes": [{"p": 2, "a": 1}, {"p": 3, "a": 2}]}"#,
    )
    .unwrap();
    assert!(run_in(&dir, &["assemble", "--input", "small.json", "--y", "3"])
        .status
        .success());
    assert_usage_error(
        &run_in(&dir, &["assemble", "--input", "small.json", "--y", "4"]),
        "not_covering",
    );
    fs::write(dir.join("bad_class.json"), r#"{"x": 3, "classes": [{"p": 2, "a": 2}]}"#).unwrap();
    assert_usage_error(
        &run_in(&dir, &["assemble", "--input", "bad_class.json", "--y", "1"]),
        "invalid_assignment",
    );
}

#[test]
fn invalid_input_exits_2_with_one_line() {
    assert_usage_error(&run(&["gaps", "--limit", "abc"]), "usage");
    assert_usage_error(&run(&["frobnicate"]), "usage");
    assert_usage_error(&run(&["gaps", "--limit", "2"]), "invalid_parameter");
    assert_usage_error(
        &run(&["construct", "--r", "1", "--x", "30", "--y", "20", "--z", "4"]),
        "invalid_parameter",
    );
    assert_usage_error(
        &run(&["stats", "beta", "--kind", "nope", "--r", "2", "--p", "5"]),
        "invalid_parameter",
    );
    assert_usage_error(&run(&["jacobsthal", "--n", "10", "--primorial", "5"]), "usage");
    let out = Command::new(BIN)
        .args(["gaps", "--limit", "100"])
        .env("PRIMEGAP_MEM_MB", "lots")
        .output()
        .unwrap();
    assert_usage_error(&out, "invalid_parameter");
}

#[test]
fn memory_budget_is_enforced() {
    let out = Command::new(BIN)
        .args(["stats", "smooth", "--y", "10000000", "--z", "100"])
        .env("PRIMEGAP_MEM_MB", "1")
        .output()
        .unwrap();
    assert_usage_error(&out, "memory_budget");
}

#[test]
fn stats_outputs_match_schemas() {
    let alpha = json_ok(&["stats", "alpha", "--r", "2", "--cutoff", "1000"]);
    assert_schema("stats-alpha", &alpha);
    let conv = json_ok(&[
        "stats",
        "alpha",
        "--r",
        "2",
        "--cutoff",
        "1000",
        "--fine-cutoff",
        "4000",
    ]);
    assert_schema("stats-alpha", &conv);
    assert_eq!(conv["consistent"], true);

    let beta = json_ok(&["stats", "beta", "--kind", "progression_d2", "--r", "3", "--p", "7"]);
    assert_schema("stats-beta", &beta);
    assert_eq!(beta["brute_force"], "49/54");
    assert_eq!(beta["equal"], true);

    let deg = json_ok(&[
        "stats", "degrees", "--r", "2", "--x", "1000", "--y", "5000", "--side", "p", "--i", "0",
    ]);
    assert_schema("stats-degrees", &deg);
    let csv = run(&[
        "stats", "degrees", "--r", "2", "--x", "1000", "--y", "5000", "--side", "p", "--format", "csv",
    ]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("vertex,count,ratio"));
    assert_eq!(text.lines().count() as u64, 1 + deg["vertex_count"].as_u64().unwrap());

    for target in [
        vec!["--target", "survivor_count", "--from", "1", "--to", "500"],
        vec!["--target", "pair_survival", "--q1", "4", "--q2", "10"],
        vec!["--target", "ap_survival", "--start", "1", "--step", "6", "--len", "3"],
    ] {
        let mut args = vec![
            "stats",
            "montecarlo",
            "--trials",
            "500",
            "--seed",
            "9",
            "--x",
            "100000",
            "--z",
            "40",
        ];
        args.extend(target);
        let mc = json_ok(&args);
        assert_schema("stats-montecarlo", &mc);
        assert_eq!(mc, json_ok(&args));
    }

    let smooth = json_ok(&["stats", "smooth", "--y", "10000", "--z", "100"]);
    assert_schema("stats-smooth", &smooth);
    assert_eq!(smooth["count"], 3716);

    let j = json_ok(&["jacobsthal", "--primorial", "13"]);
    assert_schema("jacobsthal", &j);
    assert_eq!(j["n"], "30030");
    assert_eq!(j["j"], 22);
}

#[test]
fn table_format_is_aligned() {
    let out = run(&["gaps", "--limit", "30", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "start  gap");
    assert_eq!(lines[1], "-----  ---");
    assert_eq!(lines[2], "2      1");
}

#[test]
fn batch_empty_is_empty() {
    let dir = scratch("batch_empty");
    fs::write(dir.join("empty.toml"), "").unwrap();
    let out = run_in(&dir, &["batch", "--config", "empty.toml"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema("batch", &v);
    assert_eq!(v["total"], 0);
    assert_eq!(v["runs"], serde_json::json!([]));
}

#[test]
fn batch_identical_seeds_give_identical_payloads() {
    let dir = scratch("batch_same");
    let run = "[[runs]]\ncommand = \"stats montecarlo\"\nseed = 5\ntarget = \"pair_survival\"\ntrials = 300\nprimes = \"5,7,11\"\n\n";
    let construct = "[[runs]]\ncommand = \"construct\"\nseed = 12\nr = 2\nx = 30\ny = 20\nz = 4\n\n";
    fs::write(dir.join("b.toml"), format!("{run}{run}{construct}{construct}")).unwrap();
    let out = run_in(&dir, &["batch", "--config", "b.toml"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema("batch", &v);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs[0]["payload"], runs[1]["payload"]);
    assert_eq!(runs[2]["payload"], runs[3]["payload"]);
    assert_eq!(runs[0]["payload"]["seed"], 5);
}

#[test]
fn batch_of_ten_construct_seeds_counts_successes() {
    let dir = scratch("batch_ten");
    let mut config = String::new();
    for seed in 0..10 {
        config += &format!("[[runs]]\ncommand = \"construct\"\nseed = {seed}\nr = 2\nx = 30\ny = 20\nz = 4\n\n");
    }
    config += "[[runs]]\ncommand = \"gaps\"\nlimit = 2\n";
    fs::write(dir.join("ten.toml"), config).unwrap();
    let out = run_in(&dir, &["batch", "--config", "ten.toml", "--out", "agg.json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema("batch", &v);
    assert_eq!(
        v,
        serde_json::from_str::<Value>(&fs::read_to_string(dir.join("agg.json")).unwrap()).unwrap()
    );

    let mut recount = 0;
    for seed in 0..10 {
        let seed = seed.to_string();
        let single = json_ok(&[
            "construct",
            "--r",
            "2",
            "--x",
            "30",
            "--y",
            "20",
            "--z",
            "4",
            "--seed",
            &seed,
        ]);
        if single["stage4"]["remainder"] == 0 {
            recount += 1;
        }
        assert_eq!(v["runs"][seed.parse::<usize>().unwrap()]["payload"], single);
    }
    assert_eq!(v["construct_runs"], 10);
    assert_eq!(v["construct_successes"], recount);
    // a failing run is reported but does not stop the batch
    assert_eq!(v["failed"], 1);
    assert_eq!(v["succeeded"], 10);
    assert_eq!(v["runs"][10]["status"], "failed");
    assert_eq!(v["runs"][10]["exit_code"], 2);
}

#[test]
fn batch_rejects_malformed_config() {
    let dir = scratch("batch_bad");
    fs::write(dir.join("unknown.toml"), "[[runs]]\ncommand = \"gaps\"\nlimt = 100\n").unwrap();
    assert_usage_error(&run_in(&dir, &["batch", "--config", "unknown.toml"]), "invalid_config");
    fs::write(dir.join("top.toml"), "workers = 3\n").unwrap();
    assert_usage_error(&run_in(&dir, &["batch", "--config", "top.toml"]), "invalid_config");
    fs::write(dir.join("syntax.toml"), "[[runs]\n").unwrap();
    assert_usage_error(&run_in(&dir, &["batch", "--config", "syntax.toml"]), "invalid_config");
    fs::write(
        dir.join("nested.toml"),
        "[[runs]]\ncommand = \"batch\"\nconfig = \"nested.toml\"\n",
    )
    .unwrap();
    assert_usage_error(&run_in(&dir, &["batch", "--config", "nested.toml"]), "invalid_config");
}

#[test]
fn batch_writes_run_outputs_in_their_format() {
    let dir = scratch("batch_outputs");
    fs::write(
        dir.join("o.toml"),
        "[[runs]]\ncommand = \"gaps\"\nlimit = 30\nformat = \"csv\"\noutput = \"gaps.csv\"\n",
    )
    .unwrap();
    let out = run_in(&dir, &["batch", "--config", "o.toml"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.join("gaps.csv")).unwrap();
    assert!(csv.starts_with("start,gap\n2,1\n3,2\n"));
}
