use std::path::Path;
use std::process::{Command, Output};

fn fracsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsum"))
        .args(args)
        .env_remove("FRACSUM_BUDGET_CELLS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn toy_schedule_records() {
    let o = fracsum(&["schedule", "--alphas", "1/2,2/3", "--mode", "toy", "--growth-base", "4", "--count", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for i in 1..=2 {
        let n = text.lines().filter(|l| l.starts_with(&format!("interval,{i},"))).count();
        assert_eq!(n, 6);
    }
    assert!(text.contains("interval,2,3,1,1,1,77,138,62,,"));
    assert!(text.starts_with("# fracsum schedule\n"));
    assert!(text.contains("# generated unix "));
}

#[test]
fn decreasing_alphas_are_a_usage_error() {
    let o = fracsum(&["schedule", "--alphas", "2/3,1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alphas must be non-decreasing"));
}

#[test]
fn faithful_schedule_has_big_integers() {
    let o = fracsum(&["schedule", "--mode", "faithful", "--count", "6", "--format", "json", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let iv = v["result"]["intervals"].as_array().unwrap();
    assert_eq!(iv.len(), 4 * 6);
    assert!(v["result"]["failed"].as_array().unwrap().is_empty());
    // every number crosses the boundary as a decimal string
    let widest = iv.iter().map(|r| r["gamma"].as_str().unwrap().len()).max().unwrap();
    assert!(widest > 20, "largest gamma should exceed u64");
    assert_eq!(v["config"]["mode"], "faithful");
    assert!(v.get("generated").is_none());
}

#[test]
fn dim_table_from_rule_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("S.txt");
    std::fs::write(&path, "# forced positions\n3..5\n9\n").unwrap();
    let set = format!("rule:{}", path.display());
    let o = fracsum(&["dim", "--set", &set, "--depths", "4..64", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 61);
    // depth 64: 60 free digits, estimate 60/64 = 15/16 exactly
    assert!(rows.last().unwrap().starts_with("64,1152921504606846976,15,16,15,16,"), "{}", rows.last().unwrap());
}

#[test]
fn sumset_oracle_agrees() {
    let o = fracsum(&["sumset", "--j", "2", "--depth", "10", "--oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("oracle: DP and brute force agree on"));
}

#[test]
fn convexity_example_and_missing_seed() {
    let args = ["convexity", "--jmax", "3", "--depth", "40", "--samples", "1000", "--seed", "7", "--no-timestamp"];
    let o = fracsum(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("certified rate 100%"));
    let text = stdout(&o);
    assert!(text.contains("\nmidpoint,1000,1000,1000,certified,100%,\n"));
    assert!(text.lines().any(|l| l.starts_with("gap,")));
    assert_eq!(stdout(&fracsum(&args)), text);
    let o = fracsum(&["convexity", "--jmax", "3", "--depth", "40"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn halving_check_on_two_averages() {
    let o = fracsum(&[
        "convexity", "--depth", "12", "--samples", "50", "--seed", "1", "--halving-depth", "10", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["result"]["density"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["missing"].is_null());
}

#[test]
fn budget_exit_code_and_env_default() {
    let o = fracsum(&["sumset", "--set", "pattern:1", "--depth", "16", "--oracle", "--budget-cells", "1000"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_fracsum"))
        .args(["sumset", "--set", "pattern:1", "--depth", "16", "--oracle"])
        .env("FRACSUM_BUDGET_CELLS", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).is_empty());
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn report_is_deterministic_and_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 7\ndepth = 40\njmax = 3\nformat = \"json\"\n").unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = fracsum(&[
            "report", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "csv",
            "--no-timestamp",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let csv = read(&a, "report.csv");
    assert_eq!(csv, read(&b, "report.csv"));
    assert_eq!(csv.lines().filter(|l| l.contains(",PASS,")).count(), 11);
    assert!(csv.contains("# seed = 7\n"));
    // only the report itself is left in the directory
    assert_eq!(std::fs::read_dir(&a).unwrap().count(), 1);

    let o = fracsum(&["report", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&read(&a, "report.json")).unwrap();
    let crit = v["result"]["criteria"].as_array().unwrap();
    for (row, line) in crit.iter().zip(csv.lines().filter(|l| !l.starts_with('#')).skip(1)) {
        let detail = row["detail"].as_str().unwrap();
        assert!(line.contains(detail) || line.contains(&detail.replace('"', "\"\"")), "{line}");
        assert!(line.starts_with(&format!("{},", row["id"])));
    }
}

#[test]
fn broken_growth_base_skips_the_rest() {
    let o = fracsum(&["report", "--seed", "7", "--growth-base", "1", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("1,schedule-exactness,FAIL,"));
    assert_eq!(text.lines().filter(|l| l.contains(",SKIP,")).count(), 10);
}

#[test]
fn flags_beat_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "alphas = \"1/3,1/2\"\ncount = 3\n").unwrap();
    let o = fracsum(&["schedule", "--config", cfg.to_str().unwrap(), "--count", "5", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("# alphas = 1/3,1/2\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("interval,1,")).count(), 5);
    std::fs::write(&cfg, "colour = 1\n").unwrap();
    let o = fracsum(&["schedule", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
