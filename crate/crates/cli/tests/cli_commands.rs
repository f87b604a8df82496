use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_effbench"))
        .args(args)
        .current_dir(dir)
        .env_remove("EFFBENCH_OUT")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const RECORDS: &str = r#"[
  {"dataset":"MUTAG","method":"baseline","info_type":"S","metric":"accuracy","mean":0.8,"std":0.02},
  {"dataset":"MUTAG","method":"gin","info_type":"S","metric":"accuracy","mean":0.9,"std":0.02}
]"#;

#[test]
fn seed_goes_to_stderr_and_json_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("r.json"), RECORDS).unwrap();
    let o = run(dir.path(), &["--seed", "99", "effectiveness", "--results", "r.json", "--classes", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("seed: 99"));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.to_string().contains("MUTAG"));
}

#[test]
fn table_mode_is_not_json() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("r.json"), RECORDS).unwrap();
    let o = run(dir.path(), &["--table", "effectiveness", "--results", "r.json", "--classes", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(serde_json::from_slice::<serde_json::Value>(&o.stdout).is_err());
    assert!(String::from_utf8_lossy(&o.stdout).contains("MUTAG"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("empty.json"), "[]").unwrap();
    let cases: [&[&str]; 4] = [
        &["generate", "--kind", "syn-cc", "--r-list", "1.5", "--n", "50", "--out", "g"],
        &["effectiveness", "--results", "empty.json", "--classes", "2"],
        &["effectiveness", "--results", "empty.json", "--classes", "1"],
        &["--jobs", "0", "effectiveness", "--results", "empty.json", "--classes", "2"],
    ];
    for args in cases {
        let o = run(p, args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn unknown_roster_entry_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = run(p, &["generate", "--kind", "syn-degree", "--r-list", "0.5", "--n", "60", "--out", "g"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(p, &["evaluate", "--dataset", "g/syn_degree_r0.5", "--roster", "degree-baseline,gcn"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gcn"));
}

#[test]
fn missing_dataset_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["corr", "--dataset", "nowhere/NOTHING"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = run(dir.path(), &["regress", "--datasets", "nowhere"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn generate_honours_env_out_dir_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = Command::new(env!("CARGO_BIN_EXE_effbench"))
        .args(["--plot-data", "plot.csv", "generate", "--kind", "syn-cc", "--r-list", "0.3,0.7", "--n", "80"])
        .current_dir(p)
        .env("EFFBENCH_OUT", p.join("env_out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(p.join("env_out/sweep.json").is_file());
    assert!(p.join("env_out/syn_cc_r0.3/syn_cc_r0.3_A.txt").is_file());
    let plot = fs::read_to_string(p.join("plot.csv")).unwrap();
    let lines: Vec<&str> = plot.lines().collect();
    assert_eq!(lines[0], "target_r,realized_r");
    assert_eq!(lines.len(), 3);
}

#[test]
fn corr_shuffle_depends_on_seed_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = run(p, &["generate", "--kind", "syn-cc", "--r-list", "0.8", "--n", "120", "--out", "g"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = run(p, &["--seed", "3", "corr", "--dataset", "g/syn_cc_r0.8", "--shuffle-labels"]);
    let b = run(p, &["--seed", "3", "corr", "--dataset", "g/syn_cc_r0.8", "--shuffle-labels"]);
    let plain = run(p, &["--seed", "3", "corr", "--dataset", "g/syn_cc_r0.8"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, plain.stdout);
}
