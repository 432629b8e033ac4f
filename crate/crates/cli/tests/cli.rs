use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use evidence_core::mechanism::{Mechanism, MechanismRecord};

const RUNNING: &str = "rho = 7/10\nmu0 = 4/5\npi = 1/2\nc = 7/40\nk = 17/100\n";

fn evidence(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_evidence"));
    cmd.args(args).env_remove("EVIDENCE_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_running_example() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "run.cfg", RUNNING);
    let out_dir = dir.path().join("out");
    let out = evidence(&["solve", "--config", &cfg, "--out", out_dir.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("match: true"));
    let v = json(&out_dir.join("solve.json"));
    assert_eq!(v["strategic"]["best_w"], "104/125");
    assert_eq!(v["match"], "true");
    let csv = fs::read_to_string(out_dir.join("outcomes.csv")).unwrap();
    assert!(csv.lines().count() > 1);
    let region = fs::read_to_string(out_dir.join("region.csv")).unwrap();
    assert_eq!(region.lines().count(), 2);
    assert!(region.lines().nth(1).unwrap().contains(",true,"));
}

#[test]
fn solve_rejects_pi_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "bad.cfg", "rho = 7/10\nmu0 = 4/5\npi = 1/1\nc = 0\nk = 0\n");
    let out = evidence(&["solve", "--config", &cfg], &[]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn solve_missing_config_is_io_error() {
    let out = evidence(&["solve", "--config", "/nonexistent/run.cfg"], &[]);
    assert_eq!(code(&out), 1);
}

#[test]
fn solve_uncovered_point_reports_na() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "u.cfg", "rho = 7/10\nmu0 = 4/5\npi = 1/2\ngamma = 1/4\nkappa = 1/2\n");
    let out = evidence(&["solve", "--config", &cfg], &[]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("label: uncovered"));
    assert!(stdout(&out).contains("match: n/a"));
}

#[test]
fn verify_reports_gamma_bar_remark_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "v.cfg", "rho = 7/10\nmu0 = 4/5\npi = 1/10\nc = 7/40\nk = 17/100\n");
    let out = evidence(&["verify", "--config", &cfg], &[]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().any(|l| l == "gamma_bar_exceeds_mu2null: true"));
}

#[test]
fn verify_with_mechanism_index_and_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "run.cfg", RUNNING);
    let index = config(dir.path(), "m.txt", "4674\n");
    let out = evidence(&["verify", "--config", &cfg, "--mechanism", &index], &[]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("mechanism 4674"));

    let record = serde_json::to_string(&Mechanism::decode(4674u32).unwrap().to_record()).unwrap();
    let path = config(dir.path(), "m.json", &record);
    let out = evidence(&["verify", "--config", &cfg, "--mechanism", &path], &[]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("mechanism 4674"));
}

#[test]
fn verify_rejects_corrupted_mechanism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "run.cfg", RUNNING);
    for bad in [
        r#"{"sigma1":1,"sigma2":{"null":1,"low":0,"high":0},"xhat":[[0,0,1],[0,0,1]]}"#,
        r#"{"sigma1":2,"sigma2":{"null":1,"low":0,"high":0},"xhat":[[0,0,1],[0,0,1],[0,0,1]]}"#,
        "{not json",
        "8192",
    ] {
        let path = config(dir.path(), "bad.json", bad);
        let out = evidence(&["verify", "--config", &cfg, "--mechanism", &path], &[]);
        assert_eq!(code(&out), 2, "input {bad}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("invalid input"), "input {bad}");
    }
}

#[test]
fn regions_single_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "g.cfg", "rho = 7/10\nmu0 = 4/5\npi = 1/2\ngamma_grid = 1/4\nkappa_grid = 1/4\n");
    let out_dir = dir.path().join("out");
    let out = evidence(&["regions", "--config", &cfg, "--out", out_dir.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0);
    let svg = fs::read_to_string(out_dir.join("regions.svg")).unwrap();
    assert_eq!(svg.matches("<title>").count(), 1);
    let csv = fs::read_to_string(out_dir.join("regions.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn regions_rejects_invalid_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "g.cfg", "rho = 7/10\nmu0 = 4/5\npi = 1/2\ngrid_steps = 2\noverride.0.1.mu0 = 1/1\n");
    let out = evidence(&["regions", "--config", &cfg], &[]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid cell (0, 1)"));
}

#[test]
fn regions_deterministic_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "g.cfg", "rho = 7/10\nmu0 = 4/5\npi = 1/2\ngrid_steps = 4\n");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let ra = evidence(&["regions", "--config", &cfg, "--out", a.to_str().unwrap()], &[("EVIDENCE_THREADS", "1")]);
    let rb = evidence(&["regions", "--config", &cfg, "--out", b.to_str().unwrap()], &[("EVIDENCE_THREADS", "4")]);
    assert_eq!(code(&ra), code(&rb));
    for name in ["regions.csv", "regions.svg"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let svg = fs::read_to_string(a.join("regions.svg")).unwrap();
    assert_eq!(svg.matches("<title>").count(), 16);
}

#[test]
fn region_csv_indices_decode() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "g.cfg", "rho = 7/10\nmu0 = 4/5\npi = 1/2\ngrid_steps = 3\n");
    let out = evidence(&["regions", "--config", &cfg], &[]);
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "canonical_mechanism_index").unwrap();
    for line in lines {
        let index: u16 = line.split(',').nth(col).unwrap().parse().unwrap();
        let shown = evidence(&["show-mech", &index.to_string()], &[]);
        assert_eq!(code(&shown), 0);
        let first = stdout(&shown).lines().next().unwrap().to_string();
        let record: MechanismRecord = serde_json::from_str(&first).unwrap();
        assert_eq!(Mechanism::from_record(&record).unwrap().encode(), index);
    }
}

#[test]
fn show_mech_prints_record() {
    let out = evidence(&["show-mech", "4674"], &[]);
    assert_eq!(code(&out), 0);
    let first = stdout(&out).lines().next().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["sigma1"], 0);
    assert_eq!(v["sigma2"]["null"], 1);
    assert_eq!(v["xhat"][1][2], 1);
    assert_eq!(stdout(&out).matches("forcing:").count(), 1);
}

#[test]
fn show_mech_rejects_out_of_range() {
    for bad in ["8192", "-1", "x"] {
        let out = evidence(&["show-mech", bad], &[]);
        assert_eq!(code(&out), 2, "index {bad}");
    }
}

#[test]
fn invalid_thread_count() {
    for bad in ["0", "many"] {
        let out = evidence(&["show-mech", "0"], &[("EVIDENCE_THREADS", bad)]);
        assert_eq!(code(&out), 2, "{bad}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("EVIDENCE_THREADS"));
    }
}
