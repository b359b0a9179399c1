use std::path::Path;
use std::process::Command;

fn nsbandit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nsbandit"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = r#"{"regime":"geometric_uniform","p":0.01,"num_arms":3,"horizon":2000,
    "episodes":4,"checkpoint_stride":500,
    "algorithms":[{"type":"active_ptw"},{"type":"thompson"},{"type":"sw_ucb"}]}"#;

#[test]
fn quick_verify_succeeds() {
    let out = nsbandit().args(["verify", "--quick"]).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 8);
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let out_dir = dir.path().join("out");
    let run = nsbandit()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--episodes", "3", "--seed", "9", "--threads", "2"])
        .output()
        .unwrap();
    assert!(run.status.success());
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "algorithm,episodes,mean_final_regret,ci95");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("ActivePTW(MEU),3,"));
    let curves = std::fs::read_to_string(out_dir.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 1 + 3 * 4);
    let resolved = std::fs::read_to_string(out_dir.join("config.json")).unwrap();
    assert!(resolved.contains("\"master_seed\": 9"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out_dir = dir.path().join(threads);
        let run = nsbandit()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .env("NSBANDIT_THREADS", threads)
            .output()
            .unwrap();
        assert!(run.status.success());
        outputs.push(std::fs::read(out_dir.join("curves.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let too_long = write(
        dir.path(),
        "long.json",
        &SMALL.replace("\"horizon\":2000", "\"horizon\":2000,\"depth\":10"),
    );
    let malformed = write(dir.path(), "bad.json", "{\"regime\": ");
    let out = dir.path().join("o");
    for args in [
        vec![
            "run".into(),
            "--config".into(),
            too_long.display().to_string(),
            "--out".into(),
            out.display().to_string(),
        ],
        vec![
            "run".into(),
            "--config".into(),
            malformed.display().to_string(),
            "--out".into(),
            out.display().to_string(),
        ],
        vec![
            "table".into(),
            "--config".into(),
            dir.path().join("missing.json").display().to_string(),
        ],
        vec!["verify".into(), "--bogus".into()],
        vec!["frobnicate".into()],
    ] {
        let o = nsbandit().args(&args).output().unwrap();
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn table_has_one_column_per_p() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.json",
        &SMALL
            .replace("\"p\":0.01,", "\"p_grid\":[0.01,0.001],")
            .replace("\"horizon\":2000", "\"horizon\":500"),
    );
    let out = nsbandit()
        .args(["table", "--config"])
        .arg(&cfg)
        .args(["--episodes", "2"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.contains("p=0.01") && header.contains("p=0.001"));
    for row in ["ActivePTW(MEU)", "TS", "SWUCB(W=1/p)"] {
        assert!(text.lines().any(|l| l.starts_with(row)), "{text}");
    }
    assert!(text.contains("episodes = 2"));
}

#[test]
fn bench_reports_ratio() {
    let out = nsbandit()
        .args(["bench", "--depths", "8,16", "--steps", "256", "--reps", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("D=8") && text.contains("D=8 -> D=16"));
}
