use std::fs::File;
use std::io::BufReader;
use std::process::{Command, Output};

use hdc::assoc::{MemoryMode, SensorimotorMemory};
use hdc::experiments::ExperimentConfig;

fn hdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdc")).args(args).output().unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = hdc(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn stderr_of_failure(args: &[&str]) -> String {
    let out = hdc(args);
    assert!(!out.status.success(), "hdc {} should fail", args.join(" "));
    String::from_utf8(out.stderr).unwrap()
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/dir/bloom.csv");
    let args = ["bloom", "--dim", "2048", "--inserted", "200", "--queries", "500"];
    let printed = stdout_of(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert!(stdout_of(&with_out).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
    assert!(printed.starts_with("inserted,k,dim,queries,false_negatives,false_positives,fp_rate,analytic_fp_rate\n"));
}

#[test]
fn unwritable_output_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "not a directory").unwrap();
    let target = blocker.join("out.csv");
    let err = stderr_of_failure(&["config", "--out", target.to_str().unwrap()]);
    assert!(err.contains(blocker.to_str().unwrap()), "{err}");
}

#[test]
fn bad_arguments_fail_cleanly() {
    stderr_of_failure(&["capacity", "--noise-target", "sideways"]);
    stderr_of_failure(&["heatmap", "--lambda", "0.9"]);
    stderr_of_failure(&["heatmap", "--levels", "1"]);
    stderr_of_failure(&["sequence", "--length", "5", "--codebook", "3"]);
    let err = stderr_of_failure(&["time-image", "--events", "/nonexistent/events.csv"]);
    assert!(err.contains("/nonexistent/events.csv"), "{err}");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "dimension = 10\n").unwrap();
    stderr_of_failure(&["--config", config.to_str().unwrap(), "config"]);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "seed = 3\ndim = 1024\n").unwrap();
    let text = stdout_of(&["--config", path.to_str().unwrap(), "config", "--dim", "4096", "--p", "0.05,0.15"]);
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    assert_eq!(cfg.seed, 3);
    assert_eq!(cfg.dim, 4096);
    assert_eq!(cfg.p_values, vec![0.05, 0.15]);

    // the printed config reproduces the same run
    std::fs::write(&path, &text).unwrap();
    let from_file = stdout_of(&["--config", path.to_str().unwrap(), "heatmap"]);
    let from_flags = stdout_of(&["--seed", "3", "--dim", "4096", "heatmap"]);
    assert_eq!(from_file, from_flags);
}

#[test]
fn capacity_output_shape() {
    let csv = stdout_of(&["capacity", "--dim", "1024", "--trials", "5", "--n-max", "6", "--p", "0,0.2", "--all-n"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,p,analytic,empirical_mean,empirical_stderr,noise_target"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    for row in &rows {
        assert_eq!(row.len(), 6);
        let n: u32 = row[0].parse().unwrap();
        assert_eq!(row[2].is_empty(), n.is_multiple_of(2), "{row:?}");
        assert_eq!(row[5], "component");
    }
    let n3 = rows.iter().find(|r| r[0] == "3" && r[1].parse::<f64>().unwrap() == 0.0).unwrap();
    assert_eq!(n3[2].parse::<f64>().unwrap(), 0.25);
}

#[test]
fn model_file_reloads_and_predicts() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.hdam");
    let csv = stdout_of(&[
        "sensorimotor",
        "--dim",
        "4096",
        "--stored",
        "3,7",
        "--mode",
        "bundled",
        "--model",
        model.to_str().unwrap(),
    ]);
    assert!(csv.lines().any(|l| l.starts_with("bundled,7,all,7,")), "{csv}");
    let mem = SensorimotorMemory::read_from(&mut BufReader::new(File::open(&model).unwrap())).unwrap();
    assert_eq!(mem.mode(), MemoryMode::Bundled);
    assert_eq!(mem.len(), 7);
    assert_eq!(mem.dim(), 4096);
    assert_eq!(mem.velocities().len(), 21);
}

#[test]
fn time_image_converts_events() {
    let dir = tempfile::tempdir().unwrap();
    let events = dir.path().join("e.csv");
    std::fs::write(&events, "x,y,t,polarity\n0,0,10,1\n0,0,20,1\n1,1,30,-1\n3,2,99999,1\n").unwrap();
    let frame = stdout_of(&[
        "time-image",
        "--events",
        events.to_str().unwrap(),
        "--levels",
        "5",
        "--end-us",
        "50",
    ]);
    let rows: Vec<&str> = frame.lines().collect();
    assert_eq!(rows.len(), 32);
    assert!(rows[0].starts_with("4,0,0,"));
    assert!(rows[1].starts_with("0,2,0,"));
    assert!(rows[2].split(',').all(|v| v == "0"));
}
