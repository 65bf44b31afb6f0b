use std::process::{Command, Output};

fn ecqkd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecqkd")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn witness_curve_to_stdout() {
    let o = ecqkd(&["witness-curve", "--alpha", "100", "--steps", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,S,W"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn cloner_adds_columns() {
    let o = ecqkd(&["witness-curve", "--steps", "3", "--gamma", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("d,S,W,S_eve,W_eve\n"));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["keyrate", "--gamma", "1", "--steps", "40"];
    let a = ecqkd(&args);
    let b = ecqkd(&args);
    let mut serial = args.to_vec();
    serial.push("--serial");
    let c = ecqkd(&serial);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let o = ecqkd(&["witness-curve", "--steps", "4", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# recipe\nalpha = 100\nsteps = 7\nd_max = 50\n").unwrap();
    let o = ecqkd(&["witness-curve", "--config", cfg.to_str().unwrap(), "--steps", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().last().unwrap().starts_with("5.0000000000000000e1,"));
}

#[test]
fn config_errors_exit_one_and_name_the_field() {
    for (args, field) in [
        (vec!["witness-curve", "--steps", "1"], "steps"),
        (vec!["witness-curve", "--phi", "2"], "phi"),
        (vec!["witness-curve", "--d-max", "-5"], "d-max"),
        (vec!["keyrate"], "gamma"),
        (vec!["oracle-check", "--alpha", "10"], "alpha"),
    ] {
        let o = ecqkd(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(field), "{args:?}: {err}");
    }
    assert_eq!(ecqkd(&["witness-curve", "--nope"]).status.code(), Some(1));
    assert_eq!(ecqkd(&["witness-curve", "--config", "/nonexistent/x.cfg"]).status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_two() {
    let o = ecqkd(&["witness-curve", "--steps", "3", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn crossing_below_threshold_reports_none() {
    let o = ecqkd(&["crossing", "--alpha", "1e5", "--phi", "0.1", "--gamma", "-2"]);
    assert!(o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("NONE"));
    assert!(err.contains("-1.3540"));
}

#[test]
fn keyrate_kappa_zero_for_symmetric_cloner() {
    let o = ecqkd(&["keyrate", "--gamma", "0", "--steps", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|c| *c == "kappa").unwrap();
    for line in lines {
        let v: f64 = line.split(',').nth(k).unwrap().parse().unwrap();
        assert_eq!(v, 0.0);
    }
}

#[test]
fn oracle_check_writes_notes() {
    let dir = tempfile::tempdir().unwrap();
    let notes = dir.path().join("NOTES.txt");
    let o = ecqkd(&["oracle-check", "--notes", notes.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let text = std::fs::read_to_string(&notes).unwrap();
    assert!(text.lines().count() > 1);
    assert!(text.contains("rel_dev="));
}
