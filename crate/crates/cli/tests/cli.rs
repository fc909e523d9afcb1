use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn aqncc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqncc"))
        .args(args)
        .current_dir(dir)
        .env_remove("AQNCC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn construct_reports_parameters_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = aqncc(
        &["construct", "--p", "7", "--stem", "c7", "--cdm", "cdm.txt"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).starts_with("[[49,12;1]]"));
    for f in ["c7_h1.alist", "c7_h2.alist", "c7.json", "cdm.txt"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let h1 = aqncc::alist::read_alist(dir.path().join("c7_h1.alist")).unwrap();
    assert_eq!((h1.n_rows(), h1.n_cols()), (21, 49));
    let cdm = fs::read_to_string(dir.path().join("cdm.txt")).unwrap();
    assert!(cdm.starts_with("7 6 0\n"));
}

#[test]
fn out_dir_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("env_out");
    let out = Command::new(env!("CARGO_BIN_EXE_aqncc"))
        .args(["construct", "--p", "5", "--stem", "c5"])
        .current_dir(dir.path())
        .env("AQNCC_OUT_DIR", &target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(target.join("c5_h2.alist").exists());
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = aqncc(&["check", "--p", "7", "--json", "report.json"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("PASS 1)"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["p"], 7);

    let composite = aqncc(&["check", "--p", "9"], dir.path());
    assert_eq!(composite.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&composite.stderr).contains("p = 9"));
    assert_eq!(
        aqncc(&["check", "--p", "7", "--i", "5"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(aqncc(&["check"], dir.path()).status.code(), Some(1));
    assert_eq!(aqncc(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(aqncc(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn sweep_is_reproducible_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "sweep",
        "--p",
        "7",
        "--r",
        "0:2",
        "--pz",
        "0.02:0.04:0.02",
        "--trials",
        "150",
        "--seed",
        "11",
    ];
    let run = |extra: &[&str], name: &str| {
        let mut args: Vec<&str> = base.to_vec();
        let out_flag = format!("{name}.csv");
        args.extend_from_slice(&["--out", &out_flag]);
        args.extend_from_slice(extra);
        let out = aqncc(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        fs::read(dir.path().join(&out_flag)).unwrap()
    };
    let a = run(&[], "a");
    let b = run(&[], "b");
    let serial = run(&["--serial"], "s");
    let jobs = run(&["--jobs", "2"], "j");
    assert_eq!(a, b);
    assert_eq!(a, serial);
    assert_eq!(a, jobs);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("7,0,0,false,0.005,0.02,150,"));
    assert!(dir.path().join("sweep.json").exists());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "p = 5\ntrials = 40\npz = \"0.01,0.03\"\nout = \"cfg.csv\"\n",
    )
    .unwrap();
    let out = aqncc(
        &["--config", "run.toml", "sweep", "--pz", "0.02"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = fs::read_to_string(dir.path().join("cfg.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("5,0,0,false,0.005,0.02,40,"));

    fs::write(dir.path().join("bad.toml"), "p = 5\nunknown_key = 1\n").unwrap();
    assert_eq!(
        aqncc(&["--config", "bad.toml", "check"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        aqncc(&["--config", "missing.toml", "check"], dir.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn bad_sweep_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["sweep", "--p", "7", "--pz", "0.6"][..],
        &["sweep", "--p", "7", "--r", "9"],
        &["sweep", "--p", "7", "--trials", "many"],
        &["sweep", "--p", "7", "--mode", "fuzzy"],
        &["sweep", "--p", "7", "--jobs", "0"],
    ] {
        let out = aqncc(args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}: {out:?}");
    }
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn adapt_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = aqncc(
        &[
            "adapt",
            "--p",
            "7",
            "--horizon",
            "300",
            "--pz-hi",
            "0.1",
            "--period",
            "30",
            "--out",
            "t.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "block,pz_true,r,phase_ok,bit_ok"
    );
    assert_eq!(text.lines().count(), 301);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("trace.json")).unwrap()).unwrap();
    assert_eq!(json["results"]["blocks"], 300);
    assert_eq!(json["config"]["policy"], "feedback");
}

#[test]
fn decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        aqncc(&["construct", "--p", "7", "--stem", "c"], dir.path())
            .status
            .code(),
        Some(0)
    );
    let h = aqncc::alist::read_alist(dir.path().join("c_h1.alist")).unwrap();
    let e = aqncc::BinVector::from_ones(49, [17]);
    let s = h.mul_vec(&e).unwrap();
    let out = aqncc(
        &[
            "decode",
            "--alist",
            "c_h1.alist",
            "--syndrome",
            &s.to_bitstring(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), e.to_bitstring());
    assert!(text.contains("converged true"));

    let short = aqncc(
        &["decode", "--alist", "c_h1.alist", "--syndrome", "0101"],
        dir.path(),
    );
    assert_eq!(short.status.code(), Some(1));
}
