use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn micropolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_micropolar"))
        .args(args)
        .env_remove("MICROPOLAR_THREADS")
        .output()
        .expect("spawn micropolar")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn kv(path: &Path) -> Vec<(String, String)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('=').expect("key=value");
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn get(kv: &[(String, String)], key: &str) -> String {
    kv.iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .1
        .clone()
}

fn simulate(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    micropolar(&args)
}

#[test]
fn conduction_run_passes_and_stays_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = simulate(
        &out,
        &[
            "--override",
            "initial.preset=conduction",
            "--override",
            "stepper.t_end=0.05",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "ledger.csv",
        "report.txt",
        "final.ckpt",
        "run_manifest.txt",
        "basis_manifest.txt",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let csv = fs::read_to_string(out.join("ledger.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert!(
            line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0),
            "{line}"
        );
    }
}

#[test]
fn small_ra_run_asserts_and_passes_the_weak_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = simulate(&out, &["--override", "stepper.t_end=0.2", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = kv(&out.join("report.txt"));
    assert_eq!(get(&report, "weak.asserted"), "true");
    assert_eq!(get(&report, "weak.sup_energy.status"), "pass");
    assert_eq!(get(&report, "weak.dissipation_integral.status"), "pass");
    let manifest = kv(&out.join("run_manifest.txt"));
    assert_eq!(get(&manifest, "seed"), "3");

    // Same ledger through `verify`.
    let v = micropolar(&[
        "verify",
        out.join("ledger.csv").to_str().unwrap(),
        "--out",
        dir.path().join("v").to_str().unwrap(),
    ]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));
}

#[test]
fn mixed_preset_completes_report_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = simulate(
        &out,
        &[
            "--override",
            "initial.preset=mixed-L2H1",
            "--override",
            "stepper.t_end=0.05",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(get(&kv(&out.join("report.txt")), "weak.asserted"), "false");
}

#[test]
fn growing_ledger_fails_verification_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from(
        "t,u_l2sq,u_h1sq,u_stokes_sq,omega_l2sq,omega_h1sq,omega_a_sq,theta_l2sq,theta_h1sq,theta_a_sq,y,y_strong\n",
    );
    for i in 0..=20 {
        let t = i as f64 * 0.05;
        // Energy grows like e^{10t} with no dissipation, far above any admissible envelope.
        let e = (10.0 * t).exp() / 3.0;
        csv.push_str(&format!(
            "{t:.16e},{e:.16e},0,0,{e:.16e},0,0,{e:.16e},0,0,{:.16e},0\n",
            3.0 * e
        ));
    }
    let ledger = dir.path().join("ledger.csv");
    fs::write(&ledger, csv).unwrap();
    let o = micropolar(&[
        "verify",
        ledger.to_str().unwrap(),
        "--out",
        dir.path().join("v").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let report = kv(&dir.path().join("v/verify_report.txt"));
    assert_eq!(get(&report, "weak.sup_energy.status"), "fail");
    assert_ne!(get(&report, "weak.sup_energy.first_violation_row"), "none");
}

#[test]
fn invalid_configs_exit_two_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"params": {"Pr": 1, "Ra": 1, "Nsq": 1.5, "Lsq": 1, "D": 1}}"#).unwrap();
    let o = micropolar(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 < N² < 1"));

    fs::write(&cfg, r#"{"params": {"Pr": 1, "Nsq": 0.5, "Lsq": 1, "D": 1}}"#).unwrap();
    let o = micropolar(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Ra"));

    let o = micropolar(&[
        "simulate",
        "--override",
        "monitors.tolerance=-1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);

    let o = micropolar(&["simulate", "--config", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    let o = Command::new(env!("CARGO_BIN_EXE_micropolar"))
        .args(["basis", "--out", dir.path().to_str().unwrap()])
        .env("MICROPOLAR_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn runs_are_bit_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--override", "stepper.t_end=0.05", "--seed", "11"];
    let a = dir.path().join("a");
    assert_eq!(code(&simulate(&a, &args)), 0);
    let b = dir.path().join("b");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_micropolar"));
    cmd.args(["simulate", "--out", b.to_str().unwrap()])
        .args(args)
        .env("MICROPOLAR_THREADS", "1");
    assert_eq!(code(&cmd.output().unwrap()), 0);
    for f in ["ledger.csv", "final.ckpt", "report.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn checkpoint_resume_matches_an_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full");
    let half = dir.path().join("half");
    let rest = dir.path().join("rest");
    let dt = ["--override", "stepper.dt=5e-4"];
    assert_eq!(
        code(&simulate(&full, &[dt[0], dt[1], "--override", "stepper.t_end=0.06"])),
        0
    );
    assert_eq!(
        code(&simulate(&half, &[dt[0], dt[1], "--override", "stepper.t_end=0.03"])),
        0
    );
    let ck = format!(
        "initial.checkpoint={}",
        serde_json::to_string(&half.join("final.ckpt")).unwrap()
    );
    let o = simulate(
        &rest,
        &[dt[0], dt[1], "--override", "stepper.t_end=0.06", "--override", &ck],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read(full.join("final.ckpt")).unwrap(),
        fs::read(rest.join("final.ckpt")).unwrap()
    );
    assert_eq!(get(&kv(&rest.join("run_manifest.txt")), "history_reused"), "true");

    // The resumed ledger is the tail of the full one.
    let full_csv = fs::read_to_string(full.join("ledger.csv")).unwrap();
    let rest_csv = fs::read_to_string(rest.join("ledger.csv")).unwrap();
    let tail: Vec<&str> = rest_csv.lines().skip(1).collect();
    let body: Vec<&str> = full_csv.lines().skip(1).collect();
    assert!(body.ends_with(&tail), "resumed rows differ");
}

#[test]
fn analysis_subcommands_write_their_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = micropolar(&[
        "constants",
        "--out",
        d.join("k").to_str().unwrap(),
        "--override",
        "constants.trials=4",
        "--override",
        r#"constants.names=["k1"]"#,
    ]);
    assert_eq!(code(&o), 0);
    let k = kv(&d.join("k/constants.txt"));
    let k1: f64 = get(&k, "k1.value").parse().unwrap();
    assert!((k1 - std::f64::consts::FRAC_1_PI).abs() < 1e-12);

    let o = micropolar(&[
        "depend",
        "--out",
        d.join("d").to_str().unwrap(),
        "--override",
        "stepper.t_end=0.02",
    ]);
    assert_eq!(code(&o), 0);
    let s: f64 = get(&kv(&d.join("d/depend.txt")), "depend.scaling.0").parse().unwrap();
    assert!((s - 1.0).abs() < 0.05, "{s}");
    assert!(d.join("d/depend_0.csv").is_file());

    let o = micropolar(&[
        "converge",
        "--out",
        d.join("g").to_str().unwrap(),
        "--override",
        "stepper.t_end=0.02",
        "--override",
        "converge.resolutions=[4,8]",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(get(&kv(&d.join("g/converge.txt")), "converge.monotone"), "true");

    let o = micropolar(&[
        "basis",
        "--out",
        d.join("b").to_str().unwrap(),
        "--override",
        "resolution.nx=2",
    ]);
    assert_eq!(code(&o), 0);
    let manifest = fs::read_to_string(d.join("b/basis_manifest.txt")).unwrap();
    assert!(manifest.starts_with("# micropolar basis manifest"));
    assert_eq!(
        String::from_utf8_lossy(&o.stdout).lines().next(),
        manifest.lines().next()
    );
}
