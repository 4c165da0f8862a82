use std::path::Path;
use std::process::{Command, Output};

fn afmtj(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afmtj"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("AFMTJ_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = afmtj(out, args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

/// Header and data rows of a CSV artifact, stamp line removed.
fn csv_body(path: &Path) -> (String, Vec<String>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# afmtj "));
    let header = lines.next().unwrap().to_string();
    (header, lines.map(str::to_string).collect())
}

#[test]
fn sweep_write_has_eight_rows_per_device() {
    let dir = tempfile::tempdir().unwrap();
    let digest = ok(dir.path(), &["sweep-write"]);
    assert!(digest.starts_with("sweep-write:"), "{digest}");
    for dev in ["afmtj", "mtj"] {
        let (header, rows) = csv_body(&dir.path().join(format!("sweep_write_{dev}.csv")));
        assert_eq!(header, "V,latency_ps,energy_fJ");
        assert_eq!(rows.len(), 8, "{dev}");
        assert!(rows.iter().all(|r| r.split(',').count() == 3));
    }
    assert!(dir.path().join("sweep_write_latency.svg").exists());
    let summary: toml::Table = std::fs::read_to_string(dir.path().join("sweep_write_summary.txt"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(summary["driver"]["overhead_pct"].as_float().unwrap() < 1.0);
}

#[test]
fn write_waveform_header_matches_published_files() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "--set",
            "waveforms.trials=2",
            "waveforms",
            "--path",
            "write",
        ],
    );
    let (header, rows) = csv_body(&dir.path().join("mc_transient_waveforms_write.csv"));
    assert_eq!(header, "Time,Average_Mz");
    assert_eq!(rows.len(), 241);
    assert!(rows[0].starts_with("0.000000,"));
    assert!(rows[240].starts_with("1.200000,"));
    ok(
        dir.path(),
        &["--set", "waveforms.trials=2", "waveforms", "--path", "read"],
    );
    let (header, _) = csv_body(&dir.path().join("mc_transient_waveforms_read.csv"));
    assert_eq!(header, "Time,Average_vout");
}

#[test]
fn missing_config_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = afmtj(
        &out,
        &["--config", "/definitely/not/here.toml", "pvt-table"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unknown_or_bad_keys_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for set in [
        "montecarlo.trails=5",
        "array.n_segments=0",
        "peripheral.sense_amp=\"fancy\"",
    ] {
        let o = afmtj(&out, &["--set", set, "pvt-table"]);
        assert_eq!(o.status.code(), Some(2), "{set}");
    }
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[device.afmtj]\nalpha = 0.01\nspin = 3\n").unwrap();
    let o = afmtj(&out, &["--config", cfg.to_str().unwrap(), "pvt-table"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn simulation_errors_exit_3_and_name_the_module() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = afmtj(
        &out,
        &[
            "--set",
            "pvt.corners=[{ name = \"hot\", vdd = 2.0, temperature_c = 150.0 }]",
            "pvt-table",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("peripherals") && err.contains("UnknownCorner"),
        "{err}"
    );
    assert!(!out.exists());
}

#[test]
fn config_file_layers_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "master_seed = 5\n[waveforms]\ntrials = 1\npoints = 11\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    ok(
        &out,
        &[
            "--config",
            cfg.to_str().unwrap(),
            "waveforms",
            "--path",
            "write",
        ],
    );
    let text = std::fs::read_to_string(out.join("mc_transient_waveforms_write.csv")).unwrap();
    assert!(text.lines().next().unwrap().ends_with("seed=5"));
    assert_eq!(text.lines().count(), 2 + 11);
}

#[test]
fn output_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_afmtj"))
        .arg("pvt-table")
        .env("AFMTJ_OUT_DIR", &env_out)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_out.join("pvt_table.csv").exists());
}

#[test]
fn every_artifact_is_stamped() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["pvt-table"]);
    ok(dir.path(), &["simulate"]);
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let first = text.lines().next().unwrap();
        assert!(
            first.contains("config=") && first.contains("seed=20250101"),
            "{}: {first}",
            path.display()
        );
    }
}

#[test]
fn artifacts_are_byte_identical_across_runs_and_threads() {
    let small = [
        "--set",
        "montecarlo.read_full_trials=40",
        "--set",
        "montecarlo.write_full_trials=8",
        "--set",
        "montecarlo.surrogate_trials=20000",
        "--set",
        "montecarlo.fit_trials=60",
        "--set",
        "montecarlo.validation_trials=10",
        "--set",
        "montecarlo.trial_csv=true",
    ];
    let runs: Vec<_> = [("1", "a"), ("3", "b"), ("3", "c")]
        .iter()
        .map(|(threads, name)| {
            let dir = tempfile::tempdir().unwrap();
            let mut args: Vec<&str> = small.to_vec();
            let t = format!("threads={threads}");
            args.extend(["--set", &t, "montecarlo"]);
            ok(dir.path(), &args);
            ok(
                dir.path(),
                &[
                    "--set",
                    &t,
                    "--set",
                    "waveforms.trials=3",
                    "waveforms",
                    "--path",
                    "read",
                ],
            );
            (dir, *name)
        })
        .collect();
    let names = [
        "montecarlo_summary.txt",
        "trials_read.csv",
        "trials_write.csv",
        "mc_transient_waveforms_read.csv",
        "mc_transient_waveforms_read.svg",
    ];
    for f in names {
        let a = std::fs::read(runs[0].0.path().join(f)).unwrap();
        for (dir, name) in &runs[1..] {
            assert_eq!(
                a,
                std::fs::read(dir.path().join(f)).unwrap(),
                "{f} differs in run {name}"
            );
        }
    }
}
