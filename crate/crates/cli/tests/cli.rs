// Copyright 2026 The qcs-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcs")).args(args).output().unwrap()
}

fn shipped(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

const BASE: &str =
    "[scenario]\nprotocol = \"teleport\"\nomega = 1\ntrials = 200\nseed = 3\n[hidden]\ntau = 0.2\ndelta = 0\n";

#[test]
fn exit_codes_follow_error_category() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv").display().to_string();
    let cases = [
        ("syntax.toml", BASE.replace("omega = 1", "omega = = 1"), 2),
        ("unknown.toml", format!("{BASE}colour = \"red\"\n"), 2),
        ("zero.toml", BASE.replace("trials = 200", "trials = 0"), 3),
        ("causal.toml", format!("{BASE}[teleport]\ncorrection_time = -5\n"), 4),
    ];
    for (name, text, code) in cases {
        let path = write(dir.path(), name, &text);
        let o = qcs(&["teleport", "--scenario", &path, "--out", &out]);
        assert_eq!(
            o.status.code(),
            Some(code),
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let ok = write(dir.path(), "ok.toml", BASE);
    assert_eq!(qcs(&["qcs", "--scenario", &ok, "--out", &out]).status.code(), Some(3));
    assert_eq!(
        qcs(&["teleport", "--scenario", "/nonexistent.toml", "--out", &out])
            .status
            .code(),
        Some(4)
    );
    let o = qcs(&["teleport", "--scenario", &ok, "--out", &out]);
    assert!(o.status.success());
    let stderr = String::from_utf8_lossy(
        &qcs(&[
            "teleport",
            "--scenario",
            &write(dir.path(), "z.toml", &BASE.replace("trials = 200", "trials = 0")),
            "--out",
            &out,
        ])
        .stderr,
    )
    .into_owned();
    assert!(stderr.contains("trials"), "{stderr}");
}

#[test]
fn seed_override_changes_records_only() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.toml", BASE);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(qcs(&["teleport", "--scenario", &s, "--out", a.to_str().unwrap()])
        .status
        .success());
    assert!(qcs(&[
        "teleport",
        "--scenario",
        &s,
        "--out",
        b.to_str().unwrap(),
        "--seed",
        "4"
    ])
    .status
    .success());
    assert_ne!(data_rows(&a), data_rows(&b));
    assert_eq!(data_rows(&a)[0], data_rows(&b)[0]);
    assert!(std::fs::read_to_string(&b).unwrap().contains("# seed = 4"));
}

#[test]
fn estimate_recovers_shipped_offset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("est.csv");
    let o = qcs(&[
        "estimate",
        "--scenario",
        &shipped("teleport.toml"),
        "--out",
        out.to_str().unwrap(),
        "--assumed-delta",
        "0.1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&out);
    let col = |name: &str| rows[0].iter().position(|c| c == name).unwrap();
    let tau_hat: f64 = rows[1][col("tau_hat")].parse().unwrap();
    let phi_hat: f64 = rows[1][col("phi_hat")].parse().unwrap();
    // omega = 1, tau = 0.35, delta = 0.1
    assert!((tau_hat - 0.35).abs() < 0.05, "{tau_hat}");
    assert!((phi_hat - (-0.35 + 0.1)).abs() < 0.05, "{phi_hat}");
}

#[test]
fn estimate_reports_unobservable_offset_without_splitting() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "flat.toml",
        &BASE
            .replace("omega = 1", "omega = 0")
            .replace("delta = 0", "delta = 0.7"),
    );
    let out = dir.path().join("e.csv");
    let o = qcs(&[
        "estimate",
        "--scenario",
        &s,
        "--out",
        out.to_str().unwrap(),
        "--known-tau",
        "0",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&out);
    let col = |name: &str| rows[0].iter().position(|c| c == name).unwrap();
    assert_eq!(rows[1][col("tau_hat")], "unobservable");
    let delta_hat: f64 = rows[1][col("delta_hat")].parse().unwrap();
    assert!((delta_hat - 0.7).abs() < 0.2, "{delta_hat}");
}

#[test]
fn audit_gauge_from_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("audit.csv");
    let o = qcs(&[
        "audit-gauge",
        "--scenario",
        &shipped("teleport.toml"),
        "--against",
        &shipped("teleport-gauge.toml"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&out);
    assert_eq!(rows[1].last().unwrap(), "1");

    // a shift of tau alone is a different experiment
    let broken = write(
        dir.path(),
        "broken.toml",
        &std::fs::read_to_string(shipped("teleport-gauge.toml"))
            .unwrap()
            .replace("delta = 0.9", "delta = 0.1"),
    );
    let o = qcs(&[
        "audit-gauge",
        "--scenario",
        &shipped("teleport.toml"),
        "--against",
        &broken,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(data_rows(&out)[1].last().unwrap(), "0");
}

#[test]
fn every_subcommand_runs_on_shipped_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, file) in [
        ("ramsey", "ramsey.toml"),
        ("qcs", "basic-qcs.toml"),
        ("teleport", "teleport.toml"),
        ("phase-map", "phase-map.toml"),
    ] {
        let out = dir.path().join(format!("{cmd}.csv"));
        let o = qcs(&[cmd, "--scenario", &shipped(file), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(data_rows(&out).len() > 1);
    }
}
