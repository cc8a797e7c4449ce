//! Behavior tests for the binary: exit codes, stdout annotations, and
//! artifact structure.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chanpure"))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const DEPOL: &str = "{\"type\":\"depolarizing\",\"p\":0.5}";

#[test]
fn exit_codes_separate_failure_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"type\":");
    let badsum = write(
        dir.path(),
        "badsum.json",
        "{\"type\":\"pauli\",\"n_qubits\":1,\"probs\":{\"I\":0.6,\"X\":0.6}}",
    );
    let depol = write(dir.path(), "depol.json", DEPOL);
    let lossy = write(
        dir.path(),
        "lossy.json",
        "{\"reflectance\":0.6,\"transmittance\":0.4,\"phi0_h\":0.0,\"phi0_v\":0.0,\
         \"phi_tau_h\":0.0,\"phi_tau_v\":0.0,\"phi_rho_h\":0.0,\"phi_rho_v\":0.0}",
    );

    let absent = dir.path().join("absent.json");
    let cases: [(&[&str], i32); 6] = [
        (&["channel", "--spec", broken.to_str().unwrap(), "--out", out], 2),
        (&["channel", "--spec", badsum.to_str().unwrap(), "--out", out], 3),
        (&["channel", "--spec", absent.to_str().unwrap(), "--out", out], 1),
        (&["optics", "--phases", lossy.to_str().unwrap(), "--out", out], 3),
        (
            &[
                "tomo", "--spec", depol.to_str().unwrap(), "--shots", "5000",
                "--max-iterations", "2", "--out", out,
            ],
            4,
        ),
        (
            &[
                "sweep", "--family", "depolarizing", "--start", "0.5", "--stop", "0.2",
                "--steps", "3", "--out", out,
            ],
            3,
        ),
    ];
    for (args, want) in cases {
        let output = bin().args(args).output().unwrap();
        assert_eq!(output.status.code(), Some(want), "args {args:?}");
        assert!(!output.stderr.is_empty(), "no diagnostic for {args:?}");
    }
}

#[test]
fn tomo_writes_the_artifact_even_when_it_gives_up() {
    let dir = tempfile::tempdir().unwrap();
    let depol = write(dir.path(), "depol.json", DEPOL);
    let output = run(&[
        "tomo",
        "--spec",
        depol.to_str().unwrap(),
        "--shots",
        "5000",
        "--max-iterations",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(4));
    let report = json(&dir.path().join("tomo.json"));
    assert_eq!(report["report"]["converged"], serde_json::Value::Bool(false));
    assert_eq!(report["report"]["iterations"], serde_json::json!(2));
}

#[test]
fn purify_annotates_the_reference_channel_pair() {
    let dir = tempfile::tempdir().unwrap();
    let bf = write(dir.path(), "bf.json", "{\"type\":\"bit_flip\",\"p0\":0.5}");
    let pf = write(dir.path(), "pf.json", "{\"type\":\"phase_flip\",\"p0\":0.5}");
    let output = run(&[
        "purify",
        "--channel1",
        bf.to_str().unwrap(),
        "--channel2",
        pf.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("ideal (this model)"));
    assert!(stdout.contains("experimental (reference)"));

    let report = json(&dir.path().join("purify.json"));
    assert!((report["p_plus"].as_f64().unwrap() - 0.625).abs() < 1e-12);
    let residual = report["agreement_residual"].as_f64().unwrap();
    assert!(residual < 1e-12, "closed forms disagree with the circuit: {residual}");
}

#[test]
fn purifying_identity_channels_is_a_no_op() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(
        dir.path(),
        "id.json",
        "{\"type\":\"pauli\",\"n_qubits\":1,\"probs\":{\"I\":1.0}}",
    );
    let output = run(&[
        "purify",
        "--channel1",
        id.to_str().unwrap(),
        "--channel2",
        id.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let report = json(&dir.path().join("purify.json"));
    assert!((report["p_plus"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(report["p_minus"].as_f64().unwrap() < 1e-12);
    let noiseless = report["noiseless_component"]["plus"].as_f64().unwrap();
    assert!((noiseless - 1.0).abs() < 1e-12);
}

#[test]
fn channel_artifact_reports_the_representation_suite() {
    let dir = tempfile::tempdir().unwrap();
    let depol = write(dir.path(), "depol.json", DEPOL);
    let output = run(&[
        "channel",
        "--spec",
        depol.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let report = json(&dir.path().join("channel.json"));
    assert_eq!(report["dim"], serde_json::json!(2));
    assert_eq!(report["kraus_rank"], serde_json::json!(4));
    assert_eq!(report["cptp"]["is_cptp"], serde_json::Value::Bool(true));
    let diag: Vec<f64> = report["chi"]["diagonal"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let want = [0.625, 0.125, 0.125, 0.125];
    for (got, want) in diag.iter().zip(want) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn sweep_emits_json_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "sweep", "--family", "bit-flip", "--start", "0.1", "--stop", "0.5", "--steps", "5",
        "--format", "json", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let rows = json(&dir.path().join("sweep.json"));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        for key in ["p", "f_unpurified", "f_physical", "f_virtual"] {
            assert!(row[key].is_f64(), "missing {key}");
        }
    }
}

#[test]
fn finite_shot_sweeps_are_deterministic_and_plausible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep", "--family", "depolarizing", "--start", "0.3", "--stop", "0.5", "--steps", "3",
        "--shots", "2000", "--seed", "9",
    ];
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    for out in [&first, &second] {
        let output = bin().args(args).arg("--out").arg(out).output().unwrap();
        assert!(output.status.success());
    }
    let a = std::fs::read(first.join("sweep.csv")).unwrap();
    let b = std::fs::read(second.join("sweep.csv")).unwrap();
    assert_eq!(a, b);

    // Sampled fidelities stay near the exact ones at this shot count.
    let exact_dir = dir.path().join("exact");
    let output = bin()
        .args([
            "sweep", "--family", "depolarizing", "--start", "0.3", "--stop", "0.5", "--steps",
            "3",
        ])
        .arg("--out")
        .arg(&exact_dir)
        .output()
        .unwrap();
    assert!(output.status.success());
    let parse = |bytes: &[u8]| -> Vec<Vec<f64>> {
        String::from_utf8(bytes.to_vec())
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect()
    };
    let sampled = parse(&a);
    let exact = parse(&std::fs::read(exact_dir.join("sweep.csv")).unwrap());
    for (s, e) in sampled.iter().zip(&exact) {
        assert_eq!(s[0], e[0]);
        for k in 1..4 {
            assert!(
                (s[k] - e[k]).abs() < 0.1,
                "column {k} drifted at p = {}: sampled {} vs exact {}",
                s[0],
                s[k],
                e[k]
            );
        }
    }
}

#[test]
fn distribute_reports_verdict_words() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "distribute", "--family", "depolarizing", "--start", "0.2", "--stop", "0.4", "--steps",
        "3", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(dir.path().join("distribute.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("p,f_unpurified,f_purified,entangled_unpurified,entangled_purified")
    );
    let allowed = ["entangled", "separable", "indeterminate-at-tolerance"];
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 5);
        assert!(allowed.contains(&cells[3]), "unexpected verdict {}", cells[3]);
        assert!(allowed.contains(&cells[4]), "unexpected verdict {}", cells[4]);
    }
}
