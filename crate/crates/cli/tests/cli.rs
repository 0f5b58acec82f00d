use std::path::Path;
use std::process::{Command, Output};

fn qeb(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qeb"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn roundtrip_frqi_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = qeb(
        &[
            "roundtrip",
            "--encoding",
            "frqi",
            "--size",
            "4",
            "--seed",
            "3",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("precision_pct: 100.00"), "{text}");
    assert!(text.contains("mean_error: 0.000000"), "{text}");
}

#[test]
fn roundtrip_writes_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let out = qeb(
        &[
            "roundtrip",
            "--encoding",
            "ql",
            "--size",
            "2x3",
            "--invert",
            "--out",
            "recon.pgm",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let pgm = std::fs::read_to_string(dir.path().join("recon.pgm")).unwrap();
    assert!(pgm.starts_with("P2"));
}

#[test]
fn metrics_for_lattice_have_no_entanglement() {
    let dir = tempfile::tempdir().unwrap();
    let out = qeb(&["metrics", "--encoding", "ql", "--size", "5"], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["width"], 25);
    assert_eq!(v["depth"], 1);
    assert_eq!(v["communication"], 0.0);
    assert_eq!(v["entanglement_ratio"], 0.0);
    assert_eq!(v["liveness"], 1.0);
}

#[test]
fn encode_dumps_circuit_and_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = qeb(
        &[
            "encode",
            "--encoding",
            "phase",
            "--size",
            "2",
            "--dump-circuit",
            "--dump-state",
            "state.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("h targets=")).count(),
        8
    );
    let state: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("state.json")).unwrap())
            .unwrap();
    assert_eq!(state["num_qubits"], 4);
    assert_eq!(state["amplitudes"].as_array().unwrap().len(), 16);
}

#[test]
fn bench_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bench.toml"),
        "encodings = [\"ql\", \"frqi\"]\nsizes = [2, 3]\nbackends = [\"statevec\", \"pure\"]\nshots = [200]\nseeds = [1, 2]\n",
    )
    .unwrap();
    let mut reports = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = qeb(
            &[
                "bench",
                "--config",
                "bench.toml",
                "--output",
                name,
                "--gnuplot",
            ],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        // drop the three timing columns
        let stripped: Vec<String> = text
            .lines()
            .map(|l| {
                l.split(',')
                    .enumerate()
                    .filter(|(i, _)| !(7..10).contains(i))
                    .map(|(_, c)| c)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        reports.push(stripped);
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0].len(), 1 + 2 * 2 * 2 * 2);
    assert!(reports[0][0].starts_with("encoding,rows,cols,backend"));
    assert!(reports[0]
        .iter()
        .any(|l| l.contains("skipped:non-power-of-two side")));
    assert!(dir.path().join("a.gp").exists());
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.toml"),
        "sizes = [2]\nshots = \"many\"\n",
    )
    .unwrap();
    let out = qeb(&["bench", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_flag_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        qeb(&["roundtrip", "--bogus"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn oversized_lattice_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = qeb(&["encode", "--encoding", "ql", "--size", "6"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_writes_image_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = qeb(
        &["gen", "--size", "3", "--seed", "5", "--out", "img.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("img.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.split(',').count() == 3));

    let out = qeb(
        &["roundtrip", "--encoding", "phase", "--image", "img.csv"],
        dir.path(),
    );
    assert!(stdout(&out).contains("precision_pct: 100.00"));
}
