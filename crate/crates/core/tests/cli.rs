//! The `qfm` binary and the command functions behind it.

use std::path::Path;
use std::process::Command;

use qfm_core::cli::commands::{
    BEST_CIRCUIT_FILE, CONFIG_FILE, FRONT_FILE, HISTORY_FILE, MANIFEST_FILE,
};
use qfm_core::cli::{
    cmd_evolve, cmd_gen_data, cmd_interpret, cmd_validate, prepare, ConfigBuilder, RunConfig,
};
use qfm_core::genome::{Axis, CircuitSpec, Gate, GateSpec};
use qfm_core::qsim::QuantumKernel;
use qfm_core::qsvm;

fn qfm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qfm"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

const SMALL: &str = "
# tiny search for fast tests
dataset = moons
n_samples = 40
noise = 0.1
qubits = 2
layers = 2
population = 8
offspring = 4
generations = 3
svm_c = 10
";

fn config(out: &Path, extra: &[(&str, &str)]) -> RunConfig {
    let mut b = ConfigBuilder::from_text(SMALL).unwrap();
    b.set("out", &out.display().to_string()).unwrap();
    for (k, v) in extra {
        b.set(k, v).unwrap();
    }
    b.build().unwrap()
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.conf");
    std::fs::write(&path, format!("{SMALL}{extra}")).unwrap();
    path.display().to_string()
}

fn ry_circuit(qubits: usize, d: usize) -> CircuitSpec {
    let gates = (0..qubits)
        .map(|q| GateSpec {
            gate: Gate::Rotation {
                axis: Axis::Y,
                theta: std::f64::consts::PI / 16.0,
                feature: q % d,
            },
            qubit: q,
            layer: 0,
        })
        .collect();
    CircuitSpec::new(qubits, d, gates).unwrap()
}

#[test]
fn evolve_writes_all_artifacts_and_replays_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = qfm(&[
            "evolve",
            "--config",
            &cfg,
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        for f in [
            HISTORY_FILE,
            FRONT_FILE,
            BEST_CIRCUIT_FILE,
            CONFIG_FILE,
            MANIFEST_FILE,
        ] {
            assert!(out.join(f).is_file(), "missing {f}");
        }
    }
    let ha = std::fs::read(a.join(HISTORY_FILE)).unwrap();
    assert_eq!(ha, std::fs::read(b.join(HISTORY_FILE)).unwrap());
    assert_eq!(String::from_utf8(ha).unwrap().lines().count(), 1 + 4);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert!(manifest["best"]["accuracy"].is_number());

    // the stored config replays to the same history
    let replay = dir.path().join("replay");
    let stored = a.join(CONFIG_FILE);
    let o = qfm(&[
        "evolve",
        "--config",
        stored.to_str().unwrap(),
        "--out",
        replay.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(
        std::fs::read(replay.join(HISTORY_FILE)).unwrap(),
        std::fs::read(a.join(HISTORY_FILE)).unwrap()
    );
}

#[test]
fn zero_generations_reports_the_initial_population() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_evolve(&config(dir.path(), &[("generations", "0")])).unwrap();
    assert_eq!(out.result.history.len(), 1);
    assert_eq!(out.result.population.len(), 8);
    assert!(dir.path().join(MANIFEST_FILE).is_file());
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();

    let o = qfm(&["evolve", "--config", &cfg, "--out", out, "--set", "p_mut=2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!Path::new(out).join(MANIFEST_FILE).exists());
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());

    assert_eq!(
        qfm(&["evolve", "--set", "no_such_key=1", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qfm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        qfm(&[
            "evolve",
            "--config",
            dir.path().join("missing.conf").to_str().unwrap()
        ])
        .status
        .code(),
        Some(2)
    );

    let o = qfm(&[
        "gen-data",
        "--config",
        &cfg,
        "--set",
        "n_samples=1",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(3));

    let o = qfm(&[
        "evolve",
        "--config",
        &cfg,
        "--set",
        "qubits=21",
        "--set",
        "max_qubits=20",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn unwritable_output_directory_is_a_clean_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "not a directory").unwrap();
    let out = blocker.join("nested");
    let cfg = write_config(dir.path(), "");
    let o = qfm(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert!(!out.exists());
}

#[test]
fn gen_data_is_balanced_and_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["one.csv", "two.csv"] {
        let path = dir.path().join(name);
        let o = qfm(&[
            "gen-data",
            "--set",
            "dataset=moons",
            "--set",
            "n_samples=500",
            "--seed",
            "7",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let data = qfm_core::data::load_csv(dir.path().join("one.csv"), "label").unwrap();
    assert_eq!(data.len(), 500);
    assert_eq!(data.class_counts(), vec![250, 250]);
    let sidecar = std::fs::read_to_string(dir.path().join("one.csv.manifest.json")).unwrap();
    assert!(sidecar.contains("\"seed\": 7"), "{sidecar}");
}

#[test]
fn gen_data_library_matches_binary_contract() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        &[
            ("dataset", "blobs"),
            ("n_features", "5"),
            ("n_classes", "5"),
            ("n_samples", "100"),
        ],
    );
    let data = cmd_gen_data(&cfg, &dir.path().join("blobs.csv")).unwrap();
    assert_eq!(data.num_features(), 5);
    assert_eq!(data.num_classes(), 5);
}

#[test]
fn validate_on_training_points_reproduces_training_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = ry_circuit(2, 2);
    let circuit_path = dir.path().join("c.json");
    std::fs::write(&circuit_path, circuit.to_json().unwrap()).unwrap();

    let base = config(&dir.path().join("v"), &[]);
    let prepared = prepare(&base).unwrap();
    let train_csv = dir.path().join("train.csv");
    prepared
        .split
        .train
        .write_csv(std::fs::File::create(&train_csv).unwrap())
        .unwrap();

    let cfg = config(
        &dir.path().join("v"),
        &[("validation_csv", train_csv.to_str().unwrap())],
    );
    let outcome = cmd_validate(&cfg, &circuit_path).unwrap();

    let kernel = QuantumKernel::new(circuit);
    let svm = cfg.evolution.svm;
    let model = qsvm::fit(
        &kernel,
        &prepared.train.features,
        &prepared.train.labels,
        &svm,
    )
    .unwrap();
    let pred = qsvm::predict(
        &model,
        &kernel,
        &prepared.train.features,
        &prepared.train.features,
    )
    .unwrap();
    let train_acc = qsvm::accuracy(&pred, &prepared.train.labels).unwrap();
    assert_eq!(outcome.accuracy, train_acc);
    assert_eq!(outcome.confusion.total(), prepared.train.len());
    for f in [
        "confusion.csv",
        "class_metrics.csv",
        "predictions.csv",
        "model.json",
        "metrics.json",
    ] {
        assert!(dir.path().join("v").join(f).is_file(), "missing {f}");
    }
    for m in outcome.model.models() {
        assert!(m.within_box(1e-12));
        assert!(m.equality_residual() <= 1e-8);
    }
}

#[test]
fn circuit_with_wrong_feature_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let circuit_path = dir.path().join("c.json");
    std::fs::write(&circuit_path, ry_circuit(3, 3).to_json().unwrap()).unwrap();
    let err = cmd_validate(&config(dir.path(), &[]), &circuit_path).unwrap_err();
    assert!(err.to_string().contains("d = 3"), "{err}");
    assert_eq!(err.exit_code(), 3);
    let o = qfm(&[
        "validate",
        "--set",
        "n_samples=40",
        "--circuit",
        circuit_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn interpret_reports_clusters_and_grids() {
    let dir = tempfile::tempdir().unwrap();
    let circuit_path = dir.path().join("c.json");
    std::fs::write(&circuit_path, ry_circuit(2, 2).to_json().unwrap()).unwrap();
    let cfg = config(&dir.path().join("i"), &[("grid_resolution", "10")]);
    let report = cmd_interpret(&cfg, &circuit_path).unwrap();
    assert_eq!(report.clusters.len(), 2);
    let out = dir.path().join("i");
    assert!(out.join("clusters.json").is_file());
    let grid = std::fs::read_to_string(out.join("grid_full.csv")).unwrap();
    assert_eq!(grid.lines().count(), 1 + 100);
    assert!(out.join("grid_cluster_0.csv").is_file());
    assert!(out.join("grid_cluster_1.csv").is_file());
}

#[test]
fn interpret_without_grids_for_five_features() {
    let dir = tempfile::tempdir().unwrap();
    let circuit_path = dir.path().join("c.json");
    std::fs::write(&circuit_path, ry_circuit(5, 5).to_json().unwrap()).unwrap();
    let cfg = config(
        &dir.path().join("i"),
        &[
            ("dataset", "blobs"),
            ("n_features", "5"),
            ("n_classes", "3"),
            ("n_samples", "60"),
        ],
    );
    let report = cmd_interpret(&cfg, &circuit_path).unwrap();
    assert_eq!(report.clusters.len(), 5);
    assert!(!dir.path().join("i").join("grid_full.csv").exists());
    let json = std::fs::read_to_string(dir.path().join("i").join("clusters.json")).unwrap();
    assert!(json.contains("notice"), "{json}");
}

#[test]
fn single_cluster_circuit_gives_one_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut gates = ry_circuit(2, 2).gates().to_vec();
    gates.push(GateSpec {
        gate: Gate::Cnot,
        qubit: 0,
        layer: 1,
    });
    let circuit = CircuitSpec::new(2, 2, gates).unwrap();
    let circuit_path = dir.path().join("c.json");
    std::fs::write(&circuit_path, circuit.to_json().unwrap()).unwrap();
    let report = cmd_interpret(
        &config(dir.path(), &[("grid_resolution", "4")]),
        &circuit_path,
    )
    .unwrap();
    assert_eq!(report.clusters.len(), 1);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(qfm(&["--help"]).status.code(), Some(0));
    assert_eq!(qfm(&["--version"]).status.code(), Some(0));
}
