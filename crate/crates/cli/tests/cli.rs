//! The `sauter` binary end to end: exit codes, output files, manifests and
//! byte-for-byte reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use sauter_cli::manifest::RunManifest;
use sauter_cli::output::sha256_hex;

const SMALL: [&str; 6] = ["--Nz", "64", "--Nt", "300", "--W2", "0.15le"];

fn sauter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sauter"))
        .args(args)
        .output()
        .expect("spawn sauter")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn assert_manifest_digests(dir: &Path, manifest: &str) -> RunManifest {
    let m = RunManifest::read(&dir.join(manifest)).unwrap();
    assert!(!m.outputs.is_empty());
    for (name, digest) in &m.outputs {
        let bytes = std::fs::read(dir.join(name)).unwrap();
        assert_eq!(&sha256_hex(&bytes), digest, "{name}");
    }
    m
}

#[test]
fn bound_states_table_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = sauter(&["bound-states", "--out", path(dir.path())]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("0.9778"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("bound_states.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("i,E,E_over_c2,relative_residual"));
    assert_eq!(lines.count(), 8);
    assert_manifest_digests(dir.path(), "manifest.json");
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    for args in [
        vec!["evolve", "--Nz", "100", "--out", out],
        vec!["evolve", "--set", "V1=abc", "--out", out],
        vec!["evolve", "--set", "nonsense=1", "--out", out],
        vec!["sweep", "--W2-values", "0.3,-1", "--out", out],
        vec!["evolve", "--config", "/nonexistent/config.txt", "--out", out],
        vec!["frobnicate"],
    ] {
        let status = sauter(&args).status;
        assert_ne!(status.code(), Some(0), "{args:?}");
        if args[0] != "evolve" || !args.contains(&"--config") {
            assert_eq!(status.code(), Some(2), "{args:?}");
        }
    }
}

#[test]
fn evolve_is_byte_reproducible_and_rerunnable_from_its_manifest() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let run = |dir: &Path, extra: &[&str]| {
        let mut args = vec!["evolve", "--out", path(dir)];
        args.extend_from_slice(extra);
        let out = sauter(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(a.path(), &SMALL);
    let mut threaded = SMALL.to_vec();
    threaded.extend(["--threads", "3"]);
    run(b.path(), &threaded);
    let manifest = a.path().join("manifest.json");
    run(c.path(), &["--config", path(&manifest)]);

    let ma = assert_manifest_digests(a.path(), "manifest.json");
    let mb = assert_manifest_digests(b.path(), "manifest.json");
    let mc = assert_manifest_digests(c.path(), "manifest.json");
    assert_eq!(ma.config, mc.config);
    for name in ["spectrum.csv", "timeseries.csv", "density.csv"] {
        assert_eq!(ma.outputs[name], mb.outputs[name], "{name} differs across thread counts");
        assert_eq!(ma.outputs[name], mc.outputs[name], "{name} differs on manifest rerun");
    }

    let spectrum = std::fs::read_to_string(a.path().join("spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("N_p,N\n-32,"));
    assert_eq!(spectrum.lines().count(), 65);
    let series = std::fs::read_to_string(a.path().join("timeseries.csv")).unwrap();
    assert!(series.starts_with("t,N\n"));
    let density = std::fs::read_to_string(a.path().join("density.csv")).unwrap();
    assert!(density.starts_with("z,rho\n"));
}

#[test]
fn checkpoint_and_density_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["evolve", "--out", path(dir.path()), "--checkpoint", "--density-times", "5/c2,10/c2"];
    args.extend_from_slice(&SMALL);
    assert!(sauter(&args).status.success());
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.contains(&"U_final.bin".to_string()));
    assert!(names.iter().filter(|n| n.starts_with("density_step")).count() >= 2, "{names:?}");
    assert!(!names.iter().any(|n| n.contains(".tmp-")), "{names:?}");
    assert_manifest_digests(dir.path(), "manifest.json");
}

#[test]
fn peaks_runs_evolve_when_no_spectrum_exists() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["peaks", "--out", path(dir.path()), "--range", "0:32"];
    args.extend_from_slice(&SMALL);
    let out = sauter(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("spectrum.csv").exists());
    let matches = std::fs::read_to_string(dir.path().join("matches.csv")).unwrap();
    assert!(matches.starts_with(
        "i,n,E_i_over_c2,E_pred_over_c2,N_p_pred,N_p_detected,E_detected_over_c2,gap_over_c2\n"
    ));
    assert_manifest_digests(dir.path(), "manifest_peaks.json");
    assert_manifest_digests(dir.path(), "manifest.json");
}

#[test]
fn sweep_writes_one_directory_per_width() {
    let dir = tempfile::tempdir().unwrap();
    let out = sauter(&[
        "sweep", "--out", path(dir.path()), "--Nz", "32", "--Nt", "200", "--W2-values", "0.15,0.6",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().collect();
    assert_eq!(rows[0], "W2_over_lambda_e,N_final,status");
    assert_eq!(rows.len(), 3);
    assert!(rows[1..].iter().all(|r| r.ends_with(",ok")), "{summary}");
    for sub in ["W2_0.15le", "W2_0.6le"] {
        assert_manifest_digests(&dir.path().join(sub), "manifest.json");
    }
}
