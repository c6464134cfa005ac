//! End-to-end runs of the `coupled-chains` binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coupled-chains"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const FREE_16: &str = r#"
command = "verify"
[potential]
family = "constant"
value = 0.0
[lattice]
n = 16
m = 16
"#;

#[test]
fn verify_on_free_lattice_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FREE_16);
    let o = run(dir.path(), &["--config", &cfg, "--out", "v"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("v/verify.json")).unwrap())
            .unwrap();
    assert!(report["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
command = "lyapunov"
seed = 11
[potential]
family = "random_iid"
width = 2.0
[lyapunov]
length = 20000
energies = 6
sample_size = 64
"#,
    );
    let one = run(
        dir.path(),
        &["--config", &cfg, "--out", "a", "--threads", "1"],
    );
    let four = run(
        dir.path(),
        &["--config", &cfg, "--out", "b", "--threads", "4"],
    );
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(four.status.code(), Some(0), "{}", stderr(&four));
    let a = std::fs::read(dir.path().join("a/lyapunov.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/lyapunov.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);

    let cfg = write_config(dir.path(), FREE_16);
    for out in ["c", "d"] {
        assert_eq!(
            run(dir.path(), &["spectrum", "--config", &cfg, "--out", out])
                .status
                .code(),
            Some(0)
        );
    }
    for file in ["spectrum.json", "measure_n.csv", "eigenvalues_m.csv"] {
        let c = std::fs::read(dir.path().join("c").join(file)).unwrap();
        let d = std::fs::read(dir.path().join("d").join(file)).unwrap();
        assert_eq!(c, d, "{file}");
    }
}

#[test]
fn invalid_value_exits_one_and_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[lattice]\nn = 0\n");
    let o = run(dir.path(), &["--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lattice.n"), "{}", stderr(&o));

    let cfg = write_config(dir.path(), "[time]\nsampels = 3\n");
    let o = run(dir.path(), &["--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("time"), "{}", stderr(&o));
}

#[test]
fn missing_config_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--config", "does/not/exist.toml"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn failed_invariant_exits_two_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{FREE_16}[tolerances]\nconservation = 1e-300\n"),
    );
    let o = run(dir.path(), &["--config", &cfg, "--out", "v"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("norm_conservation"), "{}", stderr(&o));
}

#[test]
fn free_chain_preset_decay_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--preset", "free-chain-decay", "--out", "f"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fit: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("f/decay_fit.json")).unwrap(),
    )
    .unwrap();
    let p = fit["exponent"].as_f64().unwrap();
    assert!((-0.40..=-0.28).contains(&p), "exponent {p}");
}

#[test]
fn print_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["--preset", "coupled-decay", "--print-config", "--N", "32"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("n = 32"));
    let cfg = write_config(dir.path(), &text);
    let again = run(dir.path(), &["--config", &cfg, "--print-config"]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}
