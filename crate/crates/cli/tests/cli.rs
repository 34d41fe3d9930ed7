use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
seed = 3
layout = "rectangle"
repetitions = 1
tflo_points = 4
resamples = 50
params = [0.4, 0.5, 0.2]

[lattice]
lx = 1
ly = 4
u = 4.0

[shots]
per_eval = 100
final_state = 2000
tflo_closest = 2000
tflo_training = 500
"#;

fn fhvqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fhvqe")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "dimer.toml", "[lattice]\nlx = 1\nly = 2\nu = 4.0\n");
    let o = fhvqe(&["exact", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("N_occ,E_exact,E_vqe_depth_1,E_slater"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    let e2: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((e2 + 0.828427).abs() < 1e-6);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fhvqe(&["exact", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.toml", "layers = \"many\"\n");
    assert_eq!(fhvqe(&["exact", "--config", &bad]).status.code(), Some(2));
    let small = write(dir.path(), "small.toml", SMALL);
    let o = fhvqe(&["measure", "--config", &small, "--noise", "loud"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("loud"));
    assert_eq!(fhvqe(&["measure", "--bogus"]).status.code(), Some(2));
}

#[test]
fn oversized_lattice_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "big.toml", "[lattice]\nlx = 1\nly = 17\nu = 4.0\n");
    assert_eq!(fhvqe(&["vqe", "--config", &cfg]).status.code(), Some(3));
}

#[test]
fn empty_postselection_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let text = "params = [0.1, 0.1, 0.1]\nnoise = { readout_01 = 1.0 }\n[lattice]\nlx = 1\nly = 2\nu = 4.0\n";
    let cfg = write(dir.path(), "flip.toml", text);
    let o = fhvqe(&["measure", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N_occ 2"));
}

#[test]
fn dump_circuit_lists_measurement_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = fhvqe(&["vqe", "--config", &cfg, "--dump-circuit"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("# N_occ 4 group")).count(), 3);
}

#[test]
fn measure_then_stats_and_mitigate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let results = dir.path().join("r.json");
    let r = results.to_str().unwrap();
    let o = fhvqe(&["measure", "--config", &cfg, "--noise", "depolarizing", "--seed", "9", "--out", r]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json = fs::read_to_string(&results).unwrap();
    assert!(json.contains("\"schema_version\": 1"));
    assert!(json.contains("\"seed\": 9"));

    let s = fhvqe(&["stats", r]);
    assert_eq!(s.status.code(), Some(0));
    assert!(stdout(&s).contains("PHS"));

    let m = fhvqe(&["mitigate", r]);
    assert_eq!(m.status.code(), Some(0));
    let csv = stdout(&m);
    assert!(csv.starts_with("n_occ,stage,value,stderr\n"));
    assert_eq!(csv.lines().count(), 6);

    assert_eq!(fhvqe(&["mitigate", r, "--seed", "1"]).status.code(), Some(2));
    let junk = write(dir.path(), "junk.json", "{}");
    assert_eq!(fhvqe(&["stats", &junk]).status.code(), Some(2));
}

#[test]
fn seeded_measure_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let a = fhvqe(&["measure", "--config", &cfg, "--noise", "hardware"]);
    let b = fhvqe(&["measure", "--config", &cfg, "--noise", "hardware"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn compare_optimizers_csv() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[compare]\noptimizers = [\"bayesmgd\", \"spsa\"]\netas = [0.7]\nruns = 2\niterations = 3\nn_params = 3\n";
    let cfg = write(dir.path(), "cmp.toml", text);
    let o = fhvqe(&["compare-optimizers", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("optimizer,eta,seed,iter,evals,exact,predicted,stderr\n"));
    assert_eq!(out.lines().count(), 1 + 2 * 2 * 3);
}
