use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vamrate"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn vamrate(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn column(csv_path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(csv_path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

const EXAMPLE2: &str = r#"
[operator]
kind = "scaled_identity"
dim = 2
c = 1.0

[contraction]
kind = "affine"
alpha = 0.5

[schedule]
preset = "example2"
e_star = [1.0, 0.0]

[run]
horizon = 5000
k_max = 10
ms = [0, 4]
"#;

/// α = 0 and K = 1: `f ≡ 0`, `x0` inside the unit ball.
const EXAMPLE1: &str = r#"
[operator]
kind = "l1"
dim = 3
weight = 0.2

[schedule]
preset = "example1"
lambda = 1.0

[run]
horizon = 2000
k_max = 8
x0 = [0.5, -0.5, 0.25]
"#;

#[test]
fn run_writes_trace_with_one_row_per_iterate() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", EXAMPLE2);
    let out = tmp.path().join("out");
    let o = vamrate(&["run", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(out.join("trace.csv")).unwrap();
    assert_eq!(r.headers().unwrap().len(), 7);
    assert_eq!(r.records().count(), 5001);
    assert!(out.join("config.toml").exists());
}

#[test]
fn shortest_horizon_runs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", &EXAMPLE2.replace("horizon = 5000", "horizon = 10"));
    let out = tmp.path().join("out");
    let o = vamrate(&["run", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let mut r = csv::Reader::from_path(out.join("trace.csv")).unwrap();
    assert_eq!(r.records().count(), 11);
}

#[test]
fn configuration_errors_exit_with_2() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let cases = [
        ("lambda.toml", EXAMPLE1.replace("lambda = 1.0", "lambda = 0.0")),
        ("horizon.toml", EXAMPLE2.replace("horizon = 5000", "horizon = 9")),
        ("key.toml", EXAMPLE2.replace("k_max = 10", "k_max = 10\nbogus = 1")),
        ("dim.toml", EXAMPLE2.replace("e_star = [1.0, 0.0]", "e_star = [1.0]")),
    ];
    for (name, text) in cases {
        let cfg = write_config(tmp.path(), name, &text);
        let o = vamrate(&["run", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = vamrate(&["run", tmp.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn certify_first_family_table() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", EXAMPLE1);
    let out = tmp.path().join("out");
    let o = vamrate(&["certify", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let phi0 = column(&out.join("certificates/phi0.csv"), "modulus_value");
    let expected: Vec<String> = (0..=8u64).map(|k| (4 * k + 2).to_string()).collect();
    assert_eq!(phi0, expected);
    let psi0 = column(&out.join("certificates/psi0.csv"), "modulus_value");
    assert_eq!(psi0[0], "6");
    let provenance = fs::read_to_string(out.join("certificates/provenance.txt")).unwrap();
    assert!(provenance.contains("phi0"));
}

#[test]
fn certify_second_family_theta0() {
    let tmp = TempDir::new().unwrap();
    let text = r#"
[operator]
kind = "scaled_identity"
dim = 1
c = 1.0

[schedule]
preset = "example2"
e_star = [0.0]

[run]
horizon = 100
k_max = 5
x0 = [1.0]
ms = [3]
"#;
    let cfg = write_config(tmp.path(), "c.toml", text);
    let out = tmp.path().join("out");
    let o = vamrate(&["certify", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let theta0 = column(&out.join("certificates/theta0_m3.csv"), "modulus_value");
    let expected: Vec<String> = (0..=5u64).map(|k| (36 * k + 34).to_string()).collect();
    assert_eq!(theta0, expected);
}

#[test]
fn missing_moduli_is_a_configuration_error() {
    let tmp = TempDir::new().unwrap();
    let text = r#"
[operator]
kind = "box"
dim = 2
lo = -1.0
hi = 1.0

[schedule]
preset = "custom"
moduli = "none"
"#;
    let cfg = write_config(tmp.path(), "c.toml", text);
    let o = vamrate(&["certify", cfg.to_str().unwrap(), "--output-dir", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no modulus"));
}

#[test]
fn verify_passes_on_the_second_family() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", EXAMPLE2);
    let out = tmp.path().join("out");
    let o = vamrate(&["verify", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let status = column(&out.join("reports/phi0.csv"), "status");
    assert_eq!(status.len(), 11);
    assert!(status.iter().all(|s| s == "pass"));
    assert!(out.join("reports/comparison-successive.csv").exists());
    assert!(out.join("reports/summary.txt").exists());
}

#[test]
fn shrunken_certificates_fail_verification() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", &EXAMPLE2.replace("ms = [0, 4]", "ms = [0, 4]\nshrink = 2500"));
    let out = tmp.path().join("out");
    let o = vamrate(&["verify", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let status = column(&out.join("reports/phi0-shrunk2500.csv"), "status");
    assert!(status.iter().any(|s| s == "fail"));
}

#[test]
fn harmonic_errors_are_a_precondition_violation() {
    let tmp = TempDir::new().unwrap();
    let text = r#"
[operator]
kind = "scaled_identity"
dim = 2
c = 1.0

[schedule]
preset = "custom"
alpha_p = 0.7
errors = "harmonic"

[run]
horizon = 2000
"#;
    let cfg = write_config(tmp.path(), "c.toml", text);
    let out = tmp.path().join("out");
    let o = vamrate(&["verify", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let summary = fs::read_to_string(out.join("reports/summary.txt")).unwrap();
    assert!(summary.contains("errors-summable"), "{summary}");
}

#[test]
fn starting_at_the_zero_gives_empirical_index_zero() {
    let tmp = TempDir::new().unwrap();
    let text = r#"
[operator]
kind = "scaled_identity"
dim = 2
c = 2.0

[schedule]
preset = "example1"

[run]
horizon = 50
k_max = 5
x0 = [0.0, 0.0]
"#;
    let cfg = write_config(tmp.path(), "c.toml", text);
    let out = tmp.path().join("out");
    let o = vamrate(&["verify", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["phi0", "psi0"] {
        let emp = column(&out.join(format!("reports/{name}.csv")), "empirical");
        assert!(emp.iter().all(|e| e == "0"), "{name}: {emp:?}");
    }
}

#[test]
fn outputs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let text = EXAMPLE2
        .replace("kind = \"scaled_identity\"\ndim = 2\nc = 1.0", "kind = \"linear\"\nspectrum = [0.0, 2.0]")
        .replace("horizon = 5000", "horizon = 500\nseed = 7");
    let cfg = write_config(tmp.path(), "c.toml", &text);
    let mut contents = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let o = vamrate(&["verify", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        let files = ["trace.csv", "reports/phi0.csv", "certificates/theta0_m4.csv", "reports/summary.txt"];
        contents.push(files.map(|f| fs::read(out.join(f)).unwrap()));
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn seeds_run_separately_and_report_merges() {
    let tmp = TempDir::new().unwrap();
    let text = EXAMPLE2.replace("horizon = 5000", "horizon = 300");
    let cfg = write_config(tmp.path(), "c.toml", &text);
    let out = tmp.path().join("out");
    let o = vamrate(&["verify", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap(), "--seeds", "1,2,3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let traces: Vec<Vec<u8>> = [1, 2, 3]
        .iter()
        .map(|s| fs::read(out.join(format!("seed-{s}/trace.csv"))).unwrap())
        .collect();
    assert_ne!(traces[0], traces[1]);
    let o = vamrate(&["report", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let runs = column(&out.join("summary.csv"), "run");
    for s in ["seed-1", "seed-2", "seed-3"] {
        assert!(runs.iter().any(|r| r == s));
    }
    let fails = column(&out.join("summary.csv"), "fail");
    assert!(fails.iter().all(|f| f == "0"));
}

#[test]
fn report_without_reports_is_an_error() {
    let tmp = TempDir::new().unwrap();
    let o = vamrate(&["report", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn shipped_configs_certify() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = TempDir::new().unwrap();
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = tmp.path().join(path.file_stem().unwrap());
        let o = vamrate(&["certify", path.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        seen += 1;
    }
    assert!(seen >= 4);
}
