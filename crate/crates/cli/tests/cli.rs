use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_anderson-chaos");

fn run(cmd: &str, config: &str, out: &Path, extra: &[&str]) -> (i32, String) {
    let cfg = out.join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    let o = Command::new(BIN)
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap();
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stderr).into_owned())
}

const BOUNDS: &str = r#"
equation = "heat"
[noise]
regime = "regular"
h0 = 0.75
thetas = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
"#;

const SIMULATE: &str = r#"
equation = "heat"
[noise]
regime = "regular"
h0 = 0.75
thetas = [0.5, 0.6]
[points]
t = [0.5, 1.0]
x = [0.0, 0.25]
[lattice]
half_tau = 16
half_xi = 16
time_steps = 32
[ensemble]
seeds = 20
m = 2
"#;

#[test]
fn bounds_table_has_one_row_per_theta_and_a_header_comment() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run("bounds", BOUNDS, dir.path(), &[]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with(&format!("# anderson-chaos v{} config-hash=", env!("CARGO_PKG_VERSION"))));
    assert_eq!(lines.len(), 2 + 7);
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let (iv, ib) = (headers.iter().position(|h| h == "k_value").unwrap(), headers.iter().position(|h| h == "k_bound").unwrap());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        assert!(rec[iv].parse::<f64>().unwrap() <= rec[ib].parse::<f64>().unwrap());
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "ok");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run("bounds", &format!("{BOUNDS}\ntypo = 1\n"), dir.path(), &[]);
    assert_eq!(code, 2);
    let (code, _) = run("bounds", &BOUNDS.replace("0.9]", "1.9]"), dir.path(), &[]);
    assert_eq!(code, 2);
    let (code, _) = run("gap", BOUNDS, dir.path(), &[]);
    assert_eq!(code, 2, "gap needs a target");
    let (code, _) = run("simulate", SIMULATE, dir.path(), &["--threads", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn numerical_failure_exits_with_three_and_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    // wave chaos of order two has no quadrature backend
    let cfg = r#"
equation = "wave"
[noise]
regime = "regular"
h0 = 0.75
target = 0.5
thetas = [0.75, 0.625]
[quadrature]
orders = [1, 2]
"#;
    let (code, err) = run("gap", cfg, dir.path(), &[]);
    assert_eq!(code, 3, "{err}");
    let text = std::fs::read_to_string(dir.path().join("gap.csv")).unwrap();
    assert_eq!(text.lines().count(), 2 + 2, "the first-order rows are written");
    let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("numerical-failure"));
}

#[test]
fn simulate_is_byte_identical_across_runs_and_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run("simulate", SIMULATE, a.path(), &["--threads", "1"]).0, 0);
    assert_eq!(run("simulate", SIMULATE, b.path(), &["--threads", "3"]).0, 0);
    let x = std::fs::read(a.path().join("simulate.csv")).unwrap();
    let y = std::fs::read(b.path().join("simulate.csv")).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "seed,theta,t,x,value");
    assert_eq!(text.lines().count(), 2 + 20 * 2 * 4);
}

#[test]
fn seed_offset_changes_samples_and_the_hash() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run("simulate", SIMULATE, a.path(), &[]).0, 0);
    assert_eq!(run("simulate", SIMULATE, b.path(), &["--seed-offset", "7"]).0, 0);
    let x = std::fs::read_to_string(a.path().join("simulate.csv")).unwrap();
    let y = std::fs::read_to_string(b.path().join("simulate.csv")).unwrap();
    assert_ne!(x.lines().next(), y.lines().next());
    assert!(y.lines().nth(2).unwrap().starts_with("7,"));
}

#[test]
fn zero_truncation_gives_unit_field_and_na_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SIMULATE.replace("m = 2", "m = 0");
    assert_eq!(run("simulate", &cfg, dir.path(), &[]).0, 0);
    let text = std::fs::read_to_string(dir.path().join("simulate.csv")).unwrap();
    assert!(text.lines().skip(2).all(|l| l.ends_with(",1")));

    let holder = r#"
equation = "heat"
[noise]
regime = "regular"
h0 = 0.75
thetas = [0.4]
[lattice]
half_tau = 16
half_xi = 16
time_steps = 32
[ensemble]
seeds = 10
m = 0
[holder]
direction = "space"
start = 0.0
step = 0.1
count = 5
exponent = 0.8
"#;
    let (code, err) = run("holder", holder, dir.path(), &[]);
    assert_eq!(code, 0, "{err}");
    let slopes = std::fs::read_to_string(dir.path().join("holder_slopes.csv")).unwrap();
    assert!(slopes.lines().skip(2).all(|l| l.contains(",NA,")), "{slopes}");
}
