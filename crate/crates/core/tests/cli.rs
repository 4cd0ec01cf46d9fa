use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-sta"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dirac-sta-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// Header and numeric rows of a CSV body, comment lines dropped.
fn table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().expect("header").split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (header, rows) = table(text);
    let j = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[j]).collect()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn design_peak_rabi_frequencies() {
    let opt = max_abs(&column(&stdout(&run(&["design", "--kind", "optimal"])), "omega"));
    assert!((opt - 13.00).abs() < 0.01, "{opt}");
    let simple = max_abs(&column(&stdout(&run(&["design", "--kind", "simple"])), "omega"));
    assert!((simple - 13.05).abs() < 0.01, "{simple}");
    let pi = column(&stdout(&run(&["design", "--kind", "pi", "--tf", "2"])), "omega");
    assert!(pi.iter().all(|w| (w - PI / 2.0).abs() < 1e-12));
}

#[test]
fn csv_layout_is_comment_header_rows() {
    let text = stdout(&run(&["design", "--kind", "optimal", "--points", "11"]));
    assert!(text.lines().take_while(|l| l.starts_with('#')).any(|l| l == "# nu=0.643"));
    assert!(!text.contains('\r'));
    let (header, rows) = table(&text);
    assert_eq!(header, ["t", "omega", "delta"]);
    assert_eq!(rows.len(), 11);
}

#[test]
fn figure_one_has_zero_near_optimal_nu() {
    let dir = scratch("fig1");
    let out = run(&["figure", "1", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = read(&dir.join("fig1.csv"));
    let nu = column(&text, "nu");
    let qs = column(&text, "qs");
    let j = nu.iter().position(|v| (v - 0.643).abs() < 1e-9).unwrap();
    assert!(qs[j] < 1e-6, "{}", qs[j]);
    assert!(qs[0] > 0.1);
}

#[test]
fn figure_two_inverts() {
    let dir = scratch("fig2");
    assert!(run(&["figure", "2", "--out", dir.to_str().unwrap()]).status.success());
    let p2 = column(&read(&dir.join("fig2_populations.csv")), "p2");
    assert!(*p2.last().unwrap() >= 1.0 - 1e-6);
    assert!(p2[0].abs() < 1e-12);
}

#[test]
fn figure_seven_optimal_is_flatter() {
    let dir = scratch("fig7");
    assert!(run(&["figure", "7", "--out", dir.to_str().unwrap()]).status.success());
    let text = read(&dir.join("fig7.csv"));
    let p0 = column(&text, "p0");
    let opt = column(&text, "p2_optimal");
    let simple = column(&text, "p2_simple");
    for (j, p) in p0.iter().enumerate() {
        if p.abs() > 1e-9 && p.abs() <= 0.5 {
            assert!(opt[j] > simple[j], "p0={p}: {} vs {}", opt[j], simple[j]);
        }
    }
}

#[test]
fn find_nu_default_bracket() {
    let text = stdout(&run(&["find-nu"]));
    let nu: f64 = text.lines().find_map(|l| l.strip_prefix("nu=")).unwrap().parse().unwrap();
    assert!((nu - 0.643).abs() < 1e-3);
}

#[test]
fn find_nu_is_deterministic() {
    let a = stdout(&run(&["find-nu", "--tol", "1e-6"]));
    let b = stdout(&run(&["find-nu", "--tol", "1e-6"]));
    assert_eq!(a, b);
}

#[test]
fn find_nu_bad_bracket_exits_numerical() {
    let out = run(&["find-nu", "--lo", "0.1", "--hi", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sign change"));
}

#[test]
fn invalid_input_exits_one() {
    assert_eq!(run(&["design", "--tf", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["figure", "9"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn oracle_pi_pulse_report() {
    let out = run(&["oracle", "--kind", "pi"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    let text = if err.contains("ensemble") { err } else { String::from_utf8_lossy(&out.stdout).into_owned() };
    let p2: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("P2(t_f) momentum ensemble = "))
        .expect("ensemble line")
        .trim()
        .parse()
        .unwrap();
    assert!((p2 - 0.95697).abs() < 1e-5, "{p2}");
}

#[test]
fn oracle_optimal_succeeds() {
    let dir = scratch("oracle");
    let out = run(&["oracle", "--kind", "optimal", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let h = column(&read(&dir.join("oracle_h.csv")), "p2");
    let hu = column(&read(&dir.join("oracle_hu.csv")), "p2");
    assert!(h.iter().zip(&hu).all(|(a, b)| (a - b).abs() < 1e-5));
}

#[test]
fn oracle_small_box_exits_three() {
    let out = run(&["oracle", "--kind", "pi", "--length", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_and_flags_override() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "# protocol\nkind = pi\nt_f = 2\npoints = 5\n").unwrap();
    let from_file = stdout(&run(&["design", "--config", cfg.to_str().unwrap()]));
    let omega = column(&from_file, "omega");
    assert_eq!(omega.len(), 5);
    assert!(omega.iter().all(|w| (w - PI / 2.0).abs() < 1e-12));
    let overridden = stdout(&run(&["design", "--config", cfg.to_str().unwrap(), "--tf", "1"]));
    assert!(column(&overridden, "omega").iter().all(|w| (w - PI).abs() < 1e-12));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = scratch("repeat");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for p in [&a, &b] {
        assert!(run(&["momentum", "--points", "21", "--out", p.to_str().unwrap()]).status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn ion_schedule_columns() {
    let text = stdout(&run(&["ion", "--k", "2", "--mass", "1", "--points", "5"]));
    let (header, rows) = table(&text);
    assert_eq!(header, ["t", "omega_c", "omega_tilde_2"]);
    assert_eq!(rows.len(), 5);
    assert!(text.lines().any(|l| l.starts_with("# eta=")));
}
