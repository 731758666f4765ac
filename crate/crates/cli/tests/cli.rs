use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nervecov"));
    c.env_remove("NERVECOV_WORKERS");
    c
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data lines (header row included), without comments.
fn data(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

fn column(rows: &[String], method: &str, col: usize) -> f64 {
    rows.iter()
        .find(|r| r.starts_with(&format!("{method},")))
        .unwrap_or_else(|| panic!("no {method} row in {rows:?}"))
        .split(',')
        .nth(col)
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn enumerate_lists_dedekind_many_complexes() {
    let o = run(&["enumerate", "--n", "4"]);
    assert!(o.status.success());
    let rows = data(&o);
    assert_eq!(rows[0], "index,subcomplex,faces,euler_char");
    assert_eq!(rows.len() - 1, 168);
    let text = stdout(&o);
    assert!(text.starts_with("# nervecov "));
    assert!(text.contains("# config: n=4"));
    assert!(text.contains("# wall_time_s: "));
}

#[test]
fn enumerate_dumps_coefficients() {
    let o = run(&["enumerate", "--n", "3", "--coefficients", "chi", "--k", "2"]);
    assert!(o.status.success());
    let rows = data(&o);
    assert_eq!(rows[0], "subcomplex,k,coefficient");
    assert!(rows.contains(&"1+2+12,2,-3".to_string()));
    assert!(rows.contains(&"1+2+3+12+13+23+123,2,1".to_string()));
    assert_eq!(run(&["enumerate", "--n", "3", "--coefficients", "g"]).status.code(), Some(1));
}

#[test]
fn stevens_grid_has_six_rows() {
    let o = run(&["stevens", "--n", "3", "--alpha-grid", "0.2:0.45:0.05"]);
    assert!(o.status.success());
    let rows = data(&o);
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0], "alpha,n,coverage,gap_0,gap_1,gap_2,gap_3");
    let last: Vec<f64> = rows[6].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 0.45);
    assert!((last[2] - 0.1225).abs() < 1e-12);
}

#[test]
fn coverage_on_circle_matches_three_arc_value() {
    let o = run(&[
        "coverage", "--graph", "circle", "--n", "3", "--eps", "0.2", "--mode", "all", "--trials", "1e5", "--seed", "7",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data(&o);
    assert_eq!(rows[0], "method,probability,stderr,samples,rejections");
    assert!((column(&rows, "exact_pipeline", 1) - 0.04).abs() < 1e-10);
    assert!((column(&rows, "stevens", 1) - 0.04).abs() < 1e-12);
    let mc = column(&rows, "mc_oracle", 1);
    let se = column(&rows, "mc_oracle", 2);
    assert!((mc - 0.04).abs() < 3.0 * se);
    assert!((column(&rows, "mc_pipeline", 1) - mc).abs() < 1e-9);
    let text = stdout(&o);
    assert!(text.contains("# seed: 7") && text.contains("# workers: 1"));
}

#[test]
fn coverage_from_p_vector_file_and_distribution_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("dist.csv");
    let o = run(&[
        "coverage",
        "--graph",
        &fixture("circle.graph"),
        "--n",
        "3",
        "--eps",
        "0.2",
        "--mode",
        "exact-from-p",
        "--p-vector",
        &fixture("three_arc_0.4.csv"),
        "--distribution-output",
        dist.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((column(&data(&o), "exact_pipeline", 1) - 0.04).abs() < 1e-10);
    let dump = std::fs::read_to_string(&dist).unwrap();
    let rows: Vec<&str> = dump.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "method,value,probability");
    assert_eq!(rows.len(), 5);
}

#[test]
fn interval_needs_pairs_for_exact_mode() {
    let o = run(&["coverage", "--graph", "interval", "--n", "3", "--eps", "0.2", "--mode", "exact-from-p"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error,config,1,"), "{err}");
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |p: &PathBuf| {
        vec![
            "--no-wall-time".to_string(),
            "--output".into(),
            p.display().to_string(),
            "mc".into(),
            "--graph".into(),
            fixture("theta.graph"),
            "--n".into(),
            "4".into(),
            "--eps".into(),
            "0.3".into(),
            "--trials".into(),
            "20000".into(),
            "--seed".into(),
            "11".into(),
            "--workers".into(),
            "3".into(),
        ]
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(bin().args(args(&a)).status().unwrap().success());
    assert!(bin().args(args(&b)).status().unwrap().success());
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert!(text.contains("# workers: 3") && text.contains("# seed: 11"));
}

#[test]
fn wall_time_is_the_only_varying_line() {
    let args = ["mc", "--graph", "circle", "--n", "3", "--eps", "0.1", "--trials", "5000", "--seed", "3"];
    let strip = |o: &Output| -> Vec<String> {
        stdout(o).lines().filter(|l| !l.starts_with("# wall_time_s")).map(String::from).collect()
    };
    assert_eq!(strip(&run(&args)), strip(&run(&args)));
}

#[test]
fn worker_count_comes_from_environment() {
    let o = bin()
        .env("NERVECOV_WORKERS", "2")
        .args(["mc", "--graph", "circle", "--n", "2", "--eps", "0.1", "--trials", "1000"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("# workers: 2"));
}

#[test]
fn mc_dumps_first_realization() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("real.csv");
    let o = run(&[
        "mc",
        "--graph",
        "theta",
        "--n",
        "3",
        "--eps",
        "0.1",
        "--trials",
        "100",
        "--dump-realization",
        dump.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dump).unwrap();
    assert!(text.starts_with("ball,edge,interval_start,interval_end\n"));
    assert!(text.lines().count() >= 4);
}

#[test]
fn graph_files_are_validated() {
    let o = run(&["mc", "--graph", &fixture("bad_length.graph"), "--n", "2", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
    let o = run(&["mc", "--graph", &fixture("disconnected.graph"), "--n", "2", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["mc", "--graph", "nowhere.graph", "--n", "2", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn chi_dist_of_theta_graph_starts_at_minus_one() {
    let o = run(&["chi-dist", "--graph", &fixture("theta.graph"), "--n", "3", "--eps", "0.2", "--trials", "2000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data(&o);
    assert_eq!(rows[0], "value,probability_direct,probability_moments");
    assert!(rows[1].starts_with("-1,"));
    assert_eq!(rows.len(), 6);
}

#[test]
fn chi_dist_from_file() {
    let o = run(&["chi-dist", "--input", &fixture("three_arc_0.4.csv"), "--form", "cumulative", "--n", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data(&o);
    let p0: Vec<f64> = rows[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(p0[0], 0.0);
    assert!((p0[2] - 0.04).abs() < 1e-10);
}

#[test]
fn bound_from_mean() {
    let o = run(&["bound", "--graph", "circle", "--n", "3", "--mean", "1.92"]);
    assert!(o.status.success());
    let rows = data(&o);
    let b: f64 = rows[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((b - (-1.92f64 * 1.92 / 24.0).exp()).abs() < 1e-12);
    let o = run(&["bound", "--graph", "interval", "--n", "3", "--mean", "-2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes_for_configuration_errors() {
    assert_eq!(run(&["coverage", "--graph", "circle", "--n", "3", "--eps", "0.3"]).status.code(), Some(1));
    assert_eq!(run(&["enumerate", "--n", "7"]).status.code(), Some(1));
    assert_eq!(run(&["mc", "--graph", "circle", "--n", "3", "--eps", "0.1", "--trials", "0"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn io_failure_exits_with_three() {
    let o = run(&["--output", "/nonexistent-dir/x.csv", "enumerate", "--n", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn inconsistent_law_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "subcomplex,value\nvoid,1\n1,0.2\n1+2+12,0.5\n").unwrap();
    let o = run(&["chi-dist", "--input", p.to_str().unwrap(), "--form", "cumulative", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}
