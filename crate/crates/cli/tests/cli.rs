use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_buhmann")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("buhmann-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn rows(s: &str) -> Vec<Vec<f64>> {
    s.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn eval_askey() {
    let o = run(&["eval", "askey:mu=2", "--grid", "0:1:3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("x,value\n"));
    assert!(!s.contains('\r'));
    assert_eq!(rows(&s), vec![vec![0.0, 1.0], vec![0.5, 0.25], vec![1.0, 0.0]]);
}

#[test]
fn eval_default_grid_covers_support() {
    let o = run(&["eval", "wendland:mu=3,k=1", "--normalize"]);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 256);
    assert_eq!(r[0], vec![0.0, 1.0]);
    assert_eq!(r[255], vec![1.0, 0.0]);
}

#[test]
fn bad_specs_name_the_field() {
    let o = run(&["eval", "h:mu=2"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("nu"));
    let o = run(&["eval", "gauss:s=1"]);
    assert!(!o.status.success());
}

#[test]
fn certify_exit_codes() {
    assert_eq!(
        run(&["certify", "--mu", "4", "--nu", "1", "--eps", "1"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["certify", "--mu", "10", "--nu", "1", "--eps", "0.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["certify", "--m", "2", "--mu", "4.4", "--nu", "1", "--eps", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["certify", "--mu", "3", "--nu", "1", "--eps", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["certify", "--mu", "4", "--nu", "0.2", "--eps", "1"])
            .status
            .code(),
        Some(3)
    );
    let o = run(&["certify", "--mu", "3", "--nu", "1", "--eps", "1.5", "--numeric"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn certify_fixed_scale_and_gram() {
    let o = run(&[
        "certify",
        "--mu",
        "4",
        "--nu",
        "1",
        "--eps",
        "1",
        "--a",
        "1.3333333333333333",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&[
        "certify", "--m", "2", "--mu", "4.5", "--nu", "1", "--eps", "1", "--gram", "60",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("gram-eigen"));
}

#[test]
fn spectrum_cross_check() {
    let o = run(&[
        "spectrum",
        "h:mu=3,nu=1",
        "--m",
        "2",
        "--grid",
        "0:40:41",
        "--check-cross",
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 42);
    let v: Vec<f64> = s
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((v[1] - v[2]).abs() <= 1e-12 * v[1].abs());
}

#[test]
fn spectrum_closed_needs_h_structure() {
    let o = run(&["spectrum", "buhmann:delta=2,mu=2,nu=1,alpha=1", "--backend", "closed"]);
    assert!(!o.status.success());
    let o = run(&["spectrum", "buhmann:delta=2,mu=2,nu=1,alpha=1", "--grid", "0:10:5"]);
    assert!(o.status.success());
}

#[test]
fn smoothness_reports() {
    let o = run(&["smoothness", "--mu", "3", "--nu", "1", "--eps", "0.5", "--estimate"]);
    let s = stdout(&o);
    assert!(s.contains("predicted: 0") && s.contains("estimated: 0"), "{s}");
    let o = run(&["smoothness", "--mu", "2", "--nu", "2", "--eps", "3"]);
    let s = stdout(&o);
    assert!(s.contains("predicted: inf") && s.contains("degree"), "{s}");
    assert!(s.contains('4'), "{s}");
    assert!(!run(&["smoothness", "--mu", "3", "--nu", "1.5", "--eps", "2"])
        .status
        .success());
}

#[test]
fn table1_rows() {
    let o = run(&["table1"]);
    let s = stdout(&o);
    let after: Vec<&str> = s.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(after, vec!["2", "4", "6"]);
}

#[test]
fn figure1_files_are_deterministic() {
    let prefix = scratch("fig");
    let p = prefix.to_str().unwrap();
    assert!(run(&["figure1", "--out-prefix", p]).status.success());
    let first = std::fs::read_to_string(format!("{p}_k1.csv")).unwrap();
    assert!(run(&["--sequential", "figure1", "--out-prefix", p]).status.success());
    assert_eq!(first, std::fs::read_to_string(format!("{p}_k1.csv")).unwrap());
    let r = rows(&first);
    assert_eq!(r.len(), 512);
    assert_eq!(r[0][1..], [1.0, 1.0, 1.0]);
    assert!(r.iter().all(|row| row[3] >= -1e-14));
    let long = stdout(&run(&["figure1"]));
    assert_eq!(long.lines().count(), 1 + 3 * 512);
}

#[test]
fn interp_reproduces_data() {
    let pts = scratch("pts.csv");
    std::fs::write(&pts, "x1,x2,value\n0,0,1\n0.4,0.1,2\n1,1,-1\n0.2,0.7,0.5\n").unwrap();
    let q = scratch("q.csv");
    std::fs::write(&q, "x1,x2\n0,0\n0.4,0.1\n1,1\n0.2,0.7\n").unwrap();
    let o = run(&[
        "interp",
        pts.to_str().unwrap(),
        "wendland:mu=3,k=1",
        "--predict",
        q.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let vals: Vec<f64> = rows(&stdout(&o)).iter().map(|r| *r.last().unwrap()).collect();
    for (a, b) in vals.iter().zip([1.0, 2.0, -1.0, 0.5]) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn interp_guards() {
    let pts = scratch("guard.csv");
    std::fs::write(&pts, "x1,value\n0,1\n0.5,2\n").unwrap();
    let p = pts.to_str().unwrap();
    assert!(!run(&["interp", p, "diff:mu=4.5,nu=1,eps=1,b1=1,b2=1"]).status.success());
    assert!(!run(&["interp", p, "diff:mu=2,nu=1,eps=0.5,b1=0.75,b2=1"])
        .status
        .success());
    assert!(run(&["interp", p, "diff:mu=4.5,nu=1,eps=1,b1=0.75,b2=1"])
        .status
        .success());
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.lines().all(|l| l.starts_with("[PASS]")), "{s}");
}

#[test]
fn tolerance_override_is_accepted() {
    let o = Command::new(env!("CARGO_BIN_EXE_buhmann"))
        .args(["eval", "h:mu=2.5,nu=1.5", "--grid", "0:1:5"])
        .env("BUHMANN_TOL", "1e-9")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn malformed_tolerance_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_buhmann"))
        .args(["eval", "askey:mu=2"])
        .env("BUHMANN_TOL", "abc")
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("BUHMANN_TOL"));
}
