use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projends")).args(args).output().expect("binary runs")
}

fn dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn s(p: &std::path::Path) -> String {
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report.lines().find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
}

fn construct(d: &std::path::Path, family: &str, params: &str) -> PathBuf {
    let p = d.join(format!("{family}.params"));
    std::fs::write(&p, params).unwrap();
    let out = d.join(format!("{family}.scene"));
    let o = bin(&["construct", "--family", family, "--params", &s(&p), "--out", &s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn cusp_classifies_as_cusp() {
    let d = dir("cusp");
    let scene = construct(&d, "cusp", "n: 3\n");
    let text = std::fs::read_to_string(&scene).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("generator:")).count(), 2);
    let o = bin(&["classify", &s(&scene)]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout(&o);
    assert_eq!(value(&r, "trichotomy"), Some("CA"));
    assert_eq!(value(&r, "shape"), Some("cusp"));
    assert_eq!(value(&r, "mec.weak"), Some("pass"));
}

#[test]
fn quasi_join_round_trip() {
    let d = dir("qj");
    let scene = construct(&d, "quasijoin", "n: 4\ni0: 1\nkappa: 0.5\n");
    let report = d.join("qj.report");
    let o = bin(&["classify", &s(&scene), "--ball-length", "4", "--report", &s(&report)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r = std::fs::read_to_string(&report).unwrap();
    assert_eq!(value(&r, "trichotomy"), Some("NPCC"));
    assert_eq!(value(&r, "fiber_dimension"), Some("1"));
    assert_eq!(value(&r, "shape"), Some("quasi-join"));
}

#[test]
fn empty_generator_list_is_an_error() {
    let d = dir("empty");
    let scene = d.join("empty.scene");
    std::fs::write(&scene, "version: 1\nn: 2\nvertex: 0 0 1\nsample: 1 0 1\n").unwrap();
    let o = bin(&["classify", &s(&scene)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn unknown_parameter_is_rejected() {
    let d = dir("unknown");
    let p = d.join("bad.params");
    std::fs::write(&p, "n: 3\nwidth: 2\n").unwrap();
    let o = bin(&["construct", "--family", "cusp", "--params", &s(&p), "--out", &s(&d.join("x.scene"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("width"));
}

#[test]
fn zero_bend_matches_the_base_scene() {
    let d = dir("bend");
    let base = construct(&d, "hyperideal", "lambda: 2\nmu: 3\n");
    let bent = construct(&d, "bend", "base_lambda: 2\nbase_mu: 3\nlambda: 2\nkind: shear\nb: 0\n");
    let body = |p: &PathBuf| -> Vec<String> {
        std::fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with("meta.")).map(String::from).collect()
    };
    assert_eq!(body(&base), body(&bent));
}

#[test]
fn render_errors_exit_one() {
    let d = dir("render");
    let scene = construct(&d, "quasijoin", "n: 4\ni0: 1\n");
    let o = bin(&["render", &s(&scene), "--mode", "link", "--out", &s(&d.join("x.svg"))]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["render", &s(&scene), "--mode", "domain", "--out", &s(&d.join("x.svg"))]);
    assert_eq!(o.status.code(), Some(1));
    let scene = construct(&d, "quasijoin", "n: 3\ni0: 1\n");
    let out = d.join("ok.svg");
    let o = bin(&["render", &s(&scene), "--mode", "link", "--out", &s(&out)]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("<svg"));
}

#[test]
fn dual_and_hilbert() {
    let d = dir("dual");
    let sq = d.join("square.domain");
    std::fs::write(&sq, "version: 1\nkind: polyhedral\nn: 2\nray: 1 1 1\nray: 1 -1 1\nray: -1 -1 1\nray: -1 1 1\n").unwrap();
    let out = d.join("dual.domain");
    assert!(bin(&["dual", "--in", &s(&sq), "--out", &s(&out)]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("ray:")).count(), 4);

    let ball = d.join("ball.domain");
    std::fs::write(&ball, "version: 1\nkind: quadric\nn: 2\nform: 1 0 0 0 -1 0 0 0 -1\n").unwrap();
    let o = bin(&["hilbert", "--domain", &s(&ball), "--p", "1,0,0", "--q", "1,0.5,0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dist: f64 = stdout(&o).trim().parse().unwrap();
    assert!((dist - 3f64.ln()).abs() < 1e-9, "{dist}");
}

#[test]
fn bad_flags_exit_one_and_help_exits_zero() {
    assert_eq!(bin(&["classify"]).status.code(), Some(1));
    assert_eq!(bin(&["--threads", "0", "hilbert", "--domain", "x", "--p", "1", "--q", "1"]).status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}
